#include "codiffuse/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace codiffuse::io {

std::string format_number(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
    std::string out(buf.data(), res.ptr);
    if (out == "-0") out = "0";
    return out;
}

void write_series_csv(std::ostream& out, const engine::CountsSeries& s) {
    out << "step,naive,a,b,ab\n";
    for (std::size_t t = 0; t < s.steps(); ++t) {
        out << (t + 1) << ',' << s.naive[t] << ',' << s.a[t] << ',' << s.b[t] << ',' << s.ab[t] << '\n';
    }
}

void write_series_csv(std::ostream& out, const engine::MeanSeries& s) {
    out << "step,naive,a,b,ab\n";
    for (std::size_t t = 0; t < s.steps(); ++t) {
        out << (t + 1) << ',' << format_number(s.naive[t]) << ',' << format_number(s.a[t]) << ','
            << format_number(s.b[t]) << ',' << format_number(s.ab[t]) << '\n';
    }
}

engine::CountsSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "step,naive,a,b,ab") {
        throw analysis::AnalysisError("time series must start with header 'step,naive,a,b,ab'");
    }
    engine::CountsSeries s;
    std::size_t expected = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<long long, 5> fields{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const auto res = std::from_chars(p, end, fields[f]);
            if (res.ec != std::errc{}) {
                throw analysis::AnalysisError("malformed time series line " + std::to_string(expected + 1) + ": '" +
                                              line + "'");
            }
            p = res.ptr;
            if (f + 1 < fields.size()) {
                if (p == end || *p != ',') throw analysis::AnalysisError("malformed time series line: '" + line + "'");
                ++p;
            }
        }
        if (p != end) throw analysis::AnalysisError("trailing data in time series line: '" + line + "'");
        if (fields[0] != static_cast<long long>(expected)) {
            throw analysis::AnalysisError("time series steps must run 1, 2, ...; got " + std::to_string(fields[0]));
        }
        s.push({static_cast<std::int32_t>(fields[1]), static_cast<std::int32_t>(fields[2]),
                static_cast<std::int32_t>(fields[3]), static_cast<std::int32_t>(fields[4]), 0});
        ++expected;
    }
    return s;
}

void write_heatmap_csv(std::ostream& out, const analysis::HeatmapTable& table) {
    out << "alpha,tau_a,tau_b,category,metric,value\n";
    for (const auto& row : table) {
        out << format_number(row.params.alpha) << ',' << format_number(row.params.tau_a) << ','
            << format_number(row.params.tau_b) << ',' << analysis::to_string(row.category) << ','
            << analysis::to_string(row.metric) << ',' << (row.value ? format_number(*row.value) : "NA") << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const meanfield::Trajectory& traj) {
    out << "t,x_a,x_b,x_ab,x_naive,x_r\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const auto& x = traj.x[i];
        out << format_number(traj.t[i]) << ',' << format_number(x.x_a) << ',' << format_number(x.x_b) << ','
            << format_number(x.x_ab) << ',' << format_number(x.x_naive) << ',' << format_number(x.x_r) << '\n';
    }
}

nlohmann::json to_json(const analysis::ModalityReport& report) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& [x, d] : report.grid) grid.push_back({x, d});
    return {
        {"bandwidth", report.bandwidth},
        {"bandwidth_rule", report.bandwidth_rule},
        {"prominence", report.prominence},
        {"mode_count", report.mode_count()},
        {"modes", report.modes},
        {"mode_weights", report.mode_weights},
        {"grid", std::move(grid)},
    };
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace codiffuse::io
