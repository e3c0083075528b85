#include "codiffuse/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace codiffuse {

unsigned default_workers() {
    if (const char* env = std::getenv("CODIFFUSE_WORKERS"); env != nullptr && *env != '\0') {
        unsigned value = 0;
        const char* end = env + std::strlen(env);
        const auto res = std::from_chars(env, end, value);
        if (res.ec == std::errc{} && res.ptr == end && value > 0) return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace codiffuse
