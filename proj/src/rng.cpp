#include "episcan/rng.hpp"

#include <cmath>

namespace episcan {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

StreamId derive_stream(std::uint64_t master_seed, std::uint64_t replicate, StreamRole role) noexcept {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ mix64(replicate + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(role) * 0x85157af5ULL));
    return StreamId{h};
}

double Stream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = uniform_signed();
        v = uniform_signed();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * f;
    has_cached_ = true;
    return u * f;
}

}  // namespace episcan
