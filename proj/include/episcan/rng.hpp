#pragma once

#include <cstdint>
#include <random>

namespace episcan {

/// Which consumer a substream feeds. Values are part of the on-disk
/// reproducibility contract; never renumber.
enum class StreamRole : std::uint64_t {
    Innovations = 1,
    Calibration = 2,
    Heavy = 3,
    Auxiliary = 4,
};

/// Identifier of an independent random substream.
struct StreamId {
    std::uint64_t value = 0;
    friend bool operator==(StreamId, StreamId) = default;
};

/// Stable substream derivation: chained SplitMix64 finalisers over
/// (master_seed, replicate_index, role).
StreamId derive_stream(std::uint64_t master_seed, std::uint64_t replicate, StreamRole role) noexcept;

/// SplitMix64 finaliser, exposed for digests and tests.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Random source for one substream. The engine is the standard
/// mt19937_64; the variate transforms are implemented here so that output
/// does not depend on the standard library's distribution classes.
class Stream {
public:
    explicit Stream(StreamId id) : engine_(id.value) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (-1, 1).
    double uniform_signed() { return 2.0 * uniform_open() - 1.0; }

    /// Standard normal via the Marsaglia polar method.
    double normal();

    /// Bernoulli(prob).
    bool bernoulli(double prob) { return uniform_open() < prob; }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace episcan
