#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kinetic {

// Philox4x32-10 (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t hash_id(std::string_view s);

// Counter-based stream. The key is fixed by (seed, experiment id); the
// counter high words carry the sample index so sample i draws the same
// numbers regardless of how samples are scheduled.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample = 0);

    std::uint32_t next_u32();
    double uniform();             // (0, 1)
    double uniform(double a, double b);
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

    Stream substream(std::uint64_t sample) const { return Stream(seed_, exp_, sample); }

private:
    void refill();

    std::uint64_t seed_, exp_, sample_;
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace kinetic
