#include "kinetic/rng.hpp"

#include <cmath>
#include <numbers>

namespace kinetic {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

std::uint64_t hash_id(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

Stream::Stream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample)
    : seed_(seed), exp_(experiment), sample_(sample) {
    std::uint64_t k = splitmix(seed ^ splitmix(experiment));
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
}

void Stream::refill() {
    buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32),
                       std::uint32_t(sample_), std::uint32_t(sample_ >> 32)},
                      key_);
    ++block_;
    pos_ = 0;
}

std::uint32_t Stream::next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

double Stream::uniform() {
    std::uint64_t a = next_u32() >> 5, b = next_u32() >> 6;
    double u = (double(a) * 67108864.0 + double(b)) / 9007199254740992.0;
    return u == 0.0 ? 0x1p-54 : u;
}

double Stream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Stream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double th = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

} // namespace kinetic
