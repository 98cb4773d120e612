#include "dstbc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dstbc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) round_once(counter, key);
    return counter;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void Philox::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
    };
    buf_ = philox4x32(ctr, key_);
    ++block_;
    avail_ = 4;
}

std::uint32_t Philox::next_u32() {
    if (avail_ == 0) refill();
    return buf_[4 - avail_--];
}

double Philox::next_uniform() {
    return (static_cast<double>(next_u32()) + 1.0) * 0x1p-32;
}

double Philox::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = (static_cast<double>(next_u32()) + 0.5) * 0x1p-32;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

Complex Philox::next_cscg() {
    // Each real component has variance 1/2 so |z|^2 averages to one.
    const double re = next_gaussian();
    const double im = next_gaussian();
    return Complex{re, im} * std::numbers::sqrt2 / 2.0;
}

std::uint64_t Philox::next_below(std::uint64_t n) {
    if (n == 0 || n > (std::uint64_t{1} << 32))
        throw std::invalid_argument("next_below: n out of range");
    const std::uint64_t bound = ((std::uint64_t{1} << 32) / n) * n;
    for (;;) {
        const std::uint64_t x = next_u32();
        if (x < bound) return x % n;
    }
}

} // namespace dstbc
