#pragma once

#include <array>
#include <cstdint>

#include "dstbc/linalg.hpp"

namespace dstbc {

// Philox 4x32-10 block function (Salmon et al., Random123). Pure function of
// (counter, key); the generator below never shares state between streams, so
// trial i of a Monte Carlo run produces the same draws no matter how trials
// are partitioned across worker threads.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// One random stream, identified by (seed, stream id). A simulation derives
// its stream id from the (power point, trial) pair, which makes every trial
// replayable in isolation.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    // Uniform on (0, 1].
    double next_uniform();
    // Standard normal, Box-Muller; values come in buffered pairs.
    double next_gaussian();
    // Circularly symmetric complex Gaussian, zero mean, unit total variance.
    Complex next_cscg();
    // Uniform integer in [0, n), unbiased via rejection. n must be in [1, 2^32].
    std::uint64_t next_below(std::uint64_t n);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace dstbc
