#pragma once

#include <cstddef>
#include <vector>

#include "dstbc/code.hpp"
#include "dstbc/linalg.hpp"
#include "dstbc/rng.hpp"

namespace dstbc {

// Total power P split between the source (P1 per channel use) and the R
// relays (P2 each per channel use); P = P1 + R*P2.
struct PowerConfig {
    double total = 0.0;
    double source = 0.0;    // P1
    double per_relay = 0.0; // P2
    std::size_t relays = 0;
    std::size_t block_len = 0; // T = 2R

    // Default split: half the power at the source, the rest shared equally,
    // i.e. P1 = P/2 and P2 = P/(2R).
    static PowerConfig split(double total_linear, std::size_t relays,
                             double source_frac = 0.5);
    // Fix the per-relay power; the source gets the remainder.
    static PowerConfig with_fixed_relay_power(double total_linear, std::size_t relays,
                                              double per_relay);

    // Effective signal power at the destination: P1 P2 T / (1 + P1).
    double rho() const;
    // Amplification applied by each relay: sqrt(P2 / (1 + P1)).
    double relay_amp() const;
    // Effective noise power per destination sample given the relay fades:
    // 1 + P2/(1+P1) * sum |g_j|^2, summed over live relays only.
    double noise_gamma(const CVector& g, const std::vector<bool>& alive = {}) const;

    void validate() const;
};

// One Monte Carlo trial's worth of randomness. Fades and noises are drawn
// for all relays, dead or not, so intact and degraded runs with the same
// seed share channel realizations.
struct ChannelRealization {
    CVector f; // source -> relay fades
    CVector g; // relay -> destination fades
    std::vector<CVector> relay_noise;
    CVector dest_noise;
    std::vector<bool> alive;
};

// Draws fades and noises i.i.d. CSCG(0,1); failed[j] marks relay j silent.
// Draw order is fixed (f, g, relay noise, destination noise) so a stream
// replays identically.
ChannelRealization sample_channel(std::size_t relays, Philox& rng,
                                  const std::vector<bool>& failed = {});

struct ReceivedSignal {
    CVector y;
    CVector g; // relay->destination fades, known at the decoder
    PowerConfig powers;
    std::vector<bool> alive;
};

// Two-phase protocol: the source broadcasts sqrt(P1 T) * s, relay j applies
// its diagonal matrix and the amplification sqrt(P2/(1+P1)), the destination
// sums the live relay transmissions plus its own noise.
ReceivedSignal transmit(const Codebook& cb, std::size_t k, const PowerConfig& powers,
                        const ChannelRealization& ch);

// The same received vector written as sqrt(rho) S_k h + n with h_j = f_j g_j
// over live relays; agrees with transmit() to roundoff and exists for
// cross-checks.
CVector transmit_codeword_path(const Codebook& cb, std::size_t k,
                               const PowerConfig& powers, const ChannelRealization& ch);

struct NoiseStats {
    double mean_norm = 0.0; // norm of the empirical mean vector
    CMatrix covariance;
};

// Empirical statistics of the effective noise sqrt(P2/(1+P1)) sum g_j A_j n_j + w.
// With unitary relay matrices its covariance is noise_gamma(g) * I; the
// overload taking explicit matrices exists to show what breaks when they are
// not unitary.
NoiseStats effective_noise_stats(const PowerConfig& powers, const CVector& g,
                                 std::size_t n_samples, Philox& rng);
NoiseStats effective_noise_stats(const PowerConfig& powers, const CVector& g,
                                 std::size_t n_samples, Philox& rng,
                                 const std::vector<CMatrix>& relay);

} // namespace dstbc
