#include "dstbc/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "dstbc/errors.hpp"

namespace dstbc {

namespace {

std::vector<bool> alive_from_failed(std::size_t relays, const std::vector<bool>& failed) {
    if (!failed.empty() && failed.size() != relays)
        throw std::invalid_argument("failure mask must have one entry per relay");
    std::vector<bool> alive(relays, true);
    for (std::size_t j = 0; j < failed.size(); ++j) alive[j] = !failed[j];
    return alive;
}

} // namespace

PowerConfig PowerConfig::split(double total_linear, std::size_t relays, double source_frac) {
    if (relays < 1) throw ConfigError("power split: need at least one relay");
    if (!(total_linear >= 0.0)) throw ConfigError("power split: total power must be >= 0");
    if (!(source_frac >= 0.0 && source_frac <= 1.0))
        throw ConfigError("power split: source fraction must lie in [0, 1]");
    PowerConfig p;
    p.total = total_linear;
    p.source = source_frac * total_linear;
    p.per_relay = (total_linear - p.source) / static_cast<double>(relays);
    p.relays = relays;
    p.block_len = 2 * relays;
    return p;
}

PowerConfig PowerConfig::with_fixed_relay_power(double total_linear, std::size_t relays,
                                                double per_relay) {
    if (relays < 1) throw ConfigError("power split: need at least one relay");
    if (!(per_relay >= 0.0)) throw ConfigError("power split: per-relay power must be >= 0");
    const double source = total_linear - static_cast<double>(relays) * per_relay;
    if (!(source >= 0.0))
        throw ConfigError("power split: relay powers exceed the total budget");
    PowerConfig p;
    p.total = total_linear;
    p.source = source;
    p.per_relay = per_relay;
    p.relays = relays;
    p.block_len = 2 * relays;
    return p;
}

double PowerConfig::rho() const {
    return source * per_relay * static_cast<double>(block_len) / (1.0 + source);
}

double PowerConfig::relay_amp() const {
    return std::sqrt(per_relay / (1.0 + source));
}

double PowerConfig::noise_gamma(const CVector& g, const std::vector<bool>& alive) const {
    if (g.size() != relays)
        throw std::invalid_argument("noise_gamma: fade vector size mismatch");
    if (!alive.empty() && alive.size() != relays)
        throw std::invalid_argument("noise_gamma: alive mask size mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < relays; ++j)
        if (alive.empty() || alive[j]) sum += std::norm(g[j]);
    return 1.0 + per_relay / (1.0 + source) * sum;
}

void PowerConfig::validate() const {
    if (relays < 1 || block_len != 2 * relays)
        throw ConfigError("power config: inconsistent relay count");
    if (!(total >= 0.0 && source >= 0.0 && per_relay >= 0.0))
        throw ConfigError("power config: negative power");
    const double sum = source + static_cast<double>(relays) * per_relay;
    if (std::abs(sum - total) > 1e-9 * std::max(1.0, total))
        throw ConfigError("power config: P1 + R*P2 does not match the total");
}

ChannelRealization sample_channel(std::size_t relays, Philox& rng,
                                  const std::vector<bool>& failed) {
    const std::size_t t = 2 * relays;
    ChannelRealization ch;
    ch.alive = alive_from_failed(relays, failed);
    ch.f.resize(relays);
    ch.g.resize(relays);
    for (std::size_t j = 0; j < relays; ++j) ch.f[j] = rng.next_cscg();
    for (std::size_t j = 0; j < relays; ++j) ch.g[j] = rng.next_cscg();
    ch.relay_noise.assign(relays, CVector(t));
    for (std::size_t j = 0; j < relays; ++j)
        for (std::size_t i = 0; i < t; ++i) ch.relay_noise[j][i] = rng.next_cscg();
    ch.dest_noise.resize(t);
    for (std::size_t i = 0; i < t; ++i) ch.dest_noise[i] = rng.next_cscg();
    return ch;
}

ReceivedSignal transmit(const Codebook& cb, std::size_t k, const PowerConfig& powers,
                        const ChannelRealization& ch) {
    if (k >= cb.size) throw std::invalid_argument("transmit: codeword index out of range");
    if (powers.relays != cb.relays)
        throw std::invalid_argument("transmit: power config relay count mismatch");
    if (ch.f.size() != cb.relays || ch.g.size() != cb.relays)
        throw std::invalid_argument("transmit: channel realization size mismatch");

    const std::size_t t = 2 * cb.relays;
    const double broadcast_amp = std::sqrt(powers.source * static_cast<double>(t));
    const double amp = powers.relay_amp();
    const CVector s = source_vector(cb, k);

    CVector y = ch.dest_noise;
    CVector relayed(t);
    for (std::size_t j = 0; j < cb.relays; ++j) {
        if (!ch.alive[j]) continue;
        for (std::size_t i = 0; i < t; ++i)
            relayed[i] = broadcast_amp * ch.f[j] * s[i] + ch.relay_noise[j][i];
        const CVector sent = matvec(cb.relay[j], relayed);
        for (std::size_t i = 0; i < t; ++i) y[i] += amp * ch.g[j] * sent[i];
    }
    return ReceivedSignal{std::move(y), ch.g, powers, ch.alive};
}

CVector transmit_codeword_path(const Codebook& cb, std::size_t k,
                               const PowerConfig& powers, const ChannelRealization& ch) {
    if (k >= cb.size) throw std::invalid_argument("transmit: codeword index out of range");
    const std::size_t t = 2 * cb.relays;
    const double signal_amp = std::sqrt(powers.rho());
    const double amp = powers.relay_amp();

    CVector y = ch.dest_noise;
    for (std::size_t j = 0; j < cb.relays; ++j) {
        if (!ch.alive[j]) continue;
        const Complex h = ch.f[j] * ch.g[j];
        const CVector amplified_noise = matvec(cb.relay[j], ch.relay_noise[j]);
        for (std::size_t i = 0; i < t; ++i) {
            y[i] += signal_amp * cb.codewords[k](i, j) * h;
            y[i] += amp * ch.g[j] * amplified_noise[i];
        }
    }
    return y;
}

NoiseStats effective_noise_stats(const PowerConfig& powers, const CVector& g,
                                 std::size_t n_samples, Philox& rng) {
    return effective_noise_stats(powers, g, n_samples, rng, {});
}

NoiseStats effective_noise_stats(const PowerConfig& powers, const CVector& g,
                                 std::size_t n_samples, Philox& rng,
                                 const std::vector<CMatrix>& relay) {
    const std::size_t relays = g.size();
    const std::size_t t = 2 * relays;
    if (relays != powers.relays)
        throw std::invalid_argument("effective_noise_stats: fade vector size mismatch");
    if (!relay.empty() && relay.size() != relays)
        throw std::invalid_argument("effective_noise_stats: need one matrix per relay");
    if (n_samples == 0) throw std::invalid_argument("effective_noise_stats: need samples");

    const double amp = powers.relay_amp();
    CVector mean(t, Complex{0.0, 0.0});
    CMatrix cov(t, t);
    CVector noise(t);
    CVector relay_draw(t);
    for (std::size_t s = 0; s < n_samples; ++s) {
        std::fill(noise.begin(), noise.end(), Complex{0.0, 0.0});
        for (std::size_t j = 0; j < relays; ++j) {
            for (std::size_t i = 0; i < t; ++i) relay_draw[i] = rng.next_cscg();
            const CVector shaped = relay.empty() ? relay_draw : matvec(relay[j], relay_draw);
            for (std::size_t i = 0; i < t; ++i) noise[i] += amp * g[j] * shaped[i];
        }
        for (std::size_t i = 0; i < t; ++i) noise[i] += rng.next_cscg();

        for (std::size_t i = 0; i < t; ++i) {
            mean[i] += noise[i];
            for (std::size_t jj = 0; jj < t; ++jj)
                cov(i, jj) += noise[i] * std::conj(noise[jj]);
        }
    }
    const double inv = 1.0 / static_cast<double>(n_samples);
    for (std::size_t i = 0; i < t; ++i) mean[i] *= inv;
    NoiseStats stats;
    stats.mean_norm = vector_norm(mean);
    stats.covariance = Complex{inv, 0.0} * cov;
    return stats;
}

} // namespace dstbc
