#include "dstbc/decoders.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "dstbc/errors.hpp"

namespace dstbc {

namespace {

void check_inputs(std::size_t relays, const CVector& y, const CVector& g,
                  const PowerConfig& powers, const std::vector<bool>& alive) {
    if (y.size() != 2 * relays) throw std::invalid_argument("decode: y must have length 2R");
    if (g.size() != relays) throw std::invalid_argument("decode: g must have length R");
    if (powers.relays != relays)
        throw std::invalid_argument("decode: power config relay count mismatch");
    if (!alive.empty() && alive.size() != relays)
        throw std::invalid_argument("decode: alive mask size mismatch");
}

bool is_alive(const std::vector<bool>& alive, std::size_t j) {
    return alive.empty() || alive[j];
}

Complex root_pow(std::size_t order, std::int64_t exponent) {
    std::int64_t m = exponent % static_cast<std::int64_t>(order);
    if (m < 0) m += static_cast<std::int64_t>(order);
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) /
                               static_cast<double>(order));
}

bool tail_equal(const CyclicCodeSpec& spec) {
    for (std::size_t i = spec.relays + 1; i < 2 * spec.relays; ++i)
        if (spec.exponents[i] != spec.exponents[spec.relays]) return false;
    return true;
}

bool head_equal(const CyclicCodeSpec& spec) {
    for (std::size_t i = 1; i < spec.relays; ++i)
        if (spec.exponents[i] != spec.exponents[0]) return false;
    return true;
}

// a^H m b
Complex sandwich(const CVector& a, const CMatrix& m, const CVector& b) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex row{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * b[j];
        s += std::conj(a[i]) * row;
    }
    return s;
}

} // namespace

const char* to_string(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::full_pdf: return "full";
        case DecoderKind::unitary: return "unitary";
        case DecoderKind::cyclic: return "ncdstbc";
        case DecoderKind::reduced_tail: return "reduced-tail";
        case DecoderKind::reduced_scalar: return "reduced-scalar";
    }
    return "?";
}

DecoderKind decoder_from_string(const std::string& s) {
    if (s == "full") return DecoderKind::full_pdf;
    if (s == "unitary") return DecoderKind::unitary;
    if (s == "ncdstbc" || s == "cyclic") return DecoderKind::cyclic;
    if (s == "reduced-tail") return DecoderKind::reduced_tail;
    if (s == "reduced-scalar") return DecoderKind::reduced_scalar;
    throw ConfigError("unknown decoder '" + s +
                      "' (expected full|unitary|ncdstbc|reduced-tail|reduced-scalar)");
}

void check_decoder_constraints(DecoderKind kind, const CyclicCodeSpec& spec) {
    spec.validate();
    if (kind == DecoderKind::reduced_tail || kind == DecoderKind::reduced_scalar) {
        if (!tail_equal(spec))
            throw ContractViolation("decoder requires equal tail exponents u_{R+1..2R}");
    }
    if (kind == DecoderKind::reduced_scalar) {
        if (!head_equal(spec))
            throw ContractViolation("reduced-scalar decoder requires equal head exponents u_{1..R}");
        const std::int64_t v0 = spec.difference_vector()[0];
        if (std::gcd(v0, static_cast<std::int64_t>(spec.order)) != 1)
            throw ContractViolation("reduced-scalar decoder requires gcd(u_1 - u_{R+1}, L) = 1");
    }
}

std::vector<double> beta_weights(const CVector& g, const PowerConfig& powers,
                                 const std::vector<bool>& alive) {
    const double rho = powers.rho();
    const double gamma = powers.noise_gamma(g, alive);
    std::vector<double> beta(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!is_alive(alive, j)) continue;
        const double gj = std::norm(g[j]);
        // rho = 0 pushes gamma/rho to infinity and the weight to zero.
        beta[j] = gj / (gj + gamma / rho);
        if (!std::isfinite(beta[j])) beta[j] = 0.0;
    }
    return beta;
}

MetricContext make_metric_context(const CyclicCodeSpec& spec, const CVector& g,
                                  const PowerConfig& powers,
                                  const std::vector<bool>& alive) {
    spec.validate();
    if (g.size() != spec.relays)
        throw std::invalid_argument("metric context: g must have length R");

    MetricContext ctx;
    ctx.rho = powers.rho();
    ctx.gamma = powers.noise_gamma(g, alive);
    ctx.beta = beta_weights(g, powers, alive);
    ctx.root = root_pow(spec.order, 1);

    const CMatrix m = gbh_matrix(spec.relays, spec.gbh);
    ctx.omega = CMatrix(spec.relays, spec.relays);
    for (std::size_t i = 0; i < spec.relays; ++i)
        for (std::size_t j = 0; j < spec.relays; ++j) {
            Complex s{0.0, 0.0};
            for (std::size_t lam = 0; lam < spec.relays; ++lam)
                s += ctx.beta[lam] * m(i, lam) * std::conj(m(j, lam));
            ctx.omega(i, j) = s;
        }
    return ctx;
}

std::vector<double> full_pdf_metrics(const CVector& y, const Codebook& cb,
                                     const CVector& g, const PowerConfig& powers,
                                     const std::vector<bool>& alive) {
    check_inputs(cb.relays, y, g, powers, alive);
    const std::size_t t = 2 * cb.relays;
    const double rho = powers.rho();
    const double gamma = powers.noise_gamma(g, alive);

    std::vector<double> metrics(cb.size);
    for (std::size_t k = 0; k < cb.size; ++k) {
        // Sigma_y = rho S diag(|g_j|^2) S^H + gamma I, live relays only.
        CMatrix sigma(t, t);
        for (std::size_t i = 0; i < t; ++i) sigma(i, i) = gamma;
        for (std::size_t j = 0; j < cb.relays; ++j) {
            if (!is_alive(alive, j)) continue;
            const double w = rho * std::norm(g[j]);
            if (w == 0.0) continue;
            for (std::size_t i = 0; i < t; ++i) {
                const Complex si = cb.codewords[k](i, j);
                for (std::size_t ii = 0; ii < t; ++ii)
                    sigma(i, ii) += w * si * std::conj(cb.codewords[k](ii, j));
            }
        }
        const CMatrix lower = cholesky_lower(sigma);
        double logdet = 0.0;
        for (std::size_t i = 0; i < t; ++i) logdet += 2.0 * std::log(lower(i, i).real());
        const CVector x = cholesky_solve(lower, y);
        metrics[k] = -logdet - inner(y, x).real();
    }
    return metrics;
}

std::vector<double> unitary_metrics(const CVector& y, const Codebook& cb,
                                    const CVector& g, const PowerConfig& powers,
                                    const std::vector<bool>& alive) {
    check_inputs(cb.relays, y, g, powers, alive);
    if (!cb.unitary)
        throw ContractViolation("unitary decoder requires a unitary codebook");
    const std::vector<double> beta = beta_weights(g, powers, alive);
    const std::size_t t = 2 * cb.relays;

    std::vector<double> metrics(cb.size);
    for (std::size_t k = 0; k < cb.size; ++k) {
        // y^H S G S^H y = sum_j beta_j |s_j^H y|^2
        double m = 0.0;
        for (std::size_t j = 0; j < cb.relays; ++j) {
            if (beta[j] == 0.0) continue;
            Complex dot{0.0, 0.0};
            for (std::size_t i = 0; i < t; ++i)
                dot += std::conj(cb.codewords[k](i, j)) * y[i];
            m += beta[j] * std::norm(dot);
        }
        metrics[k] = m;
    }
    return metrics;
}

std::vector<double> cyclic_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                   const CVector& g, const PowerConfig& powers,
                                   const std::vector<bool>& alive) {
    check_inputs(spec.relays, y, g, powers, alive);
    const MetricContext ctx = make_metric_context(spec, g, powers, alive);
    const std::size_t r = spec.relays;
    const CVector y1(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
    const CVector y2(y.begin() + static_cast<std::ptrdiff_t>(r), y.end());

    // Substituting S_k = (1/sqrt(2R)) D^k Gamma into the unitary quadratic
    // form splits it into three R x R pieces whose k dependence sits in
    // unit-modulus Hadamard masks over omega. Constant positive factors are
    // dropped; the cross term appears twice as conjugates, hence the 2 Re.
    std::vector<double> metrics(spec.order);
    CMatrix g1(r, r), g2(r, r), g3(r, r);
    for (std::size_t k = 0; k < spec.order; ++k) {
        const auto kk = static_cast<std::int64_t>(k);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                const std::int64_t ui = spec.exponents[i];
                const std::int64_t uj = spec.exponents[j];
                const std::int64_t ui_tail = spec.exponents[r + i];
                const std::int64_t uj_tail = spec.exponents[r + j];
                g1(i, j) = root_pow(spec.order, (ui - uj) * kk) * ctx.omega(i, j);
                g2(i, j) = root_pow(spec.order, (ui - uj_tail) * kk) * ctx.omega(i, j);
                g3(i, j) = root_pow(spec.order, (ui_tail - uj_tail) * kk) * ctx.omega(i, j);
            }
        metrics[k] = sandwich(y1, g1, y1).real() + 2.0 * sandwich(y1, g2, y2).real() +
                     sandwich(y2, g3, y2).real();
    }
    return metrics;
}

std::vector<double> reduced_tail_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                         const CVector& g, const PowerConfig& powers,
                                         const std::vector<bool>& alive) {
    check_inputs(spec.relays, y, g, powers, alive);
    check_decoder_constraints(DecoderKind::reduced_tail, spec);
    const MetricContext ctx = make_metric_context(spec, g, powers, alive);
    const std::size_t r = spec.relays;
    const CVector y1(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
    const CVector y2(y.begin() + static_cast<std::ptrdiff_t>(r), y.end());

    // Equal tail exponents make the y2 quadratic piece independent of k.
    std::vector<double> metrics(spec.order);
    CMatrix g1(r, r), g2(r, r);
    for (std::size_t k = 0; k < spec.order; ++k) {
        const auto kk = static_cast<std::int64_t>(k);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                const std::int64_t ui = spec.exponents[i];
                const std::int64_t uj = spec.exponents[j];
                const std::int64_t uj_tail = spec.exponents[r + j];
                g1(i, j) = root_pow(spec.order, (ui - uj) * kk) * ctx.omega(i, j);
                g2(i, j) = root_pow(spec.order, (ui - uj_tail) * kk) * ctx.omega(i, j);
            }
        metrics[k] = sandwich(y1, g1, y1).real() + 2.0 * sandwich(y1, g2, y2).real();
    }
    return metrics;
}

std::vector<double> reduced_scalar_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                           const CVector& g, const PowerConfig& powers,
                                           const std::vector<bool>& alive) {
    check_inputs(spec.relays, y, g, powers, alive);
    check_decoder_constraints(DecoderKind::reduced_scalar, spec);
    const MetricContext ctx = make_metric_context(spec, g, powers, alive);
    const std::size_t r = spec.relays;
    const CVector y1(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
    const CVector y2(y.begin() + static_cast<std::ptrdiff_t>(r), y.end());

    // With both halves of u constant every k-dependent piece collapses into
    // one rotation of the scalar z = y1^H omega y2.
    const Complex z = sandwich(y1, ctx.omega, y2);
    const std::int64_t shift = spec.exponents[0] - spec.exponents[r];
    std::vector<double> metrics(spec.order);
    for (std::size_t k = 0; k < spec.order; ++k)
        metrics[k] = (root_pow(spec.order, shift * static_cast<std::int64_t>(k)) * z).real();
    return metrics;
}

std::size_t argmax_first(const std::vector<double>& metrics) {
    if (metrics.empty()) throw std::invalid_argument("argmax of empty metric vector");
    std::size_t best = 0;
    for (std::size_t k = 1; k < metrics.size(); ++k)
        if (metrics[k] > metrics[best]) best = k;
    return best;
}

std::size_t decode_full_pdf(const CVector& y, const Codebook& cb, const CVector& g,
                            const PowerConfig& powers, const std::vector<bool>& alive) {
    return argmax_first(full_pdf_metrics(y, cb, g, powers, alive));
}

std::size_t decode_unitary(const CVector& y, const Codebook& cb, const CVector& g,
                           const PowerConfig& powers, const std::vector<bool>& alive) {
    return argmax_first(unitary_metrics(y, cb, g, powers, alive));
}

std::size_t decode_cyclic(const CVector& y, const CyclicCodeSpec& spec, const CVector& g,
                          const PowerConfig& powers, const std::vector<bool>& alive) {
    return argmax_first(cyclic_metrics(y, spec, g, powers, alive));
}

std::size_t decode_reduced_tail(const CVector& y, const CyclicCodeSpec& spec,
                                const CVector& g, const PowerConfig& powers,
                                const std::vector<bool>& alive) {
    return argmax_first(reduced_tail_metrics(y, spec, g, powers, alive));
}

std::size_t decode_reduced_scalar(const CVector& y, const CyclicCodeSpec& spec,
                                  const CVector& g, const PowerConfig& powers,
                                  const std::vector<bool>& alive) {
    return argmax_first(reduced_scalar_metrics(y, spec, g, powers, alive));
}

std::size_t decode(DecoderKind kind, const CVector& y, const Codebook& cb,
                   const CyclicCodeSpec& spec, const CVector& g,
                   const PowerConfig& powers, const std::vector<bool>& alive) {
    switch (kind) {
        case DecoderKind::full_pdf: return decode_full_pdf(y, cb, g, powers, alive);
        case DecoderKind::unitary: return decode_unitary(y, cb, g, powers, alive);
        case DecoderKind::cyclic: return decode_cyclic(y, spec, g, powers, alive);
        case DecoderKind::reduced_tail: return decode_reduced_tail(y, spec, g, powers, alive);
        case DecoderKind::reduced_scalar:
            return decode_reduced_scalar(y, spec, g, powers, alive);
    }
    throw std::invalid_argument("decode: unknown decoder kind");
}

} // namespace dstbc
