#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dstbc/channel.hpp"
#include "dstbc/code.hpp"
#include "dstbc/decoders.hpp"
#include "dstbc/errors.hpp"
#include "dstbc/rng.hpp"
#include "dstbc/spec_io.hpp"

using namespace dstbc;

namespace {

// Returns true when the top two metrics are separated by more than a
// relative 1e-9; equality across decoders is only required there.
bool unique_argmax(const std::vector<double>& m) {
    const std::size_t best = argmax_first(m);
    double second = -1e300;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (k != best) second = std::max(second, m[k]);
    const double scale = std::max({1.0, std::abs(m[best]), std::abs(second)});
    return m[best] - second > 1e-9 * scale;
}

struct Trial {
    std::size_t sent;
    ReceivedSignal sig;
};

Trial make_trial(const Codebook& cb, const PowerConfig& powers, std::uint64_t seed,
                 std::uint64_t index, const std::vector<bool>& failed = {}) {
    Philox rng(seed, index);
    const std::size_t k = rng.next_below(cb.size);
    const ChannelRealization ch = sample_channel(cb.relays, rng, failed);
    return Trial{k, transmit(cb, k, powers, ch)};
}

} // namespace

TEST_CASE("noiseless-quality decoding at very high power") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(2, 4, {1, 3});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(1e6, 2); // 60 dB
    int errors = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const Trial trial = make_trial(cb, powers, 41, t);
        if (decode_full_pdf(trial.sig.y, cb, trial.sig.g, powers) != trial.sent) ++errors;
    }
    CHECK(errors == 0);
}

TEST_CASE("single-codeword book always decodes to zero") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(1, 1, {0});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(10.0, 1);
    const Trial trial = make_trial(cb, powers, 42, 0);
    CHECK(decode_full_pdf(trial.sig.y, cb, trial.sig.g, powers) == 0);
    CHECK(decode_unitary(trial.sig.y, cb, trial.sig.g, powers) == 0);
    CHECK(decode_cyclic(trial.sig.y, spec, trial.sig.g, powers) == 0);
}

TEST_CASE("log-determinant term is codeword independent for unitary codebooks") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(100.0, 4);
    Philox rng(43, 0);
    CVector g(4);
    for (auto& gj : g) gj = rng.next_cscg();
    const double rho = powers.rho();
    const double gamma = powers.noise_gamma(g);

    std::vector<double> logdets;
    for (std::size_t k = 0; k < cb.size; ++k) {
        CMatrix sigma(8, 8);
        for (std::size_t i = 0; i < 8; ++i) sigma(i, i) = gamma;
        for (std::size_t j = 0; j < 4; ++j) {
            const double w = rho * std::norm(g[j]);
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t ii = 0; ii < 8; ++ii)
                    sigma(i, ii) += w * cb.codewords[k](i, j) * std::conj(cb.codewords[k](ii, j));
        }
        const CMatrix lower = cholesky_lower(sigma);
        double logdet = 0.0;
        for (std::size_t i = 0; i < 8; ++i) logdet += 2.0 * std::log(lower(i, i).real());
        logdets.push_back(logdet);
    }
    for (double ld : logdets) CHECK(ld == doctest::Approx(logdets[0]).epsilon(1e-9));
}

TEST_CASE("decoder chain agrees trial by trial") {
    for (const std::vector<int>& v :
         {std::vector<int>{5, 7, 11, 1}, std::vector<int>{11, 7, 3, 1}}) {
        const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, v);
        const Codebook cb = build_codebook(spec);
        for (double p_db : {10.0, 20.0, 30.0}) {
            const PowerConfig powers = PowerConfig::split(std::pow(10.0, p_db / 10.0), 4);
            for (std::uint64_t t = 0; t < 1000; ++t) {
                const Trial trial = make_trial(cb, powers, 44, t);
                const auto pdf = full_pdf_metrics(trial.sig.y, cb, trial.sig.g, powers);
                const auto uni = unitary_metrics(trial.sig.y, cb, trial.sig.g, powers);
                const auto cyc = cyclic_metrics(trial.sig.y, spec, trial.sig.g, powers);
                const auto red = reduced_tail_metrics(trial.sig.y, spec, trial.sig.g, powers);
                if (!unique_argmax(pdf) || !unique_argmax(uni) || !unique_argmax(cyc) ||
                    !unique_argmax(red))
                    continue;
                const std::size_t expected = argmax_first(pdf);
                REQUIRE(argmax_first(uni) == expected);
                REQUIRE(argmax_first(cyc) == expected);
                REQUIRE(argmax_first(red) == expected);
            }
        }
    }
}

TEST_CASE("scalar difference vectors allow all five decoders") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(200.0, 4);
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const Trial trial = make_trial(cb, powers, 45, t);
        const auto pdf = full_pdf_metrics(trial.sig.y, cb, trial.sig.g, powers);
        const auto sca = reduced_scalar_metrics(trial.sig.y, spec, trial.sig.g, powers);
        if (!unique_argmax(pdf) || !unique_argmax(sca)) continue;
        REQUIRE(argmax_first(sca) == argmax_first(pdf));
    }
}

TEST_CASE("decoder chain agrees with a silent relay (informed)") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(150.0, 4);
    const std::vector<bool> failed{true, false, false, false};
    for (std::uint64_t t = 0; t < 500; ++t) {
        const Trial trial = make_trial(cb, powers, 46, t, failed);
        const auto& alive = trial.sig.alive;
        const auto pdf = full_pdf_metrics(trial.sig.y, cb, trial.sig.g, powers, alive);
        const auto uni = unitary_metrics(trial.sig.y, cb, trial.sig.g, powers, alive);
        const auto cyc = cyclic_metrics(trial.sig.y, spec, trial.sig.g, powers, alive);
        const auto sca = reduced_scalar_metrics(trial.sig.y, spec, trial.sig.g, powers, alive);
        if (!unique_argmax(pdf) || !unique_argmax(uni) || !unique_argmax(cyc) ||
            !unique_argmax(sca))
            continue;
        const std::size_t expected = argmax_first(pdf);
        REQUIRE(argmax_first(uni) == expected);
        REQUIRE(argmax_first(cyc) == expected);
        REQUIRE(argmax_first(sca) == expected);
    }
}

TEST_CASE("zero received vector ties every metric and decodes to index 0") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(100.0, 4);
    const CVector y(8, Complex{0.0, 0.0});
    const CVector g{Complex{1.0, 0.0}, Complex{0.5, 0.5}, Complex{-0.3, 1.0}, Complex{0.2, 0.0}};
    CHECK(decode_unitary(y, cb, g, powers) == 0);
    CHECK(decode_cyclic(y, spec, g, powers) == 0);
    CHECK(decode_reduced_scalar(y, spec, g, powers) == 0);
}

TEST_CASE("positive scaling of y never changes the unitary argmax") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(100.0, 4);
    for (std::uint64_t t = 0; t < 200; ++t) {
        const Trial trial = make_trial(cb, powers, 47, t);
        CVector scaled = trial.sig.y;
        for (auto& z : scaled) z *= 7.25;
        CHECK(decode_unitary(scaled, cb, trial.sig.g, powers) ==
              decode_unitary(trial.sig.y, cb, trial.sig.g, powers));
    }
}

TEST_CASE("beta weights are monotone, bounded and limit to one") {
    const CVector g{Complex{0.5, 0.0}, Complex{1.0, 0.0}, Complex{2.0, 0.0}, Complex{3.0, 0.0}};
    double prev_beta = -1.0;
    for (double total : {1.0, 10.0, 100.0, 1000.0}) {
        const PowerConfig powers = PowerConfig::split(total, 4);
        const std::vector<double> beta = beta_weights(g, powers);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(beta[j] >= 0.0);
            CHECK(beta[j] < 1.0);
            if (j > 0) CHECK(beta[j] > beta[j - 1]); // larger |g| wins
        }
        CHECK(beta[0] > prev_beta); // larger rho wins
        prev_beta = beta[0];
    }
    const PowerConfig huge = PowerConfig::split(1e12, 4);
    for (double b : beta_weights(g, huge)) CHECK(b == doctest::Approx(1.0).epsilon(1e-3));

    // zero power: all weights vanish without NaNs
    const PowerConfig zero = PowerConfig::split(0.0, 4);
    for (double b : beta_weights(g, zero)) CHECK(b == 0.0);
}

TEST_CASE("omega collapses to beta R I when all fades are equal") {
    const PowerConfig powers = PowerConfig::split(80.0, 4);
    const CVector g(4, Complex{0.9, 0.0});
    const CyclicCodeSpec had = CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1});
    const MetricContext ctx = make_metric_context(had, g, powers);
    const double beta = ctx.beta[0];
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const Complex expected = i == j ? Complex{4.0 * beta, 0.0} : Complex{0.0, 0.0};
            CHECK(std::abs(ctx.omega(i, j) - expected) <= 1e-12);
        }

    const CyclicCodeSpec dft = CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1}, GbhKind::dft);
    const MetricContext ctx2 = make_metric_context(dft, g, powers);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const Complex expected = i == j ? Complex{4.0 * beta, 0.0} : Complex{0.0, 0.0};
            CHECK(std::abs(ctx2.omega(i, j) - expected) <= 1e-12);
        }
}

TEST_CASE("omega is Hermitian with betas in range") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1}, GbhKind::dft);
    const PowerConfig powers = PowerConfig::split(50.0, 4);
    Philox rng(48, 0);
    CVector g(4);
    for (auto& gj : g) gj = rng.next_cscg();
    const MetricContext ctx = make_metric_context(spec, g, powers);
    CHECK(max_abs(conj_transpose(ctx.omega) - ctx.omega) <= 1e-12);
    for (double b : ctx.beta) {
        CHECK(b >= 0.0);
        CHECK(b < 1.0);
    }
    CHECK(std::abs(ctx.root - std::polar(1.0, 2.0 * std::numbers::pi / 16.0)) <= 1e-15);
}

TEST_CASE("one-relay cyclic metric is a rotated correlation") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(1, 8, {3});
    const PowerConfig powers = PowerConfig::split(30.0, 1);
    Philox rng(49, 0);
    const CVector g{rng.next_cscg()};
    CVector y{rng.next_cscg(), rng.next_cscg()};
    const MetricContext ctx = make_metric_context(spec, g, powers);
    const double beta = ctx.beta[0];
    const auto metrics = cyclic_metrics(y, spec, g, powers);
    const double base = beta * (std::norm(y[0]) + std::norm(y[1]));
    for (std::size_t k = 0; k < 8; ++k) {
        const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * 3.0 * k / 8.0);
        const double expected = base + 2.0 * beta * (w * std::conj(y[0]) * y[1]).real();
        CHECK(metrics[k] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("dropped tail term is constant in k") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {9, 5, 3, 1});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(60.0, 4);
    for (std::uint64_t t = 0; t < 50; ++t) {
        const Trial trial = make_trial(cb, powers, 50, t);
        const auto full = cyclic_metrics(trial.sig.y, spec, trial.sig.g, powers);
        const auto red = reduced_tail_metrics(trial.sig.y, spec, trial.sig.g, powers);
        const double diff0 = full[0] - red[0];
        for (std::size_t k = 1; k < 16; ++k)
            CHECK(full[k] - red[k] == doctest::Approx(diff0).epsilon(1e-9));
    }
}

TEST_CASE("reduced scalar winner matches the phase argument") {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {5, 5, 5, 5});
    const Codebook cb = build_codebook(spec);
    const PowerConfig powers = PowerConfig::split(60.0, 4);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const Trial trial = make_trial(cb, powers, 51, t);
        const MetricContext ctx = make_metric_context(spec, trial.sig.g, powers);
        const CVector y1(trial.sig.y.begin(), trial.sig.y.begin() + 4);
        const CVector y2(trial.sig.y.begin() + 4, trial.sig.y.end());
        Complex z{0.0, 0.0};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                z += std::conj(y1[i]) * ctx.omega(i, j) * y2[j];
        // v = 5: the winner maximizes cos(arg z + 2 pi 5 k / 16)
        std::size_t best = 0;
        double best_val = -1e300;
        for (std::size_t k = 0; k < 16; ++k) {
            const double val =
                std::abs(z) * std::cos(std::arg(z) + 2.0 * std::numbers::pi * 5.0 * k / 16.0);
            if (val > best_val) {
                best_val = val;
                best = k;
            }
        }
        CHECK(decode_reduced_scalar(trial.sig.y, spec, trial.sig.g, powers) == best);
    }
}

TEST_CASE("contract violations") {
    // non-unitary codebook (test hook with a non-unitary relay matrix)
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(1, 4, {1});
    CMatrix stretch = CMatrix::identity(2);
    stretch(0, 0) = 2.0;
    const Codebook bad = build_codebook_with_relays(spec, {stretch});
    CHECK_FALSE(bad.unitary);
    const PowerConfig powers = PowerConfig::split(10.0, 1);
    const CVector y(2, Complex{1.0, 0.0});
    const CVector g{Complex{1.0, 0.0}};
    CHECK_THROWS_AS(decode_unitary(y, bad, g, powers), ContractViolation);

    // reduced decoders demand their exponent structure
    const CyclicCodeSpec uneven_tail = parse_spec("R=2\nL=8\nu=1,2,0,3\n");
    const PowerConfig p2 = PowerConfig::split(10.0, 2);
    const CVector y4(4, Complex{1.0, 0.0});
    const CVector g2{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
    CHECK_THROWS_AS(decode_reduced_tail(y4, uneven_tail, g2, p2), ContractViolation);
    const CyclicCodeSpec uneven_head = parse_spec("R=2\nL=8\nu=1,2,0,0\n");
    CHECK_THROWS_AS(decode_reduced_scalar(y4, uneven_head, g2, p2), ContractViolation);
    // scalar with a non-coprime difference
    const CyclicCodeSpec stuck = parse_spec("R=2\nL=8\nu=2,2,0,0\n");
    CHECK_THROWS_AS(decode_reduced_scalar(y4, stuck, g2, p2), ContractViolation);
}

TEST_CASE("decoder name round trip") {
    for (DecoderKind kind : {DecoderKind::full_pdf, DecoderKind::unitary, DecoderKind::cyclic,
                             DecoderKind::reduced_tail, DecoderKind::reduced_scalar})
        CHECK(decoder_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(decoder_from_string("nope"), ConfigError);
}
