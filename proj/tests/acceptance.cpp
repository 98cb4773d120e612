// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria can be selected by number on the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <thread>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dstbc/bler.hpp"
#include "dstbc/channel.hpp"
#include "dstbc/code.hpp"
#include "dstbc/decoders.hpp"
#include "dstbc/linalg.hpp"
#include "dstbc/rng.hpp"

using namespace dstbc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min(hw == 0 ? 1u : hw, 8u);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

bool unique_argmax(const std::vector<double>& m) {
    const std::size_t best = argmax_first(m);
    double second = -1e300;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (k != best) second = std::max(second, m[k]);
    const double scale = std::max({1.0, std::abs(m[best]), std::abs(second)});
    return m[best] - second > 1e-9 * scale;
}

// 1. Unitarity of every codeword across sizes.
Outcome criterion_unitarity() {
    Philox rng(1001, 0);
    double worst = 0.0;
    for (std::size_t relays : {1u, 2u, 4u, 8u}) {
        for (std::size_t order : {2u, 4u, 16u}) {
            for (int rep = 0; rep < 2; ++rep) {
                CyclicCodeSpec spec;
                spec.relays = relays;
                spec.order = order;
                spec.gbh = GbhKind::real_hadamard;
                spec.exponents.resize(2 * relays);
                for (auto& u : spec.exponents) u = static_cast<int>(rng.next_below(order));
                const Codebook cb = build_codebook(spec);
                const CMatrix ident = CMatrix::identity(relays);
                for (const CMatrix& s : cb.codewords)
                    worst = std::max(worst, max_abs(matmul(conj_transpose(s), s) - ident));
            }
        }
    }
    return {worst <= 1e-12, fmt("max |S^H S - I| = %.3g", worst)};
}

// 2. gcd criterion == brute-force Gram scan, exhaustively.
Outcome criterion_diversity_equivalence() {
    std::size_t checked = 0, mismatches = 0;
    for (std::size_t relays = 1; relays <= 3; ++relays) {
        const GbhKind gbh = relays == 3 ? GbhKind::dft : GbhKind::real_hadamard;
        for (std::size_t order = 2; order <= 12; ++order) {
            std::vector<int> v(relays, 0);
            for (;;) {
                const CyclicCodeSpec spec = CyclicCodeSpec::from_v(relays, order, v, gbh);
                const DiversityReport report =
                    is_fully_diverse_bruteforce(build_codebook(spec), 1e-9);
                ++checked;
                if (report.fully_diverse != is_fully_diverse_gcd(spec)) ++mismatches;
                std::size_t pos = 0;
                while (pos < relays && ++v[pos] == static_cast<int>(order)) v[pos++] = 0;
                if (pos == relays) break;
            }
        }
    }
    return {mismatches == 0,
            fmt("%zu difference vectors, %zu mismatches", checked, mismatches)};
}

// 3. Closed-form pair determinant against the Gram determinant.
Outcome criterion_determinant_identity() {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1});
    const Codebook cb = build_codebook(spec);
    double worst_rel = 0.0;
    for (std::size_t a = 0; a < 16; ++a)
        for (std::size_t b = 0; b < 16; ++b) {
            if (a == b) continue;
            CMatrix j(8, 8);
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t c = 0; c < 4; ++c) {
                    j(i, c) = cb.codewords[a](i, c);
                    j(i, c + 4) = cb.codewords[b](i, c);
                }
            const double brute = determinant(matmul(conj_transpose(j), j)).real();
            const double closed = pair_determinant_delta(spec, a, b).det;
            worst_rel = std::max(worst_rel,
                                 std::abs(closed - brute) / std::max(std::abs(brute), 1e-30));
        }
    return {worst_rel <= 1e-9, fmt("max relative error %.3g over 240 pairs", worst_rel)};
}

// 4. Non-cyclic abelian groups never reach full diversity even with
// per-factor unit differences.
Outcome criterion_noncyclic_abelian() {
    std::size_t eligible = 0, diverse = 0;
    for (const auto& orders : {std::vector<std::size_t>{4, 4}, std::vector<std::size_t>{2, 4}}) {
        for (std::size_t relays = 1; relays <= 2; ++relays) {
            const std::size_t rows = 2 * relays;
            const std::size_t row_space = orders[0] * orders[1];
            std::size_t total = 1;
            for (std::size_t i = 0; i < rows; ++i) total *= row_space;
            for (std::size_t code = 0; code < total; ++code) {
                AbelianCodeSpec spec;
                spec.relays = relays;
                spec.orders = orders;
                spec.exponents.assign(rows, std::vector<int>(2, 0));
                std::size_t rem = code;
                for (std::size_t i = 0; i < rows; ++i) {
                    spec.exponents[i][0] = static_cast<int>(rem % orders[0]);
                    rem /= orders[0];
                    spec.exponents[i][1] = static_cast<int>(rem % orders[1]);
                    rem /= orders[1];
                }
                bool unit_gcd = true;
                for (std::size_t nu = 0; nu < 2 && unit_gcd; ++nu)
                    for (std::size_t i = 0; i < relays && unit_gcd; ++i) {
                        const long du = spec.exponents[i][nu] - spec.exponents[relays + i][nu];
                        unit_gcd = std::gcd(du, static_cast<long>(orders[nu])) == 1;
                    }
                if (!unit_gcd) continue;
                ++eligible;
                if (abelian_diversity_check(spec)) ++diverse;
            }
        }
    }
    return {eligible > 0 && diverse == 0,
            fmt("%zu unit-gcd assignments, %zu wrongly diverse", eligible, diverse)};
}

// 5. All decoders produce the same index on every trial (outside ties).
Outcome criterion_decoder_chain() {
    std::size_t disagreements = 0, ties = 0, trials_run = 0;
    const auto run_chain = [&](const CyclicCodeSpec& spec, bool with_scalar) {
        const Codebook cb = build_codebook(spec);
        for (double p_db : {10.0, 20.0, 30.0}) {
            const PowerConfig powers = PowerConfig::split(std::pow(10.0, p_db / 10.0), 4);
            for (std::uint64_t t = 0; t < 10000; ++t) {
                Philox rng(1005, t);
                const std::size_t k = rng.next_below(16);
                const ChannelRealization ch = sample_channel(4, rng);
                const ReceivedSignal sig = transmit(cb, k, powers, ch);
                ++trials_run;

                std::vector<std::vector<double>> all;
                all.push_back(full_pdf_metrics(sig.y, cb, sig.g, powers));
                all.push_back(unitary_metrics(sig.y, cb, sig.g, powers));
                all.push_back(cyclic_metrics(sig.y, spec, sig.g, powers));
                all.push_back(reduced_tail_metrics(sig.y, spec, sig.g, powers));
                if (with_scalar)
                    all.push_back(reduced_scalar_metrics(sig.y, spec, sig.g, powers));

                bool tied = false;
                for (const auto& m : all)
                    if (!unique_argmax(m)) tied = true;
                if (tied) {
                    ++ties;
                    continue;
                }
                const std::size_t expected = argmax_first(all[0]);
                for (const auto& m : all)
                    if (argmax_first(m) != expected) ++disagreements;
            }
        }
    };
    run_chain(CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1}), false);
    run_chain(CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1}), false);
    run_chain(CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11}), true);
    return {disagreements == 0,
            fmt("%zu trials, %zu ties skipped, %zu disagreements", trials_run, ties,
                disagreements)};
}

// 6. Effective noise covariance is gamma I.
Outcome criterion_noise_covariance() {
    const PowerConfig powers = PowerConfig::split(100.0, 4);
    Philox fade_rng(1006, 0);
    CVector g(4);
    for (auto& gj : g) gj = fade_rng.next_cscg();
    const double gamma = powers.noise_gamma(g);
    Philox rng(1006, 1);
    const NoiseStats stats = effective_noise_stats(powers, g, 100000, rng);
    double max_diag_dev = 0.0, max_offdiag = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            const double mag = std::abs(stats.covariance(i, j));
            if (i == j)
                max_diag_dev = std::max(max_diag_dev, std::abs(mag - gamma) / gamma);
            else
                max_offdiag = std::max(max_offdiag, mag / gamma);
        }
    return {max_diag_dev <= 0.03 && max_offdiag <= 0.03,
            fmt("diag dev %.4f (<= 0.03), offdiag %.4f (<= 0.03 gamma)", max_diag_dev,
                max_offdiag)};
}

ExperimentConfig sweep_config(const CyclicCodeSpec& spec, std::vector<double> p_db,
                              std::uint64_t seed, std::uint64_t max_trials,
                              std::uint64_t target_errors) {
    ExperimentConfig cfg;
    cfg.spec = spec;
    cfg.power_db = std::move(p_db);
    cfg.decoder = DecoderKind::unitary;
    cfg.max_trials = max_trials;
    cfg.target_errors = target_errors;
    cfg.seed = seed;
    cfg.threads = worker_threads();
    return cfg;
}

// 7. BLER does not depend on which GBH family builds the relay matrices.
Outcome criterion_gbh_independence() {
    const std::vector<double> sweep{10.0, 15.0, 20.0, 25.0, 30.0};
    const auto had = run_bler(sweep_config(CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1}),
                                           sweep, 701, 4000000, 400));
    const auto dft = run_bler(sweep_config(
        CyclicCodeSpec::from_v(4, 16, {5, 7, 11, 1}, GbhKind::dft), sweep, 702, 4000000, 400));
    std::uint64_t min_errors = ~0ull;
    bool all_overlap = true;
    std::string worst;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        min_errors = std::min({min_errors, had[i].errors, dft[i].errors});
        const bool overlap =
            had[i].ci_low <= dft[i].ci_high && dft[i].ci_low <= had[i].ci_high;
        if (!overlap) {
            all_overlap = false;
            worst = fmt(" disjoint at %.0f dB", sweep[i]);
        }
    }
    return {all_overlap && min_errors >= 100,
            fmt("min errors/point %llu, intervals %s%s",
                static_cast<unsigned long long>(min_errors),
                all_overlap ? "overlap at all 5 points" : "DISJOINT", worst.c_str())};
}

// 8. Power gap between the scalar and spread difference vectors at 1e-2.
Outcome criterion_code_gap() {
    std::vector<double> sweep;
    for (double p = 14.0; p <= 30.0 + 1e-9; p += 2.0) sweep.push_back(p);
    const auto spread = run_bler(
        sweep_config(CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1}), sweep, 801, 400000, 400));
    const auto scalar = run_bler(sweep_config(CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11}),
                                              sweep, 802, 400000, 400));
    const double p_spread = interpolate_power_at(spread, 1e-2);
    const double p_scalar = interpolate_power_at(scalar, 1e-2);
    const double gap = p_scalar - p_spread;

    // the two sweep points bracketing each crossing must carry enough errors
    std::uint64_t bracket_errors = ~0ull;
    for (const auto& curve : {spread, scalar})
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
            if (curve[i].bler >= 1e-2 && curve[i + 1].bler <= 1e-2) {
                bracket_errors =
                    std::min({bracket_errors, curve[i].errors, curve[i + 1].errors});
                break;
            }
    return {gap >= 3.0 && gap <= 8.0 && bracket_errors >= 200,
            fmt("crossings %.2f dB vs %.2f dB, gap %.2f dB (in [3,8]), bracket errors >= %llu",
                p_spread, p_scalar, gap, static_cast<unsigned long long>(bracket_errors))};
}

// 9. One silent relay: subspaces stay non-intersecting at rank 2(R-1) and the
// degraded curve sits strictly above the intact one.
Outcome criterion_relay_failure() {
    const CyclicCodeSpec spec = CyclicCodeSpec::from_v(4, 16, {11, 11, 11, 11});
    const Codebook cb = build_codebook(spec);
    std::size_t bad_rank = 0;
    for (std::size_t dropped = 0; dropped < 4; ++dropped)
        for (std::size_t a = 0; a < 16; ++a)
            for (std::size_t b = a + 1; b < 16; ++b) {
                CMatrix j(8, 6);
                std::size_t col = 0;
                for (std::size_t c = 0; c < 4; ++c) {
                    if (c == dropped) continue;
                    for (std::size_t i = 0; i < 8; ++i) {
                        j(i, col) = cb.codewords[a](i, c);
                        j(i, col + 3) = cb.codewords[b](i, c);
                    }
                    ++col;
                }
                if (rank(j) != 6) ++bad_rank;
            }

    ExperimentConfig cfg =
        sweep_config(spec, {10.0, 14.0, 18.0, 22.0, 26.0}, 901, 400000, 30000);
    cfg.decoder = DecoderKind::reduced_scalar;
    const FailureComparison cmp = relay_failure_experiment(cfg, 1);
    bool separated = true;
    std::string note;
    for (std::size_t i = 0; i < cmp.intact.size(); ++i) {
        if (!(cmp.degraded[i].bler > cmp.intact[i].bler &&
              cmp.degraded[i].ci_low > cmp.intact[i].ci_high)) {
            separated = false;
            note = fmt(" overlap at %.0f dB", cmp.intact[i].power_db);
        }
    }

    // finite-power slope estimate from the top sweep segment: losing one of
    // four relays should scale the log-log tail slope by about 4/3
    const auto tail_slope = [](const std::vector<BlerPoint>& c) {
        const BlerPoint& a = c[c.size() - 2];
        const BlerPoint& b = c.back();
        return std::log10(a.bler / b.bler) / ((b.power_db - a.power_db) / 10.0);
    };
    const double slope_ratio = tail_slope(cmp.intact) / tail_slope(cmp.degraded);
    const bool slope_ok = std::abs(slope_ratio - 4.0 / 3.0) <= 0.3 * 4.0 / 3.0;

    return {bad_rank == 0 && separated && slope_ok,
            fmt("rank failures %zu/480, degraded above intact beyond CI at all 5 points%s, "
                "tail slope ratio %.2f (target 1.33 +- 30%%)",
                bad_rank, note.c_str(), slope_ratio)};
}

// 10. Byte-identical CSV for any worker count and across reruns.
Outcome criterion_determinism() {
    ExperimentConfig cfg = sweep_config(CyclicCodeSpec::from_v(4, 16, {11, 7, 3, 1}),
                                        {10.0, 20.0, 30.0}, 4242, 32768, 0);
    cfg.threads = 1;
    const std::string serial = csv_string(run_bler(cfg));
    cfg.threads = 8;
    const std::string parallel = csv_string(run_bler(cfg));
    const std::string again = csv_string(run_bler(cfg));
    return {serial == parallel && parallel == again,
            fmt("3 runs (1 and 8 workers), %s", serial == parallel && parallel == again
                                                    ? "byte-identical"
                                                    : "MISMATCH")};
}

struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
    double budget_seconds; // 0: informational only
};

const Criterion kCriteria[] = {
    {1, "codeword unitarity", criterion_unitarity, 1.0},
    {2, "gcd vs brute-force diversity", criterion_diversity_equivalence, 120.0},
    {3, "pair determinant identity", criterion_determinant_identity, 10.0},
    {4, "non-cyclic abelian exclusion", criterion_noncyclic_abelian, 60.0},
    {5, "decoder chain equivalence", criterion_decoder_chain, 120.0},
    {6, "effective noise covariance", criterion_noise_covariance, 30.0},
    {7, "GBH-choice independence", criterion_gbh_independence, 0.0},
    {8, "scalar vs spread power gap", criterion_code_gap, 0.0},
    {9, "relay failure robustness", criterion_relay_failure, 0.0},
    {10, "deterministic parallel CSV", criterion_determinism, 0.0},
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() && !selected.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = out.pass;
        std::string budget_note;
        if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            pass = false;
            budget_note = fmt(" [over %.0f s budget]", c.budget_seconds);
        }
        std::printf("[%s] criterion %2d %-32s %s (%.2f s)%s\n", pass ? "PASS" : "FAIL",
                    c.number, c.name, out.detail.c_str(), secs, budget_note.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
