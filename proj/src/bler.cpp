#include "dstbc/bler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "dstbc/channel.hpp"
#include "dstbc/errors.hpp"
#include "dstbc/rng.hpp"

namespace dstbc {

namespace {

// Trials are simulated in fixed-size batches; the early-stop rule is checked
// only at batch boundaries so the trial count never depends on how many
// workers ran the batch.
constexpr std::uint64_t kBatch = 4096;

std::vector<bool> failure_mask(const ExperimentConfig& cfg) {
    std::vector<bool> failed(cfg.spec.relays, false);
    for (std::size_t j : cfg.failed_relays) failed[j] = true;
    return failed;
}

struct TrialWorker {
    const ExperimentConfig* cfg;
    const Codebook* cb;
    const PowerConfig* powers;
    const std::vector<bool>* failed;
    std::uint64_t stream_base; // power point index << 32

    std::uint64_t run_range(std::uint64_t first, std::uint64_t last) const {
        std::uint64_t errors = 0;
        const std::vector<bool> all_alive(cfg->spec.relays, true);
        for (std::uint64_t t = first; t < last; ++t) {
            Philox rng(cfg->seed, stream_base | t);
            const std::size_t k = rng.next_below(cfg->spec.order);
            const ChannelRealization ch = sample_channel(cfg->spec.relays, rng, *failed);
            const ReceivedSignal sig = transmit(*cb, k, *powers, ch);
            const std::vector<bool>& alive = cfg->informed ? sig.alive : all_alive;
            const std::size_t decoded =
                decode(cfg->decoder, sig.y, *cb, cfg->spec, sig.g, *powers, alive);
            if (decoded != k) ++errors;
        }
        return errors;
    }
};

std::uint64_t run_batch(const TrialWorker& worker, std::uint64_t first, std::uint64_t count,
                        unsigned threads) {
    if (threads <= 1 || count < 1024) {
        return worker.run_range(first, first + count);
    }
    const auto n = static_cast<std::uint64_t>(threads);
    const std::uint64_t chunk = (count + n - 1) / n;
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t lo = first + std::min<std::uint64_t>(count, w * chunk);
        const std::uint64_t hi = first + std::min<std::uint64_t>(count, (w + 1) * chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                partial[w] = worker.run_range(lo, hi);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : failures)
        if (e) std::rethrow_exception(e);
    std::uint64_t errors = 0;
    for (std::uint64_t p : partial) errors += p;
    return errors;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    spec.validate();
    if (max_trials < 1) throw ConfigError("experiment: max_trials must be at least 1");
    if (max_trials >= (std::uint64_t{1} << 32))
        throw ConfigError("experiment: max_trials must fit in 32 bits");
    if (power_db.size() >= (std::uint64_t{1} << 32))
        throw ConfigError("experiment: too many power points");
    if (threads < 1) throw ConfigError("experiment: thread count must be at least 1");
    if (!(source_frac >= 0.0 && source_frac <= 1.0))
        throw ConfigError("experiment: source power fraction must lie in [0, 1]");
    std::vector<bool> seen(spec.relays, false);
    for (std::size_t j : failed_relays) {
        if (j >= spec.relays)
            throw ConfigError("experiment: failed relay index out of range");
        if (seen[j]) throw ConfigError("experiment: duplicate failed relay index");
        seen[j] = true;
    }
    if (!failed_relays.empty() && failed_relays.size() >= spec.relays)
        throw ConfigError("experiment: at least one relay must stay alive");
    try {
        check_decoder_constraints(decoder, spec);
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("experiment: ") + e.what());
    }
}

PowerConfig ExperimentConfig::powers_at(double power_db_value) const {
    const double linear = std::pow(10.0, power_db_value / 10.0);
    if (relay_power >= 0.0)
        return PowerConfig::with_fixed_relay_power(linear, spec.relays, relay_power);
    return PowerConfig::split(linear, spec.relays, source_frac);
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The bounds are exactly 0 and 1 at the extremes; keep roundoff from
    // pushing the estimate outside its own interval.
    const double low = errors == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = errors == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

std::vector<BlerPoint> run_bler(const ExperimentConfig& config) {
    config.validate();
    const Codebook cb = build_codebook(config.spec);
    const std::vector<bool> failed = failure_mask(config);

    std::vector<BlerPoint> points;
    points.reserve(config.power_db.size());
    for (std::size_t pi = 0; pi < config.power_db.size(); ++pi) {
        const PowerConfig powers = config.powers_at(config.power_db[pi]);
        TrialWorker worker{&config, &cb, &powers, &failed,
                           static_cast<std::uint64_t>(pi) << 32};

        std::uint64_t trials = 0;
        std::uint64_t errors = 0;
        while (trials < config.max_trials &&
               (config.target_errors == 0 || errors < config.target_errors)) {
            const std::uint64_t batch = std::min(kBatch, config.max_trials - trials);
            errors += run_batch(worker, trials, batch, config.threads);
            trials += batch;
        }

        BlerPoint point;
        point.power_db = config.power_db[pi];
        point.trials = trials;
        point.errors = errors;
        point.bler = static_cast<double>(errors) / static_cast<double>(trials);
        const WilsonInterval ci = wilson_interval(errors, trials);
        point.ci_low = ci.low;
        point.ci_high = ci.high;
        points.push_back(point);
    }
    return points;
}

double interpolate_power_at(const std::vector<BlerPoint>& points, double target_bler) {
    if (!(target_bler > 0.0 && target_bler < 1.0))
        throw ConfigError("interpolation target must lie in (0, 1)");
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const BlerPoint& a = points[i];
        const BlerPoint& b = points[i + 1];
        if (a.bler >= target_bler && b.bler <= target_bler) {
            if (a.bler == b.bler) return 0.5 * (a.power_db + b.power_db);
            // Zero estimates get a sub-resolution floor so the log exists.
            const double floor_a = 0.25 / static_cast<double>(std::max<std::uint64_t>(a.trials, 1));
            const double floor_b = 0.25 / static_cast<double>(std::max<std::uint64_t>(b.trials, 1));
            const double la = std::log10(std::max(a.bler, floor_a));
            const double lb = std::log10(std::max(b.bler, floor_b));
            const double lt = std::log10(target_bler);
            return a.power_db + (b.power_db - a.power_db) * (lt - la) / (lb - la);
        }
    }
    throw ConfigError("target BLER not bracketed by the sweep; extend sweep");
}

GapReport compare_codes(const ExperimentConfig& a, const ExperimentConfig& b,
                        double target_bler) {
    if (a.spec.relays != b.spec.relays || a.spec.order != b.spec.order)
        throw ConfigError("compare: both codes must share R and L");
    if (a.power_db != b.power_db)
        throw ConfigError("compare: both experiments must share the power sweep");
    const std::vector<BlerPoint> curve_a = run_bler(a);
    const std::vector<BlerPoint> curve_b = run_bler(b);
    GapReport report;
    report.target_bler = target_bler;
    report.power_a_db = interpolate_power_at(curve_a, target_bler);
    report.power_b_db = interpolate_power_at(curve_b, target_bler);
    report.gap_db = report.power_b_db - report.power_a_db;
    return report;
}

FailureComparison relay_failure_experiment(const ExperimentConfig& config,
                                           std::size_t failed_count) {
    if (failed_count >= config.spec.relays)
        throw ConfigError("relay failure: failed count must be smaller than the relay count");
    ExperimentConfig intact = config;
    intact.failed_relays.clear();
    ExperimentConfig degraded = config;
    degraded.failed_relays.clear();
    for (std::size_t j = 0; j < failed_count; ++j) degraded.failed_relays.push_back(j);

    FailureComparison out;
    out.intact = run_bler(intact);
    out.degraded = run_bler(degraded);
    return out;
}

std::string csv_string(const std::vector<BlerPoint>& points) {
    std::string out = "P_dB,trials,errors,bler,ci_low,ci_high\n";
    for (const BlerPoint& p : points) {
        out += format_double(p.power_db);
        out += ',';
        out += std::to_string(p.trials);
        out += ',';
        out += std::to_string(p.errors);
        out += ',';
        out += format_double(p.bler);
        out += ',';
        out += format_double(p.ci_low);
        out += ',';
        out += format_double(p.ci_high);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<BlerPoint>& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write CSV file: " + path);
    const std::string text = csv_string(points);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError("failed writing CSV file: " + path);
}

} // namespace dstbc
