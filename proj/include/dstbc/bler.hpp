#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dstbc/code.hpp"
#include "dstbc/decoders.hpp"

namespace dstbc {

// One block-error-rate experiment: sweep total power over a code/decoder
// pair with a fixed seed. Every random draw derives from (seed, power point,
// trial), so results are byte-identical for any worker count.
struct ExperimentConfig {
    CyclicCodeSpec spec;
    std::vector<double> power_db; // total power sweep, dB
    DecoderKind decoder = DecoderKind::unitary;
    std::uint64_t max_trials = 100000;
    std::uint64_t target_errors = 0; // 0: always run max_trials
    std::uint64_t seed = 0;
    std::vector<std::size_t> failed_relays;
    bool informed = true; // decoder told which relays are silent
    double source_frac = 0.5;
    double relay_power = -1.0; // >= 0 fixes P2; otherwise derived from source_frac
    unsigned threads = 1;

    void validate() const; // throws ConfigError
    PowerConfig powers_at(double power_db_value) const;
};

struct BlerPoint {
    double power_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double bler = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// 95% by default (z = Phi^{-1}(0.975)); always contains errors/trials.
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials,
                               double z = 1.959963984540054);

std::vector<BlerPoint> run_bler(const ExperimentConfig& config);

// Power (dB) where the curve crosses target_bler, log-linear interpolation
// between the first bracketing sweep points. Throws ConfigError asking to
// extend the sweep when the target is not bracketed.
double interpolate_power_at(const std::vector<BlerPoint>& points, double target_bler);

struct GapReport {
    double target_bler = 0.0;
    double power_a_db = 0.0;
    double power_b_db = 0.0;
    double gap_db = 0.0; // positive when b needs more power than a
};

// Runs both experiments (same relays/order/sweep required) and reports the
// horizontal distance between the curves at target_bler.
GapReport compare_codes(const ExperimentConfig& a, const ExperimentConfig& b,
                        double target_bler = 1e-2);

struct FailureComparison {
    std::vector<BlerPoint> intact;
    std::vector<BlerPoint> degraded;
};

// Same experiment with zero and with failed_count silent relays (the first
// failed_count indices; the code is symmetric across relays).
FailureComparison relay_failure_experiment(const ExperimentConfig& config,
                                           std::size_t failed_count);

// Columns: P_dB,trials,errors,bler,ci_low,ci_high. One header row, LF line
// endings, floats at 17 significant digits.
std::string csv_string(const std::vector<BlerPoint>& points);
void emit_csv(const std::vector<BlerPoint>& points, const std::string& path);

} // namespace dstbc
