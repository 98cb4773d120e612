// Command line front end: code design, diversity checks, coding-gain search
// and Monte Carlo BLER experiments over the two-hop relay model.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dstbc/bler.hpp"
#include "dstbc/channel.hpp"
#include "dstbc/code.hpp"
#include "dstbc/decoders.hpp"
#include "dstbc/errors.hpp"
#include "dstbc/rng.hpp"
#include "dstbc/spec_io.hpp"

namespace {

using namespace dstbc;

void print_kv(const char* key, const std::string& value) {
    std::printf("%-20s %s\n", key, value.c_str());
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::string format_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

void print_diversity_report(const CyclicCodeSpec& spec, const DiversityReport* bf,
                            bool gcd_ok) {
    print_kv("R", std::to_string(spec.relays));
    print_kv("L", std::to_string(spec.order));
    print_kv("u", join_ints(spec.exponents));
    print_kv("v", join_ints(spec.difference_vector()));
    print_kv("gbh_kind", to_string(spec.gbh));
    print_kv("gcd_fully_diverse", gcd_ok ? "yes" : "no");
    print_kv("coding_gain", format_g(coding_gain(spec)));
    if (bf) {
        print_kv("bf_fully_diverse", bf->fully_diverse ? "yes" : "no");
        print_kv("bf_min_det", format_g(bf->min_det));
        print_kv("bf_coding_gain", format_g(bf->coding_gain));
        if (bf->failing_pair) {
            print_kv("failing_pair", std::to_string(bf->failing_pair->first) + "," +
                                         std::to_string(bf->failing_pair->second));
        } else {
            print_kv("failing_pair", "none");
        }
    } else {
        print_kv("bf_fully_diverse", "skipped (L above cap)");
    }
}

void write_report_csv(const std::string& path, const DiversityReport& bf) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("cannot write CSV file: " + path);
    std::fprintf(f, "fully_diverse,min_det,coding_gain,failing_a,failing_b\n");
    if (bf.failing_pair) {
        std::fprintf(f, "%d,%.17g,%.17g,%zu,%zu\n", bf.fully_diverse ? 1 : 0, bf.min_det,
                     bf.coding_gain, bf.failing_pair->first, bf.failing_pair->second);
    } else {
        std::fprintf(f, "%d,%.17g,%.17g,,\n", bf.fully_diverse ? 1 : 0, bf.min_det,
                     bf.coding_gain);
    }
    std::fclose(f);
}

void print_points(const std::vector<BlerPoint>& points) {
    std::printf("%10s %10s %10s %14s %14s %14s\n", "P_dB", "trials", "errors", "bler",
                "ci95_low", "ci95_high");
    for (const BlerPoint& p : points)
        std::printf("%10.3f %10" PRIu64 " %10" PRIu64 " %14.6e %14.6e %14.6e\n",
                    p.power_db, p.trials, p.errors, p.bler, p.ci_low, p.ci_high);
}

// Experiment settings files share the spec-file syntax: key=value lines,
// '#' comments. Every CLI flag overrides its file key.
struct KvConfig {
    std::map<std::string, std::string> values;

    static KvConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        KvConfig cfg;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto b = line.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) continue;
            const auto e = line.find_last_not_of(" \t\r\n");
            line = line.substr(b, e - b + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config file: expected key=value, got '" + line + "'");
            auto trim = [](std::string s) {
                const auto lo = s.find_first_not_of(" \t");
                if (lo == std::string::npos) return std::string();
                const auto hi = s.find_last_not_of(" \t");
                return s.substr(lo, hi - lo + 1);
            };
            cfg.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    const std::string* find(const std::string& key) const {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config file: bad number in '" + key + "'");
        }
    }
    return out;
}

struct SweepFlags {
    std::vector<double> p_db;
    double start = std::nan("");
    double stop = std::nan("");
    double step = 1.0;
    CLI::Option* o_p_db = nullptr;
    CLI::Option* o_start = nullptr;
    CLI::Option* o_stop = nullptr;
    CLI::Option* o_step = nullptr;

    std::vector<double> resolve() const {
        if (!p_db.empty()) return p_db;
        if (std::isnan(start) || std::isnan(stop))
            throw ConfigError("no power sweep given (use --p-db or --p-start/--p-stop/--p-step)");
        if (step <= 0.0) throw ConfigError("--p-step must be positive");
        std::vector<double> sweep;
        for (double p = start; p <= stop + 1e-9; p += step) sweep.push_back(p);
        if (sweep.empty()) throw ConfigError("empty power sweep");
        return sweep;
    }
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& sweep) {
    sweep.o_p_db =
        cmd->add_option("--p-db", sweep.p_db, "power sweep points in dB (comma separated)")
            ->delimiter(',');
    sweep.o_start = cmd->add_option("--p-start", sweep.start, "sweep start in dB");
    sweep.o_stop = cmd->add_option("--p-stop", sweep.stop, "sweep stop in dB")->needs(sweep.o_start);
    sweep.o_step = cmd->add_option("--p-step", sweep.step, "sweep step in dB")->needs(sweep.o_start);
}

struct SimFlags {
    std::string decoder = "unitary";
    std::uint64_t trials = 100000;
    std::uint64_t target_errors = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> failed;
    bool uninformed = false;
    double p1_frac = 0.5;
    double p2_each = -1.0;
    unsigned threads = 1;
    CLI::Option* o_decoder = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_target = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_fail = nullptr;
    CLI::Option* o_uninformed = nullptr;
    CLI::Option* o_p1 = nullptr;
    CLI::Option* o_p2 = nullptr;
    CLI::Option* o_threads = nullptr;
};

void add_sim_flags(CLI::App* cmd, SimFlags& sim) {
    sim.o_decoder = cmd->add_option("--decoder", sim.decoder,
                                    "decoder: full|unitary|ncdstbc|reduced-tail|reduced-scalar");
    sim.o_trials = cmd->add_option("--trials", sim.trials, "max trials per power point");
    sim.o_target = cmd->add_option("--target-errors", sim.target_errors,
                                   "stop a point early after this many block errors (0: never)");
    sim.o_seed = cmd->add_option("--seed", sim.seed, "master RNG seed (required here or in --config)");
    sim.o_fail = cmd->add_option("--fail", sim.failed, "indices of silent relays (comma separated)")
                     ->delimiter(',');
    sim.o_uninformed =
        cmd->add_flag("--uninformed", sim.uninformed, "decoder is not told which relays are silent");
    sim.o_p1 = cmd->add_option("--p1-frac", sim.p1_frac, "fraction of total power at the source");
    sim.o_p2 =
        cmd->add_option("--p2-each", sim.p2_each, "fixed per-relay power (linear); overrides --p1-frac");
    sim.o_threads = cmd->add_option("--threads", sim.threads, "worker threads");
}

// Fill in every field that was not given on the command line from the
// key=value file.
void merge_config(const KvConfig& file, SweepFlags& sweep, SimFlags& sim, bool& have_seed) {
    const auto want = [&](const CLI::Option* opt, const char* key) -> const std::string* {
        return opt->count() > 0 ? nullptr : file.find(key);
    };
    try {
        if (const auto* v = want(sweep.o_p_db, "p_db")) sweep.p_db = parse_double_list(*v, "p_db");
        if (const auto* v = want(sweep.o_start, "p_start")) sweep.start = std::stod(*v);
        if (const auto* v = want(sweep.o_stop, "p_stop")) sweep.stop = std::stod(*v);
        if (const auto* v = want(sweep.o_step, "p_step")) sweep.step = std::stod(*v);
        if (const auto* v = want(sim.o_decoder, "decoder")) sim.decoder = *v;
        if (const auto* v = want(sim.o_trials, "trials")) sim.trials = std::stoull(*v);
        if (const auto* v = want(sim.o_target, "target_errors")) sim.target_errors = std::stoull(*v);
        if (const auto* v = want(sim.o_seed, "seed")) {
            sim.seed = std::stoull(*v);
            have_seed = true;
        }
        if (const auto* v = want(sim.o_fail, "fail")) {
            sim.failed.clear();
            for (double x : parse_double_list(*v, "fail"))
                sim.failed.push_back(static_cast<std::size_t>(x));
        }
        if (const auto* v = want(sim.o_uninformed, "uninformed"))
            sim.uninformed = *v == "1" || *v == "true";
        if (const auto* v = want(sim.o_p1, "p1_frac")) sim.p1_frac = std::stod(*v);
        if (const auto* v = want(sim.o_p2, "p2_each")) sim.p2_each = std::stod(*v);
        if (const auto* v = want(sim.o_threads, "threads"))
            sim.threads = static_cast<unsigned>(std::stoul(*v));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config file: malformed value");
    }
}

ExperimentConfig make_experiment(const CyclicCodeSpec& spec, const SweepFlags& sweep,
                                 const SimFlags& sim, bool have_seed) {
    if (!have_seed)
        throw ConfigError("a seed is mandatory (give --seed or a seed= config entry)");
    ExperimentConfig cfg;
    cfg.spec = spec;
    cfg.power_db = sweep.resolve();
    cfg.decoder = decoder_from_string(sim.decoder);
    cfg.max_trials = sim.trials;
    cfg.target_errors = sim.target_errors;
    cfg.seed = sim.seed;
    cfg.failed_relays = sim.failed;
    cfg.informed = !sim.uninformed;
    cfg.source_frac = sim.p1_frac;
    cfg.relay_power = sim.p2_each;
    cfg.threads = sim.threads;
    return cfg;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Cyclic distributed space-time block codes: design, verification and "
                 "partially-coherent BLER simulation"};
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand("design", "build a code spec and report its diversity");
    std::size_t d_relays = 4;
    std::size_t d_order = 16;
    std::vector<int> d_v, d_u;
    std::string d_gbh = "real_hadamard";
    std::string d_out, d_csv;
    std::size_t d_cap = 4096;
    design->add_option("-R,--relays", d_relays, "relay count")->required();
    design->add_option("-L,--order", d_order, "codebook size (group order)")->required();
    auto* opt_v = design->add_option("--v", d_v, "difference vector, length R")->delimiter(',');
    design->add_option("--u", d_u, "exponent vector, length 2R")->delimiter(',')->excludes(opt_v);
    design->add_option("--gbh", d_gbh, "relay matrix family: real_hadamard|dft");
    design->add_option("--out", d_out, "write the spec file here");
    design->add_option("--csv", d_csv, "write the diversity report as CSV");
    design->add_option("--cap", d_cap, "skip the brute-force pair scan above this L");
    design->callback([&] {
        CyclicCodeSpec spec;
        if (!d_v.empty()) {
            spec = CyclicCodeSpec::from_v(d_relays, d_order, d_v, gbh_from_string(d_gbh));
        } else if (!d_u.empty()) {
            spec.relays = d_relays;
            spec.order = d_order;
            spec.gbh = gbh_from_string(d_gbh);
            for (int e : d_u) {
                long m = e % static_cast<long>(d_order);
                if (m < 0) m += static_cast<long>(d_order);
                spec.exponents.push_back(static_cast<int>(m));
            }
            spec.validate();
        } else {
            throw ConfigError("design: give either --v or --u");
        }
        const bool gcd_ok = is_fully_diverse_gcd(spec);
        std::optional<DiversityReport> bf;
        if (spec.order <= d_cap)
            bf = is_fully_diverse_bruteforce(build_codebook(spec), 1e-9, d_cap);
        print_diversity_report(spec, bf ? &*bf : nullptr, gcd_ok);
        if (!d_out.empty()) save_spec(spec, d_out);
        if (!d_csv.empty()) {
            if (!bf) throw ConfigError("design: CSV report needs the brute-force scan");
            write_report_csv(d_csv, *bf);
        }
    });

    // check
    auto* check = app.add_subcommand("check", "diversity report for an existing spec file");
    std::string c_spec, c_csv;
    double c_tol = 1e-9;
    std::size_t c_cap = 4096;
    check->add_option("--spec", c_spec, "spec file")->required();
    check->add_option("--tol", c_tol, "determinant tolerance")->default_val(1e-9);
    check->add_option("--cap", c_cap, "refuse the pair scan above this L");
    check->add_option("--csv", c_csv, "write the diversity report as CSV");
    check->callback([&] {
        const CyclicCodeSpec spec = load_spec(c_spec);
        const bool gcd_ok = is_fully_diverse_gcd(spec);
        const DiversityReport bf = is_fully_diverse_bruteforce(build_codebook(spec), c_tol, c_cap);
        print_diversity_report(spec, &bf, gcd_ok);
        if (!c_csv.empty()) write_report_csv(c_csv, bf);
    });

    // gain-search
    auto* search = app.add_subcommand("gain-search", "exhaustive coding-gain maximization");
    std::size_t s_relays = 4;
    std::size_t s_order = 16;
    std::string s_constraint = "none";
    std::string s_gbh = "real_hadamard";
    std::string s_out;
    std::size_t s_cap = 4096;
    search->add_option("-R,--relays", s_relays, "relay count")->required();
    search->add_option("-L,--order", s_order, "codebook size (group order)")->required();
    search->add_option("--constraint", s_constraint, "none|equal-tail|scalar");
    search->add_option("--gbh", s_gbh, "relay matrix family for --out");
    search->add_option("--cap", s_cap, "refuse orders above this cap");
    search->add_option("--out", s_out, "write the best spec file here");
    search->callback([&] {
        SearchConstraint constraint = SearchConstraint::none;
        if (s_constraint == "equal-tail") constraint = SearchConstraint::equal_tail;
        else if (s_constraint == "scalar") constraint = SearchConstraint::scalar;
        else if (s_constraint != "none")
            throw ConfigError("gain-search: unknown constraint '" + s_constraint + "'");
        const GainSearchResult best = search_best_v(s_relays, s_order, constraint, s_cap);
        print_kv("best_v", join_ints(best.v));
        print_kv("coding_gain", format_g(best.gain));
        if (!s_out.empty())
            save_spec(CyclicCodeSpec::from_v(s_relays, s_order, best.v, gbh_from_string(s_gbh)),
                      s_out);
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo BLER sweep");
    std::string m_spec, m_out, m_config;
    SweepFlags m_sweep;
    SimFlags m_sim;
    auto* m_spec_opt = simulate->add_option("--spec", m_spec, "spec file");
    simulate->add_option("--config", m_config,
                         "experiment settings file (key=value); flags override it");
    add_sweep_flags(simulate, m_sweep);
    add_sim_flags(simulate, m_sim);
    auto* m_out_opt = simulate->add_option("--out", m_out, "write the sweep as CSV");
    simulate->callback([&] {
        bool have_seed = m_sim.o_seed->count() > 0;
        if (!m_config.empty()) {
            const KvConfig file = KvConfig::load(m_config);
            merge_config(file, m_sweep, m_sim, have_seed);
            if (const auto* v = file.find("spec"); v && m_spec_opt->count() == 0) m_spec = *v;
            if (const auto* v = file.find("out"); v && m_out_opt->count() == 0) m_out = *v;
        }
        if (m_spec.empty()) throw ConfigError("simulate: no spec file given");
        const ExperimentConfig cfg =
            make_experiment(load_spec(m_spec), m_sweep, m_sim, have_seed);
        const std::vector<BlerPoint> points = run_bler(cfg);
        print_points(points);
        if (!m_out.empty()) emit_csv(points, m_out);
    });

    // compare
    auto* compare = app.add_subcommand("compare", "dB gap between two codes at a target BLER");
    std::string x_spec_a, x_spec_b, x_config;
    double x_target = 1e-2;
    SweepFlags x_sweep;
    SimFlags x_sim;
    auto* x_a_opt = compare->add_option("--spec-a", x_spec_a, "first spec file");
    auto* x_b_opt = compare->add_option("--spec-b", x_spec_b, "second spec file");
    compare->add_option("--config", x_config,
                        "experiment settings file (key=value); flags override it");
    auto* x_target_opt =
        compare->add_option("--target-bler", x_target, "interpolation target");
    add_sweep_flags(compare, x_sweep);
    add_sim_flags(compare, x_sim);
    compare->callback([&] {
        bool have_seed = x_sim.o_seed->count() > 0;
        if (!x_config.empty()) {
            const KvConfig file = KvConfig::load(x_config);
            merge_config(file, x_sweep, x_sim, have_seed);
            if (const auto* v = file.find("spec_a"); v && x_a_opt->count() == 0) x_spec_a = *v;
            if (const auto* v = file.find("spec_b"); v && x_b_opt->count() == 0) x_spec_b = *v;
            if (const auto* v = file.find("target_bler"); v && x_target_opt->count() == 0)
                x_target = std::stod(*v);
        }
        if (x_spec_a.empty() || x_spec_b.empty())
            throw ConfigError("compare: both spec files are required");
        const ExperimentConfig cfg_a =
            make_experiment(load_spec(x_spec_a), x_sweep, x_sim, have_seed);
        const ExperimentConfig cfg_b =
            make_experiment(load_spec(x_spec_b), x_sweep, x_sim, have_seed);
        const GapReport gap = compare_codes(cfg_a, cfg_b, x_target);
        print_kv("target_bler", format_g(gap.target_bler));
        print_kv("P_a_dB", format_g(gap.power_a_db));
        print_kv("P_b_dB", format_g(gap.power_b_db));
        print_kv("gap_dB", format_g(gap.gap_db));
    });

    // cov-test
    auto* cov = app.add_subcommand("cov-test", "empirical effective-noise covariance check");
    std::size_t n_relays = 4;
    double n_p_db = 20.0;
    std::size_t n_samples = 100000;
    std::uint64_t n_seed = 0;
    double n_p1_frac = 0.5;
    cov->add_option("-R,--relays", n_relays, "relay count")->default_val(4);
    cov->add_option("--p-db", n_p_db, "total power in dB")->default_val(20.0);
    cov->add_option("--samples", n_samples, "noise samples")->default_val(100000);
    cov->add_option("--seed", n_seed, "master RNG seed")->required();
    cov->add_option("--p1-frac", n_p1_frac, "fraction of total power at the source");
    cov->callback([&] {
        const PowerConfig powers =
            PowerConfig::split(std::pow(10.0, n_p_db / 10.0), n_relays, n_p1_frac);
        Philox fade_rng(n_seed, 0);
        CVector g(n_relays);
        for (auto& gj : g) gj = fade_rng.next_cscg();
        Philox noise_rng(n_seed, 1);
        const NoiseStats stats = effective_noise_stats(powers, g, n_samples, noise_rng);
        const double gamma = powers.noise_gamma(g);
        double max_diag_dev = 0.0;
        double max_offdiag = 0.0;
        const std::size_t t = stats.covariance.rows();
        for (std::size_t i = 0; i < t; ++i)
            for (std::size_t j = 0; j < t; ++j) {
                const double mag = std::abs(stats.covariance(i, j));
                if (i == j)
                    max_diag_dev = std::max(max_diag_dev, std::abs(mag - gamma) / gamma);
                else
                    max_offdiag = std::max(max_offdiag, mag / gamma);
            }
        print_kv("gamma", format_g(gamma));
        print_kv("mean_norm", format_g(stats.mean_norm));
        print_kv("max_diag_rel_dev", format_g(max_diag_dev));
        print_kv("max_offdiag_over_gamma", format_g(max_offdiag));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const dstbc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
