#include "dstbc/code.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "dstbc/errors.hpp"

namespace dstbc {

namespace {

constexpr double kUnitTol = 1e-12;

bool power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

int mod_reduce(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    if (r < 0) r += m;
    return static_cast<int>(r);
}

// exp(j 2 pi num / den), with the angle reduced in exact integer arithmetic
// before any trigonometry.
Complex root_of_unity(std::int64_t num, std::int64_t den) {
    return std::polar(1.0, 2.0 * std::numbers::pi *
                               static_cast<double>(mod_reduce(num, den)) /
                               static_cast<double>(den));
}

// cos(2 pi num / den), same exact reduction. The residue is folded onto
// [0, den/2] (cos is even around pi) so mirrored difference classes produce
// bit-identical values; gain comparisons then tie exactly where the algebra
// says they should.
double cos_of_root(std::int64_t num, std::int64_t den) {
    std::int64_t m = mod_reduce(num, den);
    m = std::min(m, den - m);
    return std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                    static_cast<double>(den));
}

CVector all_ones_scaled(std::size_t len, double scale) {
    return CVector(len, Complex{scale, 0.0});
}

// Common assembly once the L group diagonals are known.
Codebook assemble(std::size_t relays, CMatrix gamma, std::vector<CMatrix> relay,
                  std::vector<CVector> diag, bool relays_overridden) {
    const std::size_t t = 2 * relays;
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));

    Codebook cb;
    cb.relays = relays;
    cb.size = diag.size();
    cb.gamma = std::move(gamma);
    cb.relay = std::move(relay);
    cb.group_diag = std::move(diag);
    cb.base = all_ones_scaled(t, scale);

    cb.codewords.reserve(cb.size);
    const CMatrix ident = CMatrix::identity(relays);
    double worst = 0.0;
    for (std::size_t k = 0; k < cb.size; ++k) {
        CMatrix s(t, relays);
        if (relays_overridden) {
            // General path: column j is A_j applied to the source vector.
            CVector src(t);
            for (std::size_t i = 0; i < t; ++i) src[i] = scale * cb.group_diag[k][i];
            for (std::size_t j = 0; j < relays; ++j) {
                const CVector col = matvec(cb.relay[j], src);
                for (std::size_t i = 0; i < t; ++i) s(i, j) = col[i];
            }
        } else {
            // D^k and the diagonal relay matrices commute, so the codeword is
            // just the row-scaled gamma.
            for (std::size_t i = 0; i < t; ++i)
                for (std::size_t j = 0; j < relays; ++j)
                    s(i, j) = scale * cb.group_diag[k][i] * cb.gamma(i, j);
        }
        worst = std::max(worst, max_abs(matmul(conj_transpose(s), s) - ident));
        cb.codewords.push_back(std::move(s));
    }

    cb.unitary = worst <= kUnitTol;
    if (!relays_overridden && !cb.unitary)
        throw ConstructionError("codebook lost unitarity; construction bug");
    return cb;
}

std::vector<CVector> cyclic_diagonals(const CyclicCodeSpec& spec) {
    const std::size_t t = 2 * spec.relays;
    std::vector<CVector> diag(spec.order, CVector(t));
    for (std::size_t k = 0; k < spec.order; ++k)
        for (std::size_t i = 0; i < t; ++i)
            diag[k][i] = root_of_unity(static_cast<std::int64_t>(spec.exponents[i]) *
                                           static_cast<std::int64_t>(k),
                                       static_cast<std::int64_t>(spec.order));
    return diag;
}

std::vector<CVector> abelian_diagonals(const AbelianCodeSpec& spec) {
    const std::size_t t = 2 * spec.relays;
    const std::size_t total = spec.group_order();
    std::int64_t den = 1;
    for (std::size_t l : spec.orders) den = std::lcm(den, static_cast<std::int64_t>(l));

    std::vector<CVector> diag(total, CVector(t));
    for (std::size_t k = 0; k < total; ++k) {
        const std::vector<std::size_t> digits = spec.mixed_radix(k);
        for (std::size_t i = 0; i < t; ++i) {
            std::int64_t num = 0;
            for (std::size_t nu = 0; nu < spec.orders.size(); ++nu) {
                const auto l_nu = static_cast<std::int64_t>(spec.orders[nu]);
                const std::int64_t part =
                    mod_reduce(static_cast<std::int64_t>(spec.exponents[i][nu]) *
                                   static_cast<std::int64_t>(digits[nu]),
                               l_nu);
                num += part * (den / l_nu);
            }
            diag[k][i] = root_of_unity(num, den);
        }
    }
    return diag;
}

} // namespace

void CyclicCodeSpec::validate() const {
    if (relays < 1) throw ConfigError("spec: relay count must be at least 1");
    if (order < 1) throw ConfigError("spec: group order must be at least 1");
    if (exponents.size() != 2 * relays)
        throw ConfigError("spec: exponent vector must have length 2R");
    for (int u : exponents)
        if (u < 0 || static_cast<std::size_t>(u) >= order)
            throw ConfigError("spec: exponents must lie in [0, L)");
    if (gbh == GbhKind::real_hadamard && !power_of_two(relays))
        throw ConfigError("spec: real Hadamard relay matrices need a power-of-two relay count");
}

std::vector<int> CyclicCodeSpec::difference_vector() const {
    std::vector<int> v(relays);
    for (std::size_t i = 0; i < relays; ++i)
        v[i] = mod_reduce(exponents[i] - exponents[relays + i],
                          static_cast<std::int64_t>(order));
    return v;
}

CyclicCodeSpec CyclicCodeSpec::from_v(std::size_t relays, std::size_t order,
                                      const std::vector<int>& v, GbhKind gbh) {
    if (v.size() != relays) throw ConfigError("from_v: v must have length R");
    CyclicCodeSpec spec;
    spec.relays = relays;
    spec.order = order;
    spec.gbh = gbh;
    spec.exponents.assign(2 * relays, 0);
    for (std::size_t i = 0; i < relays; ++i)
        spec.exponents[i] = mod_reduce(v[i], static_cast<std::int64_t>(order));
    spec.validate();
    return spec;
}

void AbelianCodeSpec::validate() const {
    if (relays < 1) throw ConfigError("spec: relay count must be at least 1");
    if (orders.empty()) throw ConfigError("spec: need at least one cyclic factor");
    for (std::size_t l : orders)
        if (l < 1) throw ConfigError("spec: factor orders must be at least 1");
    if (exponents.size() != 2 * relays)
        throw ConfigError("spec: exponent table must have 2R rows");
    for (const auto& row : exponents) {
        if (row.size() != orders.size())
            throw ConfigError("spec: exponent rows must have one entry per factor");
        for (std::size_t nu = 0; nu < row.size(); ++nu)
            if (row[nu] < 0 || static_cast<std::size_t>(row[nu]) >= orders[nu])
                throw ConfigError("spec: exponents must lie in [0, L_nu)");
    }
    if (gbh == GbhKind::real_hadamard && !power_of_two(relays))
        throw ConfigError("spec: real Hadamard relay matrices need a power-of-two relay count");
}

std::size_t AbelianCodeSpec::group_order() const {
    std::size_t total = 1;
    for (std::size_t l : orders) total *= l;
    return total;
}

std::vector<std::size_t> AbelianCodeSpec::mixed_radix(std::size_t k) const {
    std::vector<std::size_t> digits(orders.size());
    for (std::size_t nu = 0; nu < orders.size(); ++nu) {
        digits[nu] = k % orders[nu];
        k /= orders[nu];
    }
    return digits;
}

CMatrix gbh_matrix(std::size_t n, GbhKind kind) {
    if (n < 1) throw ConstructionError("gbh_matrix: order must be at least 1");
    if (kind == GbhKind::real_hadamard) {
        if (!power_of_two(n))
            throw ConstructionError("gbh_matrix: Sylvester Hadamard order must be a power of two");
        CMatrix m(1, 1);
        m(0, 0) = 1.0;
        for (std::size_t half = 1; half < n; half *= 2) {
            CMatrix next(2 * half, 2 * half);
            for (std::size_t i = 0; i < half; ++i)
                for (std::size_t j = 0; j < half; ++j) {
                    next(i, j) = m(i, j);
                    next(i, j + half) = m(i, j);
                    next(i + half, j) = m(i, j);
                    next(i + half, j + half) = -m(i, j);
                }
            m = std::move(next);
        }
        return m;
    }
    CMatrix m(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            m(p, q) = root_of_unity(static_cast<std::int64_t>(p * q),
                                    static_cast<std::int64_t>(n));
    return m;
}

CMatrix build_gamma(const CMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("build_gamma: matrix must be square");
    const std::size_t n = m.rows();
    CMatrix g(2 * n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            g(i, j) = m(i, j);
            g(i + n, j) = m(i, j);
        }
    return g;
}

std::vector<CMatrix> relay_matrices(const CMatrix& gamma) {
    const std::size_t t = gamma.rows();
    const std::size_t r = gamma.cols();
    if (t != 2 * r) throw DimensionError("relay_matrices: gamma must be 2R x R");
    std::vector<CMatrix> out;
    out.reserve(r);
    for (std::size_t j = 0; j < r; ++j) {
        CMatrix a(t, t);
        for (std::size_t i = 0; i < t; ++i) {
            const Complex e = gamma(i, j);
            if (std::abs(std::abs(e) - 1.0) > kUnitTol)
                throw ConstructionError("relay_matrices: gamma entry off the unit circle");
            a(i, i) = e;
        }
        out.push_back(std::move(a));
    }
    return out;
}

Codebook build_codebook(const CyclicCodeSpec& spec) {
    spec.validate();
    CMatrix gamma = build_gamma(gbh_matrix(spec.relays, spec.gbh));
    std::vector<CMatrix> relay = relay_matrices(gamma);
    return assemble(spec.relays, std::move(gamma), std::move(relay),
                    cyclic_diagonals(spec), false);
}

Codebook build_codebook(const AbelianCodeSpec& spec) {
    spec.validate();
    CMatrix gamma = build_gamma(gbh_matrix(spec.relays, spec.gbh));
    std::vector<CMatrix> relay = relay_matrices(gamma);
    return assemble(spec.relays, std::move(gamma), std::move(relay),
                    abelian_diagonals(spec), false);
}

Codebook build_codebook_with_relays(const CyclicCodeSpec& spec,
                                    const std::vector<CMatrix>& relay) {
    spec.validate();
    if (relay.size() != spec.relays)
        throw DimensionError("build_codebook_with_relays: need one matrix per relay");
    const std::size_t t = 2 * spec.relays;
    for (const CMatrix& a : relay)
        if (a.rows() != t || a.cols() != t)
            throw DimensionError("build_codebook_with_relays: relay matrices must be 2R x 2R");
    return assemble(spec.relays, build_gamma(gbh_matrix(spec.relays, spec.gbh)),
                    relay, cyclic_diagonals(spec), true);
}

CMatrix codeword(const CyclicCodeSpec& spec, std::size_t k) {
    spec.validate();
    if (k >= spec.order) throw std::invalid_argument("codeword: index out of range");
    const std::size_t t = 2 * spec.relays;
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));
    const CMatrix gamma = build_gamma(gbh_matrix(spec.relays, spec.gbh));
    CMatrix s(t, spec.relays);
    for (std::size_t i = 0; i < t; ++i) {
        const Complex d = root_of_unity(static_cast<std::int64_t>(spec.exponents[i]) *
                                            static_cast<std::int64_t>(k),
                                        static_cast<std::int64_t>(spec.order));
        for (std::size_t j = 0; j < spec.relays; ++j) s(i, j) = scale * d * gamma(i, j);
    }
    return s;
}

CMatrix codeword_from_relays(const CyclicCodeSpec& spec, std::size_t k) {
    spec.validate();
    if (k >= spec.order) throw std::invalid_argument("codeword: index out of range");
    const std::size_t t = 2 * spec.relays;
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));
    const std::vector<CMatrix> relay = relay_matrices(build_gamma(gbh_matrix(spec.relays, spec.gbh)));
    CVector src(t);
    for (std::size_t i = 0; i < t; ++i)
        src[i] = scale * root_of_unity(static_cast<std::int64_t>(spec.exponents[i]) *
                                           static_cast<std::int64_t>(k),
                                       static_cast<std::int64_t>(spec.order));
    CMatrix s(t, spec.relays);
    for (std::size_t j = 0; j < spec.relays; ++j) {
        const CVector col = matvec(relay[j], src);
        for (std::size_t i = 0; i < t; ++i) s(i, j) = col[i];
    }
    return s;
}

CVector source_vector(const Codebook& cb, std::size_t k) {
    if (k >= cb.size) throw std::invalid_argument("source_vector: index out of range");
    const std::size_t t = 2 * cb.relays;
    CVector s(t);
    for (std::size_t i = 0; i < t; ++i) s[i] = cb.group_diag[k][i] * cb.base[i];
    return s;
}

bool is_fully_diverse_gcd(const CyclicCodeSpec& spec) {
    spec.validate();
    for (int v : spec.difference_vector()) {
        // gcd(0, L) = L, so equal exponent pairs fail as they must.
        if (std::gcd(static_cast<std::int64_t>(v), static_cast<std::int64_t>(spec.order)) != 1)
            return false;
    }
    return true;
}

DiversityReport is_fully_diverse_bruteforce(const Codebook& cb, double tol,
                                            std::size_t order_cap) {
    if (cb.size > order_cap)
        throw ConfigError("bruteforce diversity: codebook size " + std::to_string(cb.size) +
                          " exceeds cap " + std::to_string(order_cap));
    DiversityReport report;
    report.min_det = std::numeric_limits<double>::infinity();
    report.coding_gain = std::numeric_limits<double>::infinity();
    report.fully_diverse = true;

    const std::size_t t = 2 * cb.relays;
    for (std::size_t a = 0; a < cb.size; ++a) {
        for (std::size_t b = a + 1; b < cb.size; ++b) {
            CMatrix juxtaposed(t, t);
            for (std::size_t i = 0; i < t; ++i)
                for (std::size_t j = 0; j < cb.relays; ++j) {
                    juxtaposed(i, j) = cb.codewords[a](i, j);
                    juxtaposed(i, j + cb.relays) = cb.codewords[b](i, j);
                }
            const double det =
                determinant(matmul(conj_transpose(juxtaposed), juxtaposed)).real();
            if (det < report.min_det) report.min_det = det;
            if (det <= tol && !report.failing_pair) {
                report.fully_diverse = false;
                report.failing_pair = {a, b};
            }

            // Cosine-product separation of the same pair; the group elements
            // are diagonal so slot i and slot R+i combine into one angle.
            double gain = 1.0;
            for (std::size_t i = 0; i < cb.relays; ++i) {
                const Complex ratio = cb.group_diag[a][i] * std::conj(cb.group_diag[b][i]) *
                                      std::conj(cb.group_diag[a][cb.relays + i]) *
                                      cb.group_diag[b][cb.relays + i];
                gain *= 1.0 - ratio.real();
            }
            if (gain < report.coding_gain) report.coding_gain = gain;
        }
    }
    return report;
}

bool abelian_diversity_check(const AbelianCodeSpec& spec) {
    spec.validate();
    const std::size_t nfac = spec.orders.size();
    std::int64_t den = 1;
    for (std::size_t l : spec.orders) den = std::lcm(den, static_cast<std::int64_t>(l));

    // Differences of group elements cover every nonzero tuple of residues, so
    // scan those directly instead of all ordered pairs.
    std::vector<std::size_t> d(nfac, 0);
    const std::size_t total = spec.group_order();
    for (std::size_t idx = 1; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t nu = 0; nu < nfac; ++nu) {
            d[nu] = rem % spec.orders[nu];
            rem /= spec.orders[nu];
        }
        for (std::size_t i = 0; i < spec.relays; ++i) {
            std::int64_t num = 0;
            for (std::size_t nu = 0; nu < nfac; ++nu) {
                const auto l_nu = static_cast<std::int64_t>(spec.orders[nu]);
                const std::int64_t du = spec.exponents[i][nu] - spec.exponents[spec.relays + i][nu];
                num += static_cast<std::int64_t>(mod_reduce(
                           static_cast<std::int64_t>(d[nu]) * du, l_nu)) *
                       (den / l_nu);
            }
            if (num % den == 0) return false;
        }
    }
    return true;
}

PairSeparation pair_determinant_delta(const CyclicCodeSpec& spec, std::size_t a,
                                      std::size_t b) {
    spec.validate();
    if (a >= spec.order || b >= spec.order)
        throw std::invalid_argument("pair_determinant_delta: index out of range");
    if (a == b) throw std::invalid_argument("pair_determinant_delta: indices must differ");

    const auto order = static_cast<std::int64_t>(spec.order);
    const std::int64_t d = mod_reduce(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b), order);
    const std::vector<int> v = spec.difference_vector();
    const auto r = static_cast<double>(spec.relays);

    PairSeparation sep;
    sep.deltas.reserve(spec.relays);
    double prod = 1.0;
    for (std::size_t i = 0; i < spec.relays; ++i) {
        const double delta = r * (1.0 - cos_of_root(d * v[i], order));
        sep.deltas.push_back(delta);
        prod *= delta;
    }
    sep.det = std::pow(1.0 / (2.0 * r), r) * prod;
    return sep;
}

PairSeparation pair_determinant_delta(const AbelianCodeSpec& spec, std::size_t a,
                                      std::size_t b) {
    spec.validate();
    const std::size_t total = spec.group_order();
    if (a >= total || b >= total)
        throw std::invalid_argument("pair_determinant_delta: index out of range");
    if (a == b) throw std::invalid_argument("pair_determinant_delta: indices must differ");

    std::int64_t den = 1;
    for (std::size_t l : spec.orders) den = std::lcm(den, static_cast<std::int64_t>(l));
    const std::vector<std::size_t> la = spec.mixed_radix(a);
    const std::vector<std::size_t> lb = spec.mixed_radix(b);
    const auto r = static_cast<double>(spec.relays);

    PairSeparation sep;
    sep.deltas.reserve(spec.relays);
    double prod = 1.0;
    for (std::size_t i = 0; i < spec.relays; ++i) {
        std::int64_t num = 0;
        for (std::size_t nu = 0; nu < spec.orders.size(); ++nu) {
            const auto l_nu = static_cast<std::int64_t>(spec.orders[nu]);
            const std::int64_t dl = static_cast<std::int64_t>(la[nu]) - static_cast<std::int64_t>(lb[nu]);
            const std::int64_t du = spec.exponents[i][nu] - spec.exponents[spec.relays + i][nu];
            num += static_cast<std::int64_t>(mod_reduce(dl * du, l_nu)) * (den / l_nu);
        }
        const double delta = r * (1.0 - cos_of_root(num, den));
        sep.deltas.push_back(delta);
        prod *= delta;
    }
    sep.det = std::pow(1.0 / (2.0 * r), r) * prod;
    return sep;
}

double coding_gain(const CyclicCodeSpec& spec) {
    spec.validate();
    if (spec.order < 2) return std::numeric_limits<double>::infinity();
    const std::vector<int> v = spec.difference_vector();
    const auto order = static_cast<std::int64_t>(spec.order);
    double best = std::numeric_limits<double>::infinity();
    // The product for difference class d equals the one for L - d, so only
    // half the classes need a scan.
    for (std::int64_t d = 1; d <= order / 2; ++d) {
        double prod = 1.0;
        for (std::size_t i = 0; i < spec.relays; ++i)
            prod *= 1.0 - cos_of_root(d * v[i], order);
        best = std::min(best, prod);
    }
    return best;
}

GainSearchResult search_best_v(std::size_t relays, std::size_t order,
                               SearchConstraint constraint, std::size_t order_cap) {
    if (relays < 1) throw ConfigError("gain search: relay count must be at least 1");
    if (order < 2) throw ConfigError("gain search: group order must be at least 2");
    if (order > order_cap)
        throw ConfigError("gain search: order " + std::to_string(order) + " exceeds cap " +
                          std::to_string(order_cap));

    const auto l = static_cast<std::int64_t>(order);
    std::vector<int> units; // folded residues coprime to L
    for (std::int64_t c = 1; 2 * c <= l; ++c)
        if (std::gcd(c, l) == 1) units.push_back(static_cast<int>(c));
    // L = 2 has the single unit 1, already <= L/2; larger L always has 1.

    // factor[ci][d-1] = 1 - cos(2 pi units[ci] d / L) for d = 1..L/2
    const std::size_t half = static_cast<std::size_t>(l / 2);
    std::vector<std::vector<double>> factor(units.size(), std::vector<double>(half));
    for (std::size_t ci = 0; ci < units.size(); ++ci)
        for (std::size_t d = 1; d <= half; ++d)
            factor[ci][d - 1] =
                1.0 - cos_of_root(static_cast<std::int64_t>(units[ci]) *
                                      static_cast<std::int64_t>(d),
                                  l);

    double evaluations = 1.0;
    for (std::size_t i = 0; i < relays; ++i)
        evaluations *= static_cast<double>(units.size() + i) / static_cast<double>(i + 1);
    if (evaluations * static_cast<double>(half) > 2e9)
        throw ConfigError("gain search: candidate space too large for this order/relay count");

    GainSearchResult best;
    best.gain = -1.0;

    auto evaluate = [&](const std::vector<std::size_t>& pick) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < half; ++d) {
            double prod = 1.0;
            for (std::size_t ci : pick) prod *= factor[ci][d];
            if (prod < worst) worst = prod;
        }
        if (worst > best.gain) {
            best.gain = worst;
            best.v.clear();
            for (std::size_t ci : pick) best.v.push_back(units[ci]);
        }
    };

    if (constraint == SearchConstraint::scalar) {
        std::vector<std::size_t> pick(relays);
        for (std::size_t ci = 0; ci < units.size(); ++ci) {
            std::fill(pick.begin(), pick.end(), ci);
            evaluate(pick);
        }
        return best;
    }

    // none / equal_tail: the equal-tail restriction on the raw exponents does
    // not restrict the reachable difference vectors, so both scan the same
    // space: non-decreasing index vectors (multisets) over the folded units.
    std::vector<std::size_t> pick(relays, 0);
    for (;;) {
        evaluate(pick);
        std::size_t pos = relays;
        while (pos > 0 && pick[pos - 1] == units.size() - 1) --pos;
        if (pos == 0) break;
        const std::size_t next = pick[pos - 1] + 1;
        for (std::size_t i = pos - 1; i < relays; ++i) pick[i] = next;
    }
    return best;
}

const char* to_string(GbhKind kind) {
    return kind == GbhKind::real_hadamard ? "real_hadamard" : "dft";
}

GbhKind gbh_from_string(const std::string& s) {
    if (s == "real_hadamard" || s == "hadamard") return GbhKind::real_hadamard;
    if (s == "dft") return GbhKind::dft;
    throw ConfigError("unknown gbh_kind '" + s + "' (expected real_hadamard or dft)");
}

} // namespace dstbc
