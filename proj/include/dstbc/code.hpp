#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "dstbc/linalg.hpp"

namespace dstbc {

// Which generalized Butson-Hadamard matrix backs the relay set: the
// Sylvester +/-1 Hadamard matrix (order a power of two) or the DFT matrix
// (any order).
enum class GbhKind { real_hadamard, dft };

// A cyclic codebook of 2R x R unitary codewords S_k = (1/sqrt(2R)) D^k Gamma,
// where D = diag(exp(j 2 pi u_i / L)) generates a cyclic group of order L and
// Gamma stacks the chosen GBH matrix on itself. Fully determined by
// (R, L, u, gbh).
struct CyclicCodeSpec {
    std::size_t relays = 1;     // R
    std::size_t order = 2;      // L, number of codewords
    std::vector<int> exponents; // u, length 2R, entries in [0, L)
    GbhKind gbh = GbhKind::real_hadamard;

    void validate() const; // throws ConfigError
    // v_i = (u_i - u_{R+i}) mod L; the diversity and gain of the code depend
    // on u only through this vector.
    std::vector<int> difference_vector() const;
    // Spec with u = [v_1 .. v_R, 0 .. 0]; the all-equal tail keeps the
    // reduced decoders applicable.
    static CyclicCodeSpec from_v(std::size_t relays, std::size_t order,
                                 const std::vector<int>& v,
                                 GbhKind gbh = GbhKind::real_hadamard);
};

// Diagonal unitary group that is a direct product of K cyclic factors with
// orders L_1..L_K; exponents[i][nu] is the exponent of diagonal slot i in
// factor nu. Group elements are indexed 0..L-1 in mixed radix with the first
// factor fastest.
struct AbelianCodeSpec {
    std::size_t relays = 1;
    std::vector<std::size_t> orders;
    std::vector<std::vector<int>> exponents; // [2R][K]
    GbhKind gbh = GbhKind::real_hadamard;

    void validate() const;
    std::size_t group_order() const; // L = prod L_nu
    std::vector<std::size_t> mixed_radix(std::size_t k) const;
};

// M of order n with unit-modulus entries and M M^H = n I.
CMatrix gbh_matrix(std::size_t n, GbhKind kind);

// 2R x R stack [M; M].
CMatrix build_gamma(const CMatrix& m);

// Diagonal unitary A_j = diag of column j of gamma. Rejects entries away
// from the unit circle (that variant breaks the quadratic-form decoder).
std::vector<CMatrix> relay_matrices(const CMatrix& gamma);

struct Codebook {
    std::size_t relays = 0;          // R
    std::size_t size = 0;            // L
    CMatrix gamma;                   // 2R x R
    std::vector<CMatrix> relay;      // R diagonal 2R x 2R unitaries
    std::vector<CVector> group_diag; // L diagonals of D^k, length 2R
    std::vector<CMatrix> codewords;  // L matrices, 2R x R
    CVector base;                    // x = (1/sqrt(2R)) [1 .. 1]^T
    bool unitary = true;             // every S_k^H S_k == I_R within 1e-12
};

Codebook build_codebook(const CyclicCodeSpec& spec);
Codebook build_codebook(const AbelianCodeSpec& spec);
// Test hook: substitute arbitrary relay matrices; the unitarity flag records
// whether the resulting codewords still satisfy S^H S = I.
Codebook build_codebook_with_relays(const CyclicCodeSpec& spec,
                                    const std::vector<CMatrix>& relay);

// (1/sqrt(2R)) D^k Gamma.
CMatrix codeword(const CyclicCodeSpec& spec, std::size_t k);
// Same codeword assembled column by column as [A_1 D^k x .. A_R D^k x];
// agrees with codeword() to floating-point roundoff.
CMatrix codeword_from_relays(const CyclicCodeSpec& spec, std::size_t k);
// What the source actually radiates in phase one: D^k x.
CVector source_vector(const Codebook& cb, std::size_t k);

// Full diversity iff gcd(v_i, L) = 1 for every i (v the difference vector).
bool is_fully_diverse_gcd(const CyclicCodeSpec& spec);

struct DiversityReport {
    bool fully_diverse = false;
    std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
    double min_det = 0.0;     // min over pairs of |S_ab^H S_ab|
    double coding_gain = 0.0; // min over pairs of prod_i (1 - cos theta_i)
};

// Exhaustive pair scan with the Gram determinant from linalg; refuses
// codebooks larger than order_cap.
DiversityReport is_fully_diverse_bruteforce(const Codebook& cb, double tol = 1e-9,
                                            std::size_t order_cap = 4096);

// Exact integer test of the abelian full-diversity condition: for every
// nonzero difference tuple d and every slot i,
// sum_nu d_nu (u_{i,nu} - u_{R+i,nu}) / L_nu must not be an integer.
bool abelian_diversity_check(const AbelianCodeSpec& spec);

struct PairSeparation {
    double det = 0.0;           // closed-form |S_ab^H S_ab|
    std::vector<double> deltas; // delta_i = R (1 - cos theta_i)
};

// Closed form of the pair Gram determinant: (1/2R)^R prod_i delta_i.
PairSeparation pair_determinant_delta(const CyclicCodeSpec& spec, std::size_t a,
                                      std::size_t b);
PairSeparation pair_determinant_delta(const AbelianCodeSpec& spec, std::size_t a,
                                      std::size_t b);

// min over codeword pairs of prod_i [1 - cos(2 pi d v_i / L)]; depends only
// on the difference class d, so the scan is O(L).
double coding_gain(const CyclicCodeSpec& spec);

enum class SearchConstraint {
    none,       // free difference vector
    equal_tail, // u_{R+1} = ... = u_{2R}; does not restrict v
    scalar      // v_1 = ... = v_R
};

struct GainSearchResult {
    std::vector<int> v;
    double gain = 0.0;
};

// Exhaustive gain maximization over difference vectors with entries coprime
// to L (anything else has zero gain). The gain is invariant under coordinate
// permutation and per-coordinate negation mod L, so candidates are folded to
// sorted vectors with entries <= L/2; ties break to the lexicographically
// smallest folded vector.
GainSearchResult search_best_v(std::size_t relays, std::size_t order,
                               SearchConstraint constraint,
                               std::size_t order_cap = 4096);

const char* to_string(GbhKind kind);
GbhKind gbh_from_string(const std::string& s);

} // namespace dstbc
