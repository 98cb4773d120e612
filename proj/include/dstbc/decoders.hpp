#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dstbc/channel.hpp"
#include "dstbc/code.hpp"
#include "dstbc/linalg.hpp"

namespace dstbc {

// The five partially-coherent ML decoders. They share one argmax: full_pdf
// evaluates the Gaussian likelihood directly and serves as the oracle;
// unitary reduces it to a weighted quadratic form (valid for any unitary
// codebook); cyclic specializes that form to cyclic codebooks; the reduced
// variants drop terms that the exponent structure makes independent of the
// codeword index.
enum class DecoderKind {
    full_pdf,
    unitary,
    cyclic,
    reduced_tail,  // requires u_{R+1} = ... = u_{2R}
    reduced_scalar // additionally u_1 = ... = u_R with gcd(u_1 - u_{R+1}, L) = 1
};

const char* to_string(DecoderKind kind);
// CLI names: full | unitary | ncdstbc | reduced-tail | reduced-scalar.
DecoderKind decoder_from_string(const std::string& s);

// Throws ContractViolation when the spec does not satisfy the decoder's
// exponent constraints.
void check_decoder_constraints(DecoderKind kind, const CyclicCodeSpec& spec);

// Quantities shared by the cyclic-form decoders for one received block.
// beta_j = |g_j|^2 (|g_j|^2 + gamma/rho)^{-1} in [0, 1), zero for dead
// relays; omega = M diag(beta) M^H is Hermitian with M the spec's GBH
// matrix; root = exp(j 2 pi / L).
struct MetricContext {
    double rho = 0.0;
    double gamma = 0.0;
    std::vector<double> beta;
    CMatrix omega;
    Complex root;
};

MetricContext make_metric_context(const CyclicCodeSpec& spec, const CVector& g,
                                  const PowerConfig& powers,
                                  const std::vector<bool>& alive = {});

std::vector<double> beta_weights(const CVector& g, const PowerConfig& powers,
                                 const std::vector<bool>& alive = {});

// Per-codeword metric vectors (one value per k, argmax-equivalent across
// deciders up to monotone transforms). Exposed for equivalence and tie
// analysis; the decode_* functions below return the first argmax, so exact
// ties resolve to the smallest index.
std::vector<double> full_pdf_metrics(const CVector& y, const Codebook& cb,
                                     const CVector& g, const PowerConfig& powers,
                                     const std::vector<bool>& alive = {});
std::vector<double> unitary_metrics(const CVector& y, const Codebook& cb,
                                    const CVector& g, const PowerConfig& powers,
                                    const std::vector<bool>& alive = {});
std::vector<double> cyclic_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                   const CVector& g, const PowerConfig& powers,
                                   const std::vector<bool>& alive = {});
std::vector<double> reduced_tail_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                         const CVector& g, const PowerConfig& powers,
                                         const std::vector<bool>& alive = {});
std::vector<double> reduced_scalar_metrics(const CVector& y, const CyclicCodeSpec& spec,
                                           const CVector& g, const PowerConfig& powers,
                                           const std::vector<bool>& alive = {});

std::size_t decode_full_pdf(const CVector& y, const Codebook& cb, const CVector& g,
                            const PowerConfig& powers, const std::vector<bool>& alive = {});
std::size_t decode_unitary(const CVector& y, const Codebook& cb, const CVector& g,
                           const PowerConfig& powers, const std::vector<bool>& alive = {});
std::size_t decode_cyclic(const CVector& y, const CyclicCodeSpec& spec, const CVector& g,
                          const PowerConfig& powers, const std::vector<bool>& alive = {});
std::size_t decode_reduced_tail(const CVector& y, const CyclicCodeSpec& spec,
                                const CVector& g, const PowerConfig& powers,
                                const std::vector<bool>& alive = {});
std::size_t decode_reduced_scalar(const CVector& y, const CyclicCodeSpec& spec,
                                  const CVector& g, const PowerConfig& powers,
                                  const std::vector<bool>& alive = {});

std::size_t decode(DecoderKind kind, const CVector& y, const Codebook& cb,
                   const CyclicCodeSpec& spec, const CVector& g,
                   const PowerConfig& powers, const std::vector<bool>& alive = {});

std::size_t argmax_first(const std::vector<double>& metrics);

} // namespace dstbc
