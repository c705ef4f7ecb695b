#pragma once

#include "holv/tensor.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace holv {

struct SpectralRadius {
    double value = 0.0;
    // Collatz bounds min_i / max_i of (B x^{m-1})_i / x_i^{m-1} for the
    // original tensor at the final iterate. Both are rigorous for any x > 0.
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;
    bool converged = false;
    // The support digraph was not strongly connected, so the value comes from
    // two all-ones shifted runs extrapolated to zero shift.
    bool reducible = false;
    // Final positive iterate, normalized to max 1.
    Vector perron;
    // Per-iteration (lower, upper) bracket of the run that produced perron.
    std::vector<std::array<double, 2>> trace;
};

// Perron value of an entrywise nonnegative tensor by shifted power iteration.
// The run stops once upper - lower < tol * max(1, upper). Throws InputError on
// a negative entry; non-convergence is reported through `converged`.
SpectralRadius spectral_radius_nonneg(const CubicalTensor& b, double tol = 1e-10, int max_iter = 10000);

// Strong connectivity of the support digraph, with an edge j -> i whenever
// some off-diagonal entry in row i involves index j. A single index counts as
// connected.
bool is_irreducible(const CubicalTensor& a);

// v > 0 and min_i (A v^{m-1})_i > 0, evaluated exactly as stored.
bool certifies(const CubicalTensor& a, const Vector& v);

// Searches for a positive v with A_t v^{m_t - 1} > 0 for every given tensor,
// trying the hint, then the all-ones vector, then multiplicative ascent of the
// normalized minimum over the simplex. Absence means "not certified".
std::optional<Vector> shared_s_certificate(std::span<const CubicalTensor> terms,
                                           const std::optional<Vector>& hint = std::nullopt,
                                           int max_iter = 10000);

std::optional<Vector> s_tensor_certificate(const CubicalTensor& a,
                                           const std::optional<Vector>& hint = std::nullopt,
                                           int max_iter = 10000);

struct ClassifyOptions {
    std::optional<Vector> hint;
    double tol = 1e-10;
    int max_iter = 10000;
};

struct TensorClassReport {
    bool is_metzler = false;
    bool is_diag_dominant = false;
    bool is_strictly_diag_dominant = false;
    bool is_m_tensor = false;
    bool is_nonsingular_m = false;
    bool is_h_tensor = false;
    bool is_h_plus = false;
    bool is_generalized_row_sdd_pos_diag = false;
    bool is_irreducible = false;
    std::optional<Vector> s_certificate;
    // Where the certificate came from: hint, ones, comparison, ascent.
    std::string s_certificate_source;
    // rho(sI - A) with s = max diagonal; present only when every off-diagonal
    // entry is <= 0, i.e. when the M-test is meaningful.
    std::optional<double> spectral_radius_of_majorant;
    std::optional<double> m_shift;
    // Same quantities for the comparison tensor (the H-test).
    std::optional<double> comparison_spectral_radius;
    std::optional<double> comparison_shift;
    std::vector<std::string> notes;
};

TensorClassReport classify(const CubicalTensor& a, const ClassifyOptions& options = {});

// Outcome of the M-test: s = max diagonal, B = sI - A, compare s with rho(B).
struct MTest {
    bool z_pattern = false;  // all off-diagonal entries <= 0
    bool is_m = false;
    bool nonsingular = false;
    double shift = 0.0;
    std::optional<SpectralRadius> rho;
};
MTest m_tensor_test(const CubicalTensor& a, double tol = 1e-10, int max_iter = 10000);

}  // namespace holv
