#pragma once

#include "holv/model.hpp"
#include "holv/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holv {

// Find x >= 0 with B x^2 + A x + q >= 0 and x^T (B x^2 + A x + q) = 0.
class QcpProblem {
public:
    QcpProblem(CubicalTensor b, Matrix a, Vector q);

    const CubicalTensor& b() const { return b_; }
    const Matrix& a() const { return a_; }
    const Vector& q() const { return q_; }
    int dim() const { return static_cast<int>(q_.size()); }

    // F(x) = A x + B x^2
    Vector F(const Vector& x) const { return a_ * x + tvp(b_, x); }
    Vector slack(const Vector& x) const { return F(x) + q_; }
    Matrix jacobian(const Vector& x) const { return a_ + tvp_jacobian(b_, x); }

private:
    CubicalTensor b_;
    Matrix a_;
    Vector q_;
};

// {i : q_i < 0}
std::vector<int> omega(const Vector& q);

struct NormBoundsRow {
    int k = 0;
    double s_a = 0.0;
    double s_b = 0.0;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double lower = 0.0;  // quadratic-formula root with (s_B, s_A)
    double upper = 0.0;  // quadratic-formula root with (delta_B, delta_A)
};

struct NormBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<NormBoundsRow> per_index;
};

// Bounds on ||x||_inf over all solutions when A and B are generalized row
// strictly diagonally dominant with positive diagonals and q has a negative
// entry. Throws NotApplicable naming the failing row otherwise.
NormBounds norm_bounds(const QcpProblem& problem);

// Root of c2 s^2 + c1 s + c0 = 0 with c2 > 0, c0 < 0, in a cancellation-free form.
double positive_quadratic_root(double c2, double c1, double c0);

struct PcpSolution {
    Vector x;
    Vector slack;
    std::vector<int> support;
};

enum class SupportStatus { solved, no_root, undetermined };
std::string to_string(SupportStatus s);

struct SupportOutcome {
    std::vector<int> support;
    SupportStatus status = SupportStatus::no_root;
    // Positive roots of the restricted equations, before the slack filter.
    int roots_found = 0;
    int roots_accepted = 0;
};

struct EnumerationOptions {
    double tol = 1e-9;
    // Starting points per support; 0 selects 2n + 1.
    int newton_starts = 0;
    std::uint64_t seed = 0;
    double dedup_radius = 1e-6;
};

struct PcpEnumeration {
    std::vector<PcpSolution> solutions;
    std::vector<SupportOutcome> supports;
};

// Enumerates every support S, solves (F(x) + q)_S = 0 with x outside S zero
// by multi-start damped Newton, and keeps roots with x_S > tol and slack >= -tol
// off S. Supports are processed in parallel and merged in lexicographic order.
PcpEnumeration brute_force_solve(const QcpProblem& problem, const EnumerationOptions& options = {});

// Positive roots of (B x^2 + A x + q)_S = 0 on one support, without any slack
// filter. Roots are returned as full-length vectors, deduplicated.
struct SupportRoots {
    std::vector<Vector> roots;
    bool singular = false;  // every start hit a singular Jacobian
};
SupportRoots support_roots(const QcpProblem& problem, const std::vector<int>& support, const EnumerationOptions& options);

// Checks the complementarity conditions directly: x >= 0, slack >= -tol,
// |x^T slack| < tol, on-support slack within tol of 0.
bool verify_complementarity(const QcpProblem& problem, const Vector& x, double tol);

// True iff x = 0 is the only solution of the homogeneous problem (B, 0, 0),
// scanned support by support on the simplex. Invariant under B -> c B, c > 0.
bool leading_sol_zero(const CubicalTensor& b, double tol = 1e-9);

// Sufficient conditions for a nonempty compact solution set for every q:
// SOL(B, 0) = {0} together with SOL(B x^2, d) = {0} or SOL(F, d) = {0}.
struct NonemptinessCheck {
    bool leading_zero = false;
    bool leading_with_d_zero = false;
    bool full_with_d_zero = false;
    bool guaranteed = false;
};
NonemptinessCheck nonemptiness_check(const QcpProblem& problem, const std::optional<Vector>& d = std::nullopt,
                                     const EnumerationOptions& options = {});

enum class Orientation { stable_side, unstable_side };

// Equilibria with L(x) <= 0 off the support solve (-B, -A, -1); those with
// L(x) >= 0 off the support solve (B, A, 1).
QcpProblem lv_to_pcp(const LVModel& model, Orientation orientation);

}  // namespace holv
