#pragma once

#include "holv/error.hpp"
#include "holv/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace holv {

// The equation sum_i A_i x^{m_i - 1} = b with distinct orders m_i >= 2 and b > 0.
class PolySystem {
public:
    PolySystem(std::vector<CubicalTensor> terms, Vector rhs);

    // Sorted by increasing order.
    const std::vector<CubicalTensor>& terms() const { return terms_; }
    const Vector& rhs() const { return rhs_; }
    int dim() const { return static_cast<int>(rhs_.size()); }

    // sum_i A_i x^{m_i - 1}
    Vector evaluate(const Vector& x) const;
    Vector residual(const Vector& x) const { return evaluate(x) - rhs_; }
    Matrix jacobian(const Vector& x) const;

private:
    std::vector<CubicalTensor> terms_;
    Vector rhs_;
};

// Divides row j of every tensor by b_j, giving an equivalent system with rhs 1.
PolySystem normalize_rhs(const PolySystem& system);

// A = D(alpha) - b_part + n_part, where D(alpha) is diagonal with
// alpha_j = max(0, a_j...j) per row, b_part >= 0 holds alpha - diagonal and the
// negated negative off-diagonals, and n_part >= 0 the positive off-diagonals.
struct SplitTerm {
    int order = 2;
    Vector alpha = Vector::Zero(1);
    CubicalTensor b_part{2, 1};
    CubicalTensor n_part{2, 1};

    CubicalTensor reconstruct() const;
};
SplitTerm split_term(const CubicalTensor& a);

// f(x) = sum (D(alpha_i) + N_i) x^{i-1}, g(x) = sum B_i x^{i-1} + 1 for a system
// with rhs 1, and the fixed-point map T = f^{-1} o g.
class SplitSystem {
public:
    explicit SplitSystem(const PolySystem& system);

    const std::vector<SplitTerm>& terms() const { return terms_; }
    int dim() const { return dim_; }
    // True when some N_i is nonzero. Without it f is diagonal and T is isotone.
    bool has_positive_off_diagonal() const { return coupled_; }

    Vector f(const Vector& x) const;
    Vector g(const Vector& x) const;
    Matrix f_jacobian(const Vector& x) const;

private:
    std::vector<SplitTerm> terms_;
    Vector rhs_;
    int dim_;
    bool coupled_ = false;
};

// Solves f(x) = y for x > 0. Componentwise bisection when f is diagonal;
// damped Newton otherwise, with a componentwise sweep as fallback when the
// Jacobian is near singular. Throws NumericalFailure on failure.
Vector invert_f(const SplitSystem& split, const Vector& y, double tol = 1e-14, int max_iter = 200,
                const Vector* guess = nullptr);

struct BracketScalars {
    double t = 0.0;
    double w = 0.0;
};
// t and w with max_j phi_j(t) = 1 and min_j phi_j(w) = 1, where
// phi_j(s) = sum_i s^{i-1} (A_i v^{i-1})_j on the rhs-normalized system. The
// returned t errs low and w errs high, so t v is a sub- and w v a
// super-solution bound. Throws NotApplicable when some A_i v^{i-1} is not > 0.
BracketScalars bracket_scalars(const PolySystem& system, const Vector& v);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 5000;
    int inner_max_iter = 200;
};

enum class SolveStatus { positive, boundary_inconclusive };

struct SolveResult {
    Vector solution;
    double residual_inf = 0.0;
    int iters_below = 0;
    int iters_above = 0;
    std::vector<Vector> lower_trace;
    std::vector<Vector> upper_trace;
    // Both one-sided iterates met within 10 tol.
    bool unique_certified = false;
    // Lower trace nondecreasing, upper trace nonincreasing and lower <= upper,
    // up to a 1e-12 relative slack, as measured on this run.
    bool monotone = false;
    Vector bracket_low;
    Vector bracket_high;
    double t = 0.0;
    double w = 0.0;
    Vector certificate;
    Vector lower_limit;
    Vector upper_limit;
    SolveStatus status = SolveStatus::positive;
    std::string method;
};

// Thrown when either one-sided iteration hits max_iter; carries the traces.
class SolveDidNotConverge : public NumericalFailure {
public:
    SolveDidNotConverge(const std::string& what, SolveResult partial)
        : NumericalFailure(what), partial_(std::move(partial)) {}
    const SolveResult& partial() const { return partial_; }

private:
    SolveResult partial_;
};

// Two-sided iteration from t v and w v for S-systems sharing certificate v.
// Throws NotApplicable when no shared certificate is given or found.
SolveResult solve_s_tensor(const PolySystem& system, const std::optional<Vector>& certificate = std::nullopt,
                           const SolverOptions& options = {});

// Iteration from 0 and from w v for systems whose terms are all M-tensors.
// Throws NotApplicable naming the first term that fails the M-test.
SolveResult solve_m_tensor(const PolySystem& system, const SolverOptions& options = {});

// Plain iteration x <- T(x) from an arbitrary positive start.
struct PicardResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
};
PicardResult picard_iterate(const PolySystem& system, const Vector& x0, const SolverOptions& options = {});

// Checks a trace pair for the ordering of a monotone two-sided iteration.
bool traces_monotone(const std::vector<Vector>& lower, const std::vector<Vector>& upper, double rel_slack = 1e-12);

}  // namespace holv
