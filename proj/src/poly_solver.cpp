#include "holv/poly_solver.hpp"

#include "holv/tensor_class.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace holv {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool all_positive(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v(i) > 0.0) || !std::isfinite(v(i))) return false;
    return true;
}

// Smallest s >= 0 with sum_i alpha_i(j) s^{m_i - 1} >= target, to full double
// precision by bisection. The map is strictly increasing on s >= 0.
double scalar_inverse(const std::vector<SplitTerm>& terms, Eigen::Index j, double target) {
    if (target <= 0.0) return 0.0;
    auto phi = [&](double s) {
        double acc = 0.0;
        for (const auto& t : terms) acc += t.alpha(j) * std::pow(s, t.order - 1);
        return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (phi(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalFailure("scalar inverse diverged");
    }
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

Vector componentwise_inverse(const std::vector<SplitTerm>& terms, const Vector& y) {
    Vector x(y.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) x(j) = scalar_inverse(terms, j, y(j));
    return x;
}

struct SideRun {
    std::vector<Vector> trace;
    int iterations = 0;
    bool converged = false;
};

SideRun iterate_side(const PolySystem& original, const SplitSystem& split, const Vector& start,
                     const SolverOptions& opt) {
    SideRun run;
    Vector x = start;
    run.trace.push_back(x);
    for (int k = 1; k <= opt.max_iter; ++k) {
        const Vector guess = x;
        const Vector next = invert_f(split, split.g(x), 1e-14, opt.inner_max_iter, &guess);
        const double step = inf_norm(next - x);
        x = next;
        run.trace.push_back(x);
        run.iterations = k;
        if (step < opt.tol && inf_norm(original.residual(x)) < opt.tol) {
            run.converged = true;
            break;
        }
    }
    return run;
}

SolveResult assemble(const PolySystem& system, SideRun&& below, SideRun&& above, const SolverOptions& opt) {
    SolveResult r;
    r.iters_below = below.iterations;
    r.iters_above = above.iterations;
    r.bracket_low = below.trace.front();
    r.bracket_high = above.trace.front();
    r.lower_limit = below.trace.back();
    r.upper_limit = above.trace.back();
    r.lower_trace = std::move(below.trace);
    r.upper_trace = std::move(above.trace);
    r.monotone = traces_monotone(r.lower_trace, r.upper_trace);
    r.unique_certified = inf_norm(r.lower_limit - r.upper_limit) < 10.0 * opt.tol;
    const double res_low = inf_norm(system.residual(r.lower_limit));
    const double res_high = inf_norm(system.residual(r.upper_limit));
    r.solution = res_low <= res_high ? r.lower_limit : r.upper_limit;
    r.residual_inf = std::min(res_low, res_high);
    return r;
}

}  // namespace

PolySystem::PolySystem(std::vector<CubicalTensor> terms, Vector rhs) : terms_(std::move(terms)), rhs_(std::move(rhs)) {
    if (terms_.empty()) throw InputError("a polynomial system needs at least one term");
    std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.order() < b.order(); });
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (terms_[k].dim() != rhs_.size())
            throw InputError("term of order " + std::to_string(terms_[k].order()) + " has dimension " +
                             std::to_string(terms_[k].dim()) + ", rhs has length " + std::to_string(rhs_.size()));
        if (k > 0 && terms_[k].order() == terms_[k - 1].order())
            throw InputError("repeated term order " + std::to_string(terms_[k].order()));
    }
    for (Eigen::Index j = 0; j < rhs_.size(); ++j)
        if (!(rhs_(j) > 0.0) || !std::isfinite(rhs_(j)))
            throw InputError("rhs component " + std::to_string(j + 1) + " must be positive and finite");
}

Vector PolySystem::evaluate(const Vector& x) const {
    Vector acc = Vector::Zero(dim());
    for (const auto& t : terms_) acc += tvp(t, x);
    return acc;
}

Matrix PolySystem::jacobian(const Vector& x) const {
    Matrix acc = Matrix::Zero(dim(), dim());
    for (const auto& t : terms_) acc += tvp_jacobian(t, x);
    return acc;
}

PolySystem normalize_rhs(const PolySystem& system) {
    std::vector<CubicalTensor> scaled;
    for (const auto& t : system.terms()) {
        CubicalTensor s = t;
        for (std::size_t f = 0; f < s.size(); ++f) s.set_flat(f, t[f] / system.rhs()(static_cast<Eigen::Index>(f / t.row_size())));
        scaled.push_back(std::move(s));
    }
    return PolySystem(std::move(scaled), Vector::Ones(system.dim()));
}

CubicalTensor SplitTerm::reconstruct() const {
    CubicalTensor d(order, b_part.dim());
    for (int i = 0; i < d.dim(); ++i) d.set_flat(d.diagonal_flat(i), alpha(i));
    return d - b_part + n_part;
}

SplitTerm split_term(const CubicalTensor& a) {
    SplitTerm s;
    s.order = a.order();
    s.alpha = Vector::Zero(a.dim());
    for (int i = 0; i < a.dim(); ++i) s.alpha(i) = std::max(0.0, a.diagonal(i));
    s.b_part = CubicalTensor(a.order(), a.dim());
    s.n_part = CubicalTensor(a.order(), a.dim());
    for (std::size_t f = 0; f < a.size(); ++f) {
        if (a.is_diagonal_flat(f))
            s.b_part.set_flat(f, s.alpha(static_cast<Eigen::Index>(f / a.row_size())) - a[f]);
        else if (a[f] < 0.0)
            s.b_part.set_flat(f, -a[f]);
        else if (a[f] > 0.0)
            s.n_part.set_flat(f, a[f]);
    }
    return s;
}

SplitSystem::SplitSystem(const PolySystem& system) : rhs_(system.rhs()), dim_(system.dim()) {
    Vector alpha_sum = Vector::Zero(dim_);
    for (const auto& t : system.terms()) {
        terms_.push_back(split_term(t));
        alpha_sum += terms_.back().alpha;
        coupled_ = coupled_ || terms_.back().n_part.max_abs() > 0.0;
    }
    for (int j = 0; j < dim_; ++j)
        if (!(alpha_sum(j) > 0.0))
            throw NotApplicable("row " + std::to_string(j + 1) + " has no positive diagonal entry in any term, so f is not invertible");
}

Vector SplitSystem::f(const Vector& x) const {
    Vector acc = Vector::Zero(dim_);
    for (const auto& t : terms_) {
        acc += t.alpha.cwiseProduct(hadamard_power(x, t.order - 1));
        if (coupled_) acc += tvp(t.n_part, x);
    }
    return acc;
}

Vector SplitSystem::g(const Vector& x) const {
    Vector acc = rhs_;
    for (const auto& t : terms_) acc += tvp(t.b_part, x);
    return acc;
}

Matrix SplitSystem::f_jacobian(const Vector& x) const {
    Matrix jac = Matrix::Zero(dim_, dim_);
    for (const auto& t : terms_) {
        for (int j = 0; j < dim_; ++j) jac(j, j) += t.alpha(j) * (t.order - 1) * std::pow(x(j), t.order - 2);
        if (coupled_) jac += tvp_jacobian(t.n_part, x);
    }
    return jac;
}

Vector invert_f(const SplitSystem& split, const Vector& y, double tol, int max_iter, const Vector* guess) {
    if (y.size() != split.dim()) throw InputError("invert_f: vector length does not match the system");
    if (!all_positive(y)) throw NumericalFailure("invert_f needs a positive right-hand side");
    const auto& terms = split.terms();
    if (!split.has_positive_off_diagonal()) return componentwise_inverse(terms, y);

    const double scale = std::max(1.0, inf_norm(y));
    Vector x = guess && all_positive(*guess) ? *guess : componentwise_inverse(terms, y);
    auto n_part_sum = [&](const Vector& z) {
        Vector acc = Vector::Zero(split.dim());
        for (const auto& t : terms) acc += tvp(t.n_part, z);
        return acc;
    };
    auto sweep = [&](const Vector& z) { return componentwise_inverse(terms, y - n_part_sum(z)); };

    for (int it = 0; it < max_iter; ++it) {
        const Vector fx = split.f(x) - y;
        const double err = inf_norm(fx);
        if (err <= tol * scale && all_positive(x)) return x;
        Eigen::PartialPivLU<Matrix> lu(split.f_jacobian(x));
        bool stepped = false;
        if (lu.rcond() >= 1e-12) {
            const Vector d = -lu.solve(fx);
            for (double lambda = 1.0; lambda >= 0x1.0p-20; lambda *= 0.5) {
                const Vector trial = x + lambda * d;
                if (all_positive(trial) && inf_norm(split.f(trial) - y) < err) {
                    x = trial;
                    stepped = true;
                    break;
                }
            }
        }
        if (!stepped) {
            const Vector next = sweep(x);
            if (inf_norm(next - x) == 0.0) break;
            x = next;
        }
    }
    if (all_positive(x) && inf_norm(split.f(x) - y) <= 1e3 * tol * scale) return x;
    throw NumericalFailure("inner inverse of f did not converge to a positive point (residual " +
                           std::to_string(inf_norm(split.f(x) - y)) + ")");
}

BracketScalars bracket_scalars(const PolySystem& system, const Vector& v) {
    const PolySystem normalized = normalize_rhs(system);
    if (v.size() != system.dim() || !all_positive(v)) throw InputError("certificate must be a positive vector of the system dimension");
    // c[k](j) = (A_k v^{m_k - 1})_j
    std::vector<Vector> c;
    for (const auto& t : normalized.terms()) {
        c.push_back(tvp(t, v));
        if (!(c.back().minCoeff() > 0.0))
            throw NotApplicable("certificate fails for the term of order " + std::to_string(t.order()));
    }
    const auto& terms = normalized.terms();
    auto phi = [&](double s) {
        Vector acc = Vector::Zero(system.dim());
        for (std::size_t k = 0; k < terms.size(); ++k) acc += std::pow(s, terms[k].order() - 1) * c[k];
        return acc;
    };
    // Root of an increasing scalar map with map(0) = 0 by bisection; returns
    // (lo, hi) with map(lo) < 1 <= map(hi).
    auto solve = [&](auto&& map) {
        double lo = 0.0, hi = 1.0;
        while (map(hi) < 1.0) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw NumericalFailure("bracket scalar search diverged");
        }
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (map(mid) < 1.0)
                lo = mid;
            else
                hi = mid;
        }
        return std::pair<double, double>{lo, hi};
    };
    BracketScalars out;
    // w: min_j phi_j(w) = 1, taken from above so min phi(w) >= 1.
    out.w = solve([&](double s) { return phi(s).minCoeff(); }).second;
    // t: max_j phi_j(t) = 1, taken from below so max phi(t) <= 1.
    out.t = solve([&](double s) { return phi(s).maxCoeff(); }).first;
    return out;
}

bool traces_monotone(const std::vector<Vector>& lower, const std::vector<Vector>& upper, double rel_slack) {
    auto slack = [&](const Vector& a, const Vector& b) {
        return rel_slack * std::max({1.0, inf_norm(a), inf_norm(b)});
    };
    for (std::size_t k = 1; k < lower.size(); ++k)
        if ((lower[k - 1] - lower[k]).maxCoeff() > slack(lower[k - 1], lower[k])) return false;
    for (std::size_t k = 1; k < upper.size(); ++k)
        if ((upper[k] - upper[k - 1]).maxCoeff() > slack(upper[k - 1], upper[k])) return false;
    if (!lower.empty() && !upper.empty() && (lower.back() - upper.back()).maxCoeff() > slack(lower.back(), upper.back()))
        return false;
    return true;
}

SolveResult solve_s_tensor(const PolySystem& system, const std::optional<Vector>& certificate, const SolverOptions& options) {
    const PolySystem normalized = normalize_rhs(system);
    std::optional<Vector> v;
    if (certificate) {
        for (const auto& t : normalized.terms())
            if (!certifies(t, *certificate))
                throw NotApplicable("given certificate fails for the term of order " + std::to_string(t.order()));
        v = certificate;
    } else {
        v = shared_s_certificate(normalized.terms());
    }
    if (!v) throw NotApplicable("uncertified: no shared S-certificate found for the terms");
    const BracketScalars br = bracket_scalars(normalized, *v);
    const SplitSystem split(normalized);
    SideRun below = iterate_side(system, split, br.t * *v, options);
    SideRun above = iterate_side(system, split, br.w * *v, options);
    const bool converged = below.converged && above.converged;
    SolveResult r = assemble(system, std::move(below), std::move(above), options);
    r.t = br.t;
    r.w = br.w;
    r.certificate = *v;
    r.method = "s";
    r.status = r.unique_certified ? SolveStatus::positive : SolveStatus::boundary_inconclusive;
    if (!converged) throw SolveDidNotConverge("iteration did not converge within max_iter", std::move(r));
    return r;
}

SolveResult solve_m_tensor(const PolySystem& system, const SolverOptions& options) {
    for (const auto& t : system.terms()) {
        const MTest m = m_tensor_test(t, 1e-10, 10000);
        if (!m.z_pattern) {
            std::vector<int> idx(static_cast<std::size_t>(t.order()));
            for (std::size_t f = 0; f < t.size(); ++f) {
                if (t.is_diagonal_flat(f) || t[f] <= 0.0) continue;
                t.unravel(f, idx);
                break;
            }
            throw NotApplicable("term of order " + std::to_string(t.order()) +
                                " is not an M-tensor: positive off-diagonal entry in row " + std::to_string(idx[0] + 1));
        }
        if (!m.is_m)
            throw NotApplicable("term of order " + std::to_string(t.order()) + " is not an M-tensor: s = " +
                                std::to_string(m.shift) + " < rho(B) = " + std::to_string(m.rho->value));
    }
    const PolySystem normalized = normalize_rhs(system);
    const auto v = shared_s_certificate(normalized.terms());
    if (!v) throw NotApplicable("no shared positive vector v with A_i v^{i-1} > 0 for all terms");
    const BracketScalars br = bracket_scalars(normalized, *v);
    const SplitSystem split(normalized);
    SideRun below = iterate_side(system, split, Vector::Zero(system.dim()), options);
    SideRun above = iterate_side(system, split, br.w * *v, options);
    const bool converged = below.converged && above.converged;
    SolveResult r = assemble(system, std::move(below), std::move(above), options);
    r.t = 0.0;
    r.w = br.w;
    r.certificate = *v;
    r.method = "m";
    r.status = r.unique_certified && all_positive(r.lower_limit) ? SolveStatus::positive
                                                                 : SolveStatus::boundary_inconclusive;
    if (!converged) throw SolveDidNotConverge("iteration did not converge within max_iter", std::move(r));
    return r;
}

PicardResult picard_iterate(const PolySystem& system, const Vector& x0, const SolverOptions& options) {
    const PolySystem normalized = normalize_rhs(system);
    const SplitSystem split(normalized);
    SideRun run = iterate_side(system, split, x0, options);
    return PicardResult{run.trace.back(), run.iterations, run.converged};
}

}  // namespace holv
