#include "holv/tensor_class.hpp"

#include "holv/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace holv {

namespace {

struct PowerRun {
    double lower = 0.0;
    double upper = 0.0;
    Vector x;
    int iterations = 0;
    bool converged = false;
    std::vector<std::array<double, 2>> trace;
};

// Collatz ratios (B x^{m-1})_i / x_i^{m-1} at a positive x.
std::array<double, 2> collatz(const CubicalTensor& b, const Vector& x) {
    const Vector y = tvp(b, x);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double r = y(i) / std::pow(x(i), b.order() - 1);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

// Power iteration on x -> (B x^{m-1} + c x^{[m-1]})^{[1/(m-1)]}. The shift c
// removes periodicity; it is the midpoint of the row-sum bracket so that it
// scales with B.
PowerRun power_iteration(const CubicalTensor& b, double tol, int max_iter) {
    const int n = b.dim();
    const double p = b.order() - 1;
    PowerRun run;
    run.x = Vector::Ones(n);
    const Vector rs = tvp(b, run.x);
    double shift = 0.5 * (rs.minCoeff() + rs.maxCoeff());
    if (shift <= 0.0) shift = 1.0;
    for (int k = 0;; ++k) {
        const Vector y = tvp(b, run.x);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        Vector xp(n);
        for (int i = 0; i < n; ++i) {
            xp(i) = std::pow(run.x(i), p);
            const double r = y(i) / xp(i);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        run.lower = lo;
        run.upper = hi;
        run.iterations = k;
        run.trace.push_back({lo, hi});
        if (hi - lo < tol * std::max(1.0, std::abs(hi))) {
            run.converged = true;
            return run;
        }
        if (k >= max_iter) return run;
        Vector z = y + shift * xp;
        for (int i = 0; i < n; ++i) z(i) = std::pow(z(i), 1.0 / p);
        const double mx = z.maxCoeff();
        if (!(mx > 0.0) || !std::isfinite(mx)) throw NumericalFailure("power iteration lost positivity");
        run.x = z / mx;
        for (int i = 0; i < n; ++i) run.x(i) = std::max(run.x(i), std::numeric_limits<double>::min());
    }
}

bool positive(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v(i) > 0.0) || !std::isfinite(v(i))) return false;
    return true;
}

bool certifies_all(std::span<const CubicalTensor> terms, const Vector& v) {
    for (const auto& t : terms)
        if (!certifies(t, v)) return false;
    return true;
}

// Normalized minimum over all terms and rows at x with max(x) = 1.
double certificate_margin(std::span<const CubicalTensor> terms, std::span<const double> scale, const Vector& x) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < terms.size(); ++t) m = std::min(m, tvp(terms[t], x).minCoeff() / scale[t]);
    return m;
}

std::optional<Vector> ascend(std::span<const CubicalTensor> terms, int max_iter) {
    const int n = terms.front().dim();
    std::vector<double> scale;
    for (const auto& t : terms) {
        const double s = t.max_abs();
        if (s == 0.0) return std::nullopt;
        scale.push_back(s);
    }
    Vector x = Vector::Ones(n);
    double value = certificate_margin(terms, scale, x);
    double eta = 0.5;
    for (int it = 0; it < max_iter; ++it) {
        if (value > 0.0 && certifies_all(terms, x)) return x;
        // Soft-min weights over every (term, row) pair; the gradient is taken
        // in log coordinates so x stays positive.
        const double tau = 1e-3 + 0.05 * std::abs(value);
        Vector grad = Vector::Zero(n);
        double wsum = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const Vector y = tvp(terms[t], x) / scale[t];
            const Matrix jac = tvp_jacobian(terms[t], x) / scale[t];
            for (int i = 0; i < n; ++i) {
                const double w = std::exp(-(y(i) - value) / tau);
                wsum += w;
                grad += w * jac.row(i).transpose();
            }
        }
        grad /= wsum;
        Vector dir = x.cwiseProduct(grad);
        const double norm = dir.cwiseAbs().maxCoeff();
        if (norm == 0.0) break;
        dir /= norm;
        bool improved = false;
        while (eta > 1e-12) {
            Vector trial = x.array() * (eta * dir.array()).exp();
            trial /= trial.maxCoeff();
            for (int i = 0; i < n; ++i) trial(i) = std::max(trial(i), 1e-300);
            const double tv = certificate_margin(terms, scale, trial);
            if (tv > value) {
                x = trial;
                value = tv;
                eta = std::min(eta * 1.5, 4.0);
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!improved) break;
    }
    if (value > 0.0 && certifies_all(terms, x)) return x;
    return std::nullopt;
}

struct Candidate {
    Vector v;
    std::string source;
};

std::optional<Candidate> search_certificate(std::span<const CubicalTensor> terms, const std::optional<Vector>& hint,
                                            const std::optional<Vector>& extra, int max_iter) {
    if (terms.empty()) throw InputError("no tensors to certify");
    const int n = terms.front().dim();
    for (const auto& t : terms)
        if (t.dim() != n) throw InputError("tensors in a shared certificate search must share the dimension");
    if (hint) {
        if (hint->size() != n) throw InputError("certificate hint has the wrong length");
        if (certifies_all(terms, *hint)) return Candidate{*hint, "hint"};
    }
    const Vector one = Vector::Ones(n);
    if (certifies_all(terms, one)) return Candidate{one, "ones"};
    if (extra && certifies_all(terms, *extra)) return Candidate{*extra, "comparison"};
    if (auto v = ascend(terms, max_iter)) return Candidate{*v, "ascent"};
    return std::nullopt;
}

}  // namespace

SpectralRadius spectral_radius_nonneg(const CubicalTensor& b, double tol, int max_iter) {
    if (!is_nonnegative(b)) throw InputError("spectral_radius_nonneg needs a nonnegative tensor");
    SpectralRadius out;
    const double big = b.max_abs();
    if (big == 0.0) {
        out.converged = true;
        out.perron = Vector::Ones(b.dim());
        out.trace.push_back({0.0, 0.0});
        return out;
    }
    if (is_irreducible(b)) {
        PowerRun run = power_iteration(b, tol, max_iter);
        out.lower = run.lower;
        out.upper = run.upper;
        out.value = 0.5 * (run.lower + run.upper);
        out.iterations = run.iterations;
        out.converged = run.converged;
        out.perron = run.x;
        out.trace = std::move(run.trace);
        return out;
    }
    // Reducible: perturb by eps * (all ones) at two shift sizes and remove the
    // first-order term. The extrapolation amplifies per-run error by about
    // 10/9, hence the tighter inner tolerance.
    out.reducible = true;
    const double eps = 1e-9 * big;
    const PowerRun r1 = power_iteration(b + CubicalTensor::filled(b.order(), b.dim(), eps), tol / 10.0, max_iter);
    PowerRun r2 = power_iteration(b + CubicalTensor::filled(b.order(), b.dim(), eps / 10.0), tol / 10.0, max_iter);
    const double v1 = 0.5 * (r1.lower + r1.upper);
    const double v2 = 0.5 * (r2.lower + r2.upper);
    const double extrapolated = v2 - (v1 - v2) / 9.0;
    const auto bounds = collatz(b, r2.x);
    out.lower = std::max(0.0, bounds[0]);
    out.upper = bounds[1];
    out.value = std::clamp(extrapolated, out.lower, out.upper);
    out.iterations = r1.iterations + r2.iterations;
    out.converged = r1.converged && r2.converged;
    out.perron = r2.x;
    out.trace = std::move(r2.trace);
    return out;
}

bool is_irreducible(const CubicalTensor& a) {
    const int n = a.dim();
    if (n == 1) return true;
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    {
        std::vector<std::vector<char>> edge(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
        std::vector<int> idx(static_cast<std::size_t>(a.order()));
        for (std::size_t f = 0; f < a.size(); ++f) {
            if (a[f] == 0.0 || a.is_diagonal_flat(f)) continue;
            a.unravel(f, idx);
            const int i = idx[0];
            for (std::size_t p = 1; p < idx.size(); ++p)
                if (idx[p] != i) edge[static_cast<std::size_t>(idx[p])][static_cast<std::size_t>(i)] = 1;
        }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (edge[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) succ[static_cast<std::size_t>(j)].push_back(i);
    }
    // Tarjan's algorithm; strongly connected iff one component covers all.
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    int counter = 0;
    int components = 0;
    std::function<void(int)> visit = [&](int v) {
        const auto sv = static_cast<std::size_t>(v);
        index[sv] = low[sv] = counter++;
        stack.push_back(v);
        on_stack[sv] = 1;
        for (int w : succ[sv]) {
            const auto sw = static_cast<std::size_t>(w);
            if (index[sw] < 0) {
                visit(w);
                low[sv] = std::min(low[sv], low[sw]);
            } else if (on_stack[sw]) {
                low[sv] = std::min(low[sv], index[sw]);
            }
        }
        if (low[sv] == index[sv]) {
            ++components;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = 0;
            } while (w != v);
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[static_cast<std::size_t>(v)] < 0) visit(v);
    return components == 1;
}

bool certifies(const CubicalTensor& a, const Vector& v) {
    if (v.size() != a.dim() || !positive(v)) return false;
    return tvp(a, v).minCoeff() > 0.0;
}

std::optional<Vector> shared_s_certificate(std::span<const CubicalTensor> terms, const std::optional<Vector>& hint,
                                           int max_iter) {
    if (auto c = search_certificate(terms, hint, std::nullopt, max_iter)) return c->v;
    return std::nullopt;
}

std::optional<Vector> s_tensor_certificate(const CubicalTensor& a, const std::optional<Vector>& hint, int max_iter) {
    return shared_s_certificate(std::span<const CubicalTensor>(&a, 1), hint, max_iter);
}

MTest m_tensor_test(const CubicalTensor& a, double tol, int max_iter) {
    MTest t;
    t.z_pattern = has_nonpositive_off_diagonal(a);
    if (!t.z_pattern) return t;
    double s = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < a.dim(); ++i) s = std::max(s, a.diagonal(i));
    t.shift = s;
    const CubicalTensor b = identity_tensor(a.order(), a.dim()) * s - a;
    t.rho = spectral_radius_nonneg(b, tol, max_iter);
    const SpectralRadius& r = *t.rho;
    // The reducible path extrapolates a perturbation that may be of order
    // sqrt(eps), so its comparison margin is wider.
    const double margin = (r.reducible ? 1e-6 : 10.0 * tol) * std::max(1.0, std::abs(s));
    t.nonsingular = r.upper < s || r.value < s - margin;
    t.is_m = t.nonsingular || (r.lower <= s && r.value <= s + margin);
    return t;
}

TensorClassReport classify(const CubicalTensor& a, const ClassifyOptions& options) {
    TensorClassReport rep;
    const int n = a.dim();
    rep.is_metzler = is_metzler(a);
    rep.is_irreducible = is_irreducible(a);

    bool dd = true, sdd = true, grsdd = true;
    bool diag_positive = true;
    for (int i = 0; i < n; ++i) {
        const RowSums rs = row_sums(a, i);
        const double d = std::abs(a.diagonal(i));
        if (d < rs.plus + rs.minus) dd = false;
        if (!(d > rs.plus + rs.minus)) sdd = false;
        if (!(a.diagonal(i) > 0.0) || !(d - rs.minus > 0.0)) grsdd = false;
        if (!(a.diagonal(i) > 0.0)) diag_positive = false;
    }
    rep.is_diag_dominant = dd;
    rep.is_strictly_diag_dominant = sdd;
    rep.is_generalized_row_sdd_pos_diag = grsdd;

    const MTest m = m_tensor_test(a, options.tol, options.max_iter);
    rep.is_m_tensor = m.is_m;
    rep.is_nonsingular_m = m.nonsingular;
    if (m.rho) {
        rep.spectral_radius_of_majorant = m.rho->value;
        rep.m_shift = m.shift;
        if (!m.rho->converged) rep.notes.push_back("M-test power iteration did not converge");
    }

    const MTest h = m_tensor_test(comparison_tensor(a), options.tol, options.max_iter);
    rep.is_h_tensor = h.is_m;
    rep.is_h_plus = h.nonsingular && diag_positive;
    if (h.rho) {
        rep.comparison_spectral_radius = h.rho->value;
        rep.comparison_shift = h.shift;
        if (!h.rho->converged) rep.notes.push_back("H-test power iteration did not converge");
    }

    // For an H+ tensor the Perron vector x of the comparison majorant gives
    // <A> x^{m-1} > 0, and A x^{m-1} >= <A> x^{m-1} when the diagonal is positive.
    std::optional<Vector> extra;
    if (rep.is_h_plus && h.rho) extra = h.rho->perron;
    if (auto c = search_certificate(std::span<const CubicalTensor>(&a, 1), options.hint, extra, options.max_iter)) {
        rep.s_certificate = c->v;
        rep.s_certificate_source = c->source;
    }
    if (rep.is_h_plus && !rep.s_certificate) rep.notes.push_back("H+ detected but no certificate verified exactly");
    return rep;
}

}  // namespace holv
