#include "holv/pcp.hpp"

#include "holv/error.hpp"
#include "holv/parallel.hpp"
#include "holv/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace holv {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::vector<std::vector<int>> all_supports(int n) {
    std::vector<std::vector<int>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t support_key(const std::vector<int>& s) {
    std::uint64_t k = 0;
    for (int i : s) k |= std::uint64_t{1} << i;
    return k;
}

Matrix sub_matrix(const Matrix& a, const std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    Matrix out(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out(i, j) = a(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
    return out;
}

Vector sub_vector(const Vector& v, const std::vector<int>& s) {
    Vector out(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(s[i]);
    return out;
}

Vector embed(const Vector& y, const std::vector<int>& s, int n) {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < s.size(); ++i) x(s[i]) = y(static_cast<Eigen::Index>(i));
    return x;
}

// Starting points: sigma * 1, sigma * (1 + e_k), then log-uniform random
// points in [0.1 sigma, 10 sigma]^s.
std::vector<Vector> starting_points(int s, int count, double sigma, Rng& rng) {
    std::vector<Vector> starts;
    starts.push_back(Vector::Constant(s, sigma));
    for (int k = 0; k < s && static_cast<int>(starts.size()) < count; ++k) {
        Vector v = Vector::Constant(s, sigma);
        v(k) += sigma;
        starts.push_back(v);
    }
    while (static_cast<int>(starts.size()) < count) {
        Vector v(s);
        for (int i = 0; i < s; ++i) v(i) = sigma * std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        starts.push_back(v);
    }
    return starts;
}

enum class NewtonEnd { converged, singular, failed };

struct NewtonRun {
    Vector y;
    NewtonEnd end = NewtonEnd::failed;
};

// Damped Newton on G(y) = B y^2 + A y + q. Step halves while the residual
// does not decrease, down to 2^-20.
NewtonRun quadratic_newton(const CubicalTensor& b, const Matrix& a, const Vector& q, Vector y, double sigma, Rng& rng) {
    NewtonRun run;
    int singular_hits = 0;
    auto residual = [&](const Vector& z) { return Vector(tvp(b, z) + a * z + q); };
    std::vector<double> abs_entries(b.entries().begin(), b.entries().end());
    for (auto& v : abs_entries) v = std::abs(v);
    const CubicalTensor babs(b.order(), b.dim(), abs_entries);
    const Matrix aabs = a.cwiseAbs();
    for (int it = 0; it < 100; ++it) {
        const Vector g = residual(y);
        const Vector ay = y.cwiseAbs();
        const double scale = 1.0 + inf_norm(aabs * ay) + inf_norm(q) + inf_norm(tvp(babs, ay));
        if (inf_norm(g) <= 1e-13 * scale) {
            run.y = y;
            run.end = NewtonEnd::converged;
            return run;
        }
        Eigen::PartialPivLU<Matrix> lu(a + tvp_jacobian(b, y));
        if (!(lu.rcond() >= 1e-12)) {
            if (++singular_hits > 3) {
                run.end = NewtonEnd::singular;
                return run;
            }
            for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.01 * sigma * rng.uniform(-1.0, 1.0);
            continue;
        }
        const Vector d = -lu.solve(g);
        const double g2 = g.norm();
        bool moved = false;
        for (double lambda = 1.0; lambda >= 0x1.0p-20; lambda *= 0.5) {
            const Vector trial = y + lambda * d;
            if (residual(trial).norm() < g2) {
                y = trial;
                moved = true;
                break;
            }
        }
        if (!moved || !y.allFinite() || inf_norm(y) > 1e8 * std::max(1.0, sigma)) return run;
    }
    return run;
}

// Typical size of a positive root: the largest single-row estimate
// |B_iii| s^2 + |A_ii| s = |q_i|.
double root_scale(const CubicalTensor& b, const Matrix& a, const Vector& q) {
    double sigma = 0.0;
    for (int i = 0; i < b.dim(); ++i) {
        const double c2 = std::abs(b.diagonal(i)), c1 = std::abs(a(i, i)), c0 = -std::abs(q(i));
        if (c0 < 0.0 && (c2 > 0.0 || c1 > 0.0)) sigma = std::max(sigma, positive_quadratic_root(c2, c1, c0));
    }
    return sigma > 0.0 && std::isfinite(sigma) ? sigma : 1.0;
}

void dedupe_push(std::vector<Vector>& list, const Vector& x, double radius) {
    for (const auto& y : list)
        if (inf_norm(x - y) <= radius) return;
    list.push_back(x);
}

}  // namespace

QcpProblem::QcpProblem(CubicalTensor b, Matrix a, Vector q) : b_(std::move(b)), a_(std::move(a)), q_(std::move(q)) {
    const int n = dim();
    if (b_.order() != 3) throw InputError("QCP tensor B must have order 3");
    if (b_.dim() != n) throw InputError("QCP tensor B dimension does not match q");
    if (a_.rows() != n || a_.cols() != n) throw InputError("QCP matrix A shape does not match q");
    if (!a_.allFinite() || !q_.allFinite()) throw InputError("QCP data must be finite");
}

std::vector<int> omega(const Vector& q) {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q(i) < 0.0) out.push_back(static_cast<int>(i));
    return out;
}

double positive_quadratic_root(double c2, double c1, double c0) {
    const double disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
    if (c1 >= 0.0) return -2.0 * c0 / (c1 + disc);
    return (-c1 + disc) / (2.0 * c2);
}

NormBounds norm_bounds(const QcpProblem& problem) {
    const int n = problem.dim();
    const CubicalTensor a = CubicalTensor::from_matrix(problem.a());
    const CubicalTensor& b = problem.b();
    for (int i = 0; i < n; ++i) {
        const RowSums rb = row_sums(b, i), ra = row_sums(a, i);
        if (!(b.diagonal(i) > 0.0) || !(b.diagonal(i) - rb.minus > 0.0))
            throw NotApplicable("B row " + std::to_string(i + 1) +
                                " is not generalized row strictly diagonally dominant with a positive diagonal");
        if (!(a.diagonal(i) > 0.0) || !(a.diagonal(i) - ra.minus > 0.0))
            throw NotApplicable("A row " + std::to_string(i + 1) +
                                " is not generalized row strictly diagonally dominant with a positive diagonal");
    }
    const auto om = omega(problem.q());
    if (om.empty()) throw NotApplicable("q has no negative component, so the norm bounds do not apply");
    NormBounds nb;
    nb.lower = std::numeric_limits<double>::infinity();
    nb.upper = -std::numeric_limits<double>::infinity();
    for (int k : om) {
        const RowSums rb = row_sums(b, k), ra = row_sums(a, k);
        NormBoundsRow row;
        row.k = k;
        row.s_b = b.diagonal(k) + rb.plus;
        row.s_a = a.diagonal(k) + ra.plus;
        row.delta_b = b.diagonal(k) - rb.minus;
        row.delta_a = a.diagonal(k) - ra.minus;
        const double qk = problem.q()(k);
        row.lower = positive_quadratic_root(row.s_b, row.s_a, qk);
        row.upper = positive_quadratic_root(row.delta_b, row.delta_a, qk);
        nb.lower = std::min(nb.lower, row.lower);
        nb.upper = std::max(nb.upper, row.upper);
        nb.per_index.push_back(row);
    }
    return nb;
}

std::string to_string(SupportStatus s) {
    switch (s) {
        case SupportStatus::solved: return "solved";
        case SupportStatus::no_root: return "no_root";
        case SupportStatus::undetermined: return "undetermined";
    }
    return "no_root";
}

SupportRoots support_roots(const QcpProblem& problem, const std::vector<int>& support, const EnumerationOptions& options) {
    SupportRoots out;
    const int n = problem.dim();
    const int s = static_cast<int>(support.size());
    if (s == 0) return out;
    const CubicalTensor bs = sub_tensor(problem.b(), support);
    const Matrix as = sub_matrix(problem.a(), support);
    const Vector qs = sub_vector(problem.q(), support);
    const int count = options.newton_starts > 0 ? options.newton_starts : 2 * n + 1;
    const double sigma = root_scale(bs, as, qs);
    Rng rng(options.seed, support_key(support));
    int singular = 0;
    const auto starts = starting_points(s, count, sigma, rng);
    for (const auto& start : starts) {
        const NewtonRun run = quadratic_newton(bs, as, qs, start, sigma, rng);
        if (run.end == NewtonEnd::singular) ++singular;
        if (run.end != NewtonEnd::converged) continue;
        if (run.y.minCoeff() > options.tol) dedupe_push(out.roots, embed(run.y, support, n), options.dedup_radius);
    }
    out.singular = out.roots.empty() && singular == static_cast<int>(starts.size());
    return out;
}

PcpEnumeration brute_force_solve(const QcpProblem& problem, const EnumerationOptions& options) {
    const int n = problem.dim();
    if (n > 12) throw InputError("support enumeration is limited to n <= 12");
    const auto supports = all_supports(n);
    std::vector<SupportOutcome> outcomes(supports.size());
    std::vector<std::vector<PcpSolution>> found(supports.size());
    parallel_for(supports.size(), [&](std::size_t idx) {
        const auto& s = supports[idx];
        SupportOutcome& oc = outcomes[idx];
        oc.support = s;
        if (s.empty()) {
            const bool ok = problem.q().minCoeff() >= 0.0;
            oc.roots_found = 1;
            oc.roots_accepted = ok ? 1 : 0;
            oc.status = ok ? SupportStatus::solved : SupportStatus::no_root;
            if (ok) found[idx].push_back(PcpSolution{Vector::Zero(n), problem.q(), {}});
            return;
        }
        const SupportRoots roots = support_roots(problem, s, options);
        oc.roots_found = static_cast<int>(roots.roots.size());
        for (const auto& x : roots.roots) {
            const Vector sl = problem.slack(x);
            bool ok = true;
            for (int i = 0; i < n; ++i)
                if (x(i) == 0.0 && sl(i) < -options.tol) ok = false;
            if (!ok) continue;
            ++oc.roots_accepted;
            found[idx].push_back(PcpSolution{x, sl, s});
        }
        if (oc.roots_accepted > 0)
            oc.status = SupportStatus::solved;
        else
            oc.status = roots.singular ? SupportStatus::undetermined : SupportStatus::no_root;
    });
    PcpEnumeration out;
    out.supports = std::move(outcomes);
    for (auto& list : found)
        for (auto& sol : list) {
            bool dup = false;
            for (const auto& kept : out.solutions)
                if (inf_norm(kept.x - sol.x) <= options.dedup_radius) dup = true;
            if (!dup) out.solutions.push_back(std::move(sol));
        }
    return out;
}

bool verify_complementarity(const QcpProblem& problem, const Vector& x, double tol) {
    if (x.size() != problem.dim()) return false;
    if (x.minCoeff() < 0.0) return false;
    const Vector sl = problem.slack(x);
    if (sl.minCoeff() < -tol) return false;
    if (std::abs(x.dot(sl)) >= tol * std::max(1.0, inf_norm(x))) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) > 0.0 && std::abs(sl(i)) > tol) return false;
    return true;
}

bool leading_sol_zero(const CubicalTensor& b, double tol) {
    if (b.order() != 3) throw InputError("leading_sol_zero expects an order-3 tensor");
    const int n = b.dim();
    if (n > 12) throw InputError("support enumeration is limited to n <= 12");
    const double big = b.max_abs();
    if (big == 0.0) return false;
    const CubicalTensor bn = b * (1.0 / big);
    const auto supports = all_supports(n);
    std::vector<char> hit(supports.size(), 0);
    parallel_for(supports.size(), [&](std::size_t idx) {
        const auto& s = supports[idx];
        if (s.empty()) return;
        const int k = static_cast<int>(s.size());
        const CubicalTensor bs = sub_tensor(bn, s);
        Rng rng(0x5eed, support_key(s));
        // Levenberg-Marquardt on r(y) = [B_S y^2; sum(y) - 1].
        auto resid = [&](const Vector& y) {
            Vector r(k + 1);
            r.head(k) = tvp(bs, y);
            r(k) = y.sum() - 1.0;
            return r;
        };
        for (const auto& start : starting_points(k, 2 * n + 1, 1.0 / k, rng)) {
            Vector y = start / start.sum();
            double mu = 1e-3;
            Vector r = resid(y);
            for (int it = 0; it < 200 && r.norm() > 1e-14 && mu < 1e12; ++it) {
                Matrix j(k + 1, k);
                j.topRows(k) = tvp_jacobian(bs, y);
                j.row(k).setOnes();
                const Matrix jtj = j.transpose() * j;
                const Vector step = (jtj + mu * Matrix::Identity(k, k)).ldlt().solve(-j.transpose() * r);
                const Vector trial = y + step;
                const Vector rt = resid(trial);
                if (rt.norm() < r.norm()) {
                    y = trial;
                    r = rt;
                    mu = std::max(mu / 3.0, 1e-15);
                } else {
                    mu *= 3.0;
                }
            }
            if (inf_norm(r) > 1e-10 || y.minCoeff() <= tol) continue;
            const Vector slack = tvp(bn, embed(y, s, n));
            bool ok = true;
            for (int i = 0; i < n; ++i)
                if (std::find(s.begin(), s.end(), i) == s.end() && slack(i) < -tol) ok = false;
            if (ok) {
                hit[idx] = 1;
                return;
            }
        }
    });
    return std::none_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

NonemptinessCheck nonemptiness_check(const QcpProblem& problem, const std::optional<Vector>& d,
                                     const EnumerationOptions& options) {
    const int n = problem.dim();
    const Vector dv = d ? *d : Vector::Ones(n);
    if (dv.size() != n || dv.minCoeff() < 0.0) throw InputError("d must be a nonnegative vector of the problem dimension");
    auto only_zero = [&](const QcpProblem& p) {
        const auto sols = brute_force_solve(p, options).solutions;
        return sols.size() == 1 && inf_norm(sols.front().x) == 0.0;
    };
    NonemptinessCheck c;
    c.leading_zero = leading_sol_zero(problem.b(), options.tol);
    c.leading_with_d_zero = only_zero(QcpProblem(problem.b(), Matrix::Zero(n, n), dv));
    c.full_with_d_zero = only_zero(QcpProblem(problem.b(), problem.a(), dv));
    c.guaranteed = c.leading_zero && (c.leading_with_d_zero || c.full_with_d_zero);
    return c;
}

QcpProblem lv_to_pcp(const LVModel& model, Orientation orientation) {
    const int n = model.dim();
    if (orientation == Orientation::stable_side) return QcpProblem(model.b() * -1.0, -model.a(), -Vector::Ones(n));
    return QcpProblem(model.b(), model.a(), Vector::Ones(n));
}

}  // namespace holv
