#include "holv/lv_model.hpp"

#include "holv/error.hpp"
#include "holv/parallel.hpp"
#include "holv/poly_solver.hpp"
#include "holv/random.hpp"
#include "holv/tensor_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holv {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::vector<int> support_of(const Vector& x, double threshold) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) > threshold) s.push_back(static_cast<int>(i));
    return s;
}

Matrix sub_matrix(const Matrix& a, const std::vector<int>& s) {
    const auto k = static_cast<Eigen::Index>(s.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) out(i, j) = a(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
    return out;
}

std::vector<std::vector<int>> nonempty_supports(int n) {
    std::vector<std::vector<int>> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Candidate {
    Vector x;
    std::string source;
};

bool lex_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

void add_source(std::vector<std::string>& sources, const std::string& s) {
    if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::not_applicable: return "not_applicable";
        case Verdict::conditional: return "conditional";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "not_applicable";
}

std::string to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::origin: return "origin";
        case EquilibriumKind::interior: return "interior";
        case EquilibriumKind::boundary: return "boundary";
    }
    return "origin";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "marginal";
}

Refinement refine_equilibrium(const LVModel& model, const Vector& guess, double support_threshold, double tol) {
    const int n = model.dim();
    if (guess.size() != n) throw InputError("guess length does not match the model dimension");
    Refinement out;
    out.support = support_of(guess, support_threshold);
    const auto& s = out.support;
    Vector x = Vector::Zero(n);
    for (int i : s) x(i) = guess(i);
    if (s.empty()) {
        out.x = x;
        out.converged = true;
        return out;
    }
    auto restricted = [&](const Vector& z) {
        const Vector l = model.growth(z);
        Vector ls(static_cast<Eigen::Index>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) ls(static_cast<Eigen::Index>(i)) = l(s[i]);
        return ls;
    };
    Vector ls = restricted(x);
    double norm = inf_norm(ls);
    for (int it = 0; it < 100 && norm > 1e-14; ++it) {
        const Matrix jac = sub_matrix(model.a() + tvp_jacobian(model.b(), x), s);
        Eigen::PartialPivLU<Matrix> lu(jac);
        const Vector step = lu.solve(-ls);
        if (!step.allFinite()) break;
        double lambda = 1.0;
        bool moved = false;
        while (lambda >= 1.0 / 1024.0) {
            Vector trial = x;
            for (std::size_t i = 0; i < s.size(); ++i) trial(s[i]) += lambda * step(static_cast<Eigen::Index>(i));
            const Vector lt = restricted(trial);
            const double nt = inf_norm(lt);
            if (std::isfinite(nt) && nt < norm) {
                x = trial;
                ls = lt;
                norm = nt;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) break;
    }
    out.x = x;
    bool positive = true;
    for (int i : s) positive = positive && x(i) > 0.0;
    out.converged = positive && x.allFinite() && inf_norm(model.rhs(x)) < tol;
    return out;
}

std::vector<EquilibriumReport> find_equilibria(const LVModel& model, const EquilibriumOptions& options) {
    const int n = model.dim();
    if (n > 12) throw InputError("equilibrium enumeration is limited to n <= 12");
    EnumerationOptions eo;
    eo.newton_starts = options.newton_starts;
    eo.seed = options.seed;

    std::vector<Candidate> candidates;
    candidates.push_back({Vector::Zero(n), "origin"});
    for (auto [orientation, name] : {std::pair{Orientation::stable_side, "pcp_stable"},
                                     std::pair{Orientation::unstable_side, "pcp_unstable"}}) {
        const PcpEnumeration en = brute_force_solve(lv_to_pcp(model, orientation), eo);
        for (const auto& sol : en.solutions) candidates.push_back({sol.x, name});
    }
    {
        const QcpProblem direct = lv_to_pcp(model, Orientation::unstable_side);
        const auto supports = nonempty_supports(n);
        std::vector<std::vector<Vector>> found(supports.size());
        parallel_for(supports.size(), [&](std::size_t i) { found[i] = support_roots(direct, supports[i], eo).roots; });
        for (auto& list : found)
            for (auto& x : list) candidates.push_back({std::move(x), "support_roots"});
    }
    try {
        const std::vector<CubicalTensor> terms{CubicalTensor::from_matrix(-model.a()), -model.b()};
        if (const auto cert = shared_s_certificate(terms)) {
            const SolveResult res = solve_s_tensor(PolySystem(terms, Vector::Ones(n)), cert);
            if (res.solution.allFinite() && res.solution.minCoeff() >= 0.0)
                candidates.push_back({res.solution, "s_tensor"});
        }
    } catch (const Error&) {
        // The S-solve is one source among several; the enumeration covers its absence.
    }

    std::vector<EquilibriumReport> reports;
    for (const auto& c : candidates) {
        Refinement ref;
        for (double threshold : {1e-8, 1e-6, 1e-4}) {
            ref = refine_equilibrium(model, c.x, threshold, options.tol);
            if (ref.converged) break;
        }
        const Vector& x = ref.converged ? ref.x : c.x;
        auto dup = std::find_if(reports.begin(), reports.end(),
                                [&](const EquilibriumReport& r) { return inf_norm(r.x_star - x) <= 1e-6; });
        if (dup != reports.end()) {
            // A refined copy replaces an unrefined one.
            if (!dup->refined && ref.converged) {
                auto sources = dup->sources;
                *dup = classify_equilibrium(model, ref.x, options.tol);
                dup->sources = std::move(sources);
            }
            add_source(dup->sources, c.source);
            continue;
        }
        EquilibriumReport rep;
        if (ref.converged) {
            rep = classify_equilibrium(model, ref.x, options.tol);
        } else {
            rep.x_star = c.x;
            rep.residual = inf_norm(model.rhs(c.x));
            rep.support = support_of(c.x, 0.0);
            rep.kind = rep.support.empty()                        ? EquilibriumKind::origin
                       : static_cast<int>(rep.support.size()) == n ? EquilibriumKind::interior
                                                                   : EquilibriumKind::boundary;
            rep.refined = false;
        }
        rep.sources = {c.source};
        reports.push_back(std::move(rep));
    }
    std::sort(reports.begin(), reports.end(), [](const EquilibriumReport& a, const EquilibriumReport& b) {
        if (a.support != b.support) return a.support < b.support;
        return lex_less(a.x_star, b.x_star);
    });
    return reports;
}

WtaCheck wta_check(const LVModel& model) {
    if (model.scenario() != Scenario::competitive) throw InputError("winner-take-all check needs a competitive model");
    const int n = model.dim();
    const Matrix a = -model.a();
    WtaCheck out;
    out.condition_a = true;
    out.condition_b = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i < j && !(a(i, j) < a(j, j))) {
                out.condition_a = false;
                out.violations.emplace_back(i, j);
            }
            if (i > j && !(a(i, j) > a(j, j))) {
                out.condition_b = false;
                out.violations.emplace_back(i, j);
            }
        }
    const double a11 = a(0, 0);
    const double b111 = -model.b().diagonal(0);
    const double root = b111 < 1e-14 ? 1.0 / a11 : positive_quadratic_root(b111, a11, -1.0);
    const double sq = std::sqrt(a11 * a11 + 4.0 * b111);
    out.printed_ratio = a11 / (a11 + sq);
    out.limit_ratio = root * a11;
    Vector p = Vector::Zero(n);
    p(0) = root;
    const Vector l = model.growth(p);
    out.invasion_negative = true;
    for (int j = 1; j < n; ++j) {
        out.invasion_rates.push_back(l(j));
        if (!(l(j) < 0.0)) out.invasion_negative = false;
    }
    if (out.condition_a && out.condition_b) out.limit = p;
    return out;
}

Matrix permute_two_faction(const Matrix& j, int m, int n, bool require_metzler) {
    if (m < 0 || n < 0 || j.rows() != m + n || j.cols() != m + n)
        throw InputError("matrix must be (m+n)x(m+n)");
    Matrix out = j;
    out.topRightCorner(m, n) *= -1.0;
    out.bottomLeftCorner(n, m) *= -1.0;
    if (require_metzler)
        for (int r = 0; r < m + n; ++r)
            for (int c = 0; c < m + n; ++c)
                if (r != c && out(r, c) < 0.0)
                    throw InputError("permuted two-faction Jacobian has a negative off-diagonal entry at (" +
                                     std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
    return out;
}

ContinuationResult continuation(const LVModel& model, const std::vector<double>& epsilon_grid, double tol) {
    if (epsilon_grid.empty() || epsilon_grid.front() != 0.0)
        throw InputError("epsilon grid must start at 0");
    for (std::size_t i = 1; i < epsilon_grid.size(); ++i)
        if (!(epsilon_grid[i] > epsilon_grid[i - 1]) || !std::isfinite(epsilon_grid[i]))
            throw InputError("epsilon grid must be strictly ascending and finite");
    const int n = model.dim();
    Eigen::FullPivLU<Matrix> lu(model.a());
    if (!lu.isInvertible()) throw NumericalFailure("A is singular; the unperturbed equilibrium does not exist");
    Vector x = lu.solve(-Vector::Ones(n));

    auto spectrum = [&](double eps, const Vector& z) {
        const Matrix j = model.with_scaled_hoi(eps).jacobian(z);
        const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(j, false).eigenvalues();
        double max_real = -std::numeric_limits<double>::infinity(), min_abs = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            max_real = std::max(max_real, ev(i).real());
            min_abs = std::min(min_abs, std::abs(ev(i).real()));
        }
        return std::pair{max_real, min_abs};
    };

    ContinuationResult out;
    auto [mr0, ma0] = spectrum(0.0, x);
    if (ma0 < tol) throw NumericalFailure("unperturbed equilibrium is not hyperbolic");
    out.path.push_back({0.0, x, mr0, mr0 < -tol});
    for (std::size_t g = 1; g < epsilon_grid.size(); ++g) {
        const double eps = epsilon_grid[g];
        Vector z = x;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            const Vector res = Vector::Ones(n) + model.a() * z + eps * tvp(model.b(), z);
            if (!res.allFinite()) break;
            if (inf_norm(res) <= 1e-12 * std::max(1.0, inf_norm(z))) {
                ok = true;
                break;
            }
            const Matrix jac = model.a() + eps * tvp_jacobian(model.b(), z);
            const Vector step = Eigen::PartialPivLU<Matrix>(jac).solve(-res);
            if (!step.allFinite()) break;
            z += step;
        }
        if (!ok) {
            out.truncated = true;
            out.reason = "newton_failed";
            break;
        }
        auto [mr, ma] = spectrum(eps, z);
        out.path.push_back({eps, z, mr, mr < -tol});
        const bool crossed = (mr < 0.0) != (out.path[out.path.size() - 2].max_real < 0.0);
        if (ma < tol || crossed) {
            out.truncated = true;
            out.reason = "hyperbolicity_lost";
            break;
        }
        x = z;
    }
    return out;
}

LVModel random_scenario(Scenario kind, const std::vector<int>& dims, std::uint64_t seed) {
    int n = 0;
    std::optional<FactionBlocks> blocks;
    if (kind == Scenario::two_faction) {
        if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1) throw InputError("two_faction needs dims {m, n} with m, n >= 1");
        blocks = FactionBlocks{dims[0], dims[1]};
        n = dims[0] + dims[1];
    } else {
        if (dims.size() != 1 || dims[0] < 1) throw InputError("scenario needs dims {n} with n >= 1");
        n = dims[0];
    }
    if (n > 64) throw InputError("scenario dimension is limited to 64");
    Rng rng(seed);
    // +1 for cooperative, -1 for competitive, 0 for a free sign.
    auto pair_sign = [&](int i, int j) {
        switch (kind) {
            case Scenario::cooperative: return 1;
            case Scenario::competitive: return -1;
            case Scenario::two_faction: return in_first_faction(*blocks, i) == in_first_faction(*blocks, j) ? 1 : -1;
            case Scenario::general: return 0;
        }
        return 0;
    };
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector r(n);
        for (int i = 0; i < n; ++i) r(i) = rng.uniform_open_low(0.0, 10.0);
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    a(i, j) = -rng.uniform_open_low(0.0, 10.0);
                    continue;
                }
                const int s = pair_sign(i, j);
                a(i, j) = s == 0 ? rng.uniform(-10.0, 10.0) : s * rng.uniform(0.0, 10.0);
            }
        CubicalTensor b(3, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    if (i == j && j == k) {
                        v = -rng.uniform(0.0, 10.0);
                    } else if (kind == Scenario::two_faction) {
                        const bool fj = in_first_faction(*blocks, j), fk = in_first_faction(*blocks, k);
                        if (fj == fk) v = (fj == in_first_faction(*blocks, i) ? 1.0 : -1.0) * rng.uniform(0.0, 10.0);
                    } else {
                        const int s = pair_sign(i, j);
                        v = s == 0 ? rng.uniform(-10.0, 10.0) : s * rng.uniform(0.0, 10.0);
                    }
                    b.set({i, j, k}, v);
                }
        if (!is_irreducible(CubicalTensor::from_matrix(a))) continue;
        return LVModel(r, a, b, kind, blocks);
    }
    throw NumericalFailure("could not draw an irreducible interaction matrix");
}

LVModel make_competitive(const Vector& r, const Matrix& a, const CubicalTensor& b) {
    return LVModel(r, -a, -b, Scenario::competitive);
}

LVModel make_cooperative(const Vector& r, const Matrix& a, const CubicalTensor& b) {
    const int n = static_cast<int>(r.size());
    Matrix sa = a;
    CubicalTensor sb = b;
    for (int i = 0; i < n && i < sa.rows() && i < sa.cols(); ++i) sa(i, i) = -a(i, i);
    if (b.dim() == n && b.order() == 3)
        for (int i = 0; i < n; ++i) sb.set_flat(sb.diagonal_flat(i), -b.diagonal(i));
    return LVModel(r, sa, sb, Scenario::cooperative);
}

LVModel make_two_faction(const TwoFactionParams& p) {
    const int m = static_cast<int>(p.r.size()), n = static_cast<int>(p.r_hat.size());
    if (m < 1 || n < 1) throw InputError("both factions need at least one species");
    auto check_shape = [](const Matrix& mat, int rows, int cols, const char* name) {
        if (mat.rows() != rows || mat.cols() != cols)
            throw InputError(std::string(name) + " must be " + std::to_string(rows) + "x" + std::to_string(cols));
    };
    check_shape(p.a, m, m, "a");
    check_shape(p.b, m, n, "b");
    check_shape(p.a_hat, n, n, "a_hat");
    check_shape(p.b_hat, n, m, "b_hat");
    auto check_len = [](const std::vector<double>& v, std::size_t len, const char* name) {
        if (!v.empty() && v.size() != len)
            throw InputError(std::string(name) + " must hold " + std::to_string(len) + " entries");
    };
    const auto um = static_cast<std::size_t>(m), un = static_cast<std::size_t>(n);
    check_len(p.c, um * um * um, "c");
    check_len(p.d, um * un * un, "d");
    check_len(p.c_hat, un * un * un, "c_hat");
    check_len(p.d_hat, un * um * um, "d_hat");
    auto at = [](const std::vector<double>& v, std::size_t f) { return v.empty() ? 0.0 : v[f]; };

    const int t = m + n;
    Vector r(t);
    r << p.r, p.r_hat;
    Matrix a(t, t);
    a.topLeftCorner(m, m) = p.a;
    a.topRightCorner(m, n) = -p.b;
    a.bottomRightCorner(n, n) = p.a_hat;
    a.bottomLeftCorner(n, m) = -p.b_hat;
    for (int i = 0; i < t; ++i) a(i, i) = -(i < m ? p.a(i, i) : p.a_hat(i - m, i - m));
    CubicalTensor b(3, t);
    for (int i = 0; i < t; ++i) {
        const bool xi = i < m;
        const int li = xi ? i : i - m;
        const int own = xi ? m : n, other = xi ? n : m;
        const int own0 = xi ? 0 : m, other0 = xi ? m : 0;
        const auto& c = xi ? p.c : p.c_hat;
        const auto& d = xi ? p.d : p.d_hat;
        for (int j = 0; j < own; ++j)
            for (int k = 0; k < own; ++k) {
                const auto f = (static_cast<std::size_t>(li) * own + j) * own + k;
                const double v = at(c, f);
                b.set({i, own0 + j, own0 + k}, (j == li && k == li) ? -v : v);
            }
        for (int j = 0; j < other; ++j)
            for (int k = 0; k < other; ++k) {
                const auto f = (static_cast<std::size_t>(li) * other + j) * other + k;
                b.set({i, other0 + j, other0 + k}, -at(d, f));
            }
    }
    return LVModel(r, a, b, Scenario::two_faction, FactionBlocks{m, n});
}

LVModel scale_incoming_cross_hoi(const LVModel& model, double factor) {
    if (model.scenario() != Scenario::two_faction) throw InputError("cross-faction scaling needs a two_faction model");
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw InputError("scale factor must be finite and >= 0");
    const FactionBlocks fb = *model.blocks();
    CubicalTensor b = model.b();
    for (int i = 0; i < fb.m; ++i)
        for (int j = fb.m; j < fb.m + fb.n; ++j)
            for (int k = fb.m; k < fb.m + fb.n; ++k) b.set({i, j, k}, b({i, j, k}) * factor);
    return LVModel(model.r(), model.a(), b, model.scenario(), model.blocks());
}

std::vector<double> loser_diagonal(const LVModel& model, const Vector& x, const std::vector<int>& support) {
    const Vector l = model.growth(x);
    std::vector<double> out;
    for (int i = 0; i < model.dim(); ++i)
        if (!std::binary_search(support.begin(), support.end(), i)) out.push_back(model.r()(i) * l(i));
    return out;
}

}  // namespace holv
