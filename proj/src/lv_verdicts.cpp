#include "holv/error.hpp"
#include "holv/lv_model.hpp"
#include "holv/poly_solver.hpp"
#include "holv/tensor_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holv {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix sub_matrix(const Matrix& a, const std::vector<int>& s) {
    const auto k = static_cast<Eigen::Index>(s.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) out(i, j) = a(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
    return out;
}

double max_real_part(const Matrix& m) {
    if (m.size() == 0) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(m, false).eigenvalues();
    double out = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) out = std::max(out, ev(i).real());
    return out;
}

std::vector<double> flatten(const Matrix& m) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

bool all_negative(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return d < 0.0; });
}

VerdictEntry not_applicable(const std::string& id, const std::string& note) {
    return VerdictEntry{id, Verdict::not_applicable, note, {}};
}

// Losers invade-proof and winners locally stable: D_i < 0 for every loser and
// the winner sub-Jacobian Hurwitz. The Jacobian is block triangular, so this
// is sufficient for local stability.
VerdictEntry boundary_stability(const std::string& id, const LVModel& model, const Vector& x,
                                const std::vector<int>& support, const Matrix& jac) {
    VerdictEntry e{id, Verdict::fails, "", {}};
    const auto d = loser_diagonal(model, x, support);
    const double block = max_real_part(sub_matrix(jac, support));
    e.witnesses.push_back({"loser_diagonal", d});
    e.witnesses.push_back({"winner_block_max_real", {block}});
    const bool losers = all_negative(d);
    const bool winners = block < -hurwitz_tol;
    if (losers && winners) {
        e.verdict = Verdict::holds;
        e.note = "every loser has D_i < 0 and the winner block is Hurwitz";
    } else if (!losers) {
        e.note = "some loser has D_i >= 0";
    } else {
        e.note = "winner block is not Hurwitz";
    }
    return e;
}

VerdictEntry positive_loser(const std::string& id, const LVModel& model, const Vector& x,
                            const std::vector<int>& losers) {
    VerdictEntry e{id, Verdict::fails, "", {}};
    const Vector l = model.growth(x);
    std::vector<double> d;
    for (int i : losers) d.push_back(model.r()(i) * l(i));
    e.witnesses.push_back({"loser_diagonal", d});
    e.witnesses.push_back({"loser_index", as_doubles(losers)});
    if (!d.empty() && *std::max_element(d.begin(), d.end()) > 0.0) {
        e.verdict = Verdict::holds;
        e.note = "a loser has D_i > 0, so the equilibrium is unstable";
    } else {
        e.note = "no loser with D_i > 0";
    }
    return e;
}

// Row i of the printed closed form for (P J P z)_i, in stored coefficients:
// -r_i z_i + r_i z_i (sum over own-faction pairs B_ijk z_j z_k
//   - 3 sum over other-faction pairs B_ijk z_j z_k - 2 sum over other-faction j A_ij z_j).
std::vector<double> two_faction_closed_form(const LVModel& model, const Vector& z) {
    const FactionBlocks fb = *model.blocks();
    const int n = model.dim();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const bool fi = in_first_faction(fb, i);
        double own = 0.0, other = 0.0, pair = 0.0;
        for (int j = 0; j < n; ++j) {
            const bool fj = in_first_faction(fb, j);
            if (fj != fi) pair += model.a()(i, j) * z(j);
            for (int k = 0; k < n; ++k) {
                if (in_first_faction(fb, k) != fj) continue;
                const double t = model.b()({i, j, k}) * z(j) * z(k);
                (fj == fi ? own : other) += t;
            }
        }
        const double rz = model.r()(i) * z(i);
        out[static_cast<std::size_t>(i)] = -rz + rz * (own - 3.0 * other - 2.0 * pair);
    }
    return out;
}

std::vector<VerdictEntry> local_verdicts(const LVModel& model, const Vector& x, const std::vector<int>& support,
                                         const Matrix& jac) {
    const int n = model.dim();
    std::vector<VerdictEntry> out;
    std::vector<int> losers;
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(support.begin(), support.end(), i)) losers.push_back(i);

    if (support.empty()) {
        VerdictEntry e{"origin_unstable", Verdict::holds, "J(0) = diag(r) with r > 0", {}};
        e.witnesses.push_back({"jacobian_diagonal", to_std(jac.diagonal())});
        if (!(jac.diagonal().minCoeff() > 0.0)) {
            e.verdict = Verdict::fails;
            e.note = "some r_i is not positive";
        }
        out.push_back(std::move(e));
        return out;
    }
    const bool interior = losers.empty();

    switch (model.scenario()) {
        case Scenario::cooperative: {
            if (interior) {
                VerdictEntry e{"cooperative_interior_jx", Verdict::fails, "", {}};
                const Vector jx = jac * x;
                e.witnesses.push_back({"jx", to_std(jx)});
                if (jx.maxCoeff() < 0.0) {
                    e.verdict = Verdict::holds;
                    e.note = "J x* < 0 with J irreducible Metzler, so J is Hurwitz";
                } else {
                    e.note = "J x* has a nonnegative entry";
                }
                out.push_back(std::move(e));
            } else {
                out.push_back(positive_loser("cooperative_boundary_unstable", model, x, losers));
            }
            break;
        }
        case Scenario::two_faction: {
            const FactionBlocks fb = *model.blocks();
            if (interior) {
                VerdictEntry e{"two_faction_interior_permuted", Verdict::fails, "", {}};
                const Vector pjpz = permute_two_faction(jac, fb.m, fb.n) * x;
                e.witnesses.push_back({"pjpz", to_std(pjpz)});
                e.witnesses.push_back({"pjpz_closed_form", two_faction_closed_form(model, x)});
                if (pjpz.maxCoeff() < 0.0) {
                    e.verdict = Verdict::holds;
                    e.note = "P J P z* < 0 with P J P Metzler, so J is Hurwitz";
                } else {
                    e.note = "P J P z* has a nonnegative entry";
                }
                out.push_back(std::move(e));
                break;
            }
            int first = 0, second = 0;
            for (int i : support) (in_first_faction(fb, i) ? first : second) += 1;
            const bool single = first == 0 || second == 0;
            const int faction_size = first > 0 ? fb.m : fb.n;
            if (single && static_cast<int>(support.size()) == faction_size) {
                out.push_back(boundary_stability("two_faction_one_faction_wins", model, x, support, jac));
            } else if (single) {
                std::vector<int> same;
                const bool winners_first = first > 0;
                for (int i : losers)
                    if (in_first_faction(fb, i) == winners_first) same.push_back(i);
                out.push_back(positive_loser("two_faction_partial_faction_unstable", model, x, same));
            } else {
                out.push_back(boundary_stability("two_faction_mixed_boundary", model, x, support, jac));
            }
            break;
        }
        case Scenario::competitive:
            if (!interior) out.push_back(boundary_stability("competitive_boundary", model, x, support, jac));
            break;
        case Scenario::general:
            if (!interior) out.push_back(boundary_stability("loser_invasion", model, x, support, jac));
            break;
    }
    std::sort(out.begin(), out.end(), [](const VerdictEntry& a, const VerdictEntry& b) { return a.id < b.id; });
    return out;
}

double cofactor_det(const Matrix& m) {
    const auto n = m.rows();
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double det = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        if (m(0, c) == 0.0) continue;
        Matrix minor(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
                if (j == c) continue;
                minor(i - 1, jj++) = m(i, j);
            }
        det += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
    }
    return det;
}

struct MinorSummary {
    LeadingMinors minors;
    bool diagonal_negative = false;
};

MinorSummary minors_of_negated(const Matrix& g) {
    MinorSummary s;
    s.minors = leading_principal_minors(-g);
    s.diagonal_negative = g.diagonal().maxCoeff() < 0.0;
    return s;
}

void add_minor_witnesses(VerdictEntry& e, const Matrix& g, const MinorSummary& s) {
    e.witnesses.push_back({"g_matrix", flatten(g)});
    e.witnesses.push_back({"neg_g_minors", s.minors.minors});
}

// Row margins of -d_i diag_i - sum_{j != i} d_j |A_ij| - R sum d_j (|B_ijk| + |B_ikj|),
// the B sum taken over j != i (all k), or over all (j, k) != (i, i) when
// include_self_pairs is set. The weight on each off-diagonal term is d_j, as printed.
std::vector<double> weighted_margins(const LVModel& model, const Vector& d, const Vector& diag, double r_hat,
                                     bool include_self_pairs) {
    const int n = model.dim();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double rhs = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) rhs += d(j) * std::abs(model.a()(i, j));
            for (int k = 0; k < n; ++k) {
                const bool counted = include_self_pairs ? !(j == i && k == i) : j != i;
                if (counted) rhs += r_hat * d(j) * (std::abs(model.b()({i, j, k})) + std::abs(model.b()({i, k, j})));
            }
        }
        out[static_cast<std::size_t>(i)] = -d(i) * diag(i) - rhs;
    }
    return out;
}

// Off-diagonal bound r_i (|A_ij| + R sum_k (|B_ijk| + |B_ikj|)).
Matrix dominance_g(const LVModel& model, double r_hat) {
    const int n = model.dim();
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += std::abs(model.b()({i, j, k})) + std::abs(model.b()({i, k, j}));
            g(i, j) = model.r()(i) * (std::abs(model.a()(i, j)) + r_hat * s);
        }
    return g;
}

// Tightest constant bounds of dF_i/dx_j over the box eps <= x_k <= R.
Matrix box_g(const LVModel& model, double r_hat, double eps) {
    const int n = model.dim();
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double hi = model.a()(i, j), lo = model.a()(i, j);
            for (int k = 0; k < n; ++k) {
                const double c = model.b()({i, j, k}) + model.b()({i, k, j});
                hi += std::max(c * eps, c * r_hat);
                lo += std::min(c * eps, c * r_hat);
            }
            g(i, j) = model.r()(i) * (i == j ? hi : std::max(std::abs(hi), std::abs(lo)));
        }
    return g;
}

VerdictEntry margins_verdict(const std::string& id, const std::vector<double>& margins) {
    VerdictEntry e{id, Verdict::holds, "", {}};
    std::vector<double> failing;
    for (std::size_t i = 0; i < margins.size(); ++i)
        if (!(margins[i] > 0.0)) failing.push_back(static_cast<double>(i));
    e.witnesses.push_back({"row_margins", margins});
    e.witnesses.push_back({"failing_rows", failing});
    if (!failing.empty()) {
        e.verdict = Verdict::fails;
        e.note = "weighted dominance inequality fails on some row";
    } else {
        e.note = "weighted dominance inequality holds on every row (assumes the box is positively invariant)";
    }
    return e;
}

}  // namespace

EquilibriumReport classify_equilibrium(const LVModel& model, const Vector& x_star, double tol) {
    const int n = model.dim();
    if (x_star.size() != n) throw InputError("equilibrium length does not match the model dimension");
    if (!x_star.allFinite() || x_star.minCoeff() < 0.0) throw InputError("equilibrium must be finite and nonnegative");
    EquilibriumReport rep;
    rep.x_star = x_star;
    rep.residual = inf_norm(model.rhs(x_star));
    if (!(rep.residual < tol))
        throw InputError("not an equilibrium: residual " + std::to_string(rep.residual) + " is not below " +
                         std::to_string(tol));
    for (int i = 0; i < n; ++i)
        if (x_star(i) > 0.0) rep.support.push_back(i);
    rep.kind = rep.support.empty()                        ? EquilibriumKind::origin
               : static_cast<int>(rep.support.size()) == n ? EquilibriumKind::interior
                                                           : EquilibriumKind::boundary;
    const Matrix jac = model.jacobian(x_star);
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(jac, false).eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) rep.jacobian_eigs.push_back(ev(i));
    std::sort(rep.jacobian_eigs.begin(), rep.jacobian_eigs.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    rep.max_real = rep.jacobian_eigs.front().real();
    rep.hurwitz = rep.max_real < -hurwitz_tol;
    rep.stability = rep.hurwitz ? Stability::stable : rep.max_real > hurwitz_tol ? Stability::unstable : Stability::marginal;
    rep.verdicts = local_verdicts(model, x_star, rep.support, jac);
    return rep;
}

MetzlerCertificate metzler_hurwitz_certificate(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("matrix must be square");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) < 0.0)
                throw InputError("matrix is not Metzler: entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 ") is negative");
    MetzlerCertificate out;
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) {
        out.singular = true;
        return out;
    }
    const Vector z = lu.solve(-Vector::Ones(m.rows()));
    if (z.allFinite() && z.minCoeff() > 0.0) out.z = z;
    return out;
}

LeadingMinors leading_principal_minors(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("matrix must be square");
    const auto n = m.rows();
    LeadingMinors out;
    for (Eigen::Index k = 1; k <= n; ++k) {
        const Matrix blk = m.topLeftCorner(k, k);
        if (n <= 8) {
            out.minors.push_back(cofactor_det(blk));
        } else {
            Eigen::PartialPivLU<Matrix> lu(blk);
            out.minors.push_back(lu.determinant());
            if (lu.rcond() < 1e-12) out.ill_conditioned = true;
        }
    }
    out.all_positive = std::all_of(out.minors.begin(), out.minors.end(), [](double v) { return v > 0.0; });
    return out;
}

std::vector<VerdictEntry> global_stability_conditions(const LVModel& model, const GlobalStabilityOptions& options) {
    if (!(options.eps > 0.0) || !(options.r_hat > options.eps) || !std::isfinite(options.r_hat))
        throw InputError("global stability options need r_hat > eps > 0");
    const int n = model.dim();
    const Vector d = options.d.value_or(Vector::Ones(n));
    if (d.size() != n) throw InputError("weight vector d must have length " + std::to_string(n));
    if (!(d.minCoeff() > 0.0)) throw InputError("weights d must be positive");
    std::vector<VerdictEntry> out;
    const Vector a_diag = model.a().diagonal();
    Vector b_diag(n);
    for (int i = 0; i < n; ++i) b_diag(i) = model.b().diagonal(i);
    const bool a_diag_negative = a_diag.maxCoeff() < 0.0;

    {
        const Matrix g = box_g(model, options.r_hat, options.eps);
        const MinorSummary s = minors_of_negated(g);
        const bool ok = s.diagonal_negative && s.minors.all_positive;
        VerdictEntry poincare{"poincare_inward_conditional", ok ? Verdict::conditional : Verdict::fails, "", {}};
        poincare.note = ok ? "Jacobian bound holds on the box; the inward-pointing boundary condition is assumed, not checked"
                           : "Jacobian bound matrix fails the sign or minor test";
        add_minor_witnesses(poincare, g, s);
        out.push_back(std::move(poincare));

        VerdictEntry sector{"sector_bound_minors", ok ? Verdict::holds : Verdict::fails, "", {}};
        sector.note = ok ? "leading principal minors of -G are positive (assumes the box is positively invariant)"
                         : (s.diagonal_negative ? "some leading principal minor of -G is not positive"
                                                : "some diagonal bound G_ii is not negative");
        if (s.minors.ill_conditioned) sector.note += "; minor factorization is ill-conditioned";
        add_minor_witnesses(sector, g, s);
        out.push_back(std::move(sector));
    }

    const bool b_nonpositive =
        std::all_of(model.b().entries().begin(), model.b().entries().end(), [](double v) { return v <= 0.0; });
    if (b_nonpositive && a_diag_negative) {
        VerdictEntry e = margins_verdict("dominance_nonpositive_hoi",
                                         weighted_margins(model, d, a_diag, options.r_hat, false));
        Matrix g = dominance_g(model, options.r_hat);
        for (int i = 0; i < n; ++i) g(i, i) = model.r()(i) * a_diag(i);
        add_minor_witnesses(e, g, minors_of_negated(g));
        out.push_back(std::move(e));
    } else {
        out.push_back(not_applicable("dominance_nonpositive_hoi", "needs B <= 0 and A_ii < 0"));
    }

    if (b_diag.maxCoeff() < 0.0 && a_diag_negative) {
        const Vector diag = a_diag + options.eps * b_diag;
        VerdictEntry e = margins_verdict("dominance_self_hoi", weighted_margins(model, d, diag, options.r_hat, true));
        Matrix g = dominance_g(model, options.r_hat);
        for (int i = 0; i < n; ++i) {
            double pos = 0.0;
            for (int k = 0; k < n; ++k) {
                pos += std::max(0.0, model.b()({i, k, i}));
                pos += std::max(0.0, model.b()({i, i, k}));
            }
            g(i, i) = model.r()(i) * (diag(i) + options.r_hat * pos);
        }
        add_minor_witnesses(e, g, minors_of_negated(g));
        out.push_back(std::move(e));
    } else {
        out.push_back(not_applicable("dominance_self_hoi", "needs B_iii < 0 and A_ii < 0"));
    }

    const std::vector<CubicalTensor> neg_terms{CubicalTensor::from_matrix(-model.a()), -model.b()};
    const auto shared = shared_s_certificate(neg_terms);
    {
        VerdictEntry e{"s_tensor_unique_equilibrium", Verdict::inconclusive, "", {}};
        if (shared) {
            e.verdict = Verdict::holds;
            e.note = "-A and -B share an S-certificate";
            e.witnesses.push_back({"certificate", to_std(*shared)});
        } else {
            e.note = "no shared S-certificate found for -A and -B";
        }
        out.push_back(std::move(e));
    }

    if (model.scenario() == Scenario::competitive) {
        const double r_c = (1.0 / (-a_diag.array())).maxCoeff();
        VerdictEntry e = margins_verdict("competitive_dominance", weighted_margins(model, d, a_diag, r_c, false));
        e.witnesses.push_back({"r_hat", {r_c}});
        out.push_back(std::move(e));

        const CubicalTensor na = CubicalTensor::from_matrix(-model.a());
        const CubicalTensor nb = -model.b();
        const TensorClassReport ra = classify(na), rb = classify(nb);
        VerdictEntry h{"competitive_h_plus", Verdict::fails, "", {}};
        h.witnesses.push_back({"a_h_plus_irreducible", {ra.is_h_plus ? 1.0 : 0.0, ra.is_irreducible ? 1.0 : 0.0}});
        h.witnesses.push_back({"b_h_plus_irreducible", {rb.is_h_plus ? 1.0 : 0.0, rb.is_irreducible ? 1.0 : 0.0}});
        if (ra.is_h_plus && ra.is_irreducible && rb.is_h_plus && rb.is_irreducible) {
            h.verdict = Verdict::holds;
            h.note = "-A and -B are irreducible nonnegative H+";
        } else {
            h.note = "-A or -B is not an irreducible H+ tensor";
        }
        out.push_back(std::move(h));
    } else {
        out.push_back(not_applicable("competitive_dominance", "needs the competitive scenario"));
        out.push_back(not_applicable("competitive_h_plus", "needs the competitive scenario"));
    }

    if (model.scenario() == Scenario::cooperative) {
        const CubicalTensor na = CubicalTensor::from_matrix(-model.a());
        const CubicalTensor nb = -model.b();
        const MTest ma = m_tensor_test(na), mb = m_tensor_test(nb);
        const bool irr = is_irreducible(na) && is_irreducible(nb);
        VerdictEntry u{"cooperative_m_tensor_unique", Verdict::fails, "", {}};
        u.witnesses.push_back({"a_m_b_m_irreducible", {ma.is_m ? 1.0 : 0.0, mb.is_m ? 1.0 : 0.0, irr ? 1.0 : 0.0}});
        const bool unique = ma.is_m && mb.is_m && irr && shared.has_value();
        if (unique) {
            u.verdict = Verdict::holds;
            u.note = "-A and -B are irreducible M-tensors with a shared positive vector";
            u.witnesses.push_back({"certificate", to_std(*shared)});
        } else {
            u.note = "-A, -B are not both irreducible M-tensors with a shared positive vector";
        }
        out.push_back(std::move(u));

        VerdictEntry g{"cooperative_m_tensor_global", Verdict::fails, "", {}};
        if (!unique) {
            g.note = "uniqueness hypotheses fail";
        } else {
            try {
                const SolveResult res = solve_s_tensor(PolySystem(neg_terms, Vector::Ones(n)), shared);
                const Vector ax = -model.a() * res.solution;
                const Vector bx = -tvp(model.b(), res.solution);
                g.witnesses.push_back({"x_star", to_std(res.solution)});
                g.witnesses.push_back({"neg_a_x", to_std(ax)});
                g.witnesses.push_back({"neg_b_x2", to_std(bx)});
                if (ax.minCoeff() > 0.0 && bx.minCoeff() > 0.0) {
                    g.verdict = Verdict::holds;
                    g.note = "-A x* > 0 and -B (x*)^2 > 0";
                } else {
                    g.note = "-A x* or -B (x*)^2 has a nonpositive entry";
                }
            } catch (const Error& ex) {
                g.verdict = Verdict::inconclusive;
                g.note = std::string("positive equilibrium not computed: ") + ex.what();
            }
        }
        out.push_back(std::move(g));
    } else {
        out.push_back(not_applicable("cooperative_m_tensor_global", "needs the cooperative scenario"));
        out.push_back(not_applicable("cooperative_m_tensor_unique", "needs the cooperative scenario"));
    }

    std::sort(out.begin(), out.end(), [](const VerdictEntry& a, const VerdictEntry& b) { return a.id < b.id; });
    return out;
}

}  // namespace holv
