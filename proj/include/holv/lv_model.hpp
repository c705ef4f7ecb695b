#pragma once

#include "holv/model.hpp"
#include "holv/pcp.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holv {

enum class Verdict { holds, fails, not_applicable, conditional, inconclusive };
std::string to_string(Verdict v);

struct Witness {
    std::string name;
    std::vector<double> values;
};

struct VerdictEntry {
    std::string id;
    Verdict verdict = Verdict::not_applicable;
    std::string note;
    std::vector<Witness> witnesses;
};

enum class EquilibriumKind { origin, interior, boundary };
std::string to_string(EquilibriumKind k);

enum class Stability { stable, unstable, marginal };
std::string to_string(Stability s);

// Real parts below -1e-8 are stable, above 1e-8 unstable, otherwise marginal.
inline constexpr double hurwitz_tol = 1e-8;

struct EquilibriumReport {
    Vector x_star;
    double residual = 0.0;  // ||rhs(x_star)||_inf
    std::vector<std::complex<double>> jacobian_eigs;
    double max_real = 0.0;
    bool hurwitz = false;
    Stability stability = Stability::marginal;
    EquilibriumKind kind = EquilibriumKind::origin;
    std::vector<int> support;
    // Sorted by id.
    std::vector<VerdictEntry> verdicts;
    // False when Newton refinement did not reach the tolerance; the entry then
    // carries the unrefined point and no verdicts.
    bool refined = true;
    std::vector<std::string> sources;
};

// Classifies an equilibrium. Throws InputError when ||rhs(x)||_inf >= tol or
// x has a negative entry.
EquilibriumReport classify_equilibrium(const LVModel& model, const Vector& x_star, double tol = 1e-8);

// Newton on L_S(x) = 0 over S = {i : guess_i > support_threshold}, with the
// other components pinned to exactly 0.
struct Refinement {
    Vector x;
    std::vector<int> support;
    bool converged = false;
};
Refinement refine_equilibrium(const LVModel& model, const Vector& guess, double support_threshold = 1e-8,
                              double tol = 1e-8);

struct EquilibriumOptions {
    double tol = 1e-8;
    int newton_starts = 0;  // 0 selects 2n + 1
    std::uint64_t seed = 0;
};

// Union of the complementarity solutions in both orientations, a direct
// enumeration of the roots of L_S = 0 on every support, the S-tensor solve of
// -A x - B x^2 = 1 when a shared certificate exists, and the origin. Each
// candidate is Newton-refined on its support and classified. Output order:
// by support (lexicographic), then by coordinates.
std::vector<EquilibriumReport> find_equilibria(const LVModel& model, const EquilibriumOptions& options = {});

// Positive z with M z < 0 from the solve M z = -1. Throws InputError when M is
// not Metzler.
struct MetzlerCertificate {
    std::optional<Vector> z;
    bool singular = false;
};
MetzlerCertificate metzler_hurwitz_certificate(const Matrix& m);

// Leading principal minors; exact cofactor expansion up to n = 8, pivoted LU
// above (with ill_conditioned set when the LU condition estimate is below 1e-12).
struct LeadingMinors {
    std::vector<double> minors;
    bool all_positive = false;
    bool ill_conditioned = false;
};
LeadingMinors leading_principal_minors(const Matrix& m);

struct GlobalStabilityOptions {
    double r_hat = 10.0;
    double eps = 1e-3;
    std::optional<Vector> d;  // defaults to the all-ones vector
};

// Verdicts on the sector-bound, weighted diagonal-dominance and tensor-class
// global stability conditions. Throws InputError unless r_hat > eps > 0.
std::vector<VerdictEntry> global_stability_conditions(const LVModel& model, const GlobalStabilityOptions& options = {});

// Winner-take-all conditions for a competitive model, on the magnitudes
// a_ij = -A_ij, b_ijk = -B_ijk.
struct WtaCheck {
    bool condition_a = false;  // a_ij < a_jj for i < j
    bool condition_b = false;  // a_ij > a_jj for i > j
    std::vector<std::pair<int, int>> violations;
    std::optional<Vector> limit;
    // a11 / (a11 + sqrt(a11^2 + 4 b111)) as printed with the limit, and the
    // actual ratio of the limit to 1/a11, 2 a11 / (a11 + sqrt(...)).
    double printed_ratio = 0.0;
    double limit_ratio = 0.0;
    // L_j at the predicted limit for j >= 2; the limit can only attract when
    // all are negative.
    std::vector<double> invasion_rates;
    bool invasion_negative = false;
};
WtaCheck wta_check(const LVModel& model);

// P J P with P = diag(I_m, -I_n). With require_metzler, throws InputError when
// the result has a negative off-diagonal entry.
Matrix permute_two_faction(const Matrix& j, int m, int n, bool require_metzler = false);

struct ContinuationPoint {
    double epsilon = 0.0;
    Vector x;
    double max_real = 0.0;
    bool hurwitz = false;
};
struct ContinuationResult {
    std::vector<ContinuationPoint> path;
    bool truncated = false;
    std::string reason;  // "newton_failed" or "hyperbolicity_lost" when truncated
};
// Tracks the interior equilibrium of 1 + A x + eps B x^2 = 0 along an
// ascending grid starting at 0. Throws InputError for a bad grid and
// NumericalFailure when A is singular or the start is not hyperbolic.
ContinuationResult continuation(const LVModel& model, const std::vector<double>& epsilon_grid, double tol = 1e-8);

// Seeded model with magnitudes uniform on [0, 10] in the scenario's sign
// pattern; dims is {n}, or {m, n} for two_faction.
LVModel random_scenario(Scenario kind, const std::vector<int>& dims, std::uint64_t seed);

// Builders from nonnegative magnitudes. Self terms a_ii, b_iii (c_iii) are
// competitive and stored negated; so are all cross-faction terms.
LVModel make_competitive(const Vector& r, const Matrix& a, const CubicalTensor& b);
LVModel make_cooperative(const Vector& r, const Matrix& a, const CubicalTensor& b);
// a: m x m, b: m x n, c: order 3 dim m, d: (i in x, j,k in y) stored as an
// m x n x n array in row-major order; hatted blocks mirror them for y.
struct TwoFactionParams {
    Vector r, r_hat;
    Matrix a, b, a_hat, b_hat;
    std::vector<double> c, d, c_hat, d_hat;
};
LVModel make_two_faction(const TwoFactionParams& p);

// Multiplies every B_ijk with i in the first faction and j, k in the second
// (the competitive pressure the second faction exerts on the first).
LVModel scale_incoming_cross_hoi(const LVModel& model, double factor);

// Loser growth factors r_i L_i(x) for i outside the support of x.
std::vector<double> loser_diagonal(const LVModel& model, const Vector& x, const std::vector<int>& support);

}  // namespace holv
