#include "holv/error.hpp"
#include "holv/pcp.hpp"
#include "holv/poly_solver.hpp"
#include "holv/tensor_class.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace holv;

namespace {

double inf_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

// Unique strictly positive root found by support enumeration of
// A3 x^2 + A2 x - b, or an empty vector when there is none or several.
Vector oracle_positive_root(const PolySystem& s) {
    const QcpProblem p(s.terms()[1], s.terms()[0].to_matrix(), -s.rhs());
    Vector found;
    int count = 0;
    for (const auto& sol : brute_force_solve(p).solutions) {
        if (static_cast<int>(sol.support.size()) != s.dim()) continue;
        found = sol.x;
        ++count;
    }
    return count == 1 ? found : Vector();
}

}  // namespace

TEST_CASE("construction validates the system") {
    CHECK_THROWS_AS(PolySystem({identity_tensor(3, 2)}, Vector{{1.0, 0.0}}), InputError);
    CHECK_THROWS_AS(PolySystem({identity_tensor(3, 2), identity_tensor(3, 2)}, Vector::Ones(2)), InputError);
    CHECK_THROWS_AS(PolySystem({identity_tensor(3, 3)}, Vector::Ones(2)), InputError);
    const PolySystem s({identity_tensor(3, 2), identity_tensor(2, 2)}, Vector::Ones(2));
    CHECK(s.terms()[0].order() == 2);
    CHECK(s.terms()[1].order() == 3);
}

TEST_CASE("normalize_rhs examples") {
    const PolySystem unit = fixture::example1_system();
    const PolySystem same = normalize_rhs(unit);
    CHECK(same.terms()[0] == unit.terms()[0]);
    CHECK(same.terms()[1] == unit.terms()[1]);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = 4;
    const PolySystem s({CubicalTensor::from_matrix(d)}, Vector{{2.0, 4.0}});
    const PolySystem n = normalize_rhs(s);
    CHECK(n.terms()[0] == identity_tensor(2, 2));
    CHECK(n.rhs() == Vector::Ones(2));
    const PolySystem nn = normalize_rhs(n);
    CHECK(nn.terms()[0] == n.terms()[0]);
}

TEST_CASE("split_term examples") {
    const SplitTerm id = split_term(identity_tensor(3, 2));
    CHECK(id.alpha == Vector::Ones(2));
    CHECK(id.b_part.max_abs() == 0.0);
    CHECK(id.n_part.max_abs() == 0.0);

    CubicalTensor a = CubicalTensor::filled(3, 2, -1.0);
    a.set({0, 0, 0}, 11.0);
    a.set({1, 1, 1}, 11.0);
    const SplitTerm s = split_term(a);
    CHECK(s.alpha == Vector::Constant(2, 11.0));
    CHECK(s.b_part.diagonal(0) == 0.0);
    CHECK(s.b_part({0, 1, 0}) == 1.0);
    CHECK(s.n_part.max_abs() == 0.0);

    const SplitTerm m = split_term(fixture::example2_a3());
    CHECK(m.n_part({0, 1, 0}) == 10.0);
    CHECK(m.b_part({0, 1, 0}) == 0.0);
    CHECK(m.reconstruct() == fixture::example2_a3());

    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
        const CubicalTensor t = oracle::random_tensor(rng, 2 + k % 3, 3, -2.0, 2.0);
        const SplitTerm st = split_term(t);
        CHECK(st.reconstruct() == t);
        CHECK(is_nonnegative(st.b_part));
        CHECK(is_nonnegative(st.n_part));
        for (std::size_t f = 0; f < t.size(); ++f) CHECK(st.b_part[f] * st.n_part[f] == 0.0);
    }
}

TEST_CASE("bracket_scalars examples") {
    const PolySystem one({identity_tensor(3, 2)}, Vector::Ones(2));
    const BracketScalars b1 = bracket_scalars(one, Vector::Ones(2));
    CHECK(b1.t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b1.w == doctest::Approx(1.0).epsilon(1e-14));

    const PolySystem two({identity_tensor(3, 2), identity_tensor(2, 2)}, Vector::Ones(2));
    const BracketScalars b2 = bracket_scalars(two, Vector::Ones(2));
    const double golden = (-1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(b2.t - golden) < 1e-14);
    CHECK(std::abs(b2.w - golden) < 1e-14);
    CHECK(b2.t <= b2.w);

    const BracketScalars b3 = bracket_scalars(fixture::example2_system(), fixture::example2_certificate());
    CHECK(std::isfinite(b3.w));
    CHECK(b3.t < b3.w);

    CHECK_THROWS_AS(bracket_scalars(PolySystem({-identity_tensor(3, 2)}, Vector::Ones(2)), Vector::Ones(2)), NotApplicable);
}

TEST_CASE("invert_f examples") {
    const SplitSystem lin(PolySystem({identity_tensor(2, 2)}, Vector::Ones(2)));
    const Vector y{{3.0, 4.0}};
    CHECK(inf_norm(invert_f(lin, y) - y) < 1e-14);

    const SplitSystem quad(PolySystem({identity_tensor(3, 2), identity_tensor(2, 2)}, Vector::Ones(2)));
    CHECK(inf_norm(invert_f(quad, Vector{{2.0, 2.0}}) - Vector::Ones(2)) < 1e-14);

    const SplitSystem mixed(fixture::example2_system());
    REQUIRE(mixed.has_positive_off_diagonal());
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        // f is increasing but not onto the positive orthant, so targets are
        // drawn from its range.
        const Vector target = mixed.f(oracle::random_vector(rng, 2, 0.05, 3.0));
        const Vector x = invert_f(mixed, target);
        CHECK(x.minCoeff() > 0.0);
        CHECK(inf_norm(mixed.f(x) - target) < 1e-10);
    }
}

TEST_CASE("solve_s_tensor: first worked example") {
    const SolveResult r = solve_s_tensor(fixture::example1_system());
    const double root = fixture::example1_root();
    CHECK(std::abs(r.solution(0) - root) < 1e-9);
    CHECK(std::abs(r.solution(1) - root) < 1e-9);
    CHECK(std::abs(r.solution(0) - 0.27016) < 5e-5);
    CHECK(r.residual_inf < 1e-8);
    CHECK(r.unique_certified);
    CHECK(r.monotone);
    CHECK(r.status == SolveStatus::positive);
    CHECK(inf_norm(r.lower_limit - r.upper_limit) < 1e-9);
}

TEST_CASE("solve_s_tensor: trivial systems") {
    const SolveResult r = solve_s_tensor(PolySystem({identity_tensor(3, 3)}, Vector::Ones(3)));
    CHECK(inf_norm(r.solution - Vector::Ones(3)) < 1e-10);
    CHECK_THROWS_AS(solve_s_tensor(PolySystem({-identity_tensor(3, 2)}, Vector::Ones(2))), NotApplicable);
    CHECK_THROWS_AS(solve_s_tensor(fixture::example1_system(), Vector{{1.0, -1.0}}), NotApplicable);
}

TEST_CASE("solve_s_tensor: second worked example agrees with the enumeration oracle") {
    const PolySystem s = fixture::example2_system();
    const SolveResult r = solve_s_tensor(s, fixture::example2_certificate());
    CHECK(r.residual_inf < 1e-8);
    CHECK(r.unique_certified);
    const Vector oracle = oracle_positive_root(s);
    REQUIRE(oracle.size() == 2);
    CHECK(inf_norm(r.solution - oracle) < 1e-6);
    // The values printed alongside this example do not solve it.
    CHECK(inf_norm(s.residual(Vector{{0.49547, 0.43791}})) > 1e-2);
}

TEST_CASE("solve_m_tensor examples") {
    const PolySystem two({identity_tensor(3, 2), identity_tensor(2, 2)}, Vector::Constant(2, 2.0));
    const SolveResult r = solve_m_tensor(two);
    CHECK(inf_norm(r.lower_limit - Vector::Ones(2)) < 1e-9);
    CHECK(inf_norm(r.upper_limit - Vector::Ones(2)) < 1e-9);
    CHECK(r.status == SolveStatus::positive);

    const Vector b{{0.3, 7.0, 2.5}};
    const SolveResult lin = solve_m_tensor(PolySystem({identity_tensor(2, 3)}, b));
    CHECK(inf_norm(lin.solution - b) < 1e-14);
    CHECK(lin.iters_below <= 2);

    const SolveResult m1 = solve_m_tensor(fixture::example1_system());
    const SolveResult s1 = solve_s_tensor(fixture::example1_system());
    CHECK(inf_norm(m1.solution - s1.solution) < 1e-9);
    CHECK(m1.monotone);

    CHECK_THROWS_AS(solve_m_tensor(fixture::example2_system()), NotApplicable);
}

TEST_CASE("mixed-sign system without a positive root is reported, not solved") {
    // A 1 > 0, yet x0 + 2 x1 = 1 and 2 x0 + x1 = 3 force x1 = -1/3.
    Matrix a(2, 2);
    a << 1, 2, 2, 1;
    const PolySystem s({CubicalTensor::from_matrix(a)}, Vector{{1.0, 3.0}});
    CHECK_THROWS_AS(solve_s_tensor(s, Vector::Ones(2)), NumericalFailure);
}

TEST_CASE("property: monotone bracketing, residual and scaling on Z-pattern systems") {
    Rng rng(2024);
    for (int k = 0; k < 60; ++k) {
        const int n = 1 + k % 3;
        const PolySystem s = fixture::random_z_system(rng, n);
        const SolveResult r = solve_s_tensor(s);
        CHECK(r.residual_inf < 1e-10);
        CHECK(r.unique_certified);
        CHECK(traces_monotone(r.lower_trace, r.upper_trace));
        for (const auto& x : r.lower_trace) CHECK((x - r.solution).maxCoeff() < 1e-12 * std::max(1.0, inf_norm(x)));
        for (const auto& x : r.upper_trace) CHECK((r.solution - x).maxCoeff() < 1e-12 * std::max(1.0, inf_norm(x)));
        const SolveResult rn = solve_s_tensor(normalize_rhs(s));
        CHECK(inf_norm(rn.solution - r.solution) < 1e-9);
    }
}

TEST_CASE("property: oracle equivalence on random systems") {
    Rng rng(77);
    int compared = 0;
    for (int k = 0; k < 40; ++k) {
        const int n = 1 + k % 3;
        const PolySystem s = fixture::random_z_system(rng, n);
        const SolveResult r = solve_s_tensor(s);
        const Vector oracle = oracle_positive_root(s);
        REQUIRE(oracle.size() == n);
        CHECK(inf_norm(r.solution - oracle) < 1e-6);
        ++compared;
    }
    // Diagonally dominant terms with mixed off-diagonal signs: whenever the
    // solver returns, the oracle must find the same positive root.
    for (int k = 0; k < 40; ++k) {
        const int n = 2 + k % 2;
        const PolySystem s({oracle::random_sdd_tensor(rng, 3, n), oracle::random_sdd_tensor(rng, 2, n)},
                           oracle::random_vector(rng, n, 0.2, 3.0));
        try {
            const SolveResult r = solve_s_tensor(s);
            CHECK(r.residual_inf < 1e-10);
            const Vector oracle = oracle_positive_root(s);
            REQUIRE(oracle.size() == n);
            CHECK(inf_norm(r.solution - oracle) < 1e-6);
            ++compared;
        } catch (const NumericalFailure&) {
        }
    }
    CHECK(compared >= 60);
}

TEST_CASE("property: Picard iteration from interior starts reaches the bracketed solution") {
    Rng rng(31337);
    for (int k = 0; k < 100; ++k) {
        const int n = 1 + k % 3;
        const PolySystem s = fixture::random_z_system(rng, n);
        const SolveResult r = solve_s_tensor(s);
        for (int j = 0; j < 10; ++j) {
            const Vector x0 = oracle::random_vector(rng, n, 0.01, 10.0);
            const PicardResult p = picard_iterate(s, x0);
            CHECK(p.converged);
            CHECK(inf_norm(p.x - r.solution) < 1e-6);
        }
    }
}
