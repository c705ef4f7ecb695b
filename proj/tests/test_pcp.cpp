#include "holv/error.hpp"
#include "holv/model.hpp"
#include "holv/pcp.hpp"
#include "holv/poly_solver.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace holv;

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

QcpProblem example1_problem() {
    return QcpProblem(fixture::example1_a3(), fixture::example1_a2(), -Vector::Ones(2));
}

QcpProblem random_grsdd_problem(Rng& rng, int n) {
    return QcpProblem(fixture::random_grsdd(rng, 3, n), fixture::random_grsdd(rng, 2, n).to_matrix(),
                      oracle::random_vector(rng, n, -3.0, -0.1));
}

}  // namespace

TEST_CASE("omega examples") {
    CHECK(omega(Vector{{-1.0, -1.0}}) == std::vector<int>{0, 1});
    CHECK(omega(Vector{{1.0, 0.0, -2.0}}) == std::vector<int>{2});
    CHECK(omega(Vector{{0.0, 3.0}}).empty());
}

TEST_CASE("positive_quadratic_root matches the textbook formula") {
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
        const double c2 = rng.uniform(0.1, 10.0), c1 = rng.uniform(-5.0, 5.0), c0 = -rng.uniform(0.01, 10.0);
        const double naive = (-c1 + std::sqrt(c1 * c1 - 4.0 * c2 * c0)) / (2.0 * c2);
        const double s = positive_quadratic_root(c2, c1, c0);
        CHECK(std::abs(s - naive) < 1e-12 * std::max(1.0, naive));
        CHECK(std::abs(c2 * s * s + c1 * s + c0) < 1e-12 * std::max(1.0, std::abs(c0)));
    }
    // Tiny c2 * |c0| against c1: the naive form cancels, this one does not.
    CHECK(std::abs(positive_quadratic_root(1e-12, 1.0, -1.0) - 1.0) < 1e-11);
    CHECK(positive_quadratic_root(0.0, 2.0, -1.0) == 0.5);
}

TEST_CASE("norm_bounds examples") {
    const NormBounds nb = norm_bounds(example1_problem());
    CHECK(std::abs(nb.lower - (-2.0 + std::sqrt(48.0)) / 22.0) < 1e-14);
    CHECK(std::abs(nb.upper - (-1.0 + std::sqrt(41.0)) / 20.0) < 1e-14);
    CHECK(std::abs(nb.lower - 0.224009) < 1e-6);
    CHECK(std::abs(nb.upper - 0.270156) < 1e-6);
    REQUIRE(nb.per_index.size() == 2);
    for (const auto& row : nb.per_index) {
        CHECK(row.s_b == 11.0);
        CHECK(row.delta_b == 10.0);
        CHECK(row.s_a == 2.0);
        CHECK(row.delta_a == 1.0);
    }
    CHECK(nb.per_index[0].lower == nb.per_index[1].lower);
    CHECK(nb.per_index[0].upper == nb.per_index[1].upper);
    CHECK(nb.lower <= fixture::example1_root());
    CHECK(fixture::example1_root() <= nb.upper + 1e-15);

    const NormBounds n4 = norm_bounds(QcpProblem(fixture::example1_a3(), fixture::example1_a2(), -4.0 * Vector::Ones(2)));
    CHECK(n4.lower == positive_quadratic_root(11.0, 2.0, -4.0));
    CHECK(n4.upper == positive_quadratic_root(10.0, 1.0, -4.0));

    CHECK_THROWS_AS(norm_bounds(QcpProblem(fixture::example1_a3(), fixture::example1_a2(), Vector::Ones(2))), NotApplicable);
    Matrix bad = fixture::example1_a2();
    bad(1, 1) = 0.5;
    try {
        norm_bounds(QcpProblem(fixture::example1_a3(), bad, -Vector::Ones(2)));
        FAIL("expected NotApplicable");
    } catch (const NotApplicable& e) {
        CHECK(std::string(e.what()).find("A row 2") != std::string::npos);
    }
}

TEST_CASE("brute_force_solve examples") {
    const QcpProblem p = example1_problem();
    const PcpEnumeration e = brute_force_solve(p);
    REQUIRE(e.supports.size() == 4);
    CHECK(e.supports[0].support.empty());
    CHECK(e.supports[0].status == SupportStatus::no_root);
    bool interior = false;
    for (const auto& s : e.solutions) {
        CHECK(verify_complementarity(p, s.x, 1e-9));
        if (s.support.size() == 2)
            interior = inf_norm(s.x - Vector::Constant(2, fixture::example1_root())) < 1e-10;
    }
    CHECK(interior);
    // Single-species roots of 11 x^2 + 2 x = 1 leave the other slack negative.
    CHECK(e.solutions.size() == 1);

    const PcpEnumeration lin = brute_force_solve(QcpProblem(CubicalTensor(3, 3), Matrix::Identity(3, 3), -Vector::Ones(3)));
    REQUIRE(lin.solutions.size() == 1);
    CHECK(inf_norm(lin.solutions[0].x - Vector::Ones(3)) < 1e-12);

    const PcpEnumeration zero = brute_force_solve(QcpProblem(fixture::example1_a3(), fixture::example1_a2(), Vector::Ones(2)));
    bool has_zero = false;
    for (const auto& s : zero.solutions) has_zero = has_zero || inf_norm(s.x) == 0.0;
    CHECK(has_zero);
}

TEST_CASE("brute_force_solve output is ordered and reproducible") {
    Rng rng(8);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 3;
        const QcpProblem p(oracle::random_tensor(rng, 3, n, -1.0, 1.0), oracle::random_tensor(rng, 2, n, -1.0, 1.0).to_matrix(),
                           oracle::random_vector(rng, n, -1.0, 1.0));
        const PcpEnumeration a = brute_force_solve(p);
        const PcpEnumeration b = brute_force_solve(p);
        REQUIRE(a.solutions.size() == b.solutions.size());
        for (std::size_t i = 0; i < a.solutions.size(); ++i) CHECK(a.solutions[i].x == b.solutions[i].x);
        CHECK(a.supports.size() == (std::size_t{1} << n));
        for (std::size_t i = 1; i < a.supports.size(); ++i) CHECK(a.supports[i - 1].support < a.supports[i].support);
        for (const auto& s : a.solutions) {
            CHECK(verify_complementarity(p, s.x, 1e-9));
            for (int i = 0; i < n; ++i) CHECK(s.x(i) >= 0.0);
        }
    }
}

TEST_CASE("property: norm bounds bracket every solution and the argmax lies in omega") {
    Rng rng(3003);
    int solutions = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 1 + k % 4;
        const QcpProblem p = random_grsdd_problem(rng, n);
        const NormBounds nb = norm_bounds(p);
        CHECK(nb.lower <= nb.upper);
        const auto om = omega(p.q());
        for (const auto& s : brute_force_solve(p).solutions) {
            ++solutions;
            const double norm = inf_norm(s.x);
            CHECK(nb.lower <= norm * (1.0 + 1e-12));
            CHECK(norm <= nb.upper * (1.0 + 1e-12));
            Eigen::Index k_max = 0;
            s.x.cwiseAbs().maxCoeff(&k_max);
            CHECK(std::find(om.begin(), om.end(), static_cast<int>(k_max)) != om.end());
            CHECK(std::abs(s.slack(k_max)) < 1e-9);
        }
    }
    CHECK(solutions >= 100);
}

TEST_CASE("leading_sol_zero examples and invariance") {
    CHECK(leading_sol_zero(-identity_tensor(3, 3)));
    CHECK_FALSE(leading_sol_zero(CubicalTensor(3, 2)));
    CubicalTensor flat(3, 2);
    flat.set({0, 0, 0}, -1.0);
    CHECK_FALSE(leading_sol_zero(flat));

    Rng rng(41);
    for (int k = 0; k < 40; ++k) {
        const int n = 1 + k % 3;
        const CubicalTensor b = oracle::random_tensor(rng, 3, n, -1.0, 1.0);
        const bool base = leading_sol_zero(b);
        CHECK(leading_sol_zero(b * 0.01) == base);
        CHECK(leading_sol_zero(b * 7.0) == base);
    }
    for (int k = 0; k < 20; ++k) CHECK(leading_sol_zero(fixture::random_grsdd(rng, 3, 1 + k % 3)));
}

TEST_CASE("property: solution norms stay inside a nondecreasing envelope when the leading problem is trivial") {
    Rng rng(99);
    for (int k = 0; k < 10; ++k) {
        const int n = 1 + k % 3;
        const CubicalTensor b = fixture::random_grsdd(rng, 3, n);
        REQUIRE(leading_sol_zero(b));
        const Matrix a = oracle::random_tensor(rng, 2, n, -1.0, 1.0).to_matrix();
        const Vector q0 = oracle::random_vector(rng, n, -1.0, 1.0);
        double envelope = 0.0;
        for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
            double largest = 0.0;
            for (const auto& s : brute_force_solve(QcpProblem(b, a, t * q0)).solutions) largest = std::max(largest, inf_norm(s.x));
            CHECK(std::isfinite(largest));
            envelope = std::max(envelope, largest);
            // At the argmax row the quadratic term dominates the rest.
            const double delta = [&] {
                double d = std::numeric_limits<double>::infinity();
                for (int i = 0; i < n; ++i) d = std::min(d, b.diagonal(i) - row_sums(b, i).minus);
                return d;
            }();
            const double linear = a.cwiseAbs().rowwise().sum().maxCoeff();
            CHECK(largest <= positive_quadratic_root(delta, -linear, -t * inf_norm(q0)) * (1.0 + 1e-9));
        }
        CHECK(envelope < 1e6);
    }
}

TEST_CASE("nonemptiness_check") {
    const QcpProblem p(identity_tensor(3, 2), Matrix::Zero(2, 2), -Vector::Ones(2));
    const NonemptinessCheck c = nonemptiness_check(p);
    CHECK(c.leading_zero);
    CHECK(c.leading_with_d_zero);
    CHECK(c.guaranteed);
    CHECK_THROWS_AS(nonemptiness_check(p, Vector{{1.0, -1.0}}), InputError);

    const NonemptinessCheck z = nonemptiness_check(QcpProblem(CubicalTensor(3, 2), Matrix::Identity(2, 2), -Vector::Ones(2)));
    CHECK_FALSE(z.leading_zero);
    CHECK_FALSE(z.guaranteed);
}

TEST_CASE("lv_to_pcp") {
    const LVModel logistic(Vector::Ones(2), -Matrix::Identity(2, 2), CubicalTensor(3, 2));
    const QcpProblem stable = lv_to_pcp(logistic, Orientation::stable_side);
    CHECK(stable.b().max_abs() == 0.0);
    CHECK(stable.a() == Matrix::Identity(2, 2));
    CHECK(stable.q() == -Vector::Ones(2));
    const auto sols = brute_force_solve(stable).solutions;
    REQUIRE(sols.size() == 1);
    CHECK(inf_norm(sols[0].x - Vector::Ones(2)) < 1e-12);

    const QcpProblem unstable = lv_to_pcp(logistic, Orientation::unstable_side);
    CHECK(unstable.a() == -Matrix::Identity(2, 2));
    CHECK(unstable.q() == Vector::Ones(2));

    const LVModel ex1(Vector::Ones(2), -fixture::example1_a2(), fixture::example1_a3() * -1.0);
    const QcpProblem p = lv_to_pcp(ex1, Orientation::stable_side);
    const SolveResult r = solve_s_tensor(fixture::example1_system());
    bool matched = false;
    for (const auto& s : brute_force_solve(p).solutions) {
        CHECK(inf_norm(s.x.cwiseProduct(ex1.growth(s.x))) < 1e-9);
        if (s.support.size() == 2) matched = inf_norm(s.x - r.solution) < 1e-9;
    }
    CHECK(matched);

    Rng rng(12);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 2;
        Matrix a = oracle::random_tensor(rng, 2, n, -1.0, 1.0).to_matrix();
        CubicalTensor b = oracle::random_tensor(rng, 3, n, -1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            a(i, i) = -std::abs(a(i, i)) - 0.5;
            b.set_flat(b.diagonal_flat(i), -std::abs(b.diagonal(i)));
        }
        const LVModel m(Vector::Ones(n), a, b);
        for (const auto& s : brute_force_solve(lv_to_pcp(m, Orientation::stable_side)).solutions)
            CHECK(inf_norm(m.rhs(s.x)) < 1e-9);
    }
}
