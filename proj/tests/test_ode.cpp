#include "holv/error.hpp"
#include "holv/ode.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace holv;

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

LVModel logistic() { return LVModel(Vector::Ones(1), Matrix::Constant(1, 1, -1.0), CubicalTensor(3, 1)); }

LVModel scalar_competitive(double a, double b) {
    CubicalTensor bt(3, 1);
    bt.set({0, 0, 0}, b);
    return make_competitive(Vector::Ones(1), Matrix::Constant(1, 1, a), bt);
}

// One species per faction, each suppressing the other strongly.
LVModel bistable_pair() {
    TwoFactionParams p;
    p.r = Vector::Ones(1);
    p.r_hat = Vector::Ones(1);
    p.a = Matrix::Constant(1, 1, 1.0);
    p.a_hat = Matrix::Constant(1, 1, 1.0);
    p.b = Matrix::Constant(1, 1, 3.0);
    p.b_hat = Matrix::Constant(1, 1, 3.0);
    return make_two_faction(p);
}

std::vector<double> grid(double t_end, int count) {
    std::vector<double> g;
    for (int i = 1; i <= count; ++i) g.push_back(t_end * i / count);
    return g;
}

}  // namespace

TEST_CASE("logistic run converges to 1 and refines exactly") {
    const LVModel m = logistic();
    const Trajectory tr = simulate(m, Vector::Constant(1, 0.1), 50.0);
    CHECK(tr.terminal == Terminal::converged);
    CHECK(std::abs(tr.states.back()(0) - 1.0) < 1e-6);
    CHECK(inf_norm(m.rhs(tr.states.back())) < 1e-9);
    const auto lim = detect_limit(tr, m);
    REQUIRE(lim.has_value());
    CHECK(lim->refined);
    CHECK(std::abs(lim->x_star(0) - 1.0) < 1e-14);
    CHECK(lim->hurwitz);
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("scalar competitive run converges to the quadratic root") {
    const Trajectory tr = simulate(scalar_competitive(1.0, 1.0), Vector::Constant(1, 2.0), 100.0);
    CHECK(tr.terminal == Terminal::converged);
    CHECK(std::abs(tr.states.back()(0) - (std::sqrt(5.0) - 1.0) / 2.0) < 1e-6);
}

TEST_CASE("strong mutualism diverges") {
    Matrix a(2, 2);
    a << -1.0, 2.0, 2.0, -1.0;
    const LVModel m(Vector::Ones(2), a, CubicalTensor(3, 2), Scenario::cooperative);
    const Trajectory tr = simulate(m, Vector::Ones(2), 100.0);
    CHECK(tr.terminal == Terminal::diverged);
    CHECK(inf_norm(tr.states.back()) > 1e6);
    CHECK_FALSE(detect_limit(tr, m).has_value());
}

TEST_CASE("short runs end at max_time and stop times are hit exactly") {
    SimOptions o;
    o.stop_times = {0.25, 0.5, 0.75};
    o.record_steps = false;
    const Trajectory tr = simulate(logistic(), Vector::Constant(1, 0.1), 1.0, o);
    CHECK(tr.terminal == Terminal::max_time);
    CHECK(tr.times == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        const double exact = 1.0 / (1.0 + 9.0 * std::exp(-t));
        CHECK(std::abs(tr.states[i](0) - exact) < 1e-8);
    }
}

TEST_CASE("zero components stay exactly zero and states stay nonnegative") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LVModel m = random_scenario(Scenario::competitive, {4}, seed);
        Rng rng(seed, 1);
        Vector x0 = oracle::random_vector(rng, 4, 0.0, 10.0);
        x0(1) = 0.0;
        SimOptions o;
        const Trajectory tr = simulate(m, x0, 20.0, o);
        CHECK(tr.terminal != Terminal::failed);
        for (const auto& s : tr.states) {
            CHECK(s(1) == 0.0);
            CHECK(s.minCoeff() >= -10.0 * o.abs_tol);
        }
    }
}

TEST_CASE("tightening the tolerance changes the end state by less than 1e-4") {
    Rng rng(51);
    for (int k = 0; k < 10; ++k) {
        const LVModel m = fixture::random_bounded_cooperative(rng, 3);
        const Vector x0 = oracle::random_vector(rng, 3, 0.1, 3.0);
        SimOptions loose, tight;
        loose.rel_tol = 1e-6;
        loose.abs_tol = 1e-9;
        loose.conv_tol = 0.0;
        tight.rel_tol = 1e-9;
        tight.abs_tol = 1e-12;
        tight.conv_tol = 0.0;
        const Trajectory a = simulate(m, x0, 3.0, loose);
        const Trajectory b = simulate(m, x0, 3.0, tight);
        REQUIRE(a.terminal == Terminal::max_time);
        REQUIRE(b.terminal == Terminal::max_time);
        CHECK(inf_norm(a.states.back() - b.states.back()) / inf_norm(b.states.back()) < 1e-4);
    }
}

TEST_CASE("winner-take-all instance converges to the predicted limit") {
    Matrix a(3, 3);
    a << 1.0, 0.5, 0.4, 2.0, 1.0, 0.6, 3.0, 2.5, 1.0;
    CubicalTensor b(3, 3);
    b.set({0, 0, 0}, 0.8);
    b.set({1, 1, 1}, 0.5);
    b.set({2, 2, 2}, 0.5);
    const LVModel m = make_competitive(Vector::Ones(3), a, b);
    const WtaCheck w = wta_check(m);
    REQUIRE(w.limit.has_value());
    const Trajectory tr = simulate(m, Vector{{3.0, 5.0, 7.0}}, 1000.0);
    REQUIRE(tr.terminal == Terminal::converged);
    const auto lim = detect_limit(tr, m);
    REQUIRE(lim.has_value());
    CHECK(lim->refined);
    CHECK(inf_norm(lim->x_star - *w.limit) < 1e-8);
}

TEST_CASE("a bistable two-faction pair selects the winner by initial condition") {
    const LVModel m = bistable_pair();
    const auto runs = simulate_batch(m, {Vector{{2.0, 0.1}}, Vector{{0.1, 2.0}}}, 500.0);
    REQUIRE(runs.size() == 2);
    const auto l1 = detect_limit(runs[0], m), l2 = detect_limit(runs[1], m);
    REQUIRE(l1.has_value());
    REQUIRE(l2.has_value());
    CHECK(l1->support == std::vector<int>{0});
    CHECK(l2->support == std::vector<int>{1});
    CHECK(l1->hurwitz);
    CHECK(l2->hurwitz);
}

TEST_CASE("batch results match sequential runs in input order") {
    const LVModel m = random_scenario(Scenario::competitive, {3}, 9);
    std::vector<Vector> starts;
    Rng rng(9, 2);
    for (int i = 0; i < 8; ++i) starts.push_back(oracle::random_vector(rng, 3, 0.01, 10.0));
    const auto batch = simulate_batch(m, starts, 50.0);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const Trajectory seq = simulate(m, starts[i], 50.0);
        CHECK(batch[i].times == seq.times);
        CHECK(batch[i].states.back() == seq.states.back());
    }
}

TEST_CASE("cooperative flows preserve the componentwise order") {
    Rng rng(61);
    for (int k = 0; k < 10; ++k) {
        const LVModel m = fixture::random_bounded_cooperative(rng, 3);
        const Vector x0 = oracle::random_vector(rng, 3, 0.05, 3.0);
        const Vector y0 = x0 + oracle::random_vector(rng, 3, 0.0, 1.0);
        SimOptions o;
        o.conv_tol = 0.0;
        o.stop_times = grid(10.0, 200);
        o.record_steps = false;
        const Trajectory a = simulate(m, x0, 10.0, o), b = simulate(m, y0, 10.0, o);
        REQUIRE(a.times == b.times);
        for (std::size_t i = 0; i < a.times.size(); ++i)
            CHECK((a.states[i] - b.states[i]).maxCoeff() <= 10.0 * o.rel_tol * std::max(1.0, inf_norm(b.states[i])));
    }
}

TEST_CASE("two-faction flows preserve the permuted order") {
    Rng rng(71);
    for (int k = 0; k < 10; ++k) {
        const LVModel m = fixture::random_bounded_two_faction(rng, 2, 2);
        Vector x0 = oracle::random_vector(rng, 4, 0.05, 3.0);
        Vector y0 = x0;
        for (int i = 0; i < 4; ++i) y0(i) += (i < 2 ? 1.0 : -0.5) * rng.uniform(0.0, 0.04);
        SimOptions o;
        o.conv_tol = 0.0;
        o.stop_times = grid(2.0, 100);
        o.record_steps = false;
        const Trajectory a = simulate(m, x0, 2.0, o), b = simulate(m, y0, 2.0, o);
        REQUIRE(a.terminal == Terminal::max_time);
        REQUIRE(b.terminal == Terminal::max_time);
        REQUIRE(a.times == b.times);
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            const double slack = 10.0 * o.rel_tol * std::max(1.0, inf_norm(b.states[i]));
            CHECK((a.states[i].head(2) - b.states[i].head(2)).maxCoeff() <= slack);
            CHECK((b.states[i].tail(2) - a.states[i].tail(2)).maxCoeff() <= slack);
        }
    }
}

TEST_CASE("finite-time blow-up is reported as diverged, not failed") {
    int diverged = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const LVModel m = random_scenario(Scenario::two_faction, {2, 2}, seed);
        Rng rng(seed, 3);
        const Trajectory tr = simulate(m, oracle::random_vector(rng, 4, 0.05, 1.0), 2.0);
        CHECK(tr.terminal != Terminal::failed);
        if (tr.terminal == Terminal::diverged) ++diverged;
    }
    CHECK(diverged > 0);
}

TEST_CASE("csv output") {
    Trajectory tr;
    tr.times = {0.0, 0.5};
    tr.states = {Vector{{1.0, 0.25}}, Vector{{0.1, 2.0}}};
    tr.terminal = Terminal::max_time;
    std::ostringstream os;
    write_csv(os, tr);
    CHECK(os.str() == "t,x1,x2\n0,1,0.25\n0.5,0.1,2\n# terminal: max_time\n");
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("simulate rejects bad input") {
    const LVModel m = logistic();
    CHECK_THROWS_AS(simulate(m, Vector::Constant(1, -0.1), 1.0), InputError);
    CHECK_THROWS_AS(simulate(m, Vector::Ones(2), 1.0), InputError);
    CHECK_THROWS_AS(simulate(m, Vector::Ones(1), 0.0), InputError);
    SimOptions o;
    o.stop_times = {0.5, 0.2};
    CHECK_THROWS_AS(simulate(m, Vector::Ones(1), 1.0, o), InputError);
}
