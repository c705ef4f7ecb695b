#include "holv/ode.hpp"

#include "holv/error.hpp"
#include "holv/parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace holv {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Dormand-Prince coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

bool converged(const LVModel& model, const Vector& x, const Vector& f, const SimOptions& o) {
    if (!(inf_norm(f) < o.conv_tol)) return false;
    const Vector l = model.growth(x);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) > 0.0 && x(i) < o.invader_threshold && l(i) > 0.0) return false;
    return true;
}

// Step-size collapse in finite-time blow-up: the state is already far outside
// the unit scale and its largest component is still growing.
bool blowing_up(const Vector& x, const Vector& f) {
    Eigen::Index i = 0;
    const double big = x.cwiseAbs().maxCoeff(&i);
    return big > 1e3 && f(i) > 0.0;
}

double initial_step(const Vector& x, const Vector& f, double rel_tol, double abs_tol, double t_end) {
    const Vector sc = (abs_tol + rel_tol * x.cwiseAbs().array()).matrix();
    const double d0 = std::sqrt((x.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(x.size()));
    const double d1 = std::sqrt((f.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(x.size()));
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, t_end);
}

}  // namespace

std::string to_string(Terminal t) {
    switch (t) {
        case Terminal::converged: return "converged";
        case Terminal::diverged: return "diverged";
        case Terminal::max_time: return "max_time";
        case Terminal::failed: return "failed";
    }
    return "failed";
}

Trajectory simulate(const LVModel& model, const Vector& x0, double t_end, const SimOptions& o) {
    const int n = model.dim();
    if (x0.size() != n) throw InputError("initial state length does not match the model dimension");
    if (!x0.allFinite() || x0.minCoeff() < 0.0) throw InputError("initial state must be finite and nonnegative");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be positive and finite");
    if (!(o.rel_tol > 0.0) || !(o.abs_tol > 0.0)) throw InputError("integration tolerances must be positive");
    for (std::size_t i = 0; i < o.stop_times.size(); ++i)
        if (!(o.stop_times[i] > 0.0) || (i > 0 && !(o.stop_times[i] > o.stop_times[i - 1])))
            throw InputError("stop times must be positive and increasing");

    std::vector<bool> pinned(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pinned[static_cast<std::size_t>(i)] = x0(i) == 0.0;

    Trajectory tr;
    double t = 0.0;
    Vector x = x0;
    Vector k1 = model.rhs(x);
    tr.stats.rhs_evals = 1;
    tr.times.push_back(t);
    tr.states.push_back(x);
    if (converged(model, x, k1, o)) {
        tr.terminal = Terminal::converged;
        return tr;
    }

    auto next_stop = o.stop_times.begin();
    while (next_stop != o.stop_times.end() && *next_stop <= 0.0) ++next_stop;
    double h = initial_step(x, k1, o.rel_tol, o.abs_tol, t_end);
    double err_prev = 1e-4;
    const double beta = 0.04, alpha = 0.2 - 0.75 * beta;
    Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), err(n);

    while (true) {
        if (tr.stats.accepted + tr.stats.rejected >= o.max_steps) {
            tr.terminal = Terminal::failed;
            tr.message = "step limit reached at t = " + format_double(t);
            break;
        }
        double target = t_end;
        bool to_stop = false;
        if (next_stop != o.stop_times.end() && *next_stop < t_end) {
            target = *next_stop;
            to_stop = true;
        }
        bool lands = false;
        double step = h;
        if (target - t <= step * (1.0 + 1e-6)) {
            step = target - t;
            lands = true;
        }
        if (step < 1e-14 * std::max(1.0, std::abs(t))) {
            tr.terminal = blowing_up(x, k1) ? Terminal::diverged : Terminal::failed;
            tr.message = "step size underflow at t = " + format_double(t);
            break;
        }

        k2 = model.rhs(x + step * (a21 * k1));
        k3 = model.rhs(x + step * (a31 * k1 + a32 * k2));
        k4 = model.rhs(x + step * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = model.rhs(x + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = model.rhs(x + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y = x + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = model.rhs(y);
        tr.stats.rhs_evals += 6;
        err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double en = 0.0;
        bool finite = y.allFinite() && k7.allFinite();
        for (int i = 0; i < n && finite; ++i) {
            const double sc = o.abs_tol + o.rel_tol * std::max(std::abs(x(i)), std::abs(y(i)));
            en += (err(i) / sc) * (err(i) / sc);
        }
        en = std::sqrt(en / n);
        if (!finite || !std::isfinite(en)) {
            // Shrink first; only a step that cannot be shortened further is a failure.
            ++tr.stats.rejected;
            h = step * 0.1;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                tr.terminal = blowing_up(x, k1) ? Terminal::diverged : Terminal::failed;
                tr.message = "non-finite state after t = " + format_double(t);
                break;
            }
            continue;
        }
        bool too_negative = false;
        for (int i = 0; i < n; ++i)
            if (y(i) < -o.abs_tol) too_negative = true;
        if (en > 1.0 || too_negative) {
            ++tr.stats.rejected;
            const double fac = too_negative && en <= 1.0 ? 0.5 : std::max(0.2, 0.9 * std::pow(en, -alpha));
            h = step * fac;
            continue;
        }

        // Accepted.
        ++tr.stats.accepted;
        t = lands ? target : t + step;
        for (int i = 0; i < n; ++i) {
            if (pinned[static_cast<std::size_t>(i)]) {
                y(i) = 0.0;
            } else if (y(i) < 0.0) {
                tr.clamps.push_back({t, i, y(i)});
                y(i) = 0.0;
                pinned[static_cast<std::size_t>(i)] = true;
            }
        }
        x = y;
        const bool clamped_now = !tr.clamps.empty() && tr.clamps.back().t == t;
        k1 = clamped_now ? model.rhs(x) : k7;
        if (clamped_now) ++tr.stats.rhs_evals;
        const double err_use = std::max(en, 1e-10);
        double fac = 0.9 * std::pow(err_use, -alpha) * std::pow(err_prev, beta);
        fac = std::clamp(fac, 0.2, 10.0);
        err_prev = err_use;
        h = step * fac;

        const bool at_stop = lands && to_stop;
        if (at_stop) ++next_stop;
        const bool done_time = lands && !to_stop;
        if (o.record_steps || at_stop || done_time) {
            tr.times.push_back(t);
            tr.states.push_back(x);
        }
        if (inf_norm(x) > o.diverge_cap) {
            tr.terminal = Terminal::diverged;
            break;
        }
        if (converged(model, x, k1, o)) {
            tr.terminal = Terminal::converged;
            break;
        }
        if (done_time) {
            tr.terminal = Terminal::max_time;
            break;
        }
    }
    if (tr.times.back() != t) {
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    return tr;
}

std::vector<Trajectory> simulate_batch(const LVModel& model, const std::vector<Vector>& starts, double t_end,
                                       const SimOptions& options) {
    std::vector<Trajectory> out(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { out[i] = simulate(model, starts[i], t_end, options); });
    return out;
}

std::optional<EquilibriumReport> detect_limit(const Trajectory& trajectory, const LVModel& model,
                                              double support_threshold, double tol) {
    if (trajectory.terminal != Terminal::converged || trajectory.states.empty()) return std::nullopt;
    const Vector& last = trajectory.states.back();
    const Refinement ref = refine_equilibrium(model, last, support_threshold, tol);
    EquilibriumReport rep;
    if (ref.converged) {
        rep = classify_equilibrium(model, ref.x, tol);
    } else {
        rep.x_star = last;
        rep.residual = inf_norm(model.rhs(last));
        rep.support = ref.support;
        const int n = model.dim();
        rep.kind = rep.support.empty()                        ? EquilibriumKind::origin
                   : static_cast<int>(rep.support.size()) == n ? EquilibriumKind::interior
                                                               : EquilibriumKind::boundary;
        rep.refined = false;
    }
    rep.sources = {"simulation"};
    return rep;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
    const auto n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
    out << "\n";
    for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
        out << format_double(trajectory.times[s]);
        for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(trajectory.states[s](i));
        out << "\n";
    }
    out << "# terminal: " << to_string(trajectory.terminal) << "\n";
}

}  // namespace holv
