#pragma once

#include "holv/lv_model.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace holv {

struct SimOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Converged once ||rhs||_inf < conv_tol and no component below
    // invader_threshold has a positive growth factor.
    double conv_tol = 1e-9;
    double invader_threshold = 1e-6;
    double diverge_cap = 1e6;
    int max_steps = 2'000'000;
    // Steps are shortened to land exactly on these times, which then appear
    // in the trajectory. Must be increasing.
    std::vector<double> stop_times;
    // With false only the stop times and the final state are kept.
    bool record_steps = true;
};

enum class Terminal { converged, diverged, max_time, failed };
std::string to_string(Terminal t);

struct ClampEvent {
    double t = 0.0;
    int component = 0;
    double value = 0.0;  // the negative value that was set to 0
};

struct SimStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    Terminal terminal = Terminal::max_time;
    // Why the run failed (non-finite state, step size underflow, step limit).
    std::string message;
    SimStats stats;
    std::vector<ClampEvent> clamps;
};

// Dormand-Prince 5(4) with proportional-integral step control. Components
// that are exactly 0 stay exactly 0; components that step into
// [-abs_tol, 0) are set to 0 and recorded; a step that goes further negative
// is rejected. A step size that collapses while the largest component is
// above 1e3 and still growing is reported as diverged (finite-time blow-up
// can outrun diverge_cap). Throws InputError for a negative or mis-sized x0 or t_end <= 0.
Trajectory simulate(const LVModel& model, const Vector& x0, double t_end, const SimOptions& options = {});

// Runs every start independently (in parallel); results are in input order.
std::vector<Trajectory> simulate_batch(const LVModel& model, const std::vector<Vector>& starts, double t_end,
                                       const SimOptions& options = {});

// For a converged run: Newton refinement of the last state on its support
// (components below support_threshold are set to 0), then classification.
// When refinement fails the report carries the unrefined state with
// refined = false. Absent when the run did not converge.
std::optional<EquilibriumReport> detect_limit(const Trajectory& trajectory, const LVModel& model,
                                              double support_threshold = 1e-8, double tol = 1e-8);

// Header t,x1,...,xn, one row per recorded state, then "# terminal: <name>".
void write_csv(std::ostream& out, const Trajectory& trajectory);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace holv
