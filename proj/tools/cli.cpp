#include "cli.hpp"

#include "holv/error.hpp"
#include "holv/io.hpp"
#include "holv/parallel.hpp"
#include "holv/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace holv::cli {

namespace {

struct Common {
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;  // empty selects the command's default
};

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw InputError("not a finite number: '" + std::string(s) + "'");
    return v;
}

// "1,2,3" or "[1, 2, 3]".
std::vector<double> parse_list(std::string s) {
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(parse_number(std::string_view(s).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// "start:step:stop" or an explicit list.
std::vector<double> parse_grid(const std::string& s) {
    const std::size_t c1 = s.find(':');
    if (c1 == std::string::npos) return parse_list(s);
    const std::size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InputError("a grid range is start:step:stop");
    const double a = parse_number(std::string_view(s).substr(0, c1));
    const double h = parse_number(std::string_view(s).substr(c1 + 1, c2 - c1 - 1));
    const double b = parse_number(std::string_view(s).substr(c2 + 1));
    if (!(h > 0.0) || b < a) throw InputError("a grid range needs step > 0 and stop >= start");
    const double count = std::floor((b - a) / h + 1e-9);
    if (count > 1e6) throw InputError("grid is too long");
    std::vector<double> g;
    for (long k = 0; k <= static_cast<long>(count); ++k) g.push_back(a + static_cast<double>(k) * h);
    return g;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + c.out + "'");
    f << text;
}

std::string format_or(const Common& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

void json_only(const Common& c, const char* command) {
    if (format_or(c, "json") != "json") throw InputError(std::string("csv output is not available for ") + command);
}

std::string join_support(const std::vector<int>& s) {
    std::string r;
    for (std::size_t i = 0; i < s.size(); ++i) r += (i ? ";" : "") + std::to_string(s[i]);
    return r;
}

std::string header(const char* first, int n, const char* rest) {
    std::string h = first;
    for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
    return h + rest + "\n";
}

// --- classify -------------------------------------------------------------

struct ClassifyArgs {
    std::string file;
    std::string hint;
};

void cmd_classify(const ClassifyArgs& a, const Common& c, std::ostream& out) {
    json_only(c, "classify");
    const CubicalTensor t = tensor_from_json(read_json_file(a.file));
    ClassifyOptions o;
    if (c.tol) o.tol = *c.tol;
    if (c.max_iter) o.max_iter = *c.max_iter;
    if (!a.hint.empty()) o.hint = from_std(parse_list(a.hint));
    emit(c, dump(to_json(classify(t, o))), out);
}

// --- solve ----------------------------------------------------------------

struct SolveArgs {
    std::string file;
    std::string cert;
    std::string method = "s";
};

void cmd_solve(const SolveArgs& a, const Common& c, std::ostream& out) {
    json_only(c, "solve");
    const PolySystem sys = system_from_json(read_json_file(a.file));
    SolverOptions o;
    if (c.tol) o.tol = *c.tol;
    if (c.max_iter) o.max_iter = *c.max_iter;
    try {
        SolveResult r;
        if (a.method == "m") {
            if (!a.cert.empty()) throw InputError("--cert applies to --method s only");
            r = solve_m_tensor(sys, o);
        } else {
            std::optional<Vector> cert;
            if (!a.cert.empty()) cert = from_std(parse_list(a.cert));
            r = solve_s_tensor(sys, cert, o);
        }
        emit(c, dump(to_json(r)), out);
    } catch (const SolveDidNotConverge& e) {
        // The partial traces are still worth auditing.
        emit(c, dump(to_json(e.partial())), out);
        throw;
    }
}

// --- pcp ------------------------------------------------------------------

struct PcpArgs {
    std::string file;
    bool bounds = false;
    bool solve = false;
};

void cmd_pcp(const PcpArgs& a, const Common& c, std::ostream& out) {
    json_only(c, "pcp");
    const QcpProblem p = problem_from_json(read_json_file(a.file));
    Json j = Json::object();
    if (a.bounds) j["bounds"] = to_json(norm_bounds(p));
    if (a.solve || !a.bounds) {
        EnumerationOptions o;
        if (c.tol) o.tol = *c.tol;
        if (c.seed) o.seed = *c.seed;
        j["enumeration"] = to_json(brute_force_solve(p, o));
    }
    emit(c, dump(j), out);
}

// --- equilibria -----------------------------------------------------------

struct EquilibriaArgs {
    std::string file;
    std::optional<double> r_hat;
    std::optional<double> eps;
    std::string d;
};

void cmd_equilibria(const EquilibriaArgs& a, const Common& c, std::ostream& out) {
    const LVModel m = model_from_json(read_json_file(a.file));
    EquilibriumOptions o;
    if (c.tol) o.tol = *c.tol;
    if (c.seed) o.seed = *c.seed;
    const auto reps = find_equilibria(m, o);
    const std::string fmt = format_or(c, "json");
    if (fmt == "csv") {
        std::ostringstream s;
        s << header("kind,support", m.dim(), ",residual,max_real,stability,refined");
        for (const auto& r : reps) {
            s << to_string(r.kind) << "," << join_support(r.support);
            for (Eigen::Index i = 0; i < r.x_star.size(); ++i) s << "," << format_double(r.x_star(i));
            s << "," << format_double(r.residual) << "," << format_double(r.max_real) << ","
              << to_string(r.stability) << "," << (r.refined ? "true" : "false") << "\n";
        }
        emit(c, s.str(), out);
        return;
    }
    GlobalStabilityOptions g;
    if (a.r_hat) g.r_hat = *a.r_hat;
    if (a.eps) g.eps = *a.eps;
    if (!a.d.empty()) g.d = from_std(parse_list(a.d));
    Json list = Json::array();
    for (const auto& r : reps) list.push_back(to_json(r));
    Json global = Json::array();
    for (const auto& v : global_stability_conditions(m, g)) global.push_back(to_json(v));
    Json j;
    j["equilibria"] = std::move(list);
    j["global_conditions"] = std::move(global);
    if (m.scenario() == Scenario::competitive) j["winner_take_all"] = to_json(wta_check(m));
    emit(c, dump(j), out);
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string file;
    std::vector<std::string> x0;
    int starts = 0;
    double t_end = 100.0;
    std::string sweep;
    bool sparse_output = false;
};

std::string run_id(std::size_t k, std::size_t total) {
    const std::size_t width = std::max<std::size_t>(3, std::to_string(total - 1).size());
    std::string s = std::to_string(k);
    return "run_" + std::string(width - s.size(), '0') + s;
}

void cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
    const LVModel model = model_from_json(read_json_file(a.file));
    const int n = model.dim();
    std::vector<Vector> starts;
    std::vector<std::optional<std::uint64_t>> start_seed;
    for (const auto& s : a.x0) {
        starts.push_back(from_std(parse_list(s)));
        if (starts.back().size() != n) throw InputError("--x0 needs " + std::to_string(n) + " values");
        start_seed.emplace_back();
    }
    if (a.starts < 0) throw InputError("--starts must be nonnegative");
    if (a.starts > 0 && !c.seed) throw InputError("--starts needs --seed");
    for (int k = 0; k < a.starts; ++k) {
        // Uniform on (0, 10] per component, one stream per start.
        Rng rng(*c.seed, static_cast<std::uint64_t>(k));
        Vector x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform_open_low(0.0, 10.0);
        starts.push_back(x);
        start_seed.push_back(c.seed);
    }
    if (starts.empty()) throw InputError("simulate needs --x0 or --starts");

    std::vector<std::optional<double>> eps{std::nullopt};
    std::vector<double> grid;
    if (!a.sweep.empty()) {
        grid = parse_grid(a.sweep);
        eps.assign(grid.begin(), grid.end());
    }
    std::vector<LVModel> models;
    for (const auto& e : eps) models.push_back(e ? model.with_scaled_hoi(*e) : model);

    SimOptions so;
    if (c.tol) {
        so.rel_tol = *c.tol;
        so.abs_tol = *c.tol * 1e-2;
    }
    if (c.max_iter) so.max_steps = *c.max_iter;
    so.record_steps = !a.sparse_output;

    const std::size_t total = eps.size() * starts.size();
    std::vector<Trajectory> trajs(total);
    std::vector<std::optional<EquilibriumReport>> limits(total);
    parallel_for(total, [&](std::size_t k) {
        const LVModel& m = models[k / starts.size()];
        trajs[k] = simulate(m, starts[k % starts.size()], a.t_end, so);
        limits[k] = detect_limit(trajs[k], m);
    });

    Manifest man;
    man.model = a.file;
    for (std::size_t k = 0; k < total; ++k) {
        ManifestRun r;
        r.id = run_id(k, total);
        r.seed = start_seed[k % starts.size()];
        r.epsilon = eps[k / starts.size()];
        r.x0 = starts[k % starts.size()];
        r.t_end = a.t_end;
        r.terminal = trajs[k].terminal;
        r.message = trajs[k].message;
        r.final_state = trajs[k].states.back();
        r.stats = trajs[k].stats;
        r.clamps = trajs[k].clamps.size();
        r.limit = limits[k];
        man.runs.push_back(std::move(r));
    }
    if (!grid.empty()) {
        try {
            man.continuation = continuation(model, grid, c.tol.value_or(1e-8));
        } catch (const Error& e) {
            err << "warning: no continuation along the sweep: " << e.what() << "\n";
        }
    }

    const std::string fmt = format_or(c, "csv");
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        for (std::size_t k = 0; k < total; ++k) {
            man.runs[k].csv = man.runs[k].id + ".csv";
            std::ofstream f(std::filesystem::path(c.out) / man.runs[k].csv, std::ios::binary);
            if (!f) throw InputError("cannot write into '" + c.out + "'");
            write_csv(f, trajs[k]);
        }
        std::ofstream f(std::filesystem::path(c.out) / "manifest.json", std::ios::binary);
        if (!f) throw InputError("cannot write into '" + c.out + "'");
        f << dump(to_json(man));
        out << dump(to_json(man));
        return;
    }
    if (fmt == "json") {
        out << dump(to_json(man));
        return;
    }
    if (total != 1) throw InputError("several runs need --out DIR or --format json");
    write_csv(out, trajs[0]);
}

// --- scenario -------------------------------------------------------------

struct ScenarioArgs {
    std::string kind;
    std::vector<int> dims;
};

void cmd_scenario(const ScenarioArgs& a, const Common& c, std::ostream& out) {
    json_only(c, "scenario");
    if (!c.seed) throw InputError("scenario needs --seed");
    emit(c, dump(to_json(random_scenario(scenario_from_string(a.kind), a.dims, *c.seed))), out);
}

// --- continuation ---------------------------------------------------------

struct ContinuationArgs {
    std::string file;
    std::string grid;
};

void cmd_continuation(const ContinuationArgs& a, const Common& c, std::ostream& out) {
    const LVModel m = model_from_json(read_json_file(a.file));
    const ContinuationResult r = continuation(m, parse_grid(a.grid), c.tol.value_or(1e-8));
    if (format_or(c, "json") == "json") {
        emit(c, dump(to_json(r)), out);
        return;
    }
    std::ostringstream s;
    s << header("epsilon", m.dim(), ",max_real,hurwitz");
    for (const auto& p : r.path) {
        s << format_double(p.epsilon);
        for (Eigen::Index i = 0; i < p.x.size(); ++i) s << "," << format_double(p.x(i));
        s << "," << format_double(p.max_real) << "," << (p.hurwitz ? "true" : "false") << "\n";
    }
    if (r.truncated) s << "# truncated: " << r.reason << "\n";
    emit(c, s.str(), out);
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--tol", c.tol, "tolerance override");
    sub->add_option("--max-iter", c.max_iter, "iteration or step limit override");
    sub->add_option("--seed", c.seed, "seed for every random choice");
    sub->add_option("--out", c.out, "output file (a directory for simulate)");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Higher-order Lotka-Volterra analysis tool", "holv");
    app.require_subcommand(1);
    Common common;

    ClassifyArgs ca;
    auto* classify_cmd = app.add_subcommand("classify", "Classify a tensor (JSON report)");
    classify_cmd->add_option("file", ca.file, "tensor file")->required();
    classify_cmd->add_option("--hint", ca.hint, "candidate S-certificate, e.g. 0.1,1");

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve sum A_i x^(m_i-1) = b by the two-sided iteration");
    solve_cmd->add_option("file", sa.file, "system file")->required();
    solve_cmd->add_option("--cert", sa.cert, "shared S-certificate v");
    solve_cmd->add_option("--method", sa.method, "s (S-tensor) or m (M-tensor)")->check(CLI::IsMember({"s", "m"}));

    PcpArgs pa;
    auto* pcp_cmd = app.add_subcommand("pcp", "Analyse a quadratic complementarity problem");
    pcp_cmd->add_option("file", pa.file, "problem file")->required();
    pcp_cmd->add_flag("--bounds", pa.bounds, "bounds on the solution norm");
    pcp_cmd->add_flag("--solve", pa.solve, "enumerate all supports (default)");

    EquilibriaArgs ea;
    auto* eq_cmd = app.add_subcommand("equilibria", "Find and classify the equilibria of a model");
    eq_cmd->add_option("file", ea.file, "model file")->required();
    eq_cmd->add_option("--r-hat", ea.r_hat, "upper edge of the box for the global conditions");
    eq_cmd->add_option("--eps", ea.eps, "lower edge of the box for the global conditions");
    eq_cmd->add_option("--d", ea.d, "positive weights for the dominance conditions");

    SimulateArgs ma;
    auto* sim_cmd = app.add_subcommand("simulate", "Integrate a model from one or more initial states");
    sim_cmd->add_option("file", ma.file, "model file")->required();
    sim_cmd->add_option("--x0", ma.x0, "initial state, e.g. 1,2,3 (repeatable)");
    sim_cmd->add_option("--starts", ma.starts, "number of random initial states in (0,10]^n");
    sim_cmd->add_option("--t-end", ma.t_end, "final time")->capture_default_str();
    sim_cmd->add_option("--sweep", ma.sweep, "HOI scale grid start:step:stop or a list");
    sim_cmd->add_flag("--stops-only", ma.sparse_output, "keep only the final state of each run");

    ScenarioArgs sc;
    auto* sc_cmd = app.add_subcommand("scenario", "Generate a seeded random model");
    sc_cmd->add_option("kind", sc.kind, "general, cooperative, two_faction or competitive")->required();
    sc_cmd->add_option("dims", sc.dims, "n, or m n for two_faction")->required();

    ContinuationArgs ta;
    auto* cont_cmd = app.add_subcommand("continuation", "Track the interior equilibrium as the HOI scale grows");
    cont_cmd->add_option("file", ta.file, "model file")->required();
    cont_cmd->add_option("--grid", ta.grid, "start:step:stop or a list, starting at 0")->required();

    for (auto* sub : app.get_subcommands({})) add_common(sub, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (classify_cmd->parsed()) cmd_classify(ca, common, out);
        else if (solve_cmd->parsed()) cmd_solve(sa, common, out);
        else if (pcp_cmd->parsed()) cmd_pcp(pa, common, out);
        else if (eq_cmd->parsed()) cmd_equilibria(ea, common, out);
        else if (sim_cmd->parsed()) cmd_simulate(ma, common, out, err);
        else if (sc_cmd->parsed()) cmd_scenario(sc, common, out);
        else if (cont_cmd->parsed()) cmd_continuation(ta, common, out);
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotApplicable& e) {
        err << "not applicable: " << e.what() << "\n";
        return 3;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace holv::cli
