#include "holv/io.hpp"

#include "holv/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace holv {

namespace {

// Runs a reader and turns library type errors into InputError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::ordered_json::exception& e) {
        throw InputError(std::string("invalid ") + what + ": " + e.what());
    }
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw InputError(std::string("expected an object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing key '") + key + "'");
    return *it;
}

const Json* optional_field(const Json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double to_num(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw InputError("expected a number, got " + j.dump());
    return j.get<double>();
}

double finite_num(const Json& j, const char* what) {
    const double v = to_num(j);
    if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
    return v;
}

int to_int(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    return j.get<int>();
}

bool to_bool(const Json& j) {
    if (!j.is_boolean()) throw InputError("expected a boolean, got " + j.dump());
    return j.get<bool>();
}

std::string to_str(const Json& j) {
    if (!j.is_string()) throw InputError("expected a string, got " + j.dump());
    return j.get<std::string>();
}

Json nums(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> to_nums(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(to_num(e));
    return out;
}

Json ints(const std::vector<int>& v) { return Json(v); }

std::vector<int> to_ints(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of integers");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(to_int(e, "index"));
    return out;
}

Json strings(const std::vector<std::string>& v) { return Json(v); }

std::vector<std::string> to_strings(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(to_str(e));
    return out;
}

Json vectors(const std::vector<Vector>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

std::vector<Vector> to_vectors(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of vectors");
    std::vector<Vector> out;
    for (const auto& e : j) out.push_back(vector_from_json(e));
    return out;
}

Json opt_vector(const std::optional<Vector>& v) { return v ? to_json(*v) : Json(nullptr); }

std::optional<Vector> to_opt_vector(const Json& j, const char* key) {
    const Json* p = optional_field(j, key);
    if (!p) return std::nullopt;
    return vector_from_json(*p);
}

Json opt_num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

std::optional<double> to_opt_num(const Json& j, const char* key) {
    const Json* p = optional_field(j, key);
    if (!p) return std::nullopt;
    return to_num(*p);
}

std::string to_string(SolveStatus s) {
    return s == SolveStatus::positive ? "positive" : "boundary_inconclusive";
}

// Reverse lookup through the enum's own to_string.
template <class E>
E enum_from_string(const std::string& s, std::initializer_list<E> values, const char* what) {
    for (E v : values)
        if (to_string(v) == s) return v;
    throw InputError(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // e.what() already names line, column and byte position.
        throw InputError(origin + ": " + e.what());
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Vector& v) { return nums(to_std(v)); }

Vector vector_from_json(const Json& j) { return from_std(to_nums(j)); }

Json to_json(const Matrix& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(num(m(i, k)));
        a.push_back(std::move(row));
    }
    return a;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("a matrix must be an array of rows");
    if (j.empty()) return Matrix(0, 0);
    const auto cols = j.front().is_array() ? j.front().size() : 0;
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows must be arrays of equal length");
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = finite_num(j[i][k], "matrix entry");
    }
    return m;
}

Json to_json(const CubicalTensor& t, bool sparse) {
    Json j;
    j["order"] = t.order();
    j["dim"] = t.dim();
    if (!sparse) {
        Json e = Json::array();
        for (double v : t.entries()) e.push_back(num(v));
        j["entries"] = std::move(e);
        return j;
    }
    Json nz = Json::array();
    std::vector<int> idx(static_cast<std::size_t>(t.order()));
    for (std::size_t f = 0; f < t.size(); ++f) {
        if (t[f] == 0.0) continue;
        t.unravel(f, idx);
        Json one = Json::array();
        for (int i : idx) one.push_back(i + 1);
        nz.push_back(Json{{"idx", std::move(one)}, {"val", num(t[f])}});
    }
    j["nonzeros"] = std::move(nz);
    return j;
}

CubicalTensor tensor_from_json(const Json& j) {
    return guarded("tensor", [&] {
        const int order = to_int(field(j, "order"), "order");
        const int dim = to_int(field(j, "dim"), "dim");
        if (order < 1 || dim < 1) throw InputError("tensor order and dim must be positive");
        const double size = std::pow(static_cast<double>(dim), order);
        if (size > 1e8) throw InputError("tensor is too large");
        const bool has_entries = j.contains("entries"), has_nz = j.contains("nonzeros");
        if (has_entries == has_nz) throw InputError("a tensor needs exactly one of 'entries' and 'nonzeros'");
        if (has_entries) {
            std::vector<double> e = to_nums(j["entries"]);
            if (e.size() != static_cast<std::size_t>(size))
                throw InputError("tensor 'entries' must hold dim^order = " + std::to_string(static_cast<long>(size)) +
                                 " values, got " + std::to_string(e.size()));
            for (double v : e)
                if (!std::isfinite(v)) throw InputError("tensor entries must be finite");
            return CubicalTensor(order, dim, std::move(e));
        }
        CubicalTensor t(order, dim);
        std::vector<bool> seen(t.size());
        const Json& nz = j["nonzeros"];
        if (!nz.is_array()) throw InputError("'nonzeros' must be an array");
        std::vector<int> idx(static_cast<std::size_t>(order));
        for (const auto& e : nz) {
            const Json& ij = field(e, "idx");
            if (!ij.is_array() || static_cast<int>(ij.size()) != order)
                throw InputError("each 'idx' must list " + std::to_string(order) + " indices");
            for (int p = 0; p < order; ++p) {
                const int v = to_int(ij[static_cast<std::size_t>(p)], "idx entry");
                if (v < 1 || v > dim) throw InputError("idx entries are 1-based and must lie in [1, dim]");
                idx[static_cast<std::size_t>(p)] = v - 1;
            }
            const std::size_t f = t.flat_index(idx);
            if (seen[f]) throw InputError("duplicate idx " + ij.dump());
            seen[f] = true;
            t.set_flat(f, finite_num(field(e, "val"), "val"));
        }
        return t;
    });
}

Json to_json(const PolySystem& s) {
    Json terms = Json::array();
    for (const auto& t : s.terms()) terms.push_back(to_json(t));
    return Json{{"terms", std::move(terms)}, {"rhs", to_json(s.rhs())}};
}

PolySystem system_from_json(const Json& j) {
    return guarded("system", [&] {
        const Json& terms = field(j, "terms");
        if (!terms.is_array()) throw InputError("'terms' must be an array of tensors");
        std::vector<CubicalTensor> ts;
        for (const auto& t : terms) ts.push_back(tensor_from_json(t));
        return PolySystem(std::move(ts), vector_from_json(field(j, "rhs")));
    });
}

Json to_json(const QcpProblem& p) {
    return Json{{"B", to_json(p.b())}, {"A", to_json(p.a())}, {"q", to_json(p.q())}};
}

QcpProblem problem_from_json(const Json& j) {
    return guarded("problem", [&] {
        return QcpProblem(tensor_from_json(field(j, "B")), matrix_from_json(field(j, "A")),
                          vector_from_json(field(j, "q")));
    });
}

Json to_json(const LVModel& m) {
    Json j;
    j["scenario"] = to_string(m.scenario());
    j["r"] = to_json(m.r());
    j["A"] = to_json(m.a());
    j["B"] = to_json(m.b());
    if (m.blocks()) j["blocks"] = Json{{"m", m.blocks()->m}, {"n", m.blocks()->n}};
    return j;
}

LVModel model_from_json(const Json& j) {
    return guarded("model", [&] {
        const Scenario sc = scenario_from_string(to_str(field(j, "scenario")));
        Vector r = vector_from_json(field(j, "r"));
        for (double v : to_std(r))
            if (!std::isfinite(v)) throw InputError("r must be finite");
        Matrix a = matrix_from_json(field(j, "A"));
        const int n = static_cast<int>(r.size());
        const Json* bj = optional_field(j, "B");
        CubicalTensor b = bj ? tensor_from_json(*bj) : CubicalTensor(3, std::max(n, 1));
        if (b.order() != 3) throw InputError("B must be an order-3 tensor");
        std::optional<FactionBlocks> blocks;
        if (const Json* bl = optional_field(j, "blocks"))
            blocks = FactionBlocks{to_int(field(*bl, "m"), "blocks.m"), to_int(field(*bl, "n"), "blocks.n")};
        return LVModel(std::move(r), std::move(a), std::move(b), sc, blocks);
    });
}

Json to_json(const TensorClassReport& r) {
    Json j;
    j["is_metzler"] = r.is_metzler;
    j["is_diag_dominant"] = r.is_diag_dominant;
    j["is_strictly_diag_dominant"] = r.is_strictly_diag_dominant;
    j["is_m_tensor"] = r.is_m_tensor;
    j["is_nonsingular_m"] = r.is_nonsingular_m;
    j["is_h_tensor"] = r.is_h_tensor;
    j["is_h_plus"] = r.is_h_plus;
    j["is_generalized_row_sdd_pos_diag"] = r.is_generalized_row_sdd_pos_diag;
    j["is_irreducible"] = r.is_irreducible;
    j["is_s_tensor"] = r.s_certificate.has_value();
    j["s_certificate"] = opt_vector(r.s_certificate);
    j["s_certificate_source"] = r.s_certificate_source;
    j["spectral_radius_of_majorant"] = opt_num(r.spectral_radius_of_majorant);
    j["m_shift"] = opt_num(r.m_shift);
    j["comparison_spectral_radius"] = opt_num(r.comparison_spectral_radius);
    j["comparison_shift"] = opt_num(r.comparison_shift);
    j["notes"] = strings(r.notes);
    return j;
}

TensorClassReport class_report_from_json(const Json& j) {
    return guarded("classification report", [&] {
        TensorClassReport r;
        r.is_metzler = to_bool(field(j, "is_metzler"));
        r.is_diag_dominant = to_bool(field(j, "is_diag_dominant"));
        r.is_strictly_diag_dominant = to_bool(field(j, "is_strictly_diag_dominant"));
        r.is_m_tensor = to_bool(field(j, "is_m_tensor"));
        r.is_nonsingular_m = to_bool(field(j, "is_nonsingular_m"));
        r.is_h_tensor = to_bool(field(j, "is_h_tensor"));
        r.is_h_plus = to_bool(field(j, "is_h_plus"));
        r.is_generalized_row_sdd_pos_diag = to_bool(field(j, "is_generalized_row_sdd_pos_diag"));
        r.is_irreducible = to_bool(field(j, "is_irreducible"));
        r.s_certificate = to_opt_vector(j, "s_certificate");
        r.s_certificate_source = to_str(field(j, "s_certificate_source"));
        r.spectral_radius_of_majorant = to_opt_num(j, "spectral_radius_of_majorant");
        r.m_shift = to_opt_num(j, "m_shift");
        r.comparison_spectral_radius = to_opt_num(j, "comparison_spectral_radius");
        r.comparison_shift = to_opt_num(j, "comparison_shift");
        r.notes = to_strings(field(j, "notes"));
        return r;
    });
}

Json to_json(const SolveResult& r) {
    Json j;
    j["method"] = r.method;
    j["status"] = to_string(r.status);
    j["solution"] = to_json(r.solution);
    j["residual_inf"] = num(r.residual_inf);
    j["unique_certified"] = r.unique_certified;
    j["monotone"] = r.monotone;
    j["certificate"] = to_json(r.certificate);
    j["t"] = num(r.t);
    j["w"] = num(r.w);
    j["bracket_low"] = to_json(r.bracket_low);
    j["bracket_high"] = to_json(r.bracket_high);
    j["lower_limit"] = to_json(r.lower_limit);
    j["upper_limit"] = to_json(r.upper_limit);
    j["iters_below"] = r.iters_below;
    j["iters_above"] = r.iters_above;
    j["lower_trace"] = vectors(r.lower_trace);
    j["upper_trace"] = vectors(r.upper_trace);
    return j;
}

SolveResult solve_result_from_json(const Json& j) {
    return guarded("solve result", [&] {
        SolveResult r;
        r.method = to_str(field(j, "method"));
        r.status = enum_from_string(to_str(field(j, "status")),
                                    {SolveStatus::positive, SolveStatus::boundary_inconclusive}, "solve status");
        r.solution = vector_from_json(field(j, "solution"));
        r.residual_inf = to_num(field(j, "residual_inf"));
        r.unique_certified = to_bool(field(j, "unique_certified"));
        r.monotone = to_bool(field(j, "monotone"));
        r.certificate = vector_from_json(field(j, "certificate"));
        r.t = to_num(field(j, "t"));
        r.w = to_num(field(j, "w"));
        r.bracket_low = vector_from_json(field(j, "bracket_low"));
        r.bracket_high = vector_from_json(field(j, "bracket_high"));
        r.lower_limit = vector_from_json(field(j, "lower_limit"));
        r.upper_limit = vector_from_json(field(j, "upper_limit"));
        r.iters_below = to_int(field(j, "iters_below"), "iters_below");
        r.iters_above = to_int(field(j, "iters_above"), "iters_above");
        r.lower_trace = to_vectors(field(j, "lower_trace"));
        r.upper_trace = to_vectors(field(j, "upper_trace"));
        return r;
    });
}

Json to_json(const NormBounds& b) {
    Json rows = Json::array();
    for (const auto& r : b.per_index)
        rows.push_back(Json{{"k", r.k},
                            {"s_a", num(r.s_a)},
                            {"s_b", num(r.s_b)},
                            {"delta_a", num(r.delta_a)},
                            {"delta_b", num(r.delta_b)},
                            {"lower", num(r.lower)},
                            {"upper", num(r.upper)}});
    return Json{{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"per_index", std::move(rows)}};
}

NormBounds norm_bounds_from_json(const Json& j) {
    return guarded("norm bounds", [&] {
        NormBounds b;
        b.lower = to_num(field(j, "lower"));
        b.upper = to_num(field(j, "upper"));
        for (const auto& r : field(j, "per_index"))
            b.per_index.push_back({to_int(field(r, "k"), "k"), to_num(field(r, "s_a")), to_num(field(r, "s_b")),
                                   to_num(field(r, "delta_a")), to_num(field(r, "delta_b")),
                                   to_num(field(r, "lower")), to_num(field(r, "upper"))});
        return b;
    });
}

Json to_json(const PcpEnumeration& e) {
    Json sols = Json::array();
    for (const auto& s : e.solutions)
        sols.push_back(Json{{"x", to_json(s.x)}, {"slack", to_json(s.slack)}, {"support", ints(s.support)}});
    Json sups = Json::array();
    for (const auto& s : e.supports)
        sups.push_back(Json{{"support", ints(s.support)},
                            {"status", to_string(s.status)},
                            {"roots_found", s.roots_found},
                            {"roots_accepted", s.roots_accepted}});
    return Json{{"solutions", std::move(sols)}, {"supports", std::move(sups)}};
}

PcpEnumeration enumeration_from_json(const Json& j) {
    return guarded("enumeration", [&] {
        PcpEnumeration e;
        for (const auto& s : field(j, "solutions"))
            e.solutions.push_back(
                {vector_from_json(field(s, "x")), vector_from_json(field(s, "slack")), to_ints(field(s, "support"))});
        for (const auto& s : field(j, "supports")) {
            SupportOutcome o;
            o.support = to_ints(field(s, "support"));
            o.status = enum_from_string(to_str(field(s, "status")),
                                        {SupportStatus::solved, SupportStatus::no_root, SupportStatus::undetermined},
                                        "support status");
            o.roots_found = to_int(field(s, "roots_found"), "roots_found");
            o.roots_accepted = to_int(field(s, "roots_accepted"), "roots_accepted");
            e.supports.push_back(std::move(o));
        }
        return e;
    });
}

Json to_json(const VerdictEntry& v) {
    Json w = Json::object();
    for (const auto& x : v.witnesses) w[x.name] = nums(x.values);
    return Json{{"id", v.id}, {"verdict", to_string(v.verdict)}, {"note", v.note}, {"witnesses", std::move(w)}};
}

VerdictEntry verdict_from_json(const Json& j) {
    return guarded("verdict", [&] {
        VerdictEntry v;
        v.id = to_str(field(j, "id"));
        v.verdict = enum_from_string(to_str(field(j, "verdict")),
                                     {Verdict::holds, Verdict::fails, Verdict::not_applicable, Verdict::conditional,
                                      Verdict::inconclusive},
                                     "verdict");
        v.note = to_str(field(j, "note"));
        const Json& w = field(j, "witnesses");
        if (!w.is_object()) throw InputError("'witnesses' must be an object");
        for (auto it = w.begin(); it != w.end(); ++it) v.witnesses.push_back({it.key(), to_nums(it.value())});
        return v;
    });
}

Json to_json(const EquilibriumReport& r) {
    Json eigs = Json::array();
    for (const auto& e : r.jacobian_eigs) eigs.push_back(Json::array({num(e.real()), num(e.imag())}));
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
    Json j;
    j["kind"] = to_string(r.kind);
    j["support"] = ints(r.support);
    j["x_star"] = to_json(r.x_star);
    j["residual"] = num(r.residual);
    j["refined"] = r.refined;
    j["stability"] = to_string(r.stability);
    j["hurwitz"] = r.hurwitz;
    j["max_real"] = num(r.max_real);
    j["jacobian_eigs"] = std::move(eigs);
    j["verdicts"] = std::move(verdicts);
    j["sources"] = strings(r.sources);
    return j;
}

EquilibriumReport equilibrium_from_json(const Json& j) {
    return guarded("equilibrium report", [&] {
        EquilibriumReport r;
        r.kind = enum_from_string(to_str(field(j, "kind")),
                                  {EquilibriumKind::origin, EquilibriumKind::interior, EquilibriumKind::boundary},
                                  "equilibrium kind");
        r.support = to_ints(field(j, "support"));
        r.x_star = vector_from_json(field(j, "x_star"));
        r.residual = to_num(field(j, "residual"));
        r.refined = to_bool(field(j, "refined"));
        r.stability = enum_from_string(to_str(field(j, "stability")),
                                       {Stability::stable, Stability::unstable, Stability::marginal}, "stability");
        r.hurwitz = to_bool(field(j, "hurwitz"));
        r.max_real = to_num(field(j, "max_real"));
        for (const auto& e : field(j, "jacobian_eigs")) {
            if (!e.is_array() || e.size() != 2) throw InputError("eigenvalues are [re, im] pairs");
            r.jacobian_eigs.emplace_back(to_num(e[0]), to_num(e[1]));
        }
        for (const auto& v : field(j, "verdicts")) r.verdicts.push_back(verdict_from_json(v));
        r.sources = to_strings(field(j, "sources"));
        return r;
    });
}

Json to_json(const WtaCheck& w) {
    Json viol = Json::array();
    for (const auto& [i, k] : w.violations) viol.push_back(Json::array({i, k}));
    Json j;
    j["condition_a"] = w.condition_a;
    j["condition_b"] = w.condition_b;
    j["violations"] = std::move(viol);
    j["limit"] = opt_vector(w.limit);
    j["printed_ratio"] = num(w.printed_ratio);
    j["limit_ratio"] = num(w.limit_ratio);
    j["invasion_rates"] = nums(w.invasion_rates);
    j["invasion_negative"] = w.invasion_negative;
    return j;
}

WtaCheck wta_from_json(const Json& j) {
    return guarded("winner-take-all check", [&] {
        WtaCheck w;
        w.condition_a = to_bool(field(j, "condition_a"));
        w.condition_b = to_bool(field(j, "condition_b"));
        for (const auto& v : field(j, "violations")) {
            if (!v.is_array() || v.size() != 2) throw InputError("violations are [i, j] pairs");
            w.violations.emplace_back(to_int(v[0], "i"), to_int(v[1], "j"));
        }
        w.limit = to_opt_vector(j, "limit");
        w.printed_ratio = to_num(field(j, "printed_ratio"));
        w.limit_ratio = to_num(field(j, "limit_ratio"));
        w.invasion_rates = to_nums(field(j, "invasion_rates"));
        w.invasion_negative = to_bool(field(j, "invasion_negative"));
        return w;
    });
}

Json to_json(const ContinuationResult& c) {
    Json path = Json::array();
    for (const auto& p : c.path)
        path.push_back(Json{{"epsilon", num(p.epsilon)},
                            {"x", to_json(p.x)},
                            {"max_real", num(p.max_real)},
                            {"hurwitz", p.hurwitz}});
    return Json{{"path", std::move(path)}, {"truncated", c.truncated}, {"reason", c.reason}};
}

ContinuationResult continuation_from_json(const Json& j) {
    return guarded("continuation result", [&] {
        ContinuationResult c;
        for (const auto& p : field(j, "path"))
            c.path.push_back({to_num(field(p, "epsilon")), vector_from_json(field(p, "x")),
                              to_num(field(p, "max_real")), to_bool(field(p, "hurwitz"))});
        c.truncated = to_bool(field(j, "truncated"));
        c.reason = to_str(field(j, "reason"));
        return c;
    });
}

Terminal terminal_from_string(const std::string& s) {
    return enum_from_string(s, {Terminal::converged, Terminal::diverged, Terminal::max_time, Terminal::failed},
                            "terminal");
}

Json to_json(const Manifest& m) {
    Json runs = Json::array();
    for (const auto& r : m.runs) {
        Json j;
        j["id"] = r.id;
        j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
        j["epsilon"] = opt_num(r.epsilon);
        j["x0"] = to_json(r.x0);
        j["t_end"] = num(r.t_end);
        j["terminal"] = to_string(r.terminal);
        j["message"] = r.message;
        j["csv"] = r.csv;
        j["final_state"] = to_json(r.final_state);
        j["stats"] = Json{{"accepted", r.stats.accepted}, {"rejected", r.stats.rejected}, {"rhs_evals", r.stats.rhs_evals}};
        j["clamps"] = r.clamps;
        j["limit"] = r.limit ? to_json(*r.limit) : Json(nullptr);
        runs.push_back(std::move(j));
    }
    Json j;
    j["model"] = m.model;
    j["runs"] = std::move(runs);
    if (m.continuation) j["continuation"] = to_json(*m.continuation);
    return j;
}

Manifest manifest_from_json(const Json& j) {
    return guarded("manifest", [&] {
        Manifest m;
        m.model = to_str(field(j, "model"));
        for (const auto& rj : field(j, "runs")) {
            ManifestRun r;
            r.id = to_str(field(rj, "id"));
            if (const Json* s = optional_field(rj, "seed")) {
                if (!s->is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
                r.seed = s->get<std::uint64_t>();
            }
            r.epsilon = to_opt_num(rj, "epsilon");
            r.x0 = vector_from_json(field(rj, "x0"));
            r.t_end = to_num(field(rj, "t_end"));
            r.terminal = terminal_from_string(to_str(field(rj, "terminal")));
            r.message = to_str(field(rj, "message"));
            r.csv = to_str(field(rj, "csv"));
            r.final_state = vector_from_json(field(rj, "final_state"));
            const Json& st = field(rj, "stats");
            r.stats.accepted = field(st, "accepted").get<long>();
            r.stats.rejected = field(st, "rejected").get<long>();
            r.stats.rhs_evals = field(st, "rhs_evals").get<long>();
            r.clamps = field(rj, "clamps").get<std::size_t>();
            if (const Json* l = optional_field(rj, "limit")) r.limit = equilibrium_from_json(*l);
            m.runs.push_back(std::move(r));
        }
        if (const Json* c = optional_field(j, "continuation")) m.continuation = continuation_from_json(*c);
        return m;
    });
}

}  // namespace holv
