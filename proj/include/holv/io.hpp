#pragma once

#include "holv/lv_model.hpp"
#include "holv/ode.hpp"
#include "holv/pcp.hpp"
#include "holv/poly_solver.hpp"
#include "holv/tensor_class.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holv {

// Keys are written in insertion order, so a report always serializes to the
// same bytes.
using Json = nlohmann::ordered_json;

// Parse errors become InputError with the byte position, prefixed by `origin`.
Json parse_json(const std::string& text, const std::string& origin = "input");
Json read_json_file(const std::string& path);
// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

// Non-finite numbers are written as null and read back as NaN.
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);
// Row-major nested arrays, [[a11, a12], [a21, a22]].
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// {"order", "dim", "entries": flat row-major} or, with sparse = true, only the
// nonzeros as {"idx": [1-based indices], "val"}. The reader accepts both.
Json to_json(const CubicalTensor& t, bool sparse = false);
CubicalTensor tensor_from_json(const Json& j);

// {"terms": [tensors], "rhs": [...]}
Json to_json(const PolySystem& s);
PolySystem system_from_json(const Json& j);

// {"B": tensor, "A": matrix, "q": [...]}
Json to_json(const QcpProblem& p);
QcpProblem problem_from_json(const Json& j);

// {"scenario", "r", "A", "B", "blocks": {"m", "n"}}; blocks only for two_faction.
Json to_json(const LVModel& m);
LVModel model_from_json(const Json& j);

Json to_json(const TensorClassReport& r);
TensorClassReport class_report_from_json(const Json& j);

Json to_json(const SolveResult& r);
SolveResult solve_result_from_json(const Json& j);

Json to_json(const NormBounds& b);
NormBounds norm_bounds_from_json(const Json& j);

Json to_json(const PcpEnumeration& e);
PcpEnumeration enumeration_from_json(const Json& j);

Json to_json(const VerdictEntry& v);
VerdictEntry verdict_from_json(const Json& j);

Json to_json(const EquilibriumReport& r);
EquilibriumReport equilibrium_from_json(const Json& j);

Json to_json(const WtaCheck& w);
WtaCheck wta_from_json(const Json& j);

Json to_json(const ContinuationResult& c);
ContinuationResult continuation_from_json(const Json& j);

// One simulation run in a batch manifest; the trajectory itself lives in the
// CSV file named by `csv`.
struct ManifestRun {
    std::string id;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;  // HOI scale in an epsilon sweep
    Vector x0;
    double t_end = 0.0;
    Terminal terminal = Terminal::max_time;
    std::string message;
    std::string csv;
    Vector final_state;
    SimStats stats;
    std::size_t clamps = 0;
    std::optional<EquilibriumReport> limit;
};

struct Manifest {
    std::string model;
    std::vector<ManifestRun> runs;
    std::optional<ContinuationResult> continuation;
};

Json to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j);

Terminal terminal_from_string(const std::string& s);

}  // namespace holv
