// Command-line front end: solve, evaluate, replicate and batch report.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "scarp/instance.hpp"
#include "scarp/moga.hpp"
#include "scarp/replication.hpp"
#include "scarp/stochastic.hpp"

namespace scarp::cli {

/// Insertion-ordered JSON keeps output field order fixed.
using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kSchema = 3,
  kCapability = 4,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kJson, kCsv };

struct RunConfig {
  std::string command;
  std::string instance;  // file, or directory for `report`
  std::string solution;  // archive/solution file for evaluate and replicate
  std::string out;       // empty: stdout
  Format format = Format::kJson;
  GAParams ga;
  DemandModel model;
  Penalties penalties;
  std::optional<double> capacity_override;
  int replications = 10000;
  bool exact = false;
  std::string select = "all";  // all | leftmost | rightmost | <index>
  std::string refs;
};

/// Numbers in every output are rounded to 6 decimals so equal runs give
/// byte-identical files.
double round6(double x);
/// Text of a number exactly as it appears in JSON output.
std::string number_text(double x);

Json solution_to_json(const Solution& sol, const TaskGraph& graph);
Json eval_to_json(const StochasticEval& eval);

/// Reads one solution ({"trips": [...]}) against `graph`; trips are rebuilt
/// from the task list and the stored h must agree. Throws SchemaError.
Solution solution_from_json(const Json& j, const TaskGraph& graph);

struct LoadedSolutions {
  std::vector<Solution> solutions;
  std::optional<std::size_t> leftmost;
  std::optional<std::size_t> rightmost;
};

/// Accepts a solve archive ({"solutions": [...]}) or a single solution.
LoadedSolutions solutions_from_json(const Json& j, const TaskGraph& graph);

/// {"<instance>": {"h1":..,"m1":..,"h2":..,"m2":..,"mono":..}, ...}
std::optional<QualityReferences> find_references(const Json& refs, const std::string& instance_name,
                                                 const std::string& file_stem);

Json quality_to_json(const QualityReport& q);
Json replication_to_json(const ReplicationReport& r);

struct SolveOutput {
  Json json;
  std::string csv;
};

/// Runs the optimizer and builds the front-1 archive.
SolveOutput cmd_solve(const RunConfig& cfg, std::ostream& log);
/// Analytical criteria of stored solutions; throws CapabilityError with --exact
/// beyond the enumeration threshold.
SolveOutput cmd_evaluate(const RunConfig& cfg, std::ostream& log);
/// Monte Carlo replication of stored solutions.
SolveOutput cmd_replicate(const RunConfig& cfg, std::ostream& log);
/// Batch: solve + replicate every instance of a directory, one summary table.
SolveOutput cmd_report(const RunConfig& cfg, std::ostream& log);

/// Parses arguments, dispatches, writes output, returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scarp::cli
