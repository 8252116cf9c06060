// Undirected CARP instances and the directed task graph built from them.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scarp {

/// Raised when a DAT file cannot be tokenized into the expected layout.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a parsed instance breaks a CARP invariant (demand, cost,
/// connectivity).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int u = 0;
  int v = 0;
  double cost = 0.0;
  double demand = 0.0;  // 0 for deadhead-only edges

  [[nodiscard]] bool required() const { return demand > 0.0; }
};

struct Instance {
  std::string name;
  std::string comment;
  int node_count = 0;
  std::vector<Edge> edges;  // required edges first, in file order
  int depot = 1;
  double capacity = 0.0;
  int fleet_hint = 0;  // VEHICULOS, informational only

  [[nodiscard]] std::size_t required_count() const;
};

/// Reads the DAT benchmark layout (gdb/val/egl family).
Instance parse_instance(std::istream& in);
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

/// Writes `inst` back in the DAT layout; parse_instance(write) == inst.
std::string write_instance(const Instance& inst);

/// Checks the instance invariants; throws ValidationError.
void validate(const Instance& inst);

/// Node-level all-pairs shortest path costs over all edges (1-based ids,
/// row/column 0 unused).
std::vector<std::vector<double>> node_distances(const Instance& inst);

using ArcId = int;

struct Arc {
  int tail = 0;
  int head = 0;
  double cost = 0.0;
  double demand = 0.0;
  int edge = -1;  // index into Instance::edges, -1 for the depot arc
};

/// Fully directed view of an instance: one arc per orientation of each
/// required edge plus a zero-cost loop at the depot (arc 0).
///
/// Arc 2e+1 is edge e oriented u->v, arc 2e+2 is v->u. dist(a, b) is the
/// deadhead cost from head(a) to tail(b).
class TaskGraph {
 public:
  static constexpr ArcId kDepot = 0;

  explicit TaskGraph(const Instance& inst);

  [[nodiscard]] std::size_t arc_count() const { return arcs_.size(); }
  [[nodiscard]] std::size_t task_count() const { return arcs_.size() - 1; }
  [[nodiscard]] std::size_t edge_count() const { return (arcs_.size() - 1) / 2; }

  [[nodiscard]] const Arc& arc(ArcId a) const { return arcs_[static_cast<std::size_t>(a)]; }
  [[nodiscard]] ArcId inverse(ArcId a) const;
  [[nodiscard]] int edge_of(ArcId a) const { return arc(a).edge; }
  [[nodiscard]] ArcId arc_of(int edge, bool forward) const { return 2 * edge + (forward ? 1 : 2); }

  [[nodiscard]] double dist(ArcId from, ArcId to) const {
    return dist_[static_cast<std::size_t>(from) * arcs_.size() + static_cast<std::size_t>(to)];
  }
  [[nodiscard]] double node_dist(int from, int to) const { return node_dist_[from][to]; }

  [[nodiscard]] double capacity() const { return capacity_; }
  [[nodiscard]] int depot_node() const { return depot_; }
  /// Original edge endpoints of required edge `e` as read from the file.
  [[nodiscard]] const Edge& required_edge(int e) const { return required_[static_cast<std::size_t>(e)]; }

 private:
  std::vector<Arc> arcs_;
  std::vector<Edge> required_;
  std::vector<double> dist_;
  std::vector<std::vector<double>> node_dist_;
  double capacity_ = 0.0;
  int depot_ = 1;
};

}  // namespace scarp
