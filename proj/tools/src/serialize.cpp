#include <algorithm>
#include <cctype>
#include <cmath>

#include "scarp/cli.hpp"

namespace scarp::cli {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(round6(*v)) : Json(nullptr); }

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

double round6(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string number_text(double x) { return Json(round6(x)).dump(); }

Json solution_to_json(const Solution& sol, const TaskGraph& graph) {
  Json trips = Json::array();
  for (const auto& trip : sol.trips) {
    Json tasks = Json::array();
    for (ArcId a : trip.tasks) {
      const auto& arc = graph.arc(a);
      tasks.push_back(Json{{"edge", arc.edge}, {"from", arc.tail}, {"to", arc.head}});
    }
    trips.push_back(Json{{"cost", round6(trip.cost)}, {"load", round6(trip.load)}, {"tasks", std::move(tasks)}});
  }
  return Json{{"h", round6(sol.h)}, {"m", round6(sol.m)}, {"t", sol.t}, {"trips", std::move(trips)}};
}

Json eval_to_json(const StochasticEval& eval) {
  return Json{{"h_bar", round6(eval.h_bar)},
              {"sigma_h", round6(eval.sigma_h)},
              {"m_bar", round6(eval.m_bar)},
              {"sigma_m", round6(eval.sigma_m)},
              {"t_bar", round6(eval.t_bar)},
              {"sigma_t", round6(eval.sigma_t)},
              {"f1", round6(eval.f1)},
              {"f2", round6(eval.f2)},
              {"method", eval.method == MakespanMethod::kExact ? "exact" : "truncated"}};
}

Solution solution_from_json(const Json& j, const TaskGraph& graph) {
  const std::string where = "solution";
  const auto trips_json = field<Json>(j, "trips", where);
  if (!trips_json.is_array() || trips_json.empty()) throw SchemaError("solution: 'trips' must be a non-empty array");

  std::vector<char> served(graph.edge_count(), 0);
  std::vector<Trip> trips;
  for (const auto& tj : trips_json) {
    const auto tasks_json = field<Json>(tj, "tasks", where + " trip");
    if (!tasks_json.is_array() || tasks_json.empty()) throw SchemaError("solution: a trip has no tasks");
    std::vector<ArcId> tasks;
    for (const auto& task : tasks_json) {
      const int e = field<int>(task, "edge", where + " task");
      const int from = field<int>(task, "from", where + " task");
      const int to = field<int>(task, "to", where + " task");
      if (e < 0 || static_cast<std::size_t>(e) >= graph.edge_count()) {
        throw SchemaError("solution: edge index " + std::to_string(e) + " is not a required edge of this instance");
      }
      const ArcId fwd = graph.arc_of(e, true);
      ArcId a = 0;
      if (graph.arc(fwd).tail == from && graph.arc(fwd).head == to) {
        a = fwd;
      } else if (graph.arc(graph.inverse(fwd)).tail == from && graph.arc(graph.inverse(fwd)).head == to) {
        a = graph.inverse(fwd);
      } else {
        throw SchemaError("solution: task (" + std::to_string(from) + ", " + std::to_string(to) +
                          ") does not match required edge " + std::to_string(e));
      }
      if (served[e]) throw SchemaError("solution: edge " + std::to_string(e) + " is served twice");
      served[e] = 1;
      tasks.push_back(a);
    }
    Trip trip = make_trip(graph, std::move(tasks));
    if (trip.load > graph.capacity() + 1e-9) throw SchemaError("solution: a trip exceeds the vehicle capacity");
    trips.push_back(std::move(trip));
  }
  if (std::count(served.begin(), served.end(), 0) != 0) {
    throw SchemaError("solution: not every required edge is served");
  }
  Solution sol = make_solution(std::move(trips));
  if (j.contains("h")) {
    const double stored = field<double>(j, "h", where);
    if (std::abs(stored - round6(sol.h)) > 1e-5 * std::max(1.0, std::abs(stored))) {
      throw SchemaError("solution: stored cost " + number_text(stored) + " disagrees with recomputed cost " +
                        number_text(sol.h));
    }
  }
  return sol;
}

LoadedSolutions solutions_from_json(const Json& j, const TaskGraph& graph) {
  LoadedSolutions out;
  if (j.is_object() && j.contains("solutions")) {
    const auto& arr = j.at("solutions");
    if (!arr.is_array() || arr.empty()) throw SchemaError("archive: 'solutions' must be a non-empty array");
    for (const auto& s : arr) out.solutions.push_back(solution_from_json(s, graph));
    auto index = [&](const char* key) -> std::optional<std::size_t> {
      if (!j.contains(key)) return std::nullopt;
      const auto i = field<std::size_t>(j, key, "archive");
      if (i >= out.solutions.size()) throw SchemaError(std::string("archive: '") + key + "' index out of range");
      return i;
    };
    out.leftmost = index("leftmost");
    out.rightmost = index("rightmost");
    return out;
  }
  out.solutions.push_back(solution_from_json(j, graph));
  return out;
}

std::optional<QualityReferences> find_references(const Json& refs, const std::string& instance_name,
                                                 const std::string& file_stem) {
  if (!refs.is_object()) return std::nullopt;
  for (const auto& key : {instance_name, file_stem, lower(instance_name), lower(file_stem)}) {
    if (!refs.contains(key)) continue;
    const auto& r = refs.at(key);
    auto get = [&](const char* k) -> std::optional<double> {
      if (!r.contains(k) || !r.at(k).is_number()) return std::nullopt;
      return r.at(k).get<double>();
    };
    return QualityReferences{get("h1"), get("m1"), get("h2"), get("m2"), get("mono")};
  }
  return std::nullopt;
}

Json quality_to_json(const QualityReport& q) {
  return Json{{"references",
               Json{{"h1", optional_number(q.refs.h1)},
                    {"m1", optional_number(q.refs.m1)},
                    {"h2", optional_number(q.refs.h2)},
                    {"m2", optional_number(q.refs.m2)},
                    {"mono", optional_number(q.refs.h_mono)}}},
              {"e1_h", optional_number(q.e1_h)},
              {"e1_m", optional_number(q.e1_m)},
              {"e2_h", optional_number(q.e2_h)},
              {"e2_m", optional_number(q.e2_m)},
              {"e1_mono", optional_number(q.e1_mono)}};
}

Json replication_to_json(const ReplicationReport& r) {
  Json overflow = Json::array();
  for (double x : r.overflow_rate) overflow.push_back(round6(x));
  Json h2 = Json::array();
  for (double x : r.h2_violation_rate) h2.push_back(round6(x));
  return Json{{"n", r.n},
              {"seed", r.seed},
              {"h_bar", round6(r.h_bar)},
              {"sigma_h", round6(r.sigma_h)},
              {"m_bar", round6(r.m_bar)},
              {"sigma_m", round6(r.sigma_m)},
              {"h_hat", round6(r.h_hat)},
              {"sigma_h_hat", round6(r.sigma_h_hat)},
              {"m_hat", round6(r.m_hat)},
              {"sigma_m_hat", round6(r.sigma_m_hat)},
              {"t_bar", round6(r.t_bar)},
              {"sigma_t", round6(r.sigma_t)},
              {"t_hat", round6(r.t_hat)},
              {"sigma_t_hat", round6(r.sigma_t_hat)},
              {"gaps",
               Json{{"e_h", optional_number(r.gaps.e_h)},
                    {"e_m", optional_number(r.gaps.e_m)},
                    {"e_sh", optional_number(r.gaps.e_sh)},
                    {"e_sm", optional_number(r.gaps.e_sm)}}},
              {"overflow_rate", std::move(overflow)},
              {"h2_violation_rate", std::move(h2)},
              {"clamped_draws", r.clamped_draws}};
}

}  // namespace scarp::cli
