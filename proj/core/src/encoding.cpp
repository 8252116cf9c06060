#include "scarp/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scarp {
namespace {

// Labels compare equal below this absolute gap; costs are sums of file values.
constexpr double kTieEps = 1e-9;

struct Label {
  double cost = std::numeric_limits<double>::infinity();
  int trips = 0;
  int pred = -1;
};

}  // namespace

bool is_valid(const Chromosome& chrom, const TaskGraph& graph) {
  if (chrom.sequence.size() != graph.edge_count()) return false;
  std::vector<char> seen(graph.edge_count(), 0);
  for (ArcId a : chrom.sequence) {
    if (a <= 0 || static_cast<std::size_t>(a) >= graph.arc_count()) return false;
    const int e = graph.edge_of(a);
    if (seen[e]) return false;
    seen[e] = 1;
  }
  return true;
}

double trip_cost(const TaskGraph& graph, std::span<const ArcId> tasks) {
  double cost = 0.0;
  ArcId prev = TaskGraph::kDepot;
  for (ArcId a : tasks) {
    cost += graph.dist(prev, a) + graph.arc(a).cost;
    prev = a;
  }
  return cost + graph.dist(prev, TaskGraph::kDepot);
}

Trip make_trip(const TaskGraph& graph, std::vector<ArcId> tasks) {
  Trip trip;
  for (ArcId a : tasks) trip.load += graph.arc(a).demand;
  trip.cost = trip_cost(graph, tasks);
  trip.tasks = std::move(tasks);
  return trip;
}

Solution make_solution(std::vector<Trip> trips) {
  Solution sol;
  sol.trips = std::move(trips);
  sol.t = static_cast<int>(sol.trips.size());
  const auto det = evaluate_deterministic(sol);
  sol.h = det.h;
  sol.m = det.m;
  return sol;
}

Solution split(const Chromosome& chrom, const TaskGraph& graph, double capacity) {
  const auto& seq = chrom.sequence;
  const std::size_t n = seq.size();
  std::vector<Label> label(n + 1);
  label[0].cost = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(label[i].cost)) continue;
    double load = 0.0;
    double inner = 0.0;  // depot -> seq[i..j], without the return leg
    for (std::size_t j = i; j < n; ++j) {
      const Arc& task = graph.arc(seq[j]);
      load += task.demand;
      if (load > capacity) break;
      inner += (j == i ? graph.dist(TaskGraph::kDepot, seq[j]) : graph.dist(seq[j - 1], seq[j])) + task.cost;
      const double cost = label[i].cost + inner + graph.dist(seq[j], TaskGraph::kDepot);
      const int trips = label[i].trips + 1;
      Label& tgt = label[j + 1];
      const bool better = cost < tgt.cost - kTieEps || (cost <= tgt.cost + kTieEps && trips < tgt.trips);
      if (better) tgt = Label{cost, trips, static_cast<int>(i)};
    }
  }

  if (!std::isfinite(label[n].cost)) {
    throw std::invalid_argument("split: a task demand exceeds the split capacity");
  }

  std::vector<Trip> trips;
  for (std::size_t j = n; j > 0;) {
    const auto i = static_cast<std::size_t>(label[j].pred);
    trips.push_back(make_trip(graph, std::vector<ArcId>(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                                        seq.begin() + static_cast<std::ptrdiff_t>(j))));
    j = i;
  }
  std::reverse(trips.begin(), trips.end());
  return make_solution(std::move(trips));
}

DeterministicCost evaluate_deterministic(const Solution& sol) {
  DeterministicCost out;
  for (const auto& trip : sol.trips) {
    out.h += trip.cost;
    out.m = std::max(out.m, trip.cost);
  }
  return out;
}

Chromosome tasks_to_chromosome(const Solution& sol) {
  Chromosome chrom;
  for (const auto& trip : sol.trips) {
    chrom.sequence.insert(chrom.sequence.end(), trip.tasks.begin(), trip.tasks.end());
  }
  return chrom;
}

}  // namespace scarp
