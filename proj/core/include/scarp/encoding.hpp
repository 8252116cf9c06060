// Giant-tour chromosomes and the optimal split into capacity-feasible trips.
#pragma once

#include <span>
#include <vector>

#include "scarp/instance.hpp"

namespace scarp {

/// One orientation of every required edge, in service order, as if a single
/// vehicle performed all trips back to back.
struct Chromosome {
  std::vector<ArcId> sequence;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// True when `chrom` holds exactly one arc of every required edge.
bool is_valid(const Chromosome& chrom, const TaskGraph& graph);

struct Trip {
  std::vector<ArcId> tasks;
  double load = 0.0;  // sum of mean demands
  double cost = 0.0;  // depot -> tasks -> depot, deadheads included
};

struct Solution {
  std::vector<Trip> trips;
  double h = 0.0;  // total cost
  double m = 0.0;  // longest trip
  int t = 0;       // trip count
};

struct DeterministicCost {
  double h = 0.0;
  double m = 0.0;
};

/// Cost of serving `tasks` in order on one trip from and back to the depot.
double trip_cost(const TaskGraph& graph, std::span<const ArcId> tasks);

/// Builds a trip (load and cost) from an ordered task list.
Trip make_trip(const TaskGraph& graph, std::vector<ArcId> tasks);

/// Assembles a Solution from trips and fills h, m and t.
Solution make_solution(std::vector<Trip> trips);

/// Minimum-cost partition of the sequence into contiguous trips whose load
/// stays within `capacity`. Among equal-cost partitions the one with fewer
/// trips wins, then the earliest predecessor in the label scan.
Solution split(const Chromosome& chrom, const TaskGraph& graph, double capacity);
inline Solution split(const Chromosome& chrom, const TaskGraph& graph) { return split(chrom, graph, graph.capacity()); }

DeterministicCost evaluate_deterministic(const Solution& sol);

/// Concatenates the trips of `sol` back into a giant tour.
Chromosome tasks_to_chromosome(const Solution& sol);

}  // namespace scarp
