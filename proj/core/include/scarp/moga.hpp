// NSGA-II over giant-tour chromosomes with the two stochastic criteria
// f1 = H_bar + rho sigma_H and f2 = M_bar + mu sigma_M (both minimized),
// plus a periodic directed local search on front 1.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "scarp/encoding.hpp"
#include "scarp/stochastic.hpp"

namespace scarp {

using Rng = std::mt19937_64;

struct Objectives {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const Objectives&, const Objectives&) = default;
};

/// Weak Pareto dominance for minimization: no worse on both, better on one.
bool dominates(const Objectives& a, const Objectives& b);

/// Fronts as index lists into `points`, front 1 first. Indices inside a
/// front are ascending.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> points);

/// Half-perimeter crowding distance of each member of one front, returned in
/// input order. Members are ordered by (f1, f2); the two extremes get +inf,
/// and fronts of at most two members are all +inf. Raw objective values, no
/// normalization.
std::vector<double> crowding_distance(std::span<const Objectives> front);

struct Individual {
  Chromosome chrom;
  Solution sol;
  StochasticEval eval;
  int front = 1;
  double crowding = 0.0;

  [[nodiscard]] Objectives objectives() const { return {eval.f1, eval.f2}; }
};

/// Everything needed to turn a chromosome into an evaluated Individual.
struct EvalSettings {
  double split_capacity = 0.0;  // Q' for the slack approach, otherwise Q
  double capacity = 0.0;        // true vehicle capacity used for overflow
  EvalOptions options;
};

EvalSettings default_eval_settings(const TaskGraph& graph);

class Evaluator {
 public:
  Evaluator(const TaskGraph& graph, EvalSettings settings);

  [[nodiscard]] Individual evaluate(Chromosome chrom) const;
  [[nodiscard]] const TaskGraph& graph() const { return *graph_; }
  [[nodiscard]] const EvalSettings& settings() const { return settings_; }

 private:
  const TaskGraph* graph_;
  EvalSettings settings_;
};

struct GAParams {
  int population = 60;  // must be even
  int iterations = 1000;
  int ls_period = 10;
  double mutation_rate = 0.1;
  std::uint64_t seed = 1;
  int exact_threshold = kDefaultExactThreshold;
  bool greedy_seed = false;
  int threads = 1;
  int ls_budget_factor = 10;  // accepted moves per descent = factor * tasks
};

/// Throws std::invalid_argument on an odd/empty population or ls_period < 1.
void validate(const GAParams& params);

struct ObjectiveBounds {
  double f1_min = 0.0;
  double f1_max = 0.0;
  double f2_min = 0.0;
  double f2_max = 0.0;
};

ObjectiveBounds bounds_of(std::span<const Individual> members);

/// Crowded comparison: lower front wins, then larger crowding, otherwise a
/// fair coin from `rng`.
const Individual& crowded_tournament(const Individual& a, const Individual& b, Rng& rng);

/// Order crossover with segment [lo, hi] (inclusive) copied from the first
/// parent. Presence is tracked per edge, so a filled task keeps the
/// orientation it has in the donor parent.
std::pair<Chromosome, Chromosome> ox_crossover(const Chromosome& p1, const Chromosome& p2, const TaskGraph& graph,
                                               std::size_t lo, std::size_t hi);
std::pair<Chromosome, Chromosome> ox_crossover(const Chromosome& p1, const Chromosome& p2, const TaskGraph& graph,
                                               Rng& rng);

enum class MutationKind { kSwap, kReverse, kFlip };

/// Applies one move of `kind` chosen with `rng` (positions / task).
Chromosome apply_mutation(Chromosome chrom, MutationKind kind, const TaskGraph& graph, Rng& rng);

/// With probability `rate`, applies one uniformly chosen mutation move.
Chromosome mutate(Chromosome chrom, double rate, const TaskGraph& graph, Rng& rng);

/// Random permutation of the edges with random orientations.
Chromosome random_chromosome(const TaskGraph& graph, Rng& rng);

/// Greedy giant tour: repeatedly append the closest unserved task.
Chromosome nearest_neighbor_tour(const TaskGraph& graph);

/// Weight pi_1 of the f1 direction for a solution at `x`. A criterion with
/// a degenerate range contributes 0; a point at both minima gets 0.5.
double direction_weight(const Objectives& x, const ObjectiveBounds& bounds);

struct LocalSearchStats {
  int accepted = 0;
  long long evaluated = 0;
  double worst_accepted_delta = -std::numeric_limits<double>::infinity();
};

/// First-improvement descent over flip, relocate, swap and 2-opt moves on the
/// giant tour; each candidate is re-split and re-evaluated. A move is taken
/// when pi_1 df1 + (1 - pi_1) df2 < 0, pi_1 fixed from the starting point.
Individual directed_local_search(const Individual& start, const ObjectiveBounds& bounds, const Evaluator& eval,
                                 int move_budget, LocalSearchStats* stats = nullptr);

/// Assigns front numbers and crowding distances in place.
void rank_population(std::vector<Individual>& pop);

struct RunResult {
  std::vector<Individual> population;
  std::vector<Individual> front;  // distinct objective vectors, sorted by f1
  std::size_t leftmost = 0;       // min f1
  std::size_t rightmost = 0;      // min f2
  long long evaluations = 0;
};

struct RunHooks {
  std::function<void(int iteration, std::span<const Individual> population)> on_iteration;
};

RunResult nsga2_run(const Evaluator& eval, const GAParams& params, const RunHooks& hooks = {});

}  // namespace scarp
