#include "scarp/moga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace scarp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Evaluates chromosomes[i] into out[i]; work split into contiguous blocks so
// the result does not depend on the worker count.
void evaluate_batch(const Evaluator& eval, std::vector<Chromosome>& chromosomes, std::vector<Individual>& out,
                    int threads) {
  out.resize(chromosomes.size());
  const std::size_t n = chromosomes.size();
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = eval.evaluate(std::move(chromosomes[i]));
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = eval.evaluate(std::move(chromosomes[i]));
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<Objectives> objectives_of(std::span<const Individual> pop) {
  std::vector<Objectives> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back(ind.objectives());
  return out;
}

}  // namespace

bool dominates(const Objectives& a, const Objectives& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> counter(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++counter[j];
      } else if (dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++counter[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (counter[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto i : current) {
      for (auto j : dominated[i]) {
        if (--counter[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, kInf);
  if (n <= 2) return dist;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (front[a].f1 != front[b].f1) return front[a].f1 < front[b].f1;
    return front[a].f2 < front[b].f2;
  });
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const auto& prev = front[order[k - 1]];
    const auto& next = front[order[k + 1]];
    dist[order[k]] = (next.f1 - prev.f1) + (prev.f2 - next.f2);
  }
  return dist;
}

EvalSettings default_eval_settings(const TaskGraph& graph) {
  EvalSettings s;
  s.split_capacity = graph.capacity();
  s.capacity = graph.capacity();
  return s;
}

Evaluator::Evaluator(const TaskGraph& graph, EvalSettings settings) : graph_(&graph), settings_(settings) {}

Individual Evaluator::evaluate(Chromosome chrom) const {
  Individual ind;
  ind.sol = split(chrom, *graph_, settings_.split_capacity);
  ind.eval = evaluate_stochastic(ind.sol, *graph_, settings_.capacity, settings_.options);
  ind.chrom = std::move(chrom);
  return ind;
}

void validate(const GAParams& params) {
  if (params.population <= 0 || params.population % 2 != 0) {
    throw std::invalid_argument("population size must be a positive even number");
  }
  if (params.iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (params.ls_period < 1) throw std::invalid_argument("ls_period must be at least 1");
  if (params.mutation_rate < 0.0 || params.mutation_rate > 1.0) {
    throw std::invalid_argument("mutation rate must lie in [0, 1]");
  }
}

ObjectiveBounds bounds_of(std::span<const Individual> members) {
  ObjectiveBounds b{kInf, -kInf, kInf, -kInf};
  for (const auto& ind : members) {
    b.f1_min = std::min(b.f1_min, ind.eval.f1);
    b.f1_max = std::max(b.f1_max, ind.eval.f1);
    b.f2_min = std::min(b.f2_min, ind.eval.f2);
    b.f2_max = std::max(b.f2_max, ind.eval.f2);
  }
  if (members.empty()) b = ObjectiveBounds{};
  return b;
}

const Individual& crowded_tournament(const Individual& a, const Individual& b, Rng& rng) {
  if (a.front != b.front) return a.front < b.front ? a : b;
  if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
  return std::bernoulli_distribution(0.5)(rng) ? a : b;
}

std::pair<Chromosome, Chromosome> ox_crossover(const Chromosome& p1, const Chromosome& p2, const TaskGraph& graph,
                                               std::size_t lo, std::size_t hi) {
  const std::size_t n = p1.sequence.size();
  auto build = [&](const Chromosome& keep, const Chromosome& donor) {
    Chromosome child;
    child.sequence.assign(n, TaskGraph::kDepot);
    std::vector<char> present(graph.edge_count(), 0);
    for (std::size_t i = lo; i <= hi; ++i) {
      child.sequence[i] = keep.sequence[i];
      present[graph.edge_of(keep.sequence[i])] = 1;
    }
    std::size_t pos = (hi + 1) % n;
    for (std::size_t k = 0; k < n; ++k) {
      const ArcId a = donor.sequence[(hi + 1 + k) % n];
      if (present[graph.edge_of(a)]) continue;
      present[graph.edge_of(a)] = 1;
      child.sequence[pos] = a;
      pos = (pos + 1) % n;
    }
    return child;
  };
  return {build(p1, p2), build(p2, p1)};
}

std::pair<Chromosome, Chromosome> ox_crossover(const Chromosome& p1, const Chromosome& p2, const TaskGraph& graph,
                                               Rng& rng) {
  const std::size_t n = p1.sequence.size();
  std::size_t lo = uniform_index(rng, n);
  std::size_t hi = uniform_index(rng, n);
  if (lo > hi) std::swap(lo, hi);
  return ox_crossover(p1, p2, graph, lo, hi);
}

Chromosome apply_mutation(Chromosome chrom, MutationKind kind, const TaskGraph& graph, Rng& rng) {
  auto& seq = chrom.sequence;
  const std::size_t n = seq.size();
  switch (kind) {
    case MutationKind::kSwap: {
      if (n < 2) break;
      const std::size_t i = uniform_index(rng, n);
      std::size_t j = uniform_index(rng, n - 1);
      if (j >= i) ++j;
      std::swap(seq[i], seq[j]);
      break;
    }
    case MutationKind::kReverse: {
      if (n < 2) break;
      std::size_t i = uniform_index(rng, n);
      std::size_t j = uniform_index(rng, n - 1);
      if (j >= i) ++j;
      if (i > j) std::swap(i, j);
      std::reverse(seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      for (std::size_t k = i; k <= j; ++k) seq[k] = graph.inverse(seq[k]);
      break;
    }
    case MutationKind::kFlip: {
      const std::size_t i = uniform_index(rng, n);
      seq[i] = graph.inverse(seq[i]);
      break;
    }
  }
  return chrom;
}

Chromosome mutate(Chromosome chrom, double rate, const TaskGraph& graph, Rng& rng) {
  if (chrom.sequence.empty() || !std::bernoulli_distribution(rate)(rng)) return chrom;
  const auto kind = static_cast<MutationKind>(std::uniform_int_distribution<int>(0, 2)(rng));
  return apply_mutation(std::move(chrom), kind, graph, rng);
}

Chromosome random_chromosome(const TaskGraph& graph, Rng& rng) {
  Chromosome chrom;
  const auto edges = static_cast<int>(graph.edge_count());
  chrom.sequence.resize(static_cast<std::size_t>(edges));
  std::iota(chrom.sequence.begin(), chrom.sequence.end(), 0);
  std::shuffle(chrom.sequence.begin(), chrom.sequence.end(), rng);
  for (auto& e : chrom.sequence) e = graph.arc_of(e, std::bernoulli_distribution(0.5)(rng));
  return chrom;
}

Chromosome nearest_neighbor_tour(const TaskGraph& graph) {
  Chromosome chrom;
  std::vector<char> served(graph.edge_count(), 0);
  ArcId current = TaskGraph::kDepot;
  for (std::size_t step = 0; step < graph.edge_count(); ++step) {
    ArcId best = TaskGraph::kDepot;
    double best_d = kInf;
    for (ArcId a = 1; a < static_cast<ArcId>(graph.arc_count()); ++a) {
      if (served[graph.edge_of(a)]) continue;
      const double d = graph.dist(current, a);
      if (d < best_d) {
        best_d = d;
        best = a;
      }
    }
    served[graph.edge_of(best)] = 1;
    chrom.sequence.push_back(best);
    current = best;
  }
  return chrom;
}

double direction_weight(const Objectives& x, const ObjectiveBounds& b) {
  const double r1 = b.f1_max > b.f1_min ? (x.f1 - b.f1_min) / (b.f1_max - b.f1_min) : 0.0;
  const double r2 = b.f2_max > b.f2_min ? (x.f2 - b.f2_min) / (b.f2_max - b.f2_min) : 0.0;
  if (r1 + r2 <= 0.0) return 0.5;
  return std::clamp(r1 / (r1 + r2), 0.0, 1.0);
}

Individual directed_local_search(const Individual& start, const ObjectiveBounds& bounds, const Evaluator& eval,
                                 int move_budget, LocalSearchStats* stats) {
  const TaskGraph& graph = eval.graph();
  const double w1 = direction_weight(start.objectives(), bounds);
  const double w2 = 1.0 - w1;
  Individual cur = start;
  const std::size_t n = cur.chrom.sequence.size();
  LocalSearchStats local;

  // Scale-aware strictness so round-off never counts as an improvement.
  auto improves = [&](const Individual& cand, double& delta) {
    delta = w1 * (cand.eval.f1 - cur.eval.f1) + w2 * (cand.eval.f2 - cur.eval.f2);
    const double tol = 1e-9 * (1.0 + std::abs(cur.eval.f1) + std::abs(cur.eval.f2));
    return delta < -tol;
  };
  auto try_candidate = [&](Chromosome cand) {
    ++local.evaluated;
    Individual next = eval.evaluate(std::move(cand));
    double delta = 0.0;
    if (!improves(next, delta)) return false;
    local.worst_accepted_delta = std::max(local.worst_accepted_delta, delta);
    ++local.accepted;
    cur = std::move(next);
    return true;
  };

  bool improved = n > 0;
  while (improved && local.accepted < move_budget) {
    improved = false;
    const auto& seq = cur.chrom.sequence;

    // flip one task
    for (std::size_t i = 0; i < n && !improved; ++i) {
      Chromosome cand = cur.chrom;
      cand.sequence[i] = graph.inverse(seq[i]);
      improved = try_candidate(std::move(cand));
    }
    // relocate one task, both orientations
    for (std::size_t i = 0; i < n && !improved; ++i) {
      for (std::size_t j = 0; j < n && !improved; ++j) {
        for (int orient = 0; orient < 2 && !improved; ++orient) {
          if (j == i && orient == 0) continue;
          Chromosome cand = cur.chrom;
          const ArcId task = orient == 0 ? seq[i] : graph.inverse(seq[i]);
          cand.sequence.erase(cand.sequence.begin() + static_cast<std::ptrdiff_t>(i));
          cand.sequence.insert(cand.sequence.begin() + static_cast<std::ptrdiff_t>(j), task);
          improved = try_candidate(std::move(cand));
        }
      }
    }
    // swap two tasks
    for (std::size_t i = 0; i < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n && !improved; ++j) {
        Chromosome cand = cur.chrom;
        std::swap(cand.sequence[i], cand.sequence[j]);
        improved = try_candidate(std::move(cand));
      }
    }
    // 2-opt: reverse a subsequence, inverting each task
    for (std::size_t i = 0; i < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n && !improved; ++j) {
        Chromosome cand = cur.chrom;
        std::reverse(cand.sequence.begin() + static_cast<std::ptrdiff_t>(i),
                     cand.sequence.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        for (std::size_t k = i; k <= j; ++k) cand.sequence[k] = graph.inverse(cand.sequence[k]);
        improved = try_candidate(std::move(cand));
      }
    }
  }

  if (stats) {
    stats->accepted += local.accepted;
    stats->evaluated += local.evaluated;
    stats->worst_accepted_delta = std::max(stats->worst_accepted_delta, local.worst_accepted_delta);
  }
  return cur;
}

void rank_population(std::vector<Individual>& pop) {
  const auto objs = objectives_of(pop);
  const auto fronts = non_dominated_sort(objs);
  std::vector<Objectives> members;
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    members.clear();
    for (auto i : fronts[r]) members.push_back(objs[i]);
    const auto crowd = crowding_distance(members);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pop[fronts[r][k]].front = static_cast<int>(r) + 1;
      pop[fronts[r][k]].crowding = crowd[k];
    }
  }
}

RunResult nsga2_run(const Evaluator& eval, const GAParams& params, const RunHooks& hooks) {
  validate(params);
  const TaskGraph& graph = eval.graph();
  const auto ns = static_cast<std::size_t>(params.population);
  const int budget = params.ls_budget_factor * static_cast<int>(graph.edge_count());
  Rng rng(params.seed);
  RunResult result;

  // Initial population, distinct sequences where the retry budget allows.
  std::set<std::vector<ArcId>> seen;
  std::vector<Chromosome> chromosomes;
  if (params.greedy_seed) {
    chromosomes.push_back(nearest_neighbor_tour(graph));
    seen.insert(chromosomes.back().sequence);
  }
  while (chromosomes.size() < ns) {
    Chromosome c = random_chromosome(graph, rng);
    for (int retry = 0; retry < 20 && seen.count(c.sequence); ++retry) c = random_chromosome(graph, rng);
    seen.insert(c.sequence);
    chromosomes.push_back(std::move(c));
  }
  std::vector<Individual> pop;
  evaluate_batch(eval, chromosomes, pop, params.threads);
  result.evaluations += static_cast<long long>(pop.size());
  rank_population(pop);
  if (hooks.on_iteration) hooks.on_iteration(0, pop);

  std::vector<Individual> offspring;
  for (int iter = 1; iter <= params.iterations; ++iter) {
    seen.clear();
    for (const auto& ind : pop) seen.insert(ind.chrom.sequence);

    chromosomes.clear();
    while (chromosomes.size() < ns) {
      const Individual& p1 = crowded_tournament(pop[uniform_index(rng, ns)], pop[uniform_index(rng, ns)], rng);
      const Individual& p2 = crowded_tournament(pop[uniform_index(rng, ns)], pop[uniform_index(rng, ns)], rng);
      auto [c1, c2] = ox_crossover(p1.chrom, p2.chrom, graph, rng);
      for (Chromosome* child : {&c1, &c2}) {
        *child = mutate(std::move(*child), params.mutation_rate, graph, rng);
        if (seen.count(child->sequence)) *child = mutate(std::move(*child), 1.0, graph, rng);
        seen.insert(child->sequence);
        chromosomes.push_back(std::move(*child));
      }
    }
    evaluate_batch(eval, chromosomes, offspring, params.threads);
    result.evaluations += static_cast<long long>(offspring.size());

    // Merge and truncate back to ns.
    for (auto& child : offspring) pop.push_back(std::move(child));
    const auto objs = objectives_of(pop);
    const auto fronts = non_dominated_sort(objs);
    std::vector<Individual> next;
    next.reserve(ns);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= ns) {
        for (auto i : front) next.push_back(std::move(pop[i]));
        continue;
      }
      std::vector<Objectives> members;
      for (auto i : front) members.push_back(objs[i]);
      const auto crowd = crowding_distance(members);
      std::vector<std::size_t> order(front.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      for (std::size_t k = 0; next.size() < ns; ++k) next.push_back(std::move(pop[front[order[k]]]));
      break;
    }
    pop = std::move(next);
    rank_population(pop);

    if (iter % params.ls_period == 0) {
      std::vector<Individual> leaders;
      for (const auto& ind : pop) {
        if (ind.front == 1) leaders.push_back(ind);
      }
      const auto bounds = bounds_of(leaders);
      std::set<std::vector<ArcId>> done;
      for (auto& ind : pop) {
        if (ind.front != 1 || !done.insert(ind.chrom.sequence).second) continue;
        LocalSearchStats stats;
        ind = directed_local_search(ind, bounds, eval, budget, &stats);
        result.evaluations += stats.evaluated;
      }
      rank_population(pop);
    }
    if (hooks.on_iteration) hooks.on_iteration(iter, pop);
  }

  // Archive: distinct objective vectors of front 1, sorted by (f1, f2).
  std::vector<const Individual*> leaders;
  for (const auto& ind : pop) {
    if (ind.front == 1) leaders.push_back(&ind);
  }
  std::stable_sort(leaders.begin(), leaders.end(), [](const Individual* a, const Individual* b) {
    if (a->eval.f1 != b->eval.f1) return a->eval.f1 < b->eval.f1;
    return a->eval.f2 < b->eval.f2;
  });
  for (const auto* ind : leaders) {
    if (!result.front.empty() && result.front.back().objectives() == ind->objectives()) continue;
    result.front.push_back(*ind);
  }
  result.leftmost = 0;
  result.rightmost = 0;
  for (std::size_t i = 1; i < result.front.size(); ++i) {
    const auto& r = result.front[result.rightmost];
    const auto& c = result.front[i];
    if (c.eval.f2 < r.eval.f2 || (c.eval.f2 == r.eval.f2 && c.eval.f1 < r.eval.f1)) result.rightmost = i;
  }
  result.population = std::move(pop);
  return result;
}

}  // namespace scarp
