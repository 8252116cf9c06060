#include "scarp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>

namespace scarp {
namespace {

// Trips split by overflow probability: forced (p == 1) trips overflow in
// every scenario with nonzero mass, zero-probability trips in none.
struct ScenarioSpace {
  std::vector<std::size_t> active;  // 0 < p < 1
  std::vector<std::size_t> forced;  // p == 1
  double x0 = 0.0;                  // no overflow anywhere
  double x_all = 0.0;               // every trip overflows
  double floor = 0.0;               // max(x0, forced tops)
};

ScenarioSpace scenario_space(std::span<const TripStochastics> trips) {
  ScenarioSpace sp;
  for (std::size_t j = 0; j < trips.size(); ++j) {
    const auto& tr = trips[j];
    sp.x0 = std::max(sp.x0, tr.c);
    sp.x_all = std::max(sp.x_all, tr.c + tr.s);
    if (tr.p >= 1.0) {
      sp.forced.push_back(j);
    } else if (tr.p > 0.0) {
      sp.active.push_back(j);
    }
  }
  sp.floor = sp.x0;
  for (auto j : sp.forced) sp.floor = std::max(sp.floor, trips[j].c + trips[j].s);
  return sp;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double overflow_probability(std::span<const double> mean_demands, const DemandModel& model, double capacity) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double q : mean_demands) {
    sum += q;
    sum_sq += q * q;
  }
  if (model.k <= 0.0 || sum_sq <= 0.0) return sum > capacity ? 1.0 : 0.0;
  const double z = (capacity - sum) / (model.k * std::sqrt(sum_sq));
  // 1 - Phi(z) written as Phi(-z) to keep the upper tail accurate.
  return normal_cdf(-z);
}

double overflow_probability(const Trip& trip, const TaskGraph& graph, const DemandModel& model, double capacity) {
  std::vector<double> q;
  q.reserve(trip.tasks.size());
  for (ArcId a : trip.tasks) q.push_back(graph.arc(a).demand);
  return overflow_probability(q, model, capacity);
}

double recourse_cost(const Trip& trip, const TaskGraph& graph) {
  if (trip.tasks.empty()) return 0.0;
  const ArcId b = trip.tasks.back();
  const ArcId a = trip.tasks.size() >= 2 ? trip.tasks[trip.tasks.size() - 2] : TaskGraph::kDepot;
  const double s = graph.dist(a, TaskGraph::kDepot) + graph.dist(TaskGraph::kDepot, b) - graph.dist(a, b);
  return std::max(0.0, s);
}

std::vector<TripStochastics> trip_stochastics(const Solution& sol, const TaskGraph& graph, const DemandModel& model,
                                              double capacity) {
  std::vector<TripStochastics> out;
  out.reserve(sol.trips.size());
  std::vector<double> q;
  for (const auto& trip : sol.trips) {
    q.clear();
    for (ArcId a : trip.tasks) q.push_back(graph.arc(a).demand);
    out.push_back(TripStochastics{overflow_probability(q, model, capacity), recourse_cost(trip, graph), trip.cost});
  }
  return out;
}

Moments cost_moments(std::span<const TripStochastics> trips, double h) {
  double mean = h;
  double var = 0.0;
  for (const auto& tr : trips) {
    mean += tr.s * tr.p;
    var += tr.s * tr.s * (tr.p - tr.p * tr.p);
  }
  return {mean, std::sqrt(std::max(0.0, var))};
}

Moments trip_count_moments(std::span<const TripStochastics> trips, int t) {
  double mean = t;
  double var = 0.0;
  for (const auto& tr : trips) {
    mean += tr.p;
    var += tr.p - tr.p * tr.p;
  }
  return {mean, std::sqrt(std::max(0.0, var))};
}

std::vector<double> extra_trip_distribution(std::span<const TripStochastics> trips) {
  std::vector<double> dist(trips.size() + 1, 0.0);
  dist[0] = 1.0;
  std::size_t used = 0;
  for (const auto& tr : trips) {
    ++used;
    for (std::size_t m = used; m > 0; --m) {
      dist[m] = dist[m] * (1.0 - tr.p) + dist[m - 1] * tr.p;
    }
    dist[0] *= 1.0 - tr.p;
  }
  return dist;
}

MakespanMoments makespan_moments_exact(std::span<const TripStochastics> trips, int threshold) {
  if (static_cast<long long>(trips.size()) > threshold) {
    throw CapabilityError("exact makespan enumeration needs t <= " + std::to_string(threshold) + ", got t = " +
                          std::to_string(trips.size()));
  }
  const auto sp = scenario_space(trips);
  const std::size_t a = sp.active.size();
  const std::uint64_t count = std::uint64_t{1} << a;

  auto scenario = [&](std::uint64_t mask, double& prob, double& value) {
    prob = 1.0;
    value = sp.floor;
    for (std::size_t i = 0; i < a; ++i) {
      const auto& tr = trips[sp.active[i]];
      if (mask >> i & 1U) {
        prob *= tr.p;
        value = std::max(value, tr.c + tr.s);
      } else {
        prob *= 1.0 - tr.p;
      }
    }
  };

  double mean = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double prob = 0.0;
    double value = 0.0;
    scenario(mask, prob, value);
    mean += prob * value;
  }
  double var = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double prob = 0.0;
    double value = 0.0;
    scenario(mask, prob, value);
    var += prob * (value - mean) * (value - mean);
  }
  MakespanMoments out;
  out.mean = mean;
  out.sigma = std::sqrt(std::max(0.0, var));
  out.e = out.e_hi = mean;
  out.c_lo = out.c_hi = var + mean * mean;
  return out;
}

MakespanMoments makespan_moments_truncated(std::span<const TripStochastics> trips) {
  const auto sp = scenario_space(trips);
  double mass = 0.0;
  double first = 0.0;
  double second = 0.0;
  bool complete = false;

  if (sp.forced.size() <= 3) {
    const std::size_t budget = 3 - sp.forced.size();
    const std::size_t a = sp.active.size();
    complete = a <= budget;

    double base = 1.0;
    std::vector<double> ratio(a);
    std::vector<double> top(a);
    for (std::size_t i = 0; i < a; ++i) {
      const auto& tr = trips[sp.active[i]];
      base *= 1.0 - tr.p;
      ratio[i] = tr.p / (1.0 - tr.p);
      top[i] = tr.c + tr.s;
    }
    auto add = [&](double prob, double value) {
      mass += prob;
      first += prob * value;
      second += prob * value * value;
    };

    add(base, sp.floor);
    if (budget >= 1) {
      for (std::size_t u = 0; u < a; ++u) {
        const double pu = base * ratio[u];
        const double xu = std::max(sp.floor, top[u]);
        add(pu, xu);
        if (budget < 2) continue;
        for (std::size_t v = 0; v < u; ++v) {
          const double puv = pu * ratio[v];
          const double xuv = std::max(xu, top[v]);
          add(puv, xuv);
          if (budget < 3) continue;
          for (std::size_t w = 0; w < v; ++w) {
            add(puv * ratio[w], std::max(xuv, top[w]));
          }
        }
      }
    }
  }

  const double residual = complete ? 0.0 : std::max(0.0, 1.0 - mass);
  MakespanMoments out;
  out.e = first + sp.x0 * residual;
  out.e_hi = first + sp.x_all * residual;
  out.c_lo = second + sp.x0 * sp.x0 * residual;
  out.c_hi = second + sp.x_all * sp.x_all * residual;
  out.mean = 0.5 * (out.e + out.e_hi);
  out.sigma = 0.5 * (std::sqrt(std::max(0.0, out.c_lo - out.e_hi * out.e_hi)) +
                     std::sqrt(std::max(0.0, out.c_hi - out.e * out.e)));
  return out;
}

std::pair<double, double> fitness(const StochasticEval& eval, const Penalties& pen) {
  return {eval.h_bar + pen.rho * eval.sigma_h, eval.m_bar + pen.mu * eval.sigma_m};
}

StochasticEval evaluate_stochastic(const Solution& sol, const TaskGraph& graph, double capacity,
                                   const EvalOptions& opts) {
  const auto trips = trip_stochastics(sol, graph, opts.model, capacity);
  StochasticEval ev;
  const auto cost = cost_moments(trips, sol.h);
  ev.h_bar = cost.mean;
  ev.sigma_h = cost.sigma;
  const auto count = trip_count_moments(trips, sol.t);
  ev.t_bar = count.mean;
  ev.sigma_t = count.sigma;
  const auto mk = opts.method == MakespanMethod::kExact ? makespan_moments_exact(trips, opts.exact_threshold)
                                                        : makespan_moments_truncated(trips);
  ev.m_bar = mk.mean;
  ev.sigma_m = mk.sigma;
  ev.e = mk.e;
  ev.e_hi = mk.e_hi;
  ev.c_lo = mk.c_lo;
  ev.c_hi = mk.c_hi;
  ev.method = opts.method;
  std::tie(ev.f1, ev.f2) = fitness(ev, opts.penalties);
  return ev;
}

}  // namespace scarp
