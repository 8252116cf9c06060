#include "scarp/replication.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace scarp {
namespace {

constexpr int kResampleCap = 1'000'000;

Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

struct Summary {
  double mean = 0.0;
  double sigma = 0.0;  // corrected
};

Summary summarize(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  Summary s;
  for (double x : xs) s.mean += x;
  s.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double population = std::sqrt(ss / n);
  s.sigma = population * std::sqrt(n / (n - 1.0));
  return s;
}

std::optional<double> deviation_gap(double analytical, double empirical) {
  if (analytical > 0.0) return (analytical - empirical) / analytical * 100.0;
  if (empirical == 0.0) return 0.0;
  return std::nullopt;
}

}  // namespace

std::vector<double> sample_demands(const TaskGraph& graph, const DemandModel& model, double capacity, Rng& rng,
                                   int* clamped) {
  std::vector<double> out(graph.edge_count());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const double q = graph.required_edge(static_cast<int>(e)).demand;
    if (model.k <= 0.0) {
      out[e] = q;
      continue;
    }
    std::normal_distribution<double> law(q, model.k * q);
    double x = law(rng);
    int tries = 1;
    while ((x <= 0.0 || x > capacity) && tries < kResampleCap) {
      x = law(rng);
      ++tries;
    }
    if (x <= 0.0 || x > capacity) {
      x = std::clamp(x, std::nextafter(0.0, 1.0), capacity);
      if (clamped) ++*clamped;
    }
    out[e] = x;
  }
  return out;
}

ScenarioOutcome simulate_execution(const Solution& sol, std::span<const double> realized, const TaskGraph& graph,
                                   double capacity) {
  ScenarioOutcome out;
  out.t = sol.t;
  out.returns.reserve(sol.trips.size());
  for (const auto& trip : sol.trips) {
    double duration = trip.cost;
    double load = 0.0;
    int returns = 0;
    ArcId prev = TaskGraph::kDepot;
    for (ArcId b : trip.tasks) {
      const double d = realized[static_cast<std::size_t>(graph.edge_of(b))];
      if (load > 0.0 && load + d > capacity) {
        duration += graph.dist(prev, TaskGraph::kDepot) + graph.dist(TaskGraph::kDepot, b) - graph.dist(prev, b);
        ++returns;
        load = 0.0;
      }
      load += d;
      prev = b;
    }
    out.h += duration;
    out.m = std::max(out.m, duration);
    out.t += returns;
    out.returns.push_back(returns);
  }
  return out;
}

ReplicationReport replicate(const Solution& sol, const TaskGraph& graph, const StochasticEval& analytical,
                            const ReplicationConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("replication count must be at least 2");
  const auto n = static_cast<std::size_t>(cfg.n);
  const std::size_t trips = sol.trips.size();

  std::vector<double> hs(n);
  std::vector<double> ms(n);
  std::vector<double> ts(n);
  std::vector<std::vector<int>> returns(n);
  std::vector<int> clamped(n, 0);

  auto run_block = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = substream(cfg.seed, i);
      const auto demands = sample_demands(graph, cfg.model, cfg.capacity, rng, &clamped[i]);
      auto outcome = simulate_execution(sol, demands, graph, cfg.capacity);
      hs[i] = outcome.h;
      ms[i] = outcome.m;
      ts[i] = outcome.t;
      returns[i] = std::move(outcome.returns);
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
  if (workers == 1) {
    run_block(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t lo = 0; lo < n; lo += block) pool.emplace_back(run_block, lo, std::min(n, lo + block));
    for (auto& t : pool) t.join();
  }

  ReplicationReport r;
  r.n = cfg.n;
  r.seed = cfg.seed;
  r.h_bar = analytical.h_bar;
  r.sigma_h = analytical.sigma_h;
  r.m_bar = analytical.m_bar;
  r.sigma_m = analytical.sigma_m;
  r.t_bar = analytical.t_bar;
  r.sigma_t = analytical.sigma_t;

  const auto h = summarize(hs);
  const auto m = summarize(ms);
  const auto t = summarize(ts);
  r.h_hat = h.mean;
  r.sigma_h_hat = h.sigma;
  r.m_hat = m.mean;
  r.sigma_m_hat = m.sigma;
  r.t_hat = t.mean;
  r.sigma_t_hat = t.sigma;

  r.gaps.e_h = percent_gap(r.h_bar, r.h_hat);
  r.gaps.e_m = percent_gap(r.m_bar, r.m_hat);
  r.gaps.e_sh = deviation_gap(r.sigma_h, r.sigma_h_hat);
  r.gaps.e_sm = deviation_gap(r.sigma_m, r.sigma_m_hat);

  r.overflow_rate.assign(trips, 0.0);
  r.h2_violation_rate.assign(trips, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    r.clamped_draws += clamped[i];
    for (std::size_t j = 0; j < trips; ++j) {
      if (returns[i][j] >= 1) r.overflow_rate[j] += 1.0;
      if (returns[i][j] >= 2) r.h2_violation_rate[j] += 1.0;
    }
  }
  for (std::size_t j = 0; j < trips; ++j) {
    r.overflow_rate[j] /= static_cast<double>(n);
    r.h2_violation_rate[j] /= static_cast<double>(n);
  }
  return r;
}

double percent_gap(double candidate, double reference) { return (candidate - reference) / reference * 100.0; }

QualityReport quality_gaps(const StochasticEval& leftmost, const StochasticEval& rightmost,
                           const QualityReferences& refs) {
  QualityReport q;
  q.refs = refs;
  auto gap = [](double cand, const std::optional<double>& ref) -> std::optional<double> {
    if (!ref || *ref == 0.0) return std::nullopt;
    return percent_gap(cand, *ref);
  };
  q.e1_h = gap(leftmost.h_bar, refs.h1);
  q.e1_m = gap(leftmost.m_bar, refs.m1);
  q.e2_h = gap(rightmost.h_bar, refs.h2);
  q.e2_m = gap(rightmost.m_bar, refs.m2);
  q.e1_mono = gap(leftmost.h_bar, refs.h_mono);
  return q;
}

std::vector<SquareRecord> square_plot_data(std::span<const Individual> front) {
  std::vector<SquareRecord> out;
  out.reserve(front.size());
  for (const auto& ind : front) {
    out.push_back({ind.eval.h_bar, ind.eval.m_bar, ind.eval.sigma_h, ind.eval.sigma_m, SquareSource::kAnalytical});
  }
  return out;
}

SquareRecord square_of(const ReplicationReport& report) {
  return {report.h_hat, report.m_hat, report.sigma_h_hat, report.sigma_m_hat, SquareSource::kReplicated};
}

const char* to_string(SquareSource source) {
  return source == SquareSource::kAnalytical ? "analytical" : "replicated";
}

}  // namespace scarp
