// Monte Carlo validation of the analytical criteria: sampled demands, route
// execution with depot-return recourse, corrected statistics and gap metrics.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scarp/encoding.hpp"
#include "scarp/moga.hpp"
#include "scarp/stochastic.hpp"

namespace scarp {

struct ReplicationConfig {
  int n = 10000;
  std::uint64_t seed = 1;
  DemandModel model;
  double capacity = 0.0;
  int threads = 1;
};

/// Demand draws per required edge, truncated to (0, capacity] by resampling.
/// `clamped` counts draws that hit the resample cap and were clamped.
std::vector<double> sample_demands(const TaskGraph& graph, const DemandModel& model, double capacity, Rng& rng,
                                   int* clamped = nullptr);

struct ScenarioOutcome {
  double h = 0.0;
  double m = 0.0;
  int t = 0;
  std::vector<int> returns;  // depot returns per trip
};

/// Executes `sol` against realized demands (indexed by required edge). A
/// vehicle that cannot load the next task goes back to the depot, unloads
/// and resumes at that task; a trip may return several times.
ScenarioOutcome simulate_execution(const Solution& sol, std::span<const double> realized, const TaskGraph& graph,
                                   double capacity);

/// Gap metrics in percent. An empty optional marks a gap that is not
/// applicable (zero analytical deviation against a nonzero empirical one).
struct Gaps {
  std::optional<double> e_h;
  std::optional<double> e_m;
  std::optional<double> e_sh;
  std::optional<double> e_sm;
};

struct ReplicationReport {
  int n = 0;
  std::uint64_t seed = 0;
  // analytical side
  double h_bar = 0.0;
  double sigma_h = 0.0;
  double m_bar = 0.0;
  double sigma_m = 0.0;
  double t_bar = 0.0;
  double sigma_t = 0.0;
  // empirical side, deviations corrected by sqrt(n / (n - 1))
  double h_hat = 0.0;
  double sigma_h_hat = 0.0;
  double m_hat = 0.0;
  double sigma_m_hat = 0.0;
  double t_hat = 0.0;
  double sigma_t_hat = 0.0;
  Gaps gaps;
  std::vector<double> overflow_rate;     // P{trip j returns at least once}
  std::vector<double> h2_violation_rate;  // P{trip j returns more than once}
  int clamped_draws = 0;
};

/// Runs cfg.n independent executions; replication i draws from its own
/// stream seeded by (cfg.seed, i). `analytical` supplies the closed-form
/// values the gaps are measured against.
ReplicationReport replicate(const Solution& sol, const TaskGraph& graph, const StochasticEval& analytical,
                            const ReplicationConfig& cfg);

/// Relative gap (candidate - reference) / reference * 100.
double percent_gap(double candidate, double reference);

struct QualityReferences {
  std::optional<double> h1;
  std::optional<double> m1;
  std::optional<double> h2;
  std::optional<double> m2;
  std::optional<double> h_mono;
};

struct QualityReport {
  QualityReferences refs;
  std::optional<double> e1_h;     // leftmost H_bar vs h1
  std::optional<double> e1_m;     // leftmost M_bar vs m1
  std::optional<double> e2_h;     // rightmost H_bar vs h2
  std::optional<double> e2_m;     // rightmost M_bar vs m2
  std::optional<double> e1_mono;  // leftmost H_bar vs mono-objective reference
};

QualityReport quality_gaps(const StochasticEval& leftmost, const StochasticEval& rightmost,
                           const QualityReferences& refs);

enum class SquareSource { kAnalytical, kReplicated };

/// One solution drawn as a square centred on (H, M) with half-widths
/// (sigma_H, sigma_M).
struct SquareRecord {
  double h = 0.0;
  double m = 0.0;
  double half_h = 0.0;
  double half_m = 0.0;
  SquareSource source = SquareSource::kAnalytical;
};

std::vector<SquareRecord> square_plot_data(std::span<const Individual> front);
SquareRecord square_of(const ReplicationReport& report);

const char* to_string(SquareSource source);

}  // namespace scarp
