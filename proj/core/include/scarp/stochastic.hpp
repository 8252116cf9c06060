// Closed-form robustness criteria of a split solution under independent
// Gaussian demands N(q, (k q)^2).
//
// Each trip j overflows with probability p_j = P{sum of its demands > Q} and
// then pays one unproductive depot round trip s_j, placed just before its
// last task. Trips are independent, which gives the cost moments, the
// Poisson-binomial law of the number of extra trips, and the makespan
// moments from the 2^t overflow scenarios (enumerated exactly, or truncated
// to scenarios with at most three overflows plus residual-mass bounds).
#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scarp/encoding.hpp"

namespace scarp {

/// Raised when a requested computation exceeds a configured size limit.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sigma(Q_i) = k * q_i. k == 0 means deterministic demands.
struct DemandModel {
  double k = 0.1;
};

struct Penalties {
  double rho = 10.0;
  double mu = 10.0;
};

struct TripStochastics {
  double p = 0.0;  // overflow probability
  double s = 0.0;  // recourse detour cost
  double c = 0.0;  // planned trip cost
};

struct Moments {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Makespan mean and deviation with the bracketing bounds
/// e <= E[M] <= E_hi and c_lo <= E[M^2] <= c_hi. Exact evaluation collapses
/// both brackets.
struct MakespanMoments {
  double mean = 0.0;
  double sigma = 0.0;
  double e = 0.0;
  double e_hi = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
};

enum class MakespanMethod { kExact, kTruncated };

struct StochasticEval {
  double h_bar = 0.0;
  double sigma_h = 0.0;
  double m_bar = 0.0;
  double sigma_m = 0.0;
  double t_bar = 0.0;
  double sigma_t = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double e = 0.0;
  double e_hi = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  MakespanMethod method = MakespanMethod::kTruncated;
};

inline constexpr int kDefaultExactThreshold = 20;

/// Standard normal CDF.
double normal_cdf(double z);

double overflow_probability(std::span<const double> mean_demands, const DemandModel& model, double capacity);
double overflow_probability(const Trip& trip, const TaskGraph& graph, const DemandModel& model, double capacity);

/// Net detour of one depot return before the last task:
/// D(a, depot) + D(depot, b) - D(a, b), a the second-to-last task (or the
/// depot arc), b the last one.
double recourse_cost(const Trip& trip, const TaskGraph& graph);

std::vector<TripStochastics> trip_stochastics(const Solution& sol, const TaskGraph& graph, const DemandModel& model,
                                              double capacity);

Moments cost_moments(std::span<const TripStochastics> trips, double h);
Moments trip_count_moments(std::span<const TripStochastics> trips, int t);

/// P{exactly m trips overflow}, m = 0..t.
std::vector<double> extra_trip_distribution(std::span<const TripStochastics> trips);

/// Throws CapabilityError when trips.size() > threshold.
MakespanMoments makespan_moments_exact(std::span<const TripStochastics> trips,
                                       int threshold = kDefaultExactThreshold);
MakespanMoments makespan_moments_truncated(std::span<const TripStochastics> trips);

/// (H_bar + rho sigma_H, M_bar + mu sigma_M).
std::pair<double, double> fitness(const StochasticEval& eval, const Penalties& pen);

struct EvalOptions {
  DemandModel model;
  Penalties penalties;
  MakespanMethod method = MakespanMethod::kTruncated;
  int exact_threshold = kDefaultExactThreshold;
};

StochasticEval evaluate_stochastic(const Solution& sol, const TaskGraph& graph, double capacity,
                                   const EvalOptions& opts);

}  // namespace scarp
