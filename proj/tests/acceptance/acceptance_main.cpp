// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
// gdb instances are read from <data>/gdb/gdbN.dat; <data> defaults to the
// build-time data directory and can be overridden with SCARP_DATA_DIR.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scarp/cli.hpp"
#include "scarp/moga.hpp"
#include "scarp/replication.hpp"

namespace {

using namespace scarp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kMeanGapAvg = 0.1;     // |E_H|, |E_M| average, percent
constexpr double kMeanGapMax = 0.5;     // |E_H|, |E_M| max, percent
constexpr double kDevGapMax = 2.0;      // |E_sH|, |E_sM| max, percent
constexpr int kGdbReplications = 10000;
constexpr int kGdbCount = 23;
constexpr int kGdb1Runs = 5;
constexpr int kGdb1Hits = 3;
constexpr double kExcessMax = 3.0;      // percent, mean over gdb1..23
constexpr double kSplitSeconds = 1.0;
constexpr int kOverflowCases = 50;
constexpr int kOverflowDraws = 100000;
constexpr int kOverflowPass = 48;
constexpr double kOverflowSigmas = 3.0;
constexpr int kMakespanCases = 200;
constexpr double kMakespanRel = 1e-9;
constexpr double kDistAbs = 1e-12;
constexpr double kMomentAbs = 1e-9;
constexpr int kSortSets = 1000;

int failures = 0;

void report(bool ok, int id, const std::string& title, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void info(const std::string& text) { std::cout << "       info: " << text << std::endl; }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

std::string data_dir() {
  if (const char* env = std::getenv("SCARP_DATA_DIR"); env && *env) return env;
  return SCARP_DATA_DIR;
}

std::optional<Instance> gdb_instance(int i) {
  const auto path = fs::path(data_dir()) / "gdb" / ("gdb" + std::to_string(i) + ".dat");
  if (!fs::exists(path)) return std::nullopt;
  return load_instance(path.string());
}

std::vector<int> missing_gdb() {
  std::vector<int> out;
  for (int i = 1; i <= kGdbCount; ++i) {
    if (!fs::exists(fs::path(data_dir()) / "gdb" / ("gdb" + std::to_string(i) + ".dat"))) out.push_back(i);
  }
  return out;
}

std::string unavailable(const std::vector<int>& missing) {
  return "instance data unavailable (" + std::to_string(missing.size()) + " of " + std::to_string(kGdbCount) +
         " gdb files missing under " + (fs::path(data_dir()) / "gdb").string() + ")";
}

GAParams protocol(std::uint64_t seed) {
  GAParams p;  // defaults are the published protocol: 60, 1000, LS every 10
  p.seed = seed;
  return p;
}

struct GdbRun {
  RunResult run;
  double seconds = 0.0;
};

GdbRun solve(const TaskGraph& g, const GAParams& p, const RunHooks& hooks = {}) {
  const Evaluator eval(g, default_eval_settings(g));
  const auto start = Clock::now();
  GdbRun out;
  out.run = nsga2_run(eval, p, hooks);
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

StochasticEval analytical(const Solution& sol, const TaskGraph& g) {
  EvalOptions opts;
  opts.method = sol.t <= kDefaultExactThreshold ? MakespanMethod::kExact : MakespanMethod::kTruncated;
  return evaluate_stochastic(sol, g, g.capacity(), opts);
}

struct GapStats {
  double sum_h = 0.0, sum_m = 0.0, max_h = 0.0, max_m = 0.0, max_sh = 0.0, max_sm = 0.0;
  int count = 0;
  int not_applicable = 0;

  void add(const ReplicationReport& r) {
    ++count;
    sum_h += std::abs(r.gaps.e_h.value_or(0.0));
    sum_m += std::abs(r.gaps.e_m.value_or(0.0));
    max_h = std::max(max_h, std::abs(r.gaps.e_h.value_or(0.0)));
    max_m = std::max(max_m, std::abs(r.gaps.e_m.value_or(0.0)));
    if (!r.gaps.e_sh || !r.gaps.e_sm) ++not_applicable;
    // a not-applicable deviation gap cannot satisfy a bound on its size
    max_sh = std::max(max_sh, r.gaps.e_sh ? std::abs(*r.gaps.e_sh) : INFINITY);
    max_sm = std::max(max_sm, r.gaps.e_sm ? std::abs(*r.gaps.e_sm) : INFINITY);
  }
  [[nodiscard]] bool ok() const {
    return count > 0 && sum_h / count <= kMeanGapAvg && sum_m / count <= kMeanGapAvg && max_h <= kMeanGapMax &&
           max_m <= kMeanGapMax && max_sh <= kDevGapMax && max_sm <= kDevGapMax;
  }
  [[nodiscard]] std::string text() const {
    return "avg|E_H|=" + fmt(sum_h / std::max(1, count)) + " avg|E_M|=" + fmt(sum_m / std::max(1, count)) +
           " max|E_H|=" + fmt(max_h) + " max|E_M|=" + fmt(max_m) + " max|E_sH|=" + fmt(max_sh) +
           " max|E_sM|=" + fmt(max_sm) + " over " + std::to_string(count) + " solutions";
  }
};

ReplicationReport replicate_default(const Solution& sol, const TaskGraph& g, std::uint64_t seed) {
  ReplicationConfig cfg;
  cfg.n = kGdbReplications;
  cfg.seed = seed;
  cfg.capacity = g.capacity();
  return replicate(sol, g, analytical(sol, g), cfg);
}

// Seed-1 protocol runs on every gdb instance, shared by criteria 1, 2, 7, 8.
std::map<int, GdbRun> gdb_runs;
std::map<int, Instance> gdb_instances;

void criterion_1() {
  const auto missing = missing_gdb();
  if (!missing.empty()) {
    report(false, 1, "analytical-empirical agreement on gdb front extremes", unavailable(missing));
    // Same pipeline on synthetic gdb-sized instances, informational only.
    GapStats proxy;
    for (std::uint64_t s = 1; s <= 3; ++s) {
      testing::SyntheticSpec spec;
      spec.nodes = 11;
      spec.required = 22;
      spec.capacity = 27;
      const auto inst = testing::synthetic_instance(spec, s, "proxy" + std::to_string(s));
      const TaskGraph g(inst);
      auto p = protocol(1);
      p.iterations = 100;
      const auto run = solve(g, p);
      for (auto idx : {run.run.leftmost, run.run.rightmost}) proxy.add(replicate_default(run.run.front[idx].sol, g, 1));
    }
    info("synthetic proxy (3 instances, 100 iterations, not a pass): " + proxy.text());
    return;
  }
  GapStats stats;
  double worst_time = 0.0;
  for (int i = 1; i <= kGdbCount; ++i) {
    const TaskGraph g(gdb_instances.at(i));
    const auto& run = gdb_runs.at(i).run;
    stats.add(replicate_default(run.front[run.leftmost].sol, g, 1));
    stats.add(replicate_default(run.front[run.rightmost].sol, g, 1));
    worst_time = std::max(worst_time, gdb_runs.at(i).seconds);
  }
  report(stats.ok(), 1, "analytical-empirical agreement on gdb front extremes",
         stats.text() + "; slowest optimization " + fmt(worst_time, 1) + " s");
}

void criterion_2() {
  const auto missing = missing_gdb();
  if (!missing.empty()) {
    report(false, 2, "solution quality on gdb", unavailable(missing));
    return;
  }
  std::ifstream refs_file(fs::path(data_dir()) / "refs" / "gdb.json");
  const auto refs = cli::Json::parse(refs_file);
  const TaskGraph g1(gdb_instances.at(1));
  int hits = 0;
  std::string seen;
  for (int seed = 1; seed <= kGdb1Runs; ++seed) {
    const auto run = seed == 1 ? gdb_runs.at(1) : solve(g1, protocol(seed));
    const auto& left = run.run.front[run.run.leftmost].eval;
    const bool hit = std::abs(left.h_bar - 337.0) < 0.05 && std::abs(left.m_bar - 63.0) < 0.05;
    hits += hit;
    seen += " (" + fmt(left.h_bar, 1) + "," + fmt(left.m_bar, 1) + ")";
  }
  double excess = 0.0;
  for (int i = 1; i <= kGdbCount; ++i) {
    const double ref = refs.at("gdb" + std::to_string(i)).at("H1").get<double>();
    const auto& run = gdb_runs.at(i).run;
    excess += percent_gap(run.front[run.leftmost].eval.h_bar, ref);
  }
  excess /= kGdbCount;
  report(hits >= kGdb1Hits && excess <= kExcessMax, 2, "solution quality on gdb",
         "gdb1 leftmost hits (337,63) in " + std::to_string(hits) + "/" + std::to_string(kGdb1Runs) + " runs:" +
             seen + "; mean leftmost excess over published H1 = " + fmt(excess, 3) + "%");
}

// Every ordered, oriented sequence of distinct required edges of toy8.
void criterion_3() {
  const auto inst = load_instance((fs::path(data_dir()) / "instances" / "toy8.dat").string());
  const TaskGraph g(inst);
  const auto fw = testing::floyd_warshall(inst);
  const int edges = static_cast<int>(g.edge_count());
  long long checked = 0;
  long long mismatches = 0;
  int longest = 0;
  std::vector<ArcId> seq;
  std::vector<char> used(edges, 0);
  const auto start = Clock::now();

  std::function<void()> extend = [&] {
    if (!seq.empty()) {
      const Chromosome c{seq};
      const auto sol = split(c, g);
      std::vector<testing::OracleTask> tasks;
      for (ArcId a : seq) tasks.push_back({g.arc(a).tail, g.arc(a).head, g.arc(a).cost, g.arc(a).demand});
      const auto oracle = testing::exhaustive_split(tasks, fw, inst.depot, inst.capacity);
      if (sol.h != oracle.cost || sol.t != oracle.trips) ++mismatches;
      ++checked;
      longest = std::max(longest, static_cast<int>(seq.size()));
    }
    for (int e = 0; e < edges; ++e) {
      if (used[e]) continue;
      used[e] = 1;
      for (bool fwd : {true, false}) {
        seq.push_back(g.arc_of(e, fwd));
        extend();
        seq.pop_back();
      }
      used[e] = 0;
    }
  };
  extend();
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report(mismatches == 0 && seconds < kSplitSeconds, 3, "split optimality oracle",
         std::to_string(checked) + " sequences of 1.." + std::to_string(longest) + " tasks on an " +
             std::to_string(inst.node_count) + "-node instance, " + std::to_string(mismatches) +
             " mismatches, " + fmt(seconds, 3) + " s");
}

void criterion_4() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double ks[] = {0.05, 0.1, 0.2};
  int pass = 0;
  double worst = 0.0;
  for (int c = 0; c < kOverflowCases; ++c) {
    const double k = ks[c % 3];
    std::vector<double> q(1 + rng() % 8);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (auto& x : q) {
      x = 1.0 + std::floor(20.0 * u01(rng));
      sum += x;
      sum_sq += x * x;
    }
    // capacity within about two deviations of the mean load
    const double cap = sum + (u01(rng) * 4.0 - 2.0) * k * std::sqrt(sum_sq);
    const double p = overflow_probability(q, DemandModel{k}, cap);
    int over = 0;
    for (int d = 0; d < kOverflowDraws; ++d) {
      double total = 0.0;
      for (double x : q) total += std::normal_distribution<double>(x, k * x)(rng);
      over += total > cap;
    }
    const double freq = static_cast<double>(over) / kOverflowDraws;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / kOverflowDraws) / kOverflowDraws);
    const double z = std::abs(freq - p) / se;
    worst = std::max(worst, z);
    pass += z <= kOverflowSigmas;
  }
  report(pass >= kOverflowPass, 4, "overflow probability against Monte Carlo",
         std::to_string(pass) + "/" + std::to_string(kOverflowCases) + " trips within " + fmt(kOverflowSigmas, 0) +
             " standard errors (worst " + fmt(worst, 2) + ")");
}

void criterion_5() {
  std::mt19937_64 rng(55);
  int bad_exact = 0;
  int bad_bounds = 0;
  double worst = 0.0;
  for (int c = 0; c < kMakespanCases; ++c) {
    const auto trips = testing::random_trips(rng, 1 + c % 12);
    const auto brute = testing::brute_makespan(trips);
    const auto exact = makespan_moments_exact(trips);
    const double rel_mean = std::abs(exact.mean - brute.mean) / brute.mean;
    const double rel_second = std::abs(exact.c_lo - brute.second) / brute.second;
    worst = std::max({worst, rel_mean, rel_second});
    bad_exact += rel_mean > kMakespanRel || rel_second > kMakespanRel;
    const auto tr = makespan_moments_truncated(trips);
    const double slack = kMakespanRel * brute.second;
    bad_bounds += !(tr.e <= brute.mean + slack && brute.mean <= tr.e_hi + slack && tr.c_lo <= brute.second + slack &&
                    brute.second <= tr.c_hi + slack);
  }
  report(bad_exact == 0 && bad_bounds == 0, 5, "makespan moments against enumeration",
         std::to_string(kMakespanCases) + " cases t<=12, worst relative error " + fmt(worst * 1e9, 3) +
             "e-9, exact mismatches " + std::to_string(bad_exact) + ", bound violations " +
             std::to_string(bad_bounds));
}

void criterion_6() {
  std::mt19937_64 rng(66);
  double worst_dist = 0.0;
  double worst_moment = 0.0;
  for (int c = 0; c < 200; ++c) {
    const auto trips = testing::random_trips(rng, 1 + c % 12);
    const auto dist = extra_trip_distribution(trips);
    const auto brute = testing::brute_overflow_count(trips);
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t m = 0; m < dist.size(); ++m) {
      worst_dist = std::max(worst_dist, std::abs(dist[m] - brute[m]));
      mean += static_cast<double>(m) * dist[m];
      second += static_cast<double>(m * m) * dist[m];
    }
    const int t = static_cast<int>(trips.size());
    const auto mom = trip_count_moments(trips, t);
    worst_moment = std::max(worst_moment, std::abs(mom.mean - (t + mean)));
    worst_moment =
        std::max(worst_moment, std::abs(mom.sigma * mom.sigma - std::max(0.0, second - mean * mean)));
  }
  report(worst_dist <= kDistAbs && worst_moment <= kMomentAbs, 6, "extra-trip distribution against enumeration",
         "worst probability error " + fmt(worst_dist * 1e12, 3) + "e-12, worst moment error " +
             fmt(worst_moment * 1e9, 3) + "e-9");
}

std::string front_bytes(const RunResult& run, const TaskGraph& g) {
  std::string out;
  for (const auto& ind : run.front) {
    out += cli::solution_to_json(ind.sol, g).dump() + cli::eval_to_json(ind.eval).dump() + "\n";
  }
  return out;
}

void criterion_7() {
  std::mt19937_64 rng(77);
  int sort_bad = 0;
  for (int s = 0; s < kSortSets; ++s) {
    std::uniform_int_distribution<int> coord(0, s % 2 ? 8 : 10000);
    std::vector<Objectives> pts(2 + s % 60);
    std::vector<std::pair<double, double>> raw;
    for (auto& p : pts) {
      p = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
      raw.emplace_back(p.f1, p.f2);
    }
    const auto ranks = testing::pairwise_ranks(raw);
    const auto fronts = non_dominated_sort(pts);
    for (std::size_t r = 0; r < fronts.size(); ++r)
      for (auto i : fronts[r]) sort_bad += ranks[i] != static_cast<int>(r) + 1;
  }
  int crowd_bad = 0;
  for (int s = 0; s < 200; ++s) {
    std::vector<Objectives> front;
    for (int i = 0; i < 3 + s % 30; ++i) front.push_back({static_cast<double>(i), static_cast<double>(100 - 3 * i)});
    std::shuffle(front.begin(), front.end(), rng);
    const auto d = crowding_distance(front);
    for (std::size_t i = 0; i < front.size(); ++i) {
      const bool extreme = front[i].f1 == 0.0 || front[i].f1 == static_cast<double>(front.size() - 1);
      crowd_bad += extreme != std::isinf(d[i]);
    }
  }
  const std::string pure = std::to_string(kSortSets) + " point sets, " + std::to_string(sort_bad) +
                           " rank mismatches; crowding extreme errors " + std::to_string(crowd_bad);

  const auto missing = missing_gdb();
  if (std::find(missing.begin(), missing.end(), 1) != missing.end()) {
    report(false, 7, "NSGA-II properties", pure + "; gdb1 run checks: " + unavailable(missing));
    testing::SyntheticSpec spec;
    spec.nodes = 12;
    spec.required = 22;
    spec.capacity = 5 * 6;
    const auto inst = testing::synthetic_instance(spec, 1, "proxy");
    const TaskGraph g(inst);
    auto p = protocol(9);
    p.iterations = 100;
    bool sizes = true;
    RunHooks hooks;
    hooks.on_iteration = [&](int, std::span<const Individual> pop) { sizes &= pop.size() == 60; };
    const auto a = solve(g, p, hooks);
    const auto b = solve(g, p);
    info(std::string("synthetic proxy (100 iterations, not a pass): population invariant ") +
         (sizes ? "held" : "broken") + ", same-seed fronts " +
         (front_bytes(a.run, g) == front_bytes(b.run, g) ? "byte-identical" : "differ"));
    return;
  }
  const TaskGraph g(gdb_instances.at(1));
  bool sizes = true;
  RunHooks hooks;
  hooks.on_iteration = [&](int, std::span<const Individual> pop) { sizes &= pop.size() == 60; };
  const auto again = solve(g, protocol(1), hooks);
  const bool same = front_bytes(again.run, g) == front_bytes(gdb_runs.at(1).run, g);
  report(sort_bad == 0 && crowd_bad == 0 && sizes && same, 7, "NSGA-II properties",
         pure + "; gdb1 population size " + (sizes ? "constant" : "changed") + "; same-seed rerun " +
             (same ? "byte-identical" : "differs"));
}

void criterion_8() {
  const auto inst = load_instance((fs::path(data_dir()) / "instances" / "figure1.dat").string());
  const TaskGraph g(inst);
  std::vector<Trip> trips;
  trips.push_back(make_trip(g, {g.arc_of(0, true), g.arc_of(1, true), g.arc_of(2, true)}));
  trips.push_back(make_trip(g, {g.arc_of(3, true), g.arc_of(4, true)}));
  trips.push_back(make_trip(g, {g.arc_of(5, true), g.arc_of(6, true), g.arc_of(7, true), g.arc_of(8, true)}));
  const auto sol = make_solution(std::move(trips));
  const std::vector<double> realized{1, 1, 1, 1, 1, 1, 1, 1.2, 1};
  const auto out = simulate_execution(sol, realized, g, inst.capacity);
  const bool figure = sol.h == 100.0 && out.h == 125.0 && out.t == 4;
  const std::string fig = "figure-1 scenario H=" + fmt(out.h, 1) + " T=" + std::to_string(out.t);

  const auto missing = missing_gdb();
  if (!missing.empty()) {
    report(false, 8, "simulator consistency", fig + "; gdb final fronts: " + unavailable(missing));
    int checked = 0;
    int bad = 0;
    for (std::uint64_t s = 1; s <= 3; ++s) {
      testing::SyntheticSpec spec;
      spec.nodes = 11;
      spec.required = 22;
      spec.capacity = 27;
      const auto syn = testing::synthetic_instance(spec, s);
      const TaskGraph sg(syn);
      auto p = protocol(1);
      p.iterations = 50;
      for (const auto& ind : solve(sg, p).run.front) {
        std::vector<double> mean;
        for (int e = 0; e < static_cast<int>(sg.edge_count()); ++e) mean.push_back(sg.required_edge(e).demand);
        const auto o = simulate_execution(ind.sol, mean, sg, sg.capacity());
        bad += o.h != ind.sol.h || o.m != ind.sol.m || o.t != ind.sol.t;
        ++checked;
      }
    }
    info("synthetic proxy (not a pass): " + std::to_string(bad) + " of " + std::to_string(checked) +
         " final-front solutions differ from (h, m, t)");
    return;
  }
  int checked = 0;
  int bad = 0;
  for (int i = 1; i <= kGdbCount; ++i) {
    const TaskGraph gg(gdb_instances.at(i));
    std::vector<double> mean;
    for (int e = 0; e < static_cast<int>(gg.edge_count()); ++e) mean.push_back(gg.required_edge(e).demand);
    for (const auto& ind : gdb_runs.at(i).run.front) {
      const auto o = simulate_execution(ind.sol, mean, gg, gg.capacity());
      bad += o.h != ind.sol.h || o.m != ind.sol.m || o.t != ind.sol.t;
      ++checked;
    }
  }
  report(figure && bad == 0, 8, "simulator consistency",
         fig + "; " + std::to_string(checked) + " gdb final-front solutions, " + std::to_string(bad) + " mismatches");
}

}  // namespace

int main() {
  std::cout << "data directory: " << data_dir() << std::endl;
  if (missing_gdb().empty()) {
    for (int i = 1; i <= kGdbCount; ++i) {
      gdb_instances.emplace(i, *gdb_instance(i));
      const TaskGraph g(gdb_instances.at(i));
      gdb_runs.emplace(i, solve(g, protocol(1)));
      info("gdb" + std::to_string(i) + " solved in " + fmt(gdb_runs.at(i).seconds, 1) + " s");
    }
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
