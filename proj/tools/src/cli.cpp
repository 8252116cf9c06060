#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "scarp/cli.hpp"

namespace scarp::cli {
namespace {

void add_model_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--k", cfg.model.k, "demand deviation ratio, sigma_i = k q_i")->check(CLI::NonNegativeNumber);
  app.add_option("--rho", cfg.penalties.rho, "weight of sigma_H in f1")->check(CLI::NonNegativeNumber);
  app.add_option("--mu", cfg.penalties.mu, "weight of sigma_M in f2")->check(CLI::NonNegativeNumber);
  app.add_option("--exact-threshold", cfg.ga.exact_threshold, "largest trip count for exact makespan enumeration")
      ->check(CLI::Range(0, 30));
}

void add_output_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--out", cfg.out, "output file (default: stdout)");
  app.add_option("--format", cfg.format, "json or csv")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::kJson}, {"csv", Format::kCsv}},
                                          CLI::ignore_case));
}

void add_ga_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--pop", cfg.ga.population, "population size (even)")->check(CLI::PositiveNumber);
  app.add_option("--iters", cfg.ga.iterations, "number of iterations")->check(CLI::NonNegativeNumber);
  app.add_option("--ls-period", cfg.ga.ls_period, "local search every this many iterations")
      ->check(CLI::PositiveNumber);
  app.add_option("--mutation-rate", cfg.ga.mutation_rate, "probability of mutating a child")
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--greedy-seed", cfg.ga.greedy_seed, "put a nearest-neighbour tour in the initial population");
  app.add_option("--capacity-override", cfg.capacity_override, "split capacity Q' <= Q (slack approach)");
}

void add_common(CLI::App& app, RunConfig& cfg) {
  app.add_option("--seed", cfg.ga.seed, "random seed");
  app.add_option("--threads", cfg.ga.threads, "worker threads")->check(CLI::PositiveNumber);
}

std::string render(const SolveOutput& result, Format format) {
  if (format == Format::kCsv) return result.csv;
  return result.json.dump(2) + "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Bi-objective stochastic arc routing: optimize, evaluate and replicate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scarp 0.1.0");

  auto* solve = app.add_subcommand("solve", "run the optimizer and write the front-1 archive");
  solve->add_option("--instance", cfg.instance, "instance file")->required();
  solve->add_option("--refs", cfg.refs, "reference values (JSON) for the quality gaps");
  add_ga_options(*solve, cfg);
  add_model_options(*solve, cfg);
  add_output_options(*solve, cfg);
  add_common(*solve, cfg);

  auto* evaluate = app.add_subcommand("evaluate", "analytical criteria of stored solutions");
  evaluate->add_option("--instance", cfg.instance, "instance file")->required();
  evaluate->add_option("--solution", cfg.solution, "solution or archive file")->required();
  evaluate->add_option("--select", cfg.select, "all, leftmost, rightmost or an index");
  evaluate->add_flag("--exact", cfg.exact, "force exact makespan enumeration");
  add_model_options(*evaluate, cfg);
  add_output_options(*evaluate, cfg);

  auto* rep = app.add_subcommand("replicate", "Monte Carlo replication of stored solutions");
  rep->add_option("--instance", cfg.instance, "instance file")->required();
  rep->add_option("--solution", cfg.solution, "solution or archive file")->required();
  rep->add_option("--select", cfg.select, "all, leftmost, rightmost or an index");
  rep->add_option("--n", cfg.replications, "number of replications")->check(CLI::Range(2, 100'000'000));
  rep->add_flag("--exact", cfg.exact, "force exact makespan enumeration for the analytical side");
  add_model_options(*rep, cfg);
  add_output_options(*rep, cfg);
  add_common(*rep, cfg);

  auto* report = app.add_subcommand("report", "solve and replicate every instance of a directory");
  report->add_option("--instance", cfg.instance, "directory of .dat instances")->required();
  report->add_option("--refs", cfg.refs, "reference values (JSON)");
  report->add_option("--n", cfg.replications, "replications per extreme solution")->check(CLI::Range(2, 100'000'000));
  add_ga_options(*report, cfg);
  add_model_options(*report, cfg);
  add_output_options(*report, cfg);
  add_common(*report, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (cfg.ga.population % 2 != 0) throw std::invalid_argument("--pop must be even");
    SolveOutput result;
    if (solve->parsed()) {
      result = cmd_solve(cfg, err);
    } else if (evaluate->parsed()) {
      result = cmd_evaluate(cfg, err);
    } else if (rep->parsed()) {
      result = cmd_replicate(cfg, err);
    } else {
      result = cmd_report(cfg, err);
    }
    const std::string text = render(result, cfg.format);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file || !(file << text)) throw IoError("cannot write output file '" + cfg.out + "'");
    }
    return kOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kSchema;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapability;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace scarp::cli
