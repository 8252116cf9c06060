#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ios>
#include <ostream>
#include <sstream>

#include "scarp/cli.hpp"

namespace scarp::cli {
namespace {

namespace fs = std::filesystem;

Instance read_instance(const std::string& path) {
  try {
    return load_instance(path);
  } catch (const std::ios_base::failure&) {
    throw IoError("cannot read instance file '" + path + "'");
  } catch (const ParseError& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": not valid JSON (" + e.what() + ")");
  }
}

EvalSettings settings_for(const RunConfig& cfg, const TaskGraph& graph) {
  EvalSettings s = default_eval_settings(graph);
  if (cfg.capacity_override) {
    if (!(*cfg.capacity_override > 0.0) || *cfg.capacity_override > graph.capacity()) {
      throw std::invalid_argument("--capacity-override must lie in (0, Q], Q = " + number_text(graph.capacity()));
    }
    s.split_capacity = *cfg.capacity_override;
  }
  s.options.model = cfg.model;
  s.options.penalties = cfg.penalties;
  s.options.exact_threshold = cfg.ga.exact_threshold;
  return s;
}

// Exact enumeration whenever it is affordable; --exact makes it mandatory.
StochasticEval analytical(const Solution& sol, const TaskGraph& graph, const RunConfig& cfg) {
  EvalOptions opts;
  opts.model = cfg.model;
  opts.penalties = cfg.penalties;
  opts.exact_threshold = cfg.ga.exact_threshold;
  const bool affordable = sol.t <= cfg.ga.exact_threshold;
  opts.method = (cfg.exact || affordable) ? MakespanMethod::kExact : MakespanMethod::kTruncated;
  return evaluate_stochastic(sol, graph, graph.capacity(), opts);
}

Json merge(Json a, const Json& b) {
  for (const auto& [key, value] : b.items()) a[key] = value;
  return a;
}

Json square_to_json(const SquareRecord& s) {
  return Json{{"h", round6(s.h)},
              {"m", round6(s.m)},
              {"half_h", round6(s.half_h)},
              {"half_m", round6(s.half_m)},
              {"source", to_string(s.source)}};
}

// CSV cells are the JSON texts of the same values.
std::string csv_table(const std::vector<std::string>& header, const std::vector<Json>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& cell = row.at(header[i]);
      out << (i ? "," : "") << (cell.is_string() ? cell.get<std::string>() : cell.dump());
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::size_t> selected(const LoadedSolutions& loaded, const std::string& select) {
  std::vector<std::size_t> out;
  if (select == "all") {
    for (std::size_t i = 0; i < loaded.solutions.size(); ++i) out.push_back(i);
  } else if (select == "leftmost" || select == "rightmost") {
    const auto& idx = select == "leftmost" ? loaded.leftmost : loaded.rightmost;
    if (!idx) throw SchemaError("solution file has no '" + select + "' entry");
    out.push_back(*idx);
  } else {
    std::size_t pos = 0;
    unsigned long i = 0;
    try {
      i = std::stoul(select, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != select.size() || select.empty()) {
      throw std::invalid_argument("--select must be all, leftmost, rightmost or an index");
    }
    if (i >= loaded.solutions.size()) throw SchemaError("--select index " + select + " is out of range");
    out.push_back(i);
  }
  return out;
}

Json model_json(const RunConfig& cfg) {
  return Json{{"k", round6(cfg.model.k)}, {"rho", round6(cfg.penalties.rho)}, {"mu", round6(cfg.penalties.mu)}};
}

const std::vector<std::string> kSolveColumns = {"index", "h",       "m",     "t",       "h_bar", "sigma_h",
                                                "m_bar", "sigma_m", "t_bar", "sigma_t", "f1",    "f2"};

Json solve_row(std::size_t index, const Individual& ind) {
  Json row{{"index", index},           {"h", round6(ind.sol.h)},      {"m", round6(ind.sol.m)},
           {"t", ind.sol.t},           {"h_bar", round6(ind.eval.h_bar)}, {"sigma_h", round6(ind.eval.sigma_h)},
           {"m_bar", round6(ind.eval.m_bar)}, {"sigma_m", round6(ind.eval.sigma_m)},
           {"t_bar", round6(ind.eval.t_bar)}, {"sigma_t", round6(ind.eval.sigma_t)},
           {"f1", round6(ind.eval.f1)},   {"f2", round6(ind.eval.f2)}};
  return row;
}

struct SolvedInstance {
  Instance inst;
  RunResult run;
  double seconds = 0.0;
};

SolvedInstance solve_instance(const std::string& path, const RunConfig& cfg) {
  SolvedInstance out;
  out.inst = read_instance(path);
  const TaskGraph graph(out.inst);
  const Evaluator eval(graph, settings_for(cfg, graph));
  const auto start = std::chrono::steady_clock::now();
  out.run = nsga2_run(eval, cfg.ga);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::optional<QualityReferences> references_for(const RunConfig& cfg, const Instance& inst, const std::string& path) {
  if (cfg.refs.empty()) return std::nullopt;
  return find_references(read_json(cfg.refs), inst.name, fs::path(path).stem().string());
}

}  // namespace

SolveOutput cmd_solve(const RunConfig& cfg, std::ostream& log) {
  auto solved = solve_instance(cfg.instance, cfg);
  const TaskGraph graph(solved.inst);
  const auto& run = solved.run;

  Json solutions = Json::array();
  std::vector<Json> rows;
  for (std::size_t i = 0; i < run.front.size(); ++i) {
    const auto& ind = run.front[i];
    solutions.push_back(merge(solution_to_json(ind.sol, graph), eval_to_json(ind.eval)));
    rows.push_back(solve_row(i, ind));
  }
  Json squares = Json::array();
  for (const auto& s : square_plot_data(run.front)) squares.push_back(square_to_json(s));

  Json out;
  out["format"] = "scarp-archive/1";
  out["instance"] = solved.inst.name;
  out["config"] = merge(Json{{"seed", cfg.ga.seed},
                             {"population", cfg.ga.population},
                             {"iterations", cfg.ga.iterations},
                             {"ls_period", cfg.ga.ls_period},
                             {"mutation_rate", round6(cfg.ga.mutation_rate)},
                             {"capacity", round6(graph.capacity())},
                             {"split_capacity", round6(cfg.capacity_override.value_or(graph.capacity()))}},
                        model_json(cfg));
  out["solutions"] = std::move(solutions);
  out["leftmost"] = run.leftmost;
  out["rightmost"] = run.rightmost;
  out["squares"] = std::move(squares);
  if (auto refs = references_for(cfg, solved.inst, cfg.instance)) {
    out["quality"] = quality_to_json(quality_gaps(run.front[run.leftmost].eval, run.front[run.rightmost].eval, *refs));
  }

  log << solved.inst.name << ": " << run.front.size() << " front-1 solutions, " << run.evaluations
      << " evaluations, wall time " << solved.seconds << " s\n";
  return {std::move(out), csv_table(kSolveColumns, rows)};
}

SolveOutput cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const Instance inst = read_instance(cfg.instance);
  const TaskGraph graph(inst);
  const auto loaded = solutions_from_json(read_json(cfg.solution), graph);

  Json results = Json::array();
  std::vector<Json> rows;
  for (std::size_t i : selected(loaded, cfg.select)) {
    const auto& sol = loaded.solutions[i];
    const auto ev = analytical(sol, graph, cfg);
    Json row = merge(Json{{"index", i}, {"h", round6(sol.h)}, {"m", round6(sol.m)}, {"t", sol.t}}, eval_to_json(ev));
    rows.push_back(row);
    results.push_back(std::move(row));
  }
  Json out;
  out["format"] = "scarp-evaluation/1";
  out["instance"] = inst.name;
  out["model"] = model_json(cfg);
  out["results"] = std::move(results);
  log << inst.name << ": evaluated " << rows.size() << " solution(s)\n";
  return {std::move(out), csv_table({"index", "h", "m", "t", "h_bar", "sigma_h", "m_bar", "sigma_m", "t_bar",
                                     "sigma_t", "f1", "f2", "method"},
                                    rows)};
}

SolveOutput cmd_replicate(const RunConfig& cfg, std::ostream& log) {
  const Instance inst = read_instance(cfg.instance);
  const TaskGraph graph(inst);
  const auto loaded = solutions_from_json(read_json(cfg.solution), graph);

  ReplicationConfig rc;
  rc.n = cfg.replications;
  rc.seed = cfg.ga.seed;
  rc.model = cfg.model;
  rc.capacity = graph.capacity();
  rc.threads = cfg.ga.threads;
  if (rc.n < 2) throw std::invalid_argument("--n must be at least 2");

  Json results = Json::array();
  std::vector<Json> rows;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i : selected(loaded, cfg.select)) {
    const auto& sol = loaded.solutions[i];
    const auto ev = analytical(sol, graph, cfg);
    const auto report = replicate(sol, graph, ev, rc);
    Json r = merge(Json{{"index", i}}, replication_to_json(report));
    const SquareRecord analytic{ev.h_bar, ev.m_bar, ev.sigma_h, ev.sigma_m, SquareSource::kAnalytical};
    r["squares"] = Json::array({square_to_json(analytic), square_to_json(square_of(report))});
    Json row{{"index", i}};
    for (const char* key : {"h_bar", "m_bar", "sigma_h", "sigma_m", "h_hat", "m_hat", "sigma_h_hat", "sigma_m_hat"}) {
      row[key] = r[key];
    }
    for (const char* key : {"e_h", "e_m", "e_sh", "e_sm"}) row[key] = r["gaps"][key];
    rows.push_back(std::move(row));
    results.push_back(std::move(r));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json out;
  out["format"] = "scarp-replication/1";
  out["instance"] = inst.name;
  out["model"] = model_json(cfg);
  out["results"] = std::move(results);
  log << inst.name << ": " << rows.size() << " solution(s) x " << rc.n << " replications, wall time " << seconds
      << " s\n";
  return {std::move(out), csv_table({"index", "h_bar", "m_bar", "sigma_h", "sigma_m", "h_hat", "m_hat",
                                     "sigma_h_hat", "sigma_m_hat", "e_h", "e_m", "e_sh", "e_sm"},
                                    rows)};
}

SolveOutput cmd_report(const RunConfig& cfg, std::ostream& log) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(cfg.instance, ec)) throw IoError("cannot read instance directory '" + cfg.instance + "'");
  for (const auto& entry : fs::directory_iterator(cfg.instance, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".dat") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list instance directory '" + cfg.instance + "'");
  if (files.empty()) throw IoError("no .dat instances in '" + cfg.instance + "'");
  // Natural order so gdb2 comes before gdb10.
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    const auto sa = a.stem().string();
    const auto sb = b.stem().string();
    auto split_num = [](const std::string& s) {
      std::size_t i = s.size();
      while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
      const long n = i < s.size() ? std::stol(s.substr(i)) : -1;
      return std::make_pair(s.substr(0, i), n);
    };
    return split_num(sa) < split_num(sb);
  });

  const Json refs = cfg.refs.empty() ? Json::object() : read_json(cfg.refs);
  ReplicationConfig rc;
  rc.n = cfg.replications;
  rc.seed = cfg.ga.seed;
  rc.model = cfg.model;
  rc.threads = cfg.ga.threads;

  Json table = Json::array();
  std::vector<Json> rows;
  for (const auto& file : files) {
    auto solved = solve_instance(file.string(), cfg);
    const TaskGraph graph(solved.inst);
    rc.capacity = graph.capacity();
    const auto& left = solved.run.front[solved.run.leftmost];
    const auto& right = solved.run.front[solved.run.rightmost];
    const auto rep_left = replicate(left.sol, graph, analytical(left.sol, graph, cfg), rc);
    const auto rep_right = replicate(right.sol, graph, analytical(right.sol, graph, cfg), rc);
    const auto ref = find_references(refs, solved.inst.name, file.stem().string()).value_or(QualityReferences{});
    const auto q = quality_gaps(left.eval, right.eval, ref);
    const auto qj = quality_to_json(q);

    Json row;
    row["instance"] = file.stem().string();
    row["tasks"] = graph.edge_count();
    for (const char* key : {"h1", "m1", "h2", "m2", "mono"}) row[key] = qj["references"][key];
    row["H1"] = round6(left.eval.h_bar);
    row["M1"] = round6(left.eval.m_bar);
    row["H2"] = round6(right.eval.h_bar);
    row["M2"] = round6(right.eval.m_bar);
    for (const char* key : {"e1_h", "e1_m", "e2_h", "e2_m", "e1_mono"}) row[key] = qj[key];
    row["front_size"] = solved.run.front.size();
    const auto gl = replication_to_json(rep_left)["gaps"];
    const auto gr = replication_to_json(rep_right)["gaps"];
    row["left_e_h"] = gl["e_h"];
    row["left_e_m"] = gl["e_m"];
    row["left_e_sh"] = gl["e_sh"];
    row["left_e_sm"] = gl["e_sm"];
    row["right_e_h"] = gr["e_h"];
    row["right_e_m"] = gr["e_m"];
    row["right_e_sh"] = gr["e_sh"];
    row["right_e_sm"] = gr["e_sm"];
    log << row["instance"].get<std::string>() << ": wall time " << solved.seconds << " s\n";
    rows.push_back(row);
    table.push_back(std::move(row));
  }

  Json out;
  out["format"] = "scarp-report/1";
  out["config"] = merge(Json{{"seed", cfg.ga.seed},
                             {"population", cfg.ga.population},
                             {"iterations", cfg.ga.iterations},
                             {"ls_period", cfg.ga.ls_period},
                             {"n", cfg.replications}},
                        model_json(cfg));
  out["rows"] = std::move(table);
  return {std::move(out),
          csv_table({"instance", "tasks", "h1", "m1", "h2", "m2", "mono", "H1", "M1", "H2", "M2", "e1_h", "e1_m",
                     "e2_h", "e2_m", "e1_mono", "front_size", "left_e_h", "left_e_m", "left_e_sh", "left_e_sm",
                     "right_e_h", "right_e_m", "right_e_sh", "right_e_sm"},
                    rows)};
}

}  // namespace scarp::cli
