#include "scarp/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <utility>

namespace scarp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string at_line(int line) { return " (line " + std::to_string(line) + ")"; }

double to_number(const std::string& tok, int line, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    throw ParseError(std::string("expected a number for ") + what + ", got '" + tok + "'" + at_line(line));
  }
  return v;
}

int to_int(const std::string& tok, int line, const char* what) {
  const double v = to_number(tok, line, what);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) {
    throw ParseError(std::string("expected an integer for ") + what + ", got '" + tok + "'" + at_line(line));
  }
  return static_cast<int>(v);
}

enum class Section { kHeader, kRequired, kNonRequired };

Edge parse_edge_line(const std::string& line, Section section, int lineno) {
  std::string flat = line;
  for (auto& c : flat) {
    if (c == '(' || c == ')' || c == ',') c = ' ';
  }
  std::istringstream ss(flat);
  std::vector<std::string> tok;
  for (std::string t; ss >> t;) tok.push_back(t);

  Edge e;
  const bool req = section == Section::kRequired;
  const std::size_t expected = req ? 6 : 4;
  if (tok.size() != expected || upper(tok[2]) != "COSTE" || (req && upper(tok[4]) != "DEMANDA")) {
    throw ParseError(std::string("malformed ") + (req ? "required" : "non-required") + " edge line '" + trim(line) +
                     "'" + at_line(lineno));
  }
  e.u = to_int(tok[0], lineno, "edge endpoint");
  e.v = to_int(tok[1], lineno, "edge endpoint");
  e.cost = to_number(tok[3], lineno, "edge cost");
  if (req) {
    e.demand = to_number(tok[5], lineno, "edge demand");
    if (e.demand <= 0.0) {
      throw ValidationError("required edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has non-positive demand" + at_line(lineno));
    }
  }
  return e;
}

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t Instance::required_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.required(); }));
}

Instance parse_instance(std::istream& in) {
  Instance inst;
  std::optional<int> declared_req;
  std::optional<int> declared_noreq;
  std::optional<int> vertices;
  std::optional<double> capacity;
  std::optional<int> depot;
  Section section = Section::kHeader;
  std::vector<Edge> required;
  std::vector<Edge> optional_edges;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '(') {
      if (section == Section::kHeader) {
        throw ParseError("edge line outside of an edge list" + at_line(lineno));
      }
      (section == Section::kRequired ? required : optional_edges).push_back(parse_edge_line(line, section, lineno));
      continue;
    }

    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      if (upper(line) == "END" || upper(line) == "EOF") break;
      throw ParseError("malformed header keyword line '" + line + "'" + at_line(lineno));
    }
    const std::string key = upper(trim(std::string_view(line).substr(0, colon)));
    const std::string value = trim(std::string_view(line).substr(colon + 1));

    if (key == "NOMBRE") {
      inst.name = value;
    } else if (key == "COMENTARIO") {
      inst.comment = value;
    } else if (key == "VERTICES") {
      vertices = to_int(value, lineno, "VERTICES");
    } else if (key == "ARISTAS_REQ") {
      declared_req = to_int(value, lineno, "ARISTAS_REQ");
    } else if (key == "ARISTAS_NOREQ") {
      declared_noreq = to_int(value, lineno, "ARISTAS_NOREQ");
    } else if (key == "VEHICULOS") {
      inst.fleet_hint = to_int(value, lineno, "VEHICULOS");
    } else if (key == "CAPACIDAD") {
      capacity = to_number(value, lineno, "CAPACIDAD");
    } else if (key == "TIPO_COSTES_ARISTAS" || key == "COSTE_TOTAL_REQ") {
      // accepted, ignored
    } else if (key == "LISTA_ARISTAS_REQ") {
      section = Section::kRequired;
    } else if (key == "LISTA_ARISTAS_NOREQ") {
      section = Section::kNonRequired;
    } else if (key == "DEPOSITO") {
      depot = to_int(value, lineno, "DEPOSITO");
      section = Section::kHeader;
    } else {
      throw ParseError("malformed header keyword '" + key + "'" + at_line(lineno));
    }
  }

  if (!vertices) throw ParseError("missing VERTICES");
  if (!capacity) throw ParseError("missing CAPACIDAD");
  if (!depot) throw ParseError("missing DEPOSITO");
  if (!declared_req) throw ParseError("missing ARISTAS_REQ");
  if (static_cast<std::size_t>(*declared_req) != required.size()) {
    throw ParseError("edge count mismatch: ARISTAS_REQ declares " + std::to_string(*declared_req) + " but " +
                     std::to_string(required.size()) + " required edges are listed");
  }
  if (declared_noreq && static_cast<std::size_t>(*declared_noreq) != optional_edges.size()) {
    throw ParseError("edge count mismatch: ARISTAS_NOREQ declares " + std::to_string(*declared_noreq) + " but " +
                     std::to_string(optional_edges.size()) + " non-required edges are listed");
  }

  inst.node_count = *vertices;
  inst.capacity = *capacity;
  inst.depot = *depot;
  inst.edges = std::move(required);
  inst.edges.insert(inst.edges.end(), optional_edges.begin(), optional_edges.end());
  validate(inst);
  return inst;
}

Instance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open instance file '" + path + "'");
  Instance inst = parse_instance(in);
  if (inst.name.empty()) inst.name = path;
  return inst;
}

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  const auto nreq = inst.required_count();
  out << "NOMBRE : " << inst.name << '\n';
  if (!inst.comment.empty()) out << "COMENTARIO : " << inst.comment << '\n';
  out << "VERTICES : " << inst.node_count << '\n';
  out << "ARISTAS_REQ : " << nreq << '\n';
  out << "ARISTAS_NOREQ : " << inst.edges.size() - nreq << '\n';
  out << "VEHICULOS : " << inst.fleet_hint << '\n';
  out << "CAPACIDAD : " << format_number(inst.capacity) << '\n';
  out << "TIPO_COSTES_ARISTAS : EXPLICITOS\n";
  out << "LISTA_ARISTAS_REQ :\n";
  for (const auto& e : inst.edges) {
    if (!e.required()) continue;
    out << "( " << e.u << ", " << e.v << ")  coste " << format_number(e.cost) << " demanda "
        << format_number(e.demand) << '\n';
  }
  if (nreq < inst.edges.size()) {
    out << "LISTA_ARISTAS_NOREQ :\n";
    for (const auto& e : inst.edges) {
      if (e.required()) continue;
      out << "( " << e.u << ", " << e.v << ")  coste " << format_number(e.cost) << '\n';
    }
  }
  out << "DEPOSITO : " << inst.depot << '\n';
  return out.str();
}

void validate(const Instance& inst) {
  if (inst.node_count <= 0) throw ValidationError("VERTICES must be positive");
  if (inst.capacity <= 0.0) throw ValidationError("CAPACIDAD must be positive");
  if (inst.depot < 1 || inst.depot > inst.node_count) {
    throw ValidationError("depot " + std::to_string(inst.depot) + " outside [1, " + std::to_string(inst.node_count) +
                          "]");
  }
  if (inst.required_count() == 0) throw ValidationError("instance has no required edge");
  for (const auto& e : inst.edges) {
    const std::string id = "(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")";
    if (e.u < 1 || e.u > inst.node_count || e.v < 1 || e.v > inst.node_count) {
      throw ValidationError("edge " + id + " has an endpoint outside [1, " + std::to_string(inst.node_count) + "]");
    }
    if (!(e.cost > 0.0)) throw ValidationError("edge " + id + " has non-positive cost");
    if (e.demand < 0.0) throw ValidationError("edge " + id + " has negative demand");
    if (e.demand > inst.capacity) {
      throw ValidationError("edge " + id + " demand " + format_number(e.demand) + " exceeds capacity " +
                            format_number(inst.capacity));
    }
  }

  // Reachability of every required edge from the depot.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(inst.node_count) + 1);
  for (const auto& e : inst.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{inst.depot};
  seen[inst.depot] = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int y : adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  for (const auto& e : inst.edges) {
    if (e.required() && !seen[e.u]) {
      throw ValidationError("required edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") is unreachable from depot " + std::to_string(inst.depot));
    }
  }
}

std::vector<std::vector<double>> node_distances(const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.node_count) + 1;
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : inst.edges) {
    adj[e.u].emplace_back(e.v, e.cost);
    adj[e.v].emplace_back(e.u, e.cost);
  }

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, kInf));
  using Item = std::pair<double, int>;
  for (int src = 1; src < static_cast<int>(n); ++src) {
    auto& d = dist[src];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (du + w < d[v]) {
          d[v] = du + w;
          pq.emplace(d[v], v);
        }
      }
    }
  }
  return dist;
}

TaskGraph::TaskGraph(const Instance& inst) : capacity_(inst.capacity), depot_(inst.depot) {
  node_dist_ = node_distances(inst);

  arcs_.push_back(Arc{inst.depot, inst.depot, 0.0, 0.0, -1});
  for (const auto& e : inst.edges) {
    if (!e.required()) continue;
    const int idx = static_cast<int>(required_.size());
    required_.push_back(e);
    arcs_.push_back(Arc{e.u, e.v, e.cost, e.demand, idx});
    arcs_.push_back(Arc{e.v, e.u, e.cost, e.demand, idx});
  }

  const std::size_t na = arcs_.size();
  dist_.assign(na * na, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    const auto& row = node_dist_[arcs_[a].head];
    for (std::size_t b = 0; b < na; ++b) {
      dist_[a * na + b] = row[arcs_[b].tail];
    }
  }
}

ArcId TaskGraph::inverse(ArcId a) const {
  if (a == kDepot) return kDepot;
  return (a % 2 == 1) ? a + 1 : a - 1;
}

}  // namespace scarp
