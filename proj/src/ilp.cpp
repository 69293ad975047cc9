#include "scanplan/ilp.hpp"

#include <cmath>
#include <map>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "scanplan/errors.hpp"
#include "scanplan/orienteering.hpp"

namespace scanplan::ilp {

namespace {

constexpr double kTol = 1e-6;

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_terms(std::ostream& out, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0 " << IlpModel::y(0);
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].coef;
    if (k > 0 && k % 8 == 0) out << "\n   ";
    out << (c < 0 ? " - " : (k == 0 ? " " : " + ")) << num(std::abs(c)) << ' ' << terms[k].var;
  }
}

double value_of(const Assignment& a, const std::string& name) {
  const auto it = a.find(name);
  return it == a.end() ? 0.0 : it->second;
}

}  // namespace

std::string IlpModel::y(int i) { return fmt::format("y_{}", i); }
std::string IlpModel::x(const Arc& a) { return fmt::format("x_{}_{}", a.from, a.to); }
std::string IlpModel::g(const Arc& a) { return fmt::format("g_{}_{}", a.from, a.to); }

std::string IlpModel::to_lp() const {
  std::ostringstream out;
  out << fmt::format("\\ rooted orienteering: {} nodes, {} arcs, root {}, budget {}\n",
                     node_count, arcs.size(), root, num(budget));
  out << "Maximize\n obj:";
  write_terms(out, objective);
  out << "\nSubject To\n";
  for (const auto& row : rows) {
    out << ' ' << row.name << ':';
    write_terms(out, row.terms);
    const char* sense = row.sense == Sense::le ? "<=" : row.sense == Sense::ge ? ">=" : "=";
    out << ' ' << sense << ' ' << num(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : continuous) out << ' ' << v << " >= 0\n";
  out << "Binaries\n";
  for (std::size_t k = 0; k < binaries.size(); ++k) {
    out << (k % 8 == 0 ? (k == 0 ? " " : "\n ") : " ") << binaries[k];
  }
  out << "\nEnd\n";
  return out.str();
}

ArcSet parse_arc_set(const std::string& name) {
  if (name == "closure") return ArcSet::closure;
  if (name == "edges") return ArcSet::edges;
  throw ConfigError("unknown arc set '" + name + "' (closure | edges)");
}

std::string to_string(ArcSet arcs) { return arcs == ArcSet::closure ? "closure" : "edges"; }

IlpModel export_ilp(const orienteering::PlanGraph& graph, double budget, ArcSet arc_set) {
  IlpModel m;
  m.arc_set = arc_set;
  m.node_count = graph.size();
  m.root = graph.root;
  m.budget = budget;
  m.rewards = graph.rewards;
  // Arcs that no closed walk within the budget can use are left out.
  const orienteering::HopMetric metric(graph);
  const int limit = orienteering::budget_hops(budget, graph.spacing);
  auto usable = [&](int i, int j, int h) {
    const int out = metric(graph.root, i);
    const int back = metric(j, graph.root);
    if (out == orienteering::HopMetric::kUnreachable || back == orienteering::HopMetric::kUnreachable) {
      return false;
    }
    return out + h + back <= limit;
  };
  if (arc_set == ArcSet::edges) {
    for (int i = 0; i < graph.size(); ++i) {
      for (int j : graph.neighbors[i]) {
        if (usable(i, j, 1)) m.arcs.push_back({i, j, graph.spacing, 1});
      }
    }
  } else {
    for (int i = 0; i < graph.size(); ++i) {
      for (int j = 0; j < graph.size(); ++j) {
        const int h = metric(i, j);
        if (i == j || h == orienteering::HopMetric::kUnreachable || !usable(i, j, h)) continue;
        m.arcs.push_back({i, j, h * graph.spacing, h});
      }
    }
  }
  const int n = m.node_count;
  std::vector<std::vector<int>> out_arcs(n);
  std::vector<std::vector<int>> in_arcs(n);
  for (int a = 0; a < static_cast<int>(m.arcs.size()); ++a) {
    out_arcs[m.arcs[a].from].push_back(a);
    in_arcs[m.arcs[a].to].push_back(a);
  }

  for (int i = 0; i < n; ++i) m.objective.push_back({IlpModel::y(i), m.rewards[i]});

  for (int i = 0; i < n; ++i) {
    Row out_row{fmt::format("out_{}", i), {}, Sense::eq, 0.0};
    Row in_row{fmt::format("in_{}", i), {}, Sense::eq, 0.0};
    for (int a : out_arcs[i]) out_row.terms.push_back({IlpModel::x(m.arcs[a]), 1.0});
    for (int a : in_arcs[i]) in_row.terms.push_back({IlpModel::x(m.arcs[a]), 1.0});
    if (i == m.root) {
      // A root-only walk uses no arcs, so the root's degree is at most 1.
      Row balance{"root_balance", out_row.terms, Sense::eq, 0.0};
      for (const auto& t : in_row.terms) balance.terms.push_back({t.var, -1.0});
      out_row.sense = Sense::le;
      out_row.rhs = 1.0;
      m.rows.push_back(std::move(out_row));
      m.rows.push_back(std::move(balance));
    } else {
      out_row.terms.push_back({IlpModel::y(i), -1.0});
      in_row.terms.push_back({IlpModel::y(i), -1.0});
      m.rows.push_back(std::move(out_row));
      m.rows.push_back(std::move(in_row));
    }
  }
  m.rows.push_back({"root_visited", {{IlpModel::y(m.root), 1.0}}, Sense::eq, 1.0});

  Row budget_row{"budget", {}, Sense::le, budget};
  for (const auto& a : m.arcs) budget_row.terms.push_back({IlpModel::x(a), a.length});
  m.rows.push_back(std::move(budget_row));

  for (int i = 0; i < n; ++i) {
    Row flow{fmt::format("flow_{}", i), {}, Sense::eq, 0.0};
    if (i == m.root) {
      for (int a : out_arcs[i]) flow.terms.push_back({IlpModel::g(m.arcs[a]), 1.0});
      for (int a : in_arcs[i]) flow.terms.push_back({IlpModel::g(m.arcs[a]), -1.0});
      for (int j = 0; j < n; ++j) {
        if (j != m.root) flow.terms.push_back({IlpModel::y(j), -1.0});
      }
    } else {
      for (int a : in_arcs[i]) flow.terms.push_back({IlpModel::g(m.arcs[a]), 1.0});
      for (int a : out_arcs[i]) flow.terms.push_back({IlpModel::g(m.arcs[a]), -1.0});
      flow.terms.push_back({IlpModel::y(i), -1.0});
    }
    m.rows.push_back(std::move(flow));
  }
  const double capacity = std::max(0, n - 1);
  for (const auto& a : m.arcs) {
    m.rows.push_back({fmt::format("cap_{}_{}", a.from, a.to),
                      {{IlpModel::g(a), 1.0}, {IlpModel::x(a), -capacity}},
                      Sense::le,
                      0.0});
  }

  for (int i = 0; i < n; ++i) m.binaries.push_back(IlpModel::y(i));
  for (const auto& a : m.arcs) m.binaries.push_back(IlpModel::x(a));
  for (const auto& a : m.arcs) m.continuous.push_back(IlpModel::g(a));
  return m;
}

Assignment read_assignment(std::istream& in) {
  Assignment out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name) || name[0] == '#') continue;
    if (name == "Objective" || name == "objective") continue;
    double value = 0.0;
    if (!(ls >> value)) throw ParseError(line_no, "expected '<name> <value>'");
    out[name] = value;
  }
  return out;
}

void write_assignment(const Assignment& assignment, std::ostream& out) {
  for (const auto& [name, value] : assignment) out << name << ' ' << num(value) << '\n';
}

double objective_value(const IlpModel& model, const Assignment& assignment) {
  double sum = 0.0;
  for (const auto& t : model.objective) sum += t.coef * value_of(assignment, t.var);
  return sum;
}

orienteering::Walk decode(const IlpModel& model, const Assignment& assignment) {
  for (const auto& v : model.binaries) {
    const double x = value_of(assignment, v);
    if (std::abs(x) > kTol && std::abs(x - 1.0) > kTol) {
      throw DecodeError(fmt::format("{} = {} is not binary", v, x));
    }
  }
  for (const auto& v : model.continuous) {
    if (value_of(assignment, v) < -kTol) throw DecodeError(v + " is negative");
  }
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    double scale = std::abs(row.rhs);
    for (const auto& t : row.terms) {
      lhs += t.coef * value_of(assignment, t.var);
      scale = std::max(scale, std::abs(t.coef));
    }
    const double tol = kTol * std::max(1.0, scale);
    const bool ok = row.sense == Sense::le   ? lhs <= row.rhs + tol
                    : row.sense == Sense::ge ? lhs >= row.rhs - tol
                                             : std::abs(lhs - row.rhs) <= tol;
    if (!ok) throw DecodeError(fmt::format("row {} violated (lhs {}, rhs {})", row.name, lhs, row.rhs));
  }

  auto on = [&](const std::string& v) { return value_of(assignment, v) > 0.5; };
  std::vector<int> next(model.node_count, -1);
  for (const auto& a : model.arcs) {
    if (on(IlpModel::x(a))) next[a.from] = a.to;
  }
  orienteering::Walk walk;
  walk.nodes.push_back(model.root);
  std::vector<char> seen(model.node_count, 0);
  seen[model.root] = 1;
  int at = model.root;
  double length = 0.0;
  std::map<std::pair<int, int>, const Arc*> arc_of;
  for (const auto& a : model.arcs) arc_of[{a.from, a.to}] = &a;
  while (next[at] >= 0) {
    const int to = next[at];
    const Arc* arc = arc_of.at({at, to});
    length += arc->length;
    walk.hops += arc->hops;
    walk.nodes.push_back(to);
    if (to == model.root) break;
    if (seen[to]) throw DecodeError("arcs do not form a single cycle through the root");
    seen[to] = 1;
    at = to;
  }
  for (int i = 0; i < model.node_count; ++i) {
    if (on(IlpModel::y(i)) && !seen[i]) {
      throw DecodeError(fmt::format("node {} is selected but not on the root cycle", i));
    }
  }
  if (length > model.budget + kTol * std::max(1.0, model.budget)) {
    throw DecodeError("decoded walk exceeds the budget");
  }
  return walk;
}

orienteering::Walk to_graph_walk(const orienteering::PlanGraph& graph, const IlpModel& model,
                                 const orienteering::Walk& cycle) {
  if (model.arc_set == ArcSet::edges) return cycle;
  const orienteering::HopMetric metric(graph);
  std::vector<int> targets(cycle.nodes.begin(), cycle.nodes.end() - (cycle.nodes.size() > 1 ? 1 : 0));
  return orienteering::expand_tour(metric, targets);
}

Assignment encode(const IlpModel& model, const orienteering::Walk& walk) {
  if (walk.nodes.empty() || walk.nodes.front() != model.root || walk.nodes.back() != model.root) {
    throw DecodeError("walk must start and end at the root");
  }
  std::vector<int> nodes = walk.nodes;
  if (model.arc_set == ArcSet::closure) {
    std::vector<char> first(model.node_count, 0);
    nodes.clear();
    for (int v : walk.nodes) {
      if (first[v]) continue;
      first[v] = 1;
      nodes.push_back(v);
    }
    if (nodes.size() > 1) nodes.push_back(model.root);
  }
  Assignment out;
  for (int i = 0; i < model.node_count; ++i) out[IlpModel::y(i)] = 0.0;
  for (const auto& a : model.arcs) {
    out[IlpModel::x(a)] = 0.0;
    out[IlpModel::g(a)] = 0.0;
  }
  out[IlpModel::y(model.root)] = 1.0;
  const int visits = static_cast<int>(nodes.size()) - 2;  // non-root nodes
  std::vector<char> seen(model.node_count, 0);
  for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
    if (nodes[k] == model.root || seen[nodes[k]]) throw DecodeError("walk revisits a node");
    seen[nodes[k]] = 1;
    out[IlpModel::y(nodes[k])] = 1.0;
  }
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const Arc arc{nodes[k], nodes[k + 1], 0.0, 0};
    if (!out.contains(IlpModel::x(arc))) throw DecodeError("walk uses a missing arc");
    out[IlpModel::x(arc)] = 1.0;
    out[IlpModel::g(arc)] = static_cast<double>(visits - static_cast<int>(k));
  }
  return out;
}

}  // namespace scanplan::ilp
