#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scanplan::orienteering {
struct PlanGraph;
struct Walk;
}  // namespace scanplan::orienteering

namespace scanplan::ilp {

struct Term {
  std::string var;
  double coef = 0.0;
};

enum class Sense { le, eq, ge };

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::eq;
  double rhs = 0.0;
};

struct Arc {
  int from = 0;
  int to = 0;
  double length = 0.0;
  int hops = 1;  // grid edges behind the arc
};

// closure: one arc per ordered pair of mutually reachable nodes, weighted by
// the shortest-path length, so simple cycles stand for walks that may pass
// through nodes again. edges: one arc per direction of each grid edge; only
// walks without repeated nodes are representable.
enum class ArcSet { closure, edges };
ArcSet parse_arc_set(const std::string& name);
std::string to_string(ArcSet arcs);

// Rooted orienteering over a directed version of a plan graph:
//   y_i  binary   node i visited
//   x_a  binary   arc a traversed
//   g_a  >= 0     single-commodity flow on arc a
// Rows: in/out degree = y_i (root: in = out <= 1), y_root = 1, budget,
// flow conservation (root emits one unit per visited node, each visited
// non-root node absorbs one) and g_a <= (|V| - 1) x_a.
struct IlpModel {
  ArcSet arc_set = ArcSet::closure;
  int node_count = 0;
  int root = 0;
  double budget = 0.0;
  std::vector<double> rewards;
  std::vector<Arc> arcs;
  std::vector<Term> objective;  // maximized
  std::vector<Row> rows;
  std::vector<std::string> binaries;
  std::vector<std::string> continuous;

  static std::string y(int i);
  static std::string x(const Arc& a);
  static std::string g(const Arc& a);

  // CPLEX LP text: Maximize / Subject To / Bounds / Binaries / End.
  std::string to_lp() const;
};

IlpModel export_ilp(const orienteering::PlanGraph& graph, double budget,
                    ArcSet arcs = ArcSet::closure);

// Variable values; names absent from the map are zero.
using Assignment = std::map<std::string, double>;

// Plain text, one "name value" pair per line; blank lines and lines starting
// with '#' are skipped, as is a leading "Objective ..." header line.
Assignment read_assignment(std::istream& in);
void write_assignment(const Assignment& assignment, std::ostream& out);

double objective_value(const IlpModel& model, const Assignment& assignment);

// Validates integrality and every row, then follows the chosen arcs from the
// root. The result lists the cycle's nodes (root at both ends) with hops
// summed over its arcs. Throws DecodeError on any violation.
orienteering::Walk decode(const IlpModel& model, const Assignment& assignment);

// Decoded cycle as a closed walk on the plan graph (closure arcs expanded
// along shortest paths).
orienteering::Walk to_graph_walk(const orienteering::PlanGraph& graph, const IlpModel& model,
                                 const orienteering::Walk& cycle);

// Assignment of a closed walk. Closure models take the walk's distinct nodes
// in first-visit order; edge models need a walk without repeated nodes.
// Throws DecodeError when the walk cannot be represented.
Assignment encode(const IlpModel& model, const orienteering::Walk& walk);

}  // namespace scanplan::ilp
