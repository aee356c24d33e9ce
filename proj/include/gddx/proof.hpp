#pragma once
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/fact_db.hpp"
#include "gddx/i18n.hpp"

namespace gddx {

inline constexpr std::string_view hypothesis_reason = "hypothesis";

struct ProofNode {
  int index = 0;
  Fact fact;
  std::string reason; // phrase key, or "hypothesis"
  std::string rule;   // rule id, or "hypothesis"
  std::vector<int> antecedents;

  bool is_hypothesis() const { return reason == hypothesis_reason; }
  bool operator==(const ProofNode &) const = default;
};

/// Nodes are numbered from 1: hypotheses first, then derived facts in
/// post-order, so every antecedent index is smaller than its consumer's.
struct ProofDag {
  std::vector<ProofNode> nodes;
  int root = 0;

  const ProofNode &node(int index) const {
    return nodes.at(static_cast<std::size_t>(index - 1));
  }
  const ProofNode &root_node() const { return node(root); }
  std::size_t size() const { return nodes.size(); }

  /// Number of antecedent references to each node, indexed from 1.
  std::vector<int> out_degrees() const {
    std::vector<int> deg(nodes.size() + 1, 0);
    for (const auto &n : nodes)
      for (auto a : n.antecedents)
        ++deg[static_cast<std::size_t>(a)];
    return deg;
  }

  bool is_tree() const {
    const auto deg = out_degrees();
    return std::all_of(deg.begin(), deg.end(), [](int d) { return d <= 1; });
  }
};

/// Builds the DAG of everything `root` depends on. `justification_of(f)`
/// must return the Justification that produced `f`.
inline ProofDag
extract(const Fact &root,
        const std::function<const Justification &(const Fact &)>
            &justification_of) {
  std::vector<Fact> hyps, derived;
  std::set<Fact> seen;
  std::function<void(const Fact &)> visit = [&](const Fact &f) {
    if (!seen.insert(f).second)
      return;
    const auto &j = justification_of(f);
    if (j.is_hypothesis()) {
      hyps.push_back(f);
      return;
    }
    for (const auto &a : j.antecedents)
      visit(a);
    derived.push_back(f);
  };
  visit(root);

  ProofDag dag;
  std::map<Fact, int> index;
  for (const auto *list : {&hyps, &derived}) {
    for (const auto &f : *list) {
      const auto &j = justification_of(f);
      ProofNode n;
      n.index = static_cast<int>(dag.nodes.size()) + 1;
      n.fact = f;
      n.reason = j.is_hypothesis() ? std::string(hypothesis_reason)
                                   : j.phrase_key;
      n.rule = j.rule_id;
      for (const auto &a : j.antecedents)
        n.antecedents.push_back(index.at(a));
      index.emplace(f, n.index);
      dag.nodes.push_back(std::move(n));
    }
  }
  dag.root = index.at(root);
  return dag;
}

inline ProofDag extract(const Fact &root,
                        const std::map<Fact, Justification> &justifications) {
  return extract(root, [&](const Fact &f) -> const Justification & {
    return justifications.at(f);
  });
}

inline std::string localize_reason(const CatalogChain &chain,
                                   const ProofNode &n) {
  return lookup(chain, n.is_hypothesis() ? hypothesis_phrase
                                         : std::string_view(n.reason));
}

inline std::string render_line(const ProofDag &dag, const CatalogChain &chain,
                               int index) {
  const auto &n = dag.node(index);
  return std::to_string(n.index) + ". " + localize_fact(chain, n.fact) + " (" +
         localize_reason(chain, n) + ")";
}

/// Indented tree from the root (shared nodes are repeated under every
/// parent, keeping their index), or the flat numbered list when
/// `structure_on` is false.
inline std::string render_tree(const ProofDag &dag, const CatalogChain &chain,
                               bool structure_on = true) {
  std::string out;
  if (!structure_on) {
    for (const auto &n : dag.nodes)
      out += render_line(dag, chain, n.index) + '\n';
    return out;
  }
  std::vector<std::string> lines(dag.size() + 1);
  for (const auto &n : dag.nodes)
    lines[static_cast<std::size_t>(n.index)] = render_line(dag, chain, n.index);
  std::function<void(int, std::size_t)> walk = [&](int idx, std::size_t depth) {
    out.append(2 * depth, ' ');
    out += lines[static_cast<std::size_t>(idx)];
    out += '\n';
    for (auto a : dag.node(idx).antecedents)
      walk(a, depth + 1);
  };
  walk(dag.root, 0);
  return out;
}

namespace detail {
inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out;
}
} // namespace detail

/// GraphViz rendering: one statement per node, edges from antecedent to
/// consequent, hypotheses drawn as boxes.
inline std::string export_dot(const ProofDag &dag, const CatalogChain &chain) {
  std::string out = "digraph proof {\n  rankdir=BT;\n";
  for (const auto &n : dag.nodes) {
    out += "  n" + std::to_string(n.index) + " [shape=" +
           (n.is_hypothesis() ? "box" : "ellipse") + ", label=\"" +
           std::to_string(n.index) + ". " +
           detail::dot_escape(localize_fact(chain, n.fact)) + "\\n" +
           detail::dot_escape(localize_reason(chain, n)) + "\"];\n";
  }
  for (const auto &n : dag.nodes)
    for (auto a : n.antecedents)
      out += "  n" + std::to_string(a) + " -> n" + std::to_string(n.index) +
             ";\n";
  out += "}\n";
  return out;
}

} // namespace gddx
