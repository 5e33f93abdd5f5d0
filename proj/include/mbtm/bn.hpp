#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbtm/rng.hpp"

namespace mbtm {

/// Malformed input document (syntax level).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally well-formed input that violates a semantic constraint.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbtm

namespace mbtm::bn {

/// Conditional probability table of one binary node.
///
/// `rows[r]` is P(node = 1 | parent assignment r), where r reads the parent
/// values as a big-endian bit string over the declared parent order
/// (row 0 = all parents 0, first parent = most significant bit).
struct CpdTable {
  std::vector<std::string> parents;
  std::vector<double> rows;
};

struct Node {
  std::string name;
  CpdTable cpd;
};

/// One joint value per node, in declaration order, each 0 or 1.
using Assignment = std::vector<std::uint8_t>;

/// Partial assignment keyed by node name.
using Evidence = std::map<std::string, std::uint8_t>;

/// Immutable directed acyclic network of binary nodes.
///
/// Construction validates parent references, row counts, probability
/// ranges and acyclicity, and precomputes a topological order, so every
/// instance held by callers is internally consistent.
class BayesNet {
 public:
  BayesNet(std::vector<Node> nodes, std::string target)
      : nodes_(std::move(nodes)), target_(std::move(target)) {
    if (nodes_.empty()) throw ValidationError("network has no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& name = nodes_[i].name;
      if (name.empty()) throw ValidationError("empty node name");
      if (!index_.emplace(name, i).second)
        throw ValidationError("duplicate node name: " + name);
    }
    if (!index_.contains(target_))
      throw ValidationError("target node not declared: " + target_);

    parent_idx_.resize(nodes_.size());
    children_idx_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& cpd = nodes_[i].cpd;
      if (cpd.parents.size() >= 26)
        throw ValidationError("node " + nodes_[i].name + " has too many parents");
      for (const auto& p : cpd.parents) {
        auto it = index_.find(p);
        if (it == index_.end())
          throw ValidationError("node " + nodes_[i].name +
                                " references unknown parent " + p);
        if (it->second == i)
          throw ValidationError("node " + nodes_[i].name + " is its own parent");
        parent_idx_[i].push_back(it->second);
      }
      const std::size_t want = std::size_t{1} << cpd.parents.size();
      if (cpd.rows.size() != want)
        throw ValidationError("node " + nodes_[i].name + " needs " +
                              std::to_string(want) + " CPD rows, got " +
                              std::to_string(cpd.rows.size()));
      for (double p : cpd.rows)
        if (!(p >= 0.0 && p <= 1.0))
          throw ValidationError("node " + nodes_[i].name +
                                " has CPD probability outside [0,1]");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (std::size_t p : parent_idx_[i]) children_idx_[p].push_back(i);

    build_topo_order();
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::string& target() const { return target_; }
  std::size_t target_index() const { return index_.at(target_); }

  bool has_node(const std::string& name) const { return index_.contains(name); }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown node: " + name);
    return it->second;
  }

  const std::vector<std::size_t>& parents_of(std::size_t i) const {
    return parent_idx_[i];
  }
  const std::vector<std::size_t>& children_of(std::size_t i) const {
    return children_idx_[i];
  }
  const std::vector<std::size_t>& topo_order() const { return topo_; }

  /// P(node i = 1 | parent values taken from `a`).
  double prob_one(std::size_t i, const Assignment& a) const {
    const auto& parents = parent_idx_[i];
    std::size_t row = 0;
    for (std::size_t p : parents) row = (row << 1) | (a[p] ? 1u : 0u);
    return nodes_[i].cpd.rows[row];
  }

 private:
  void build_topo_order() {
    std::vector<std::size_t> remaining_parents(nodes_.size());
    std::vector<bool> placed(nodes_.size(), false);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      remaining_parents[i] = parent_idx_[i].size();
    while (topo_.size() < nodes_.size()) {
      bool progressed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (placed[i] || remaining_parents[i] != 0) continue;
        placed[i] = true;
        topo_.push_back(i);
        for (std::size_t c : children_idx_[i]) --remaining_parents[c];
        progressed = true;
        break;
      }
      if (!progressed) throw ValidationError("network contains a cycle");
    }
  }

  std::vector<Node> nodes_;
  std::string target_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parent_idx_;
  std::vector<std::vector<std::size_t>> children_idx_;
  std::vector<std::size_t> topo_;
};

/// The nine-node network behind the built-in boundary experiments.
///
/// Roots X5..X8, Y conditioned on {X5,X6,X7}, X1 and X2 children of Y,
/// X4 child of X8, X3 child of {Y,X4}. The boundary of Y is X1..X7 with
/// X8 rendered conditionally independent through X4's collider at X3.
inline BayesNet builtin_toy() {
  std::vector<Node> nodes;
  nodes.push_back({"X1", {{"Y"}, {0.1, 0.9}}});
  nodes.push_back({"X2", {{"Y"}, {0.2, 0.4}}});
  nodes.push_back({"X3", {{"Y", "X4"}, {0.2, 0.4, 0.8, 0.6}}});
  nodes.push_back({"X4", {{"X8"}, {0.4, 0.6}}});
  nodes.push_back({"X5", {{}, {0.4}}});
  nodes.push_back({"X6", {{}, {0.3}}});
  nodes.push_back({"X7", {{}, {0.2}}});
  nodes.push_back({"X8", {{}, {0.1}}});
  // Rows ordered over (X5, X6, X7), X5 most significant.
  nodes.push_back({"Y", {{"X5", "X6", "X7"},
                         {0.7, 0.6, 0.3, 0.4, 0.9, 0.2, 0.7, 0.6}}});
  return BayesNet(std::move(nodes), "Y");
}

/// Three-node family: X1 root, Y and X2 both children of X1.
///
/// By construction P(Y | X1, X2) = P(Y | X1) while X2 stays informative
/// about Y through X1, so the boundary of Y is exactly {X1}.
///
///   root_p = P(X1=1)
///   y_fid  = P(Y=1  | X1=1), with P(Y=1  | X1=0) = 1 - y_fid
///   x2_fid = P(X2=1 | X1=1), with P(X2=1 | X1=0) = 1 - x2_fid
inline BayesNet builtin_chain3(double root_p, double y_fid, double x2_fid) {
  for (double p : {root_p, y_fid, x2_fid})
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("chain3 parameter outside [0,1]");
  std::vector<Node> nodes;
  nodes.push_back({"X1", {{}, {root_p}}});
  nodes.push_back({"X2", {{"X1"}, {1.0 - x2_fid, x2_fid}}});
  nodes.push_back({"Y", {{"X1"}, {1.0 - y_fid, y_fid}}});
  return BayesNet(std::move(nodes), "Y");
}

/// Ancestral draw of one joint assignment, written in declaration order.
inline void sample_into(const BayesNet& net, Rng& rng, Assignment& out) {
  out.resize(net.size());
  for (std::size_t i : net.topo_order())
    out[i] = chance(rng, net.prob_one(i, out)) ? 1 : 0;
}

/// `count` ancestral samples, deterministic in `seed`.
inline std::vector<Assignment> sample(const BayesNet& net, std::size_t count,
                                      std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  Rng rng(seed);
  std::vector<Assignment> out(count);
  for (auto& a : out) sample_into(net, rng, a);
  return out;
}

/// Probability of one full joint assignment (product of CPD lookups).
inline double joint_prob(const BayesNet& net, const Assignment& a) {
  if (a.size() != net.size())
    throw std::invalid_argument("assignment does not cover the node set");
  double p = 1.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double p1 = net.prob_one(i, a);
    p *= a[i] ? p1 : 1.0 - p1;
  }
  return p;
}

namespace detail {

// Sums joint probability over all completions of the fixed positions.
// `fixed[i]` < 0 means node i is free.
inline std::pair<double, double> enumerate_query(const BayesNet& net,
                                                 std::size_t query,
                                                 std::vector<int>& fixed) {
  std::vector<std::size_t> free_nodes;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (fixed[i] < 0 && i != query) free_nodes.push_back(i);

  Assignment a(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i)
    if (fixed[i] >= 0) a[i] = static_cast<std::uint8_t>(fixed[i]);

  double with_query1 = 0.0, total = 0.0;
  const std::size_t combos = std::size_t{1} << free_nodes.size();
  for (std::size_t m = 0; m < combos; ++m) {
    for (std::size_t b = 0; b < free_nodes.size(); ++b)
      a[free_nodes[b]] = (m >> b) & 1u;
    for (int qv = 0; qv <= 1; ++qv) {
      a[query] = static_cast<std::uint8_t>(qv);
      const double p = joint_prob(net, a);
      total += p;
      if (qv == 1) with_query1 += p;
    }
  }
  return {with_query1, total};
}

}  // namespace detail

/// Exact P(query = 1 | evidence) by enumeration over the free nodes.
/// Only meant as an oracle; capped at 20 nodes.
inline double conditional(const BayesNet& net, const std::string& query,
                          const Evidence& evidence) {
  if (net.size() > 20)
    throw std::invalid_argument("exact enumeration capped at 20 nodes");
  const std::size_t q = net.index_of(query);
  std::vector<int> fixed(net.size(), -1);
  for (const auto& [name, value] : evidence) {
    const std::size_t i = net.index_of(name);
    if (i == q) throw std::invalid_argument("query node appears in evidence");
    if (value > 1) throw std::invalid_argument("evidence value must be 0 or 1");
    fixed[i] = value;
  }
  const auto [p1, total] = detail::enumerate_query(net, q, fixed);
  if (total == 0.0)
    throw std::domain_error("conditional undefined: evidence has probability 0");
  return p1 / total;
}

/// Graph-theoretic Markov boundary: parents, children and co-parents of
/// children, excluding the variable itself.
inline std::set<std::string> markov_boundary(const BayesNet& net,
                                             const std::string& var) {
  const std::size_t v = net.index_of(var);
  std::set<std::size_t> boundary;
  for (std::size_t p : net.parents_of(v)) boundary.insert(p);
  for (std::size_t c : net.children_of(v)) {
    boundary.insert(c);
    for (std::size_t cp : net.parents_of(c))
      if (cp != v) boundary.insert(cp);
  }
  std::set<std::string> names;
  for (std::size_t i : boundary) names.insert(net.node(i).name);
  return names;
}

}  // namespace mbtm::bn
