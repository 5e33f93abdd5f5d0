#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbtm/bn.hpp"
#include "mbtm/csia.hpp"
#include "mbtm/rng.hpp"
#include "mbtm/tm.hpp"

namespace mbtm::convergence {

enum class Verdict : std::uint8_t { Keep, Prune };

/// Per-literal drift balance for the fixed clause X1 AND X2, with the
/// shared trigger-event probability divided out of both rates. The
/// raw rates therefore land in [0, 1 + p_d], not [0, 1].
struct RateReport {
  std::string variable;
  double p_inc = 0;
  double p_dec = 0;
  double event_bound = 0;  // P(X1=1, X2=1), bounds both trigger events
  double margin = 0;       // p_inc - p_dec
  Verdict verdict = Verdict::Keep;
};

struct KeepCondition {
  bool holds = false;
  double margin = 0;  // informativeness gap of X1 over X2, minus p_d
};

namespace detail {

inline void require_chain3(const bn::BayesNet& net) {
  if (net.size() != 3 || !net.has_node("X1") || !net.has_node("X2") ||
      !net.has_node("Y") || net.target() != "Y")
    throw std::invalid_argument(
        "expected the three-variable family over X1, X2, Y with target Y");
}

inline void require_pd(double p_d) {
  if (!(p_d > 0.0) || !(p_d < 1.0))
    throw std::invalid_argument("p_d must be in (0, 1)");
}

}  // namespace detail

/// P(X1=1, X2=1): upper bound on the probability of either CS-IA
/// trigger event for the clause X1 AND X2.
inline double event_bound(const bn::BayesNet& net) {
  detail::require_chain3(net);
  std::vector<int> fixed(net.size(), -1);
  fixed[net.index_of("X2")] = 1;
  return bn::detail::enumerate_query(net, net.index_of("X1"), fixed).first;
}

inline RateReport rates(const bn::BayesNet& net, const std::string& variable,
                        double p_d) {
  detail::require_chain3(net);
  detail::require_pd(p_d);
  if (variable != "X1" && variable != "X2")
    throw std::invalid_argument("variable must be X1 or X2");

  RateReport r;
  r.variable = variable;
  const double y1_x1 = bn::conditional(net, "Y", {{"X1", 1}});
  const double y0_x1 = 1.0 - y1_x1;
  if (variable == "X1") {
    const double y1_x2 = bn::conditional(net, "Y", {{"X2", 1}});
    const double y0_x2 = 1.0 - y1_x2;
    r.p_inc = y1_x1 + y0_x2;
    r.p_dec = y0_x1 + p_d + y1_x2;
  } else {
    r.p_inc = y1_x1 + y0_x1;        // = 1
    r.p_dec = y0_x1 + p_d + y1_x1;  // = 1 + p_d
  }
  r.event_bound = event_bound(net);
  r.margin = r.p_inc - r.p_dec;
  r.verdict = r.margin > 0 ? Verdict::Keep : Verdict::Prune;
  return r;
}

/// X1 survives iff its informativeness gap over X2 exceeds the drift:
/// [P(Y=1|X1=1) - P(Y=0|X1=1)] - [P(Y=1|X2=1) - P(Y=0|X2=1)] > p_d.
inline KeepCondition check_keep_condition(const bn::BayesNet& net,
                                          double p_d) {
  detail::require_chain3(net);
  detail::require_pd(p_d);
  const double y1_x1 = bn::conditional(net, "Y", {{"X1", 1}});
  const double y1_x2 = bn::conditional(net, "Y", {{"X2", 1}});
  KeepCondition out;
  out.margin = (2 * y1_x1 - 1) - (2 * y1_x2 - 1) - p_d;
  out.holds = out.margin > 0;
  return out;
}

struct VariableOutcome {
  std::string variable;
  double prune_frequency = 0;   // fraction of runs the literal was pruned
  double mean_final_state = 0;  // state when pruned, frozen, or at cap
};

struct SimulationReport {
  std::uint32_t runs = 0;
  std::uint64_t horizon = 0;        // Step1+Step2 pairs per cell
  std::uint64_t total_samples = 0;  // across all runs
  VariableOutcome x1, x2;
};

/// Monte Carlo check of the analytic verdicts: streams ancestral samples
/// through the real Type III path with the clause frozen to X1 AND X2.
/// Each cell runs until it prunes or completes `horizon` Step1+Step2
/// pairs (then freezes). Pruning genuinely shortens the clause, so the
/// survivor's later dynamics reflect the shortened conjunction.
inline SimulationReport simulate_chain(const bn::BayesNet& net,
                                       csia::CsiaConfig config,
                                       std::uint64_t horizon,
                                       std::uint32_t runs,
                                       std::uint64_t seed) {
  detail::require_chain3(net);
  csia::validate(config);
  if (horizon == 0 || runs == 0)
    throw std::invalid_argument("horizon and runs must be >= 1");
  if (net.index_of("X1") != 0 || net.index_of("X2") != 1)
    throw std::invalid_argument(
        "net must declare X1, X2, Y in that order");

  constexpr std::size_t kLitX1 = 0;  // literal index of X1
  constexpr std::size_t kLitX2 = 2;  // literal index of X2

  tm::TMConfig mcfg;
  mcfg.num_clauses = 2;  // clause 0 carries the conjunction; 1 stays empty
  mcfg.T = 10.0;
  mcfg.s = 3.0;
  mcfg.ta_state_bits = 8;

  const std::uint64_t sample_cap = 1000 * horizon + 1'000'000;

  struct CellStats {
    std::uint64_t pruned_runs = 0;
    double state_sum = 0;
  };
  CellStats stats_x1, stats_x2;
  std::uint64_t total_samples = 0;

  for (std::uint32_t run = 0; run < runs; ++run) {
    Rng rng(derive_seed(seed, run));
    tm::TMModel model(mcfg, 2);
    model.set_ta_state(0, kLitX1, model.midpoint() + 1);
    model.set_ta_state(0, kLitX2, model.midpoint() + 1);
    csia::CsiaBank bank = csia::init_bank(model, config);

    std::uint64_t pairs_x1 = 0, pairs_x2 = 0;
    bool resolved_x1 = false, resolved_x2 = false;
    double final_x1 = 0, final_x2 = 0;

    bn::Assignment a;
    std::vector<std::uint8_t> x(2);
    csia::CsiaTrace trace;
    for (std::uint64_t n = 0; n < sample_cap && !(resolved_x1 && resolved_x2);
         ++n) {
      ++total_samples;
      bn::sample_into(net, rng, a);
      x[0] = a[0];
      x[1] = a[1];
      csia::type_iii_feedback(model, bank, x, a[2], rng, &trace);
      for (const auto& e : trace.entries) {
        if (e.scenario != csia::Scenario::Step2) continue;
        const bool is_x1 = e.literal == kLitX1;
        auto& pairs = is_x1 ? pairs_x1 : pairs_x2;
        ++pairs;
        if (e.pruned) {
          (is_x1 ? resolved_x1 : resolved_x2) = true;
          (is_x1 ? final_x1 : final_x2) = static_cast<double>(e.post_state);
          (is_x1 ? stats_x1 : stats_x2).pruned_runs += 1;
        } else if (pairs >= horizon) {
          (is_x1 ? resolved_x1 : resolved_x2) = true;
          (is_x1 ? final_x1 : final_x2) = static_cast<double>(e.post_state);
          // freeze: stop updating without touching the clause
          bank.drop_cell(0, e.literal);
        }
      }
    }
    if (!resolved_x1)
      final_x1 = static_cast<double>(bank.cell(0, kLitX1).state);
    if (!resolved_x2)
      final_x2 = static_cast<double>(bank.cell(0, kLitX2).state);
    stats_x1.state_sum += final_x1;
    stats_x2.state_sum += final_x2;
  }

  SimulationReport rep;
  rep.runs = runs;
  rep.horizon = horizon;
  rep.total_samples = total_samples;
  rep.x1 = {"X1", double(stats_x1.pruned_runs) / runs,
            stats_x1.state_sum / runs};
  rep.x2 = {"X2", double(stats_x2.pruned_runs) / runs,
            stats_x2.state_sum / runs};
  return rep;
}

}  // namespace mbtm::convergence
