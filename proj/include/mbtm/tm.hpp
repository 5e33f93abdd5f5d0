#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbtm/rng.hpp"

namespace mbtm::tm {

struct TMConfig {
  std::uint32_t num_clauses = 20;
  double T = 10.0;               // voting clamp
  double s = 3.0;                // specificity
  std::uint32_t ta_state_bits = 8;
  bool weighted = false;
  bool boost_true_positive = false;
  std::uint64_t seed = 0;
};

inline void validate(const TMConfig& c) {
  if (c.num_clauses == 0 || c.num_clauses % 2 != 0)
    throw std::invalid_argument("num_clauses must be a positive even number");
  if (!(c.T > 0.0)) throw std::invalid_argument("T must be > 0");
  if (!(c.s > 1.0)) throw std::invalid_argument("s must be > 1");
  if (c.ta_state_bits < 2 || c.ta_state_bits > 32)
    throw std::invalid_argument("ta_state_bits must be in [2, 32]");
}

using BitBlocks = std::vector<std::uint64_t>;

inline std::size_t blocks_for(std::size_t bits) { return (bits + 63) / 64; }

enum class EvalMode { Train, Infer };

/// One conjunctive clause. Literal index 2i is X_i, 2i+1 is NOT X_i.
/// A literal is included iff its automaton state exceeds the midpoint
/// 2^(ta_state_bits-1); `include` mirrors that as a bitmask.
struct Clause {
  std::int8_t polarity = 1;  // +1 votes for target 1, -1 for target 0
  std::uint32_t weight = 1;
  std::vector<std::int64_t> ta;
  BitBlocks include;
  std::uint32_t included_count = 0;

  bool includes(std::size_t literal) const {
    return (include[literal >> 6] >> (literal & 63)) & 1u;
  }
};

class TMModel {
 public:
  TMModel(TMConfig config, std::uint32_t feature_count)
      : config_(config), feature_count_(feature_count) {
    validate(config_);
    if (feature_count_ == 0)
      throw std::invalid_argument("feature_count must be >= 1");
    const std::size_t literals = 2 * std::size_t{feature_count_};
    clauses_.resize(config_.num_clauses);
    for (std::size_t j = 0; j < clauses_.size(); ++j) {
      auto& c = clauses_[j];
      c.polarity = j < clauses_.size() / 2 ? 1 : -1;
      c.weight = 1;
      c.ta.assign(literals, midpoint());
      c.include.assign(blocks_for(literals), 0);
      c.included_count = 0;
    }
  }

  const TMConfig& config() const { return config_; }
  std::uint32_t feature_count() const { return feature_count_; }
  std::size_t literal_count() const { return 2 * std::size_t{feature_count_}; }
  std::vector<Clause>& clauses() { return clauses_; }
  const std::vector<Clause>& clauses() const { return clauses_; }

  std::int64_t max_state() const {
    return std::int64_t{1} << config_.ta_state_bits;
  }
  std::int64_t midpoint() const {
    return std::int64_t{1} << (config_.ta_state_bits - 1);
  }

  /// Forces one automaton state, keeping the include mask in sync.
  /// Test and pruning entry point; feedback uses the saturating steps.
  void set_ta_state(std::size_t clause, std::size_t literal,
                    std::int64_t state) {
    if (state < 1 || state > max_state())
      throw std::invalid_argument("TA state out of range");
    auto& c = clauses_.at(clause);
    const bool was = c.includes(literal);
    c.ta.at(literal) = state;
    const bool now = state > midpoint();
    if (was != now) {
      c.include[literal >> 6] ^= std::uint64_t{1} << (literal & 63);
      c.included_count += now ? 1 : -1;
    }
  }

  void ta_inc(Clause& c, std::size_t literal) {
    auto& s = c.ta[literal];
    if (s == max_state()) return;
    if (++s == midpoint() + 1) {
      c.include[literal >> 6] |= std::uint64_t{1} << (literal & 63);
      ++c.included_count;
    }
  }

  void ta_dec(Clause& c, std::size_t literal) {
    auto& s = c.ta[literal];
    if (s == 1) return;
    if (--s == midpoint()) {
      c.include[literal >> 6] &= ~(std::uint64_t{1} << (literal & 63));
      --c.included_count;
    }
  }

 private:
  TMConfig config_;
  std::uint32_t feature_count_;
  std::vector<Clause> clauses_;
};

/// Bitmask of satisfied literals for input x: bit 2i = x_i, bit 2i+1 = !x_i.
inline void literal_mask(std::span<const std::uint8_t> x, BitBlocks& out) {
  const std::size_t literals = 2 * x.size();
  out.assign(blocks_for(literals), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = 2 * i + (x[i] ? 0 : 1);
    out[k >> 6] |= std::uint64_t{1} << (k & 63);
  }
}

/// True iff every included literal is satisfied (subset test).
inline bool conjunction_holds(const Clause& c, const BitBlocks& satisfied) {
  for (std::size_t b = 0; b < c.include.size(); ++b)
    if (c.include[b] & ~satisfied[b]) return false;
  return true;
}

inline int eval_with_mask(const Clause& c, const BitBlocks& satisfied,
                          EvalMode mode) {
  if (c.included_count == 0) return mode == EvalMode::Train ? 1 : 0;
  return conjunction_holds(c, satisfied) ? 1 : 0;
}

/// 1 iff the conjunction of included literals holds on x.
/// Empty clause: 1 in train mode, 0 in infer mode.
inline int clause_eval(const TMModel& model, const Clause& c,
                       std::span<const std::uint8_t> x, EvalMode mode) {
  if (x.size() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  BitBlocks satisfied;
  literal_mask(x, satisfied);
  return eval_with_mask(c, satisfied, mode);
}

inline std::int64_t vote_sum_with_mask(const TMModel& model,
                                       const BitBlocks& satisfied) {
  std::int64_t sum = 0;
  for (const auto& c : model.clauses())
    if (eval_with_mask(c, satisfied, EvalMode::Infer))
      sum += c.polarity > 0 ? std::int64_t{c.weight} : -std::int64_t{c.weight};
  return sum;
}

/// Weighted clause vote, evaluated in infer mode.
inline std::int64_t vote_sum(const TMModel& model,
                             std::span<const std::uint8_t> x) {
  if (x.size() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  BitBlocks satisfied;
  literal_mask(x, satisfied);
  return vote_sum_with_mask(model, satisfied);
}

/// 1 iff vote_sum >= 0 (a tie classifies as 1).
inline int classify(const TMModel& model, std::span<const std::uint8_t> x) {
  return vote_sum(model, x) >= 0 ? 1 : 0;
}

enum class FeedbackKind : std::uint8_t { TypeI, TypeII };

/// Which clauses were activated on one sample, for tests.
struct FeedbackTrace {
  struct Entry {
    std::uint32_t clause;
    FeedbackKind kind;
    std::uint8_t clause_output;  // train-mode output when feedback applied
  };
  std::int64_t vote = 0;
  std::vector<Entry> entries;
};

namespace detail {

// Type I, clause output 1: satisfied literals step up with probability
// (s-1)/s (1 when boosted), unsatisfied step down with probability 1/s.
// Clause output 0: every literal steps down with probability 1/s.
inline void type_i(TMModel& model, Clause& c, std::span<const std::uint8_t> x,
                   int output, Rng& rng) {
  const auto& cfg = model.config();
  const std::size_t F = x.size();
  if (output == 1) {
    if (cfg.boost_true_positive) {
      for (std::size_t i = 0; i < F; ++i)
        model.ta_inc(c, 2 * i + (x[i] ? 0 : 1));
    } else {
      // Walk the rare misses; every variable between them gets the step.
      std::size_t next = 0;
      bernoulli_subset(rng, F, 1.0 / cfg.s, [&](std::size_t skip) {
        for (std::size_t i = next; i < skip; ++i)
          model.ta_inc(c, 2 * i + (x[i] ? 0 : 1));
        next = skip + 1;
      });
      for (std::size_t i = next; i < F; ++i)
        model.ta_inc(c, 2 * i + (x[i] ? 0 : 1));
    }
    bernoulli_subset(rng, F, 1.0 / cfg.s, [&](std::size_t i) {
      model.ta_dec(c, 2 * i + (x[i] ? 1 : 0));
    });
    if (cfg.weighted) ++c.weight;
  } else {
    bernoulli_subset(rng, 2 * F, 1.0 / cfg.s,
                     [&](std::size_t k) { model.ta_dec(c, k); });
  }
}

// Type II, clause output 1: excluded literals that are false in x step
// toward inclusion deterministically. Output 0: no change.
inline void type_ii(TMModel& model, Clause& c,
                    std::span<const std::uint8_t> x, int output) {
  if (output != 1) return;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = 2 * i + (x[i] ? 1 : 0);  // the unsatisfied literal
    if (!c.includes(k)) model.ta_inc(c, k);
  }
  if (model.config().weighted && c.weight > 1) --c.weight;
}

}  // namespace detail

/// One combined Type I / Type II update for sample (x, y).
///
/// Each clause activates with probability (T - v)/(2T) when y = 1 or
/// (T + v)/(2T) when y = 0, where v is the clamped infer-mode vote sum.
/// Activated clauses whose polarity matches y get Type I feedback, the
/// rest get Type II. Returns the raw vote sum.
inline std::int64_t fit_sample(TMModel& model, std::span<const std::uint8_t> x,
                               int y, Rng& rng, FeedbackTrace* trace = nullptr) {
  if (x.size() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  BitBlocks satisfied;
  literal_mask(x, satisfied);
  const std::int64_t vote = vote_sum_with_mask(model, satisfied);
  const double T = model.config().T;
  const double v = std::clamp(static_cast<double>(vote), -T, T);
  const double activate_p = y == 1 ? (T - v) / (2 * T) : (T + v) / (2 * T);

  if (trace) {
    trace->vote = vote;
    trace->entries.clear();
  }
  auto& clauses = model.clauses();
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    if (!chance(rng, activate_p)) continue;
    auto& c = clauses[j];
    const int output = eval_with_mask(c, satisfied, EvalMode::Train);
    const bool matches = (c.polarity > 0) == (y == 1);
    if (matches)
      detail::type_i(model, c, x, output, rng);
    else
      detail::type_ii(model, c, x, output);
    if (trace)
      trace->entries.push_back({static_cast<std::uint32_t>(j),
                                matches ? FeedbackKind::TypeI
                                        : FeedbackKind::TypeII,
                                static_cast<std::uint8_t>(output)});
  }
  return vote;
}

/// One line per clause: `+1 w=3: X1 AND NOT X3`; empty clauses print TRUE.
inline std::string export_rules(const TMModel& model,
                                const std::vector<std::string>& names = {}) {
  if (!names.empty() && names.size() != model.feature_count())
    throw std::invalid_argument("feature name count mismatch");
  std::ostringstream out;
  for (const auto& c : model.clauses()) {
    out << (c.polarity > 0 ? "+1" : "-1") << " w=" << c.weight << ": ";
    if (c.included_count == 0) {
      out << "TRUE\n";
      continue;
    }
    bool first = true;
    for (std::size_t k = 0; k < model.literal_count(); ++k) {
      if (!c.includes(k)) continue;
      if (!first) out << " AND ";
      first = false;
      if (k % 2 == 1) out << "NOT ";
      const std::size_t var = k / 2;
      out << (names.empty() ? "X" + std::to_string(var + 1) : names[var]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace mbtm::tm
