#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbtm/rng.hpp"
#include "mbtm/tm.hpp"

namespace mbtm::csia {

struct CsiaConfig {
  std::uint32_t ia_state_bits = 8;  // total states 2N = 2^ia_state_bits
  double d = 200.0;                 // drift divisor, p_d = 1/d
};

inline void validate(const CsiaConfig& c) {
  if (c.ia_state_bits < 2 || c.ia_state_bits > 32)
    throw std::invalid_argument("ia_state_bits must be in [2, 32]");
  if (!(c.d > 1.0)) throw std::invalid_argument("d must be > 1");
}

inline std::int64_t num_states(const CsiaConfig& c) {
  return std::int64_t{1} << c.ia_state_bits;
}
inline std::int64_t prune_threshold(const CsiaConfig& c) {
  return std::int64_t{1} << (c.ia_state_bits - 1);
}
inline double drift_probability(const CsiaConfig& c) { return 1.0 / c.d; }

enum class Phase : std::uint8_t { AwaitStep1 = 0, AwaitStep2 = 1 };
enum class Scenario : std::uint8_t { Step1 = 1, Step2 = 2 };

/// Confidence automaton for one (clause, literal). States 1..2N; a fresh
/// cell sits at 2N, and states <= N mean "prune".
struct CsiaCell {
  std::int64_t state = 0;
  Phase phase = Phase::AwaitStep1;
};

/// One automaton per included literal. Cells live in dense per-clause
/// arrays indexed by literal, with a bitmask marking which exist.
class CsiaBank {
 public:
  CsiaBank() = default;
  CsiaBank(CsiaConfig config, std::uint32_t clause_count,
           std::size_t literal_count)
      : config_(config), literal_count_(literal_count) {
    validate(config_);
    per_clause_.resize(clause_count);
    for (auto& pc : per_clause_)
      pc.mask.assign(tm::blocks_for(literal_count), 0);
  }

  const CsiaConfig& config() const { return config_; }
  std::size_t clause_count() const { return per_clause_.size(); }
  std::size_t literal_count() const { return literal_count_; }
  std::size_t size() const { return total_; }

  bool has_cell(std::size_t clause, std::size_t literal) const {
    const auto& pc = per_clause_.at(clause);
    return (pc.mask[literal >> 6] >> (literal & 63)) & 1u;
  }

  CsiaCell& cell(std::size_t clause, std::size_t literal) {
    if (!has_cell(clause, literal))
      throw std::out_of_range("no automaton for this (clause, literal)");
    return per_clause_[clause].cells[literal];
  }
  const CsiaCell& cell(std::size_t clause, std::size_t literal) const {
    return const_cast<CsiaBank*>(this)->cell(clause, literal);
  }

  void create_cell(std::size_t clause, std::size_t literal) {
    auto& pc = per_clause_.at(clause);
    if (literal >= literal_count_)
      throw std::out_of_range("literal index out of range");
    auto& word = pc.mask[literal >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (literal & 63);
    if (word & bit) throw std::invalid_argument("cell already exists");
    if (pc.cells.empty()) pc.cells.resize(literal_count_);
    word |= bit;
    pc.cells[literal] = CsiaCell{num_states(config_), Phase::AwaitStep1};
    ++pc.count;
    ++total_;
  }

  void drop_cell(std::size_t clause, std::size_t literal) {
    auto& pc = per_clause_.at(clause);
    auto& word = pc.mask[literal >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (literal & 63);
    if (!(word & bit))
      throw std::out_of_range("no automaton for this (clause, literal)");
    word &= ~bit;
    --pc.count;
    --total_;
  }

  std::uint32_t clause_cell_count(std::size_t clause) const {
    return per_clause_.at(clause).count;
  }

  /// Visits live cells of one clause in ascending literal order.
  template <typename Fn>
  void for_each_cell(std::size_t clause, Fn&& fn) const {
    const auto& pc = per_clause_.at(clause);
    for (std::size_t b = 0; b < pc.mask.size(); ++b) {
      std::uint64_t word = pc.mask[b];
      while (word) {
        const std::size_t k = 64 * b + std::countr_zero(word);
        fn(k, const_cast<CsiaCell&>(pc.cells[k]));
        word &= word - 1;
      }
    }
  }

  const tm::BitBlocks& clause_mask(std::size_t clause) const {
    return per_clause_.at(clause).mask;
  }

 private:
  CsiaConfig config_;
  std::size_t literal_count_ = 0;
  struct ClauseCells {
    tm::BitBlocks mask;
    std::vector<CsiaCell> cells;  // indexed by literal, lazily sized
    std::uint32_t count = 0;
  };
  std::vector<ClauseCells> per_clause_;
  std::size_t total_ = 0;
};

/// One automaton per currently included literal, everything at state 2N.
inline CsiaBank init_bank(const tm::TMModel& model, CsiaConfig config) {
  CsiaBank bank(config, static_cast<std::uint32_t>(model.clauses().size()),
                model.literal_count());
  for (std::size_t j = 0; j < model.clauses().size(); ++j) {
    const auto& c = model.clauses()[j];
    for (std::size_t b = 0; b < c.include.size(); ++b) {
      std::uint64_t word = c.include[b];
      while (word) {
        bank.create_cell(j, 64 * b + std::countr_zero(word));
        word &= word - 1;
      }
    }
  }
  return bank;
}

/// Applies the awaited step. Step1 moves toward confidence on a target
/// match, Step2 away from it; both then drift downward with probability
/// 1/d. Returns true iff the cell just crossed into the prune region
/// (only checked after Step2). Saturates in [1, 2N] and flips the phase.
inline bool csia_update(CsiaCell& cell, Scenario scenario, int y_matches,
                        Rng& rng, const CsiaConfig& config) {
  const std::int64_t hi = num_states(config);
  const Phase expected =
      scenario == Scenario::Step1 ? Phase::AwaitStep1 : Phase::AwaitStep2;
  if (cell.phase != expected)
    throw std::logic_error("CS-IA update out of turn");

  const int direction = scenario == Scenario::Step1 ? (y_matches ? 1 : -1)
                                                    : (y_matches ? -1 : 1);
  cell.state += direction;
  if (cell.state > hi) cell.state = hi;
  if (cell.state < 1) cell.state = 1;
  if (chance(rng, drift_probability(config)) && cell.state > 1) --cell.state;
  cell.phase = scenario == Scenario::Step1 ? Phase::AwaitStep2
                                           : Phase::AwaitStep1;
  return scenario == Scenario::Step2 && cell.state <= prune_threshold(config);
}

/// Drops a literal from its clause: TA state falls to the exclude
/// boundary and the automaton disappears.
inline void prune_literal(tm::TMModel& model, CsiaBank& bank,
                          std::size_t clause, std::size_t literal) {
  if (!model.clauses().at(clause).includes(literal))
    throw std::invalid_argument("literal not included in clause");
  model.set_ta_state(clause, literal, model.midpoint());
  bank.drop_cell(clause, literal);
}

/// Re-aligns the bank with the model's include sets: fresh cells (state
/// 2N) for newly included literals, dropped cells for excluded ones.
/// Call after Type I/II feedback each sample.
inline void sync_bank(const tm::TMModel& model, CsiaBank& bank) {
  for (std::size_t j = 0; j < model.clauses().size(); ++j) {
    const auto& include = model.clauses()[j].include;
    const auto& mask = bank.clause_mask(j);
    for (std::size_t b = 0; b < include.size(); ++b) {
      std::uint64_t diff = include[b] ^ mask[b];
      while (diff) {
        const std::size_t k = 64 * b + std::countr_zero(diff);
        if ((include[b] >> (k & 63)) & 1u)
          bank.create_cell(j, k);
        else
          bank.drop_cell(j, k);
        diff &= diff - 1;
      }
    }
  }
}

/// Applied CS-IA updates for one sample, for tests.
struct CsiaTrace {
  struct Entry {
    std::uint32_t clause;
    std::uint32_t literal;
    Scenario scenario;
    std::uint8_t y_matches;
    std::uint8_t pruned;
    std::int64_t post_state;
  };
  std::vector<Entry> entries;
};

/// Runs the two-scenario protocol on one sample.
///
/// Scenario 1 (clause satisfied) feeds cells awaiting Step1; Scenario 2
/// (all other included literals satisfied, the cell's own ignored) feeds
/// cells awaiting Step2. A satisfied clause meets both descriptions, but
/// each cell only consumes the step it currently awaits. Cells are
/// visited in ascending (clause, literal) order and pruning takes effect
/// immediately, so later cells see the shortened clause.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> type_iii_feedback(
    tm::TMModel& model, CsiaBank& bank, std::span<const std::uint8_t> x,
    int y, Rng& rng, CsiaTrace* trace = nullptr) {
  if (x.size() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  if (trace) trace->entries.clear();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pruned;
  tm::BitBlocks satisfied;
  tm::literal_mask(x, satisfied);
  std::vector<std::size_t> literals_buf;

  for (std::size_t j = 0; j < model.clauses().size(); ++j) {
    if (bank.clause_cell_count(j) == 0) continue;
    const auto& clause = model.clauses()[j];
    const int y_matches = (clause.polarity > 0) == (y == 1) ? 1 : 0;

    // Count included-but-unsatisfied literals; remember the sole one.
    std::size_t unsat_count = 0;
    std::size_t sole_unsat = 0;
    for (std::size_t b = 0; b < clause.include.size() && unsat_count < 2;
         ++b) {
      std::uint64_t word = clause.include[b] & ~satisfied[b];
      while (word && unsat_count < 2) {
        sole_unsat = 64 * b + std::countr_zero(word);
        ++unsat_count;
        word &= word - 1;
      }
    }
    if (unsat_count >= 2) continue;  // neither scenario can trigger

    // Collect this clause's live literals up front: pruning mid-loop
    // edits the mask being iterated otherwise.
    literals_buf.clear();
    bank.for_each_cell(j, [&](std::size_t k, CsiaCell&) {
      literals_buf.push_back(k);
    });

    for (const std::size_t k : literals_buf) {
      if (!bank.has_cell(j, k)) continue;  // dropped earlier this sample
      auto& cell = bank.cell(j, k);
      Scenario scenario;
      if (unsat_count == 0)
        scenario = cell.phase == Phase::AwaitStep1 ? Scenario::Step1
                                                   : Scenario::Step2;
      else if (k == sole_unsat && cell.phase == Phase::AwaitStep2)
        scenario = Scenario::Step2;
      else
        continue;

      const bool prune = csia_update(cell, scenario, y_matches, rng,
                                     bank.config());
      if (trace)
        trace->entries.push_back({static_cast<std::uint32_t>(j),
                                  static_cast<std::uint32_t>(k), scenario,
                                  static_cast<std::uint8_t>(y_matches),
                                  static_cast<std::uint8_t>(prune),
                                  cell.state});
      if (prune) {
        prune_literal(model, bank, j, k);
        pruned.emplace_back(static_cast<std::uint32_t>(j),
                            static_cast<std::uint32_t>(k));
        if (unsat_count == 1 && k == sole_unsat)
          unsat_count = 0;  // clause now satisfied for the rest
      }
    }
  }
  return pruned;
}

}  // namespace mbtm::csia
