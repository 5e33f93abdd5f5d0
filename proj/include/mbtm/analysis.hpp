#pragma once

#include <array>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbtm/tm.hpp"

namespace mbtm::analysis {

/// How one clause relates to the target's Markov boundary: does it hold
/// every boundary variable (Complete vs Partial), and is it free of
/// non-boundary variables (Clean vs Noisy)?
enum class ClauseCategory : std::uint8_t {
  CompleteBoundaryNoisy = 0,
  CompleteBoundaryClean = 1,
  PartialBoundaryNoisy = 2,
  PartialBoundaryClean = 3,
};

inline constexpr std::array<const char*, 4> kCategoryNames = {
    "complete_noisy", "complete_clean", "partial_noisy", "partial_clean"};

struct CategoryCounts {
  std::array<std::uint32_t, 4> total{};     // indexed by ClauseCategory
  std::array<std::uint32_t, 4> positive{};  // split by clause polarity
  std::array<std::uint32_t, 4> negative{};
  std::uint32_t non_empty = 0;

  std::uint32_t clean() const {
    return total[1] + total[3];  // boundary-only clauses of either size
  }
};

struct LiteralFrequency {
  std::vector<std::uint32_t> per_variable;  // clauses using either form
  std::vector<std::uint32_t> per_literal;   // clauses using the signed form
};

/// Counts, per variable and per signed literal, how many clauses
/// currently include it.
inline LiteralFrequency literal_frequency(const tm::TMModel& model) {
  LiteralFrequency f;
  f.per_variable.assign(model.feature_count(), 0);
  f.per_literal.assign(model.literal_count(), 0);
  for (const auto& c : model.clauses())
    for (std::size_t i = 0; i < model.feature_count(); ++i) {
      const bool pos = c.includes(2 * i);
      const bool neg = c.includes(2 * i + 1);
      f.per_literal[2 * i] += pos;
      f.per_literal[2 * i + 1] += neg;
      f.per_variable[i] += pos || neg;
    }
  return f;
}

/// Buckets every non-empty clause by boundary completeness and noise.
/// feature_names maps feature index to variable name; every boundary
/// variable must appear among them.
inline CategoryCounts categorize_clauses(
    const tm::TMModel& model, const std::set<std::string>& boundary,
    const std::vector<std::string>& feature_names) {
  if (boundary.empty()) throw std::invalid_argument("boundary is empty");
  if (feature_names.size() != model.feature_count())
    throw std::invalid_argument("feature name count mismatch");

  std::vector<std::uint8_t> in_boundary(model.feature_count(), 0);
  std::size_t mapped = 0;
  for (std::size_t i = 0; i < feature_names.size(); ++i)
    if (boundary.count(feature_names[i])) {
      in_boundary[i] = 1;
      ++mapped;
    }
  if (mapped != boundary.size())
    throw std::invalid_argument("boundary variable not among the features");

  CategoryCounts out;
  for (const auto& c : model.clauses()) {
    if (c.included_count == 0) continue;
    ++out.non_empty;
    std::size_t boundary_vars = 0;
    bool noisy = false;
    for (std::size_t i = 0; i < model.feature_count(); ++i) {
      if (!c.includes(2 * i) && !c.includes(2 * i + 1)) continue;
      if (in_boundary[i])
        ++boundary_vars;
      else
        noisy = true;
    }
    const bool complete = boundary_vars == boundary.size();
    const auto cat = static_cast<std::size_t>(
        complete ? (noisy ? ClauseCategory::CompleteBoundaryNoisy
                          : ClauseCategory::CompleteBoundaryClean)
                 : (noisy ? ClauseCategory::PartialBoundaryNoisy
                          : ClauseCategory::PartialBoundaryClean));
    ++out.total[cat];
    ++(c.polarity > 0 ? out.positive : out.negative)[cat];
  }
  return out;
}

/// Per-clause bitmasks over the boundary variables (bit i set iff the
/// clause includes boundary_features[i] in either form). Boundary size
/// is capped at 64 variables.
inline std::vector<std::uint64_t> clause_boundary_masks(
    const tm::TMModel& model,
    const std::vector<std::uint32_t>& boundary_features) {
  if (boundary_features.size() > 64)
    throw std::invalid_argument("boundary larger than 64 variables");
  std::vector<std::uint64_t> masks(model.clauses().size(), 0);
  for (std::size_t j = 0; j < model.clauses().size(); ++j) {
    const auto& c = model.clauses()[j];
    for (std::size_t b = 0; b < boundary_features.size(); ++b) {
      const std::size_t i = boundary_features[b];
      if (i >= model.feature_count())
        throw std::invalid_argument("boundary feature index out of range");
      if (c.includes(2 * i) || c.includes(2 * i + 1))
        masks[j] |= std::uint64_t{1} << b;
    }
  }
  return masks;
}

/// First epoch at which the union of the clauses' boundary sets covers
/// the whole boundary, scanning the history in order.
inline std::optional<std::size_t> or_coverage(
    const std::vector<std::vector<std::uint64_t>>& per_epoch_clause_masks,
    std::uint32_t boundary_size) {
  if (boundary_size == 0 || boundary_size > 64)
    throw std::invalid_argument("boundary size must be in [1, 64]");
  const std::uint64_t full = boundary_size == 64
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << boundary_size) - 1;
  for (std::size_t e = 0; e < per_epoch_clause_masks.size(); ++e) {
    std::uint64_t u = 0;
    for (const auto m : per_epoch_clause_masks[e]) u |= m;
    if ((u & full) == full) return e;
  }
  return std::nullopt;
}

/// One recorded epoch of training metrics.
struct MetricsRecord {
  std::uint64_t epoch = 0;  // 0-based
  double accuracy = 0;
  double mean_literals = 0;
  std::vector<std::uint32_t> variable_frequency;
  CategoryCounts categories;
  bool or_covered = false;  // boundary covered by the clauses this epoch
  std::vector<std::uint32_t> literal_frequency;  // signed, 2F
};

struct MetricsHistory {
  std::vector<std::string> feature_names;
  std::vector<MetricsRecord> records;

  /// First recorded entry with or_covered, if any.
  std::optional<std::size_t> first_covered_epoch() const {
    for (const auto& r : records)
      if (r.or_covered) return r.epoch;
    return std::nullopt;
  }
};

inline void append_csv_double(std::ostringstream& out, double v) {
  out << std::setprecision(10) << v;
}

/// Stable column order: epoch, accuracy, mean_literals, per-variable
/// frequencies, the four category counts, or_covered, then the signed
/// literal frequencies and polarity-split category counts.
inline std::string to_csv(const MetricsHistory& h) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "epoch,accuracy,mean_literals";
  for (const auto& n : h.feature_names) out << ",freq_" << n;
  for (const auto* n : kCategoryNames) out << "," << n;
  out << ",or_covered";
  for (const auto& n : h.feature_names) out << ",lit_" << n << "_pos";
  for (const auto& n : h.feature_names) out << ",lit_" << n << "_neg";
  for (const auto* n : kCategoryNames) out << ",pos_" << n;
  for (const auto* n : kCategoryNames) out << ",neg_" << n;
  out << "\n";

  for (const auto& r : h.records) {
    out << r.epoch << ",";
    append_csv_double(out, r.accuracy);
    out << ",";
    append_csv_double(out, r.mean_literals);
    for (const auto v : r.variable_frequency) out << "," << v;
    for (const auto v : r.categories.total) out << "," << v;
    out << "," << (r.or_covered ? 1 : 0);
    for (std::size_t i = 0; i < h.feature_names.size(); ++i)
      out << "," << r.literal_frequency[2 * i];
    for (std::size_t i = 0; i < h.feature_names.size(); ++i)
      out << "," << r.literal_frequency[2 * i + 1];
    for (const auto v : r.categories.positive) out << "," << v;
    for (const auto v : r.categories.negative) out << "," << v;
    out << "\n";
  }
  return out.str();
}

/// Mean included-literal count over all clauses.
inline double mean_literals(const tm::TMModel& model) {
  std::uint64_t total = 0;
  for (const auto& c : model.clauses()) total += c.included_count;
  return model.clauses().empty()
             ? 0.0
             : static_cast<double>(total) / model.clauses().size();
}

}  // namespace mbtm::analysis
