#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mbtm/csia.hpp"
#include "mbtm/data.hpp"
#include "mbtm/rng.hpp"
#include "mbtm/tm.hpp"

namespace mbtm::tm {

struct EpochResult {
  std::uint64_t samples = 0;
  std::uint64_t correct = 0;  // prequential: prediction before the update
  std::uint64_t prunes = 0;

  double accuracy() const {
    return samples ? static_cast<double>(correct) / samples : 0.0;
  }
};

/// One pass over the dataset: Type I/II feedback per sample, then (when
/// a bank is given) bank re-sync and Type III feedback on the updated
/// clauses. `order` optionally permutes the visit order.
inline EpochResult fit_epoch(TMModel& model, const data::Dataset& ds,
                             csia::CsiaBank* bank, Rng& rng,
                             const std::vector<std::uint32_t>* order = nullptr) {
  if (ds.size() != 0 && ds.feature_count() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  if (order && order->size() != ds.size())
    throw std::invalid_argument("order length mismatch");

  EpochResult res;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t idx = order ? (*order)[i] : i;
    const auto x = ds.row(idx);
    const int y = ds.label(idx);
    const std::int64_t vote = fit_sample(model, x, y, rng);
    res.correct += (vote >= 0 ? 1 : 0) == y;
    ++res.samples;
    if (bank) {
      csia::sync_bank(model, *bank);
      res.prunes += csia::type_iii_feedback(model, *bank, x, y, rng).size();
    }
  }
  return res;
}

/// Classification accuracy over a labeled dataset.
inline double evaluate(const TMModel& model, const data::Dataset& ds) {
  if (ds.size() == 0) return 0.0;
  if (ds.feature_count() != model.feature_count())
    throw std::invalid_argument("input dimension mismatch");
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    correct += classify(model, ds.row(i)) == ds.label(i);
  return static_cast<double>(correct) / ds.size();
}

}  // namespace mbtm::tm
