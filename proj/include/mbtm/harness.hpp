#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbtm/analysis.hpp"
#include "mbtm/bn.hpp"
#include "mbtm/csia.hpp"
#include "mbtm/data.hpp"
#include "mbtm/rng.hpp"
#include "mbtm/tm.hpp"
#include "mbtm/trainer.hpp"

namespace mbtm::harness {

struct ExperimentConfig {
  tm::TMConfig tm;
  csia::CsiaConfig csia;
  bool type3 = false;
  std::uint64_t epochs = 1;
  std::uint64_t samples_per_epoch = 100;  // net experiments only
  std::uint64_t metrics_every = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;  // dataset experiments: reshuffle every epoch
};

inline void validate(const ExperimentConfig& c) {
  tm::validate(c.tm);
  if (c.type3) csia::validate(c.csia);
  if (c.epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (c.samples_per_epoch == 0)
    throw std::invalid_argument("samples_per_epoch must be >= 1");
  if (c.metrics_every == 0)
    throw std::invalid_argument("metrics_every must be >= 1");
}

struct ExperimentResult {
  analysis::MetricsHistory history;
  tm::TMModel model;
  std::optional<csia::CsiaBank> bank;
  std::uint64_t total_prunes = 0;
};

namespace detail {

struct MetricsContext {
  std::vector<std::string> feature_names;
  std::set<std::string> boundary;                 // empty: no categorization
  std::vector<std::uint32_t> boundary_features;   // indices into features
};

inline void record_metrics(const tm::TMModel& model, std::uint64_t epoch,
                           double accuracy, const MetricsContext& ctx,
                           analysis::MetricsHistory& history) {
  analysis::MetricsRecord rec;
  rec.epoch = epoch;
  rec.accuracy = accuracy;
  rec.mean_literals = analysis::mean_literals(model);
  auto freq = analysis::literal_frequency(model);
  rec.variable_frequency = std::move(freq.per_variable);
  rec.literal_frequency = std::move(freq.per_literal);
  if (!ctx.boundary.empty()) {
    rec.categories =
        analysis::categorize_clauses(model, ctx.boundary, ctx.feature_names);
    const auto masks =
        analysis::clause_boundary_masks(model, ctx.boundary_features);
    std::uint64_t u = 0;
    for (const auto m : masks) u |= m;
    const std::uint32_t n =
        static_cast<std::uint32_t>(ctx.boundary_features.size());
    const std::uint64_t full =
        n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    rec.or_covered = (u & full) == full;
  }
  history.records.push_back(std::move(rec));
}

inline bool should_record(std::uint64_t epoch, const ExperimentConfig& cfg) {
  return (epoch + 1) % cfg.metrics_every == 0 || epoch + 1 == cfg.epochs;
}

}  // namespace detail

/// Trains on fresh ancestral samples each epoch; metrics use the target's
/// Markov boundary for clause categorization and coverage tracking.
inline ExperimentResult train_bn_experiment(const bn::BayesNet& net,
                                            const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t ti = net.target_index();
  const std::uint32_t F = static_cast<std::uint32_t>(net.size() - 1);
  if (F == 0) throw std::invalid_argument("net has no feature nodes");

  detail::MetricsContext ctx;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (i != ti) ctx.feature_names.push_back(net.node(i).name);
  ctx.boundary = bn::markov_boundary(net, net.target());
  for (std::uint32_t i = 0; i < F; ++i)
    if (ctx.boundary.count(ctx.feature_names[i]))
      ctx.boundary_features.push_back(i);

  tm::TMConfig mcfg = cfg.tm;
  mcfg.seed = cfg.seed;
  tm::TMModel model(mcfg, F);
  std::optional<csia::CsiaBank> bank;
  if (cfg.type3) bank = csia::init_bank(model, cfg.csia);

  ExperimentResult out{.history = {ctx.feature_names, {}},
                       .model = std::move(model),
                       .bank = std::nullopt};
  Rng rng(cfg.seed);

  std::vector<std::uint8_t> features(cfg.samples_per_epoch * F);
  std::vector<std::uint8_t> labels(cfg.samples_per_epoch);
  bn::Assignment a;
  for (std::uint64_t e = 0; e < cfg.epochs; ++e) {
    for (std::size_t r = 0; r < cfg.samples_per_epoch; ++r) {
      bn::sample_into(net, rng, a);
      std::size_t c = 0;
      for (std::size_t i = 0; i < net.size(); ++i)
        if (i != ti) features[r * F + c++] = a[i];
      labels[r] = a[ti];
    }
    data::Dataset ds(F, features, labels, {});
    const auto er =
        tm::fit_epoch(out.model, ds, bank ? &*bank : nullptr, rng);
    out.total_prunes += er.prunes;
    if (detail::should_record(e, cfg))
      detail::record_metrics(out.model, e, er.accuracy(), ctx, out.history);
  }
  out.bank = std::move(bank);
  return out;
}

/// Trains on a fixed dataset, one shuffled pass per epoch. Accuracy is
/// measured on `eval` when given, otherwise prequentially on the pass.
inline ExperimentResult train_dataset_experiment(const data::Dataset& train,
                                                 const data::Dataset* eval,
                                                 const ExperimentConfig& cfg) {
  validate(cfg);
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  if (eval && eval->feature_count() != train.feature_count())
    throw std::invalid_argument("train/eval dimension mismatch");

  detail::MetricsContext ctx;
  if (!train.feature_names().empty()) {
    ctx.feature_names = train.feature_names();
  } else {
    for (std::uint32_t i = 0; i < train.feature_count(); ++i)
      ctx.feature_names.push_back("F" + std::to_string(i + 1));
  }

  tm::TMConfig mcfg = cfg.tm;
  mcfg.seed = cfg.seed;
  tm::TMModel model(mcfg, train.feature_count());
  std::optional<csia::CsiaBank> bank;
  if (cfg.type3) bank = csia::init_bank(model, cfg.csia);

  ExperimentResult out{.history = {ctx.feature_names, {}},
                       .model = std::move(model),
                       .bank = std::nullopt};
  Rng rng(cfg.seed);

  std::vector<std::uint32_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::uint64_t e = 0; e < cfg.epochs; ++e) {
    if (cfg.shuffle) deterministic_shuffle(rng, order);
    const auto er = tm::fit_epoch(out.model, train, bank ? &*bank : nullptr,
                                  rng, &order);
    out.total_prunes += er.prunes;
    if (detail::should_record(e, cfg)) {
      const double acc =
          eval ? tm::evaluate(out.model, *eval) : er.accuracy();
      detail::record_metrics(out.model, e, acc, ctx, out.history);
    }
  }
  out.bank = std::move(bank);
  return out;
}

struct SweepSpec {
  std::pair<double, double> T{5.0, 20.0};
  std::pair<double, double> s{2.0, 100.0};
  std::pair<double, double> d{20.0, 400.0};
  std::pair<std::uint32_t, std::uint32_t> ta_bits{6, 20};
  std::pair<std::uint32_t, std::uint32_t> ia_bits{6, 20};
  std::vector<std::uint8_t> weighted{0, 1};
  std::uint32_t trials = 1;
  std::uint64_t seed = 0;
};

inline void validate(const SweepSpec& s) {
  if (s.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (s.T.first > s.T.second || s.s.first > s.s.second ||
      s.d.first > s.d.second || s.ta_bits.first > s.ta_bits.second ||
      s.ia_bits.first > s.ia_bits.second)
    throw std::invalid_argument("empty sweep range");
  if (s.weighted.empty())
    throw std::invalid_argument("weighted choices must be nonempty");
}

struct SweepRow {
  std::uint32_t trial = 0;
  double T = 0, s = 0, d = 0;
  std::uint32_t ta_bits = 0, ia_bits = 0;
  bool weighted = false;
  std::uint32_t mb_clauses_final = 0;  // clean clauses at the last epoch
  double mb_clauses_mean = 0;          // mean over the trailing 10% records
  std::int64_t or_epoch = -1;          // -1: never covered
  double accuracy = 0;
};

namespace detail {

inline double uniform_in(Rng& g, double lo, double hi) {
  return lo + uniform01(g) * (hi - lo);
}

inline std::uint32_t uniform_int_in(Rng& g, std::uint32_t lo,
                                    std::uint32_t hi) {
  const auto span = std::uint64_t{hi} - lo + 1;
  auto v = static_cast<std::uint64_t>(uniform01(g) * static_cast<double>(span));
  if (v >= span) v = span - 1;
  return lo + static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Draws trial configs uniformly from the spec ranges, trains each with
/// Type III enabled, and ranks rows by final clean-clause count (ties:
/// lower trial index first).
inline std::vector<SweepRow> run_sweep(const bn::BayesNet& net,
                                       const SweepSpec& spec,
                                       const ExperimentConfig& base) {
  validate(spec);
  validate(base);
  std::vector<SweepRow> rows;
  rows.reserve(spec.trials);
  for (std::uint32_t t = 0; t < spec.trials; ++t) {
    Rng pick(derive_seed(spec.seed, t));
    ExperimentConfig cfg = base;
    cfg.type3 = true;
    cfg.seed = derive_seed(spec.seed, 0x100000000ULL + t);
    cfg.tm.T = detail::uniform_in(pick, spec.T.first, spec.T.second);
    cfg.tm.s = detail::uniform_in(pick, spec.s.first, spec.s.second);
    cfg.csia.d = detail::uniform_in(pick, spec.d.first, spec.d.second);
    cfg.tm.ta_state_bits =
        detail::uniform_int_in(pick, spec.ta_bits.first, spec.ta_bits.second);
    cfg.csia.ia_state_bits =
        detail::uniform_int_in(pick, spec.ia_bits.first, spec.ia_bits.second);
    cfg.tm.weighted =
        spec.weighted[detail::uniform_int_in(
            pick, 0, static_cast<std::uint32_t>(spec.weighted.size() - 1))] !=
        0;

    const auto res = train_bn_experiment(net, cfg);
    SweepRow row;
    row.trial = t;
    row.T = cfg.tm.T;
    row.s = cfg.tm.s;
    row.d = cfg.csia.d;
    row.ta_bits = cfg.tm.ta_state_bits;
    row.ia_bits = cfg.csia.ia_state_bits;
    row.weighted = cfg.tm.weighted;
    const auto& recs = res.history.records;
    if (!recs.empty()) {
      row.mb_clauses_final = recs.back().categories.clean();
      const std::size_t window = std::max<std::size_t>(1, recs.size() / 10);
      double sum = 0;
      for (std::size_t i = recs.size() - window; i < recs.size(); ++i)
        sum += recs[i].categories.clean();
      row.mb_clauses_mean = sum / window;
      row.accuracy = recs.back().accuracy;
    }
    const auto cov = res.history.first_covered_epoch();
    row.or_epoch = cov ? static_cast<std::int64_t>(*cov) : -1;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return a.mb_clauses_final > b.mb_clauses_final;
                   });
  return rows;
}

/// Leaderboard CSV, one row per trial in rank order.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "rank,trial,T,s,d,ta_bits,ia_bits,weighted,mb_clauses_final,"
         "mb_clauses_mean,or_epoch,accuracy\n";
  out << std::setprecision(10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i + 1 << "," << r.trial << "," << r.T << "," << r.s << "," << r.d
        << "," << r.ta_bits << "," << r.ia_bits << "," << (r.weighted ? 1 : 0)
        << "," << r.mb_clauses_final << "," << r.mb_clauses_mean << ","
        << r.or_epoch << "," << r.accuracy << "\n";
  }
  return out.str();
}

}  // namespace mbtm::harness
