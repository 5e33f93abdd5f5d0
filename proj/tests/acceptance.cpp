// Acceptance gate: every claim the library ships with, checked end to
// end at full scale. One line per criterion; nonzero exit on failure.
//
// Heavier criteria print their parameters so a regression is easy to
// reproduce in isolation.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mbtm/analysis.hpp"
#include "mbtm/bn.hpp"
#include "mbtm/convergence.hpp"
#include "mbtm/csia.hpp"
#include "mbtm/data.hpp"
#include "mbtm/harness.hpp"
#include "mbtm/rng.hpp"
#include "mbtm/serialize.hpp"
#include "mbtm/tm.hpp"
#include "mbtm/trainer.hpp"

namespace fs = std::filesystem;
using namespace mbtm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(prec);
  out << std::fixed << v;
  return out.str();
}

// ---------------------------------------------------------------- 1 --

// Every CPD row of the nine-node network, written out independently,
// must be recoverable through exact inference; ancestral sampling must
// reproduce the exact marginals.
Outcome oracle_fidelity() {
  const auto net = bn::builtin_toy();
  const double tol = 1e-9;
  int rows = 0, bad = 0;
  const auto expect = [&](double got, double want) {
    ++rows;
    if (std::abs(got - want) > tol) ++bad;
  };

  expect(bn::conditional(net, "X5", {}), 0.4);
  expect(bn::conditional(net, "X6", {}), 0.3);
  expect(bn::conditional(net, "X7", {}), 0.2);
  expect(bn::conditional(net, "X8", {}), 0.1);
  expect(bn::conditional(net, "X1", {{"Y", 0}}), 0.1);
  expect(bn::conditional(net, "X1", {{"Y", 1}}), 0.9);
  expect(bn::conditional(net, "X2", {{"Y", 0}}), 0.2);
  expect(bn::conditional(net, "X2", {{"Y", 1}}), 0.4);
  expect(bn::conditional(net, "X4", {{"X8", 0}}), 0.4);
  expect(bn::conditional(net, "X4", {{"X8", 1}}), 0.6);

  const double y_rows[8] = {0.7, 0.6, 0.3, 0.4, 0.9, 0.2, 0.7, 0.6};
  for (int r = 0; r < 8; ++r)
    expect(bn::conditional(net, "Y",
                           {{"X5", std::uint8_t((r >> 2) & 1)},
                            {"X6", std::uint8_t((r >> 1) & 1)},
                            {"X7", std::uint8_t(r & 1)}}),
           y_rows[r]);

  const double x3_rows[4] = {0.2, 0.4, 0.8, 0.6};
  for (int r = 0; r < 4; ++r)
    expect(bn::conditional(net, "X3",
                           {{"Y", std::uint8_t((r >> 1) & 1)},
                            {"X4", std::uint8_t(r & 1)}}),
           x3_rows[r]);

  const std::size_t n = 1'000'000;
  const auto samples = bn::sample(net, n, 961748927);
  std::array<std::size_t, 9> ones{};
  for (const auto& a : samples)
    for (int i = 0; i < 9; ++i) ones[i] += a[i];

  const std::array<std::string, 9> names = {"X1", "X2", "X3", "X4", "X5",
                                            "X6", "X7", "X8", "Y"};
  int off = 0;
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double freq = static_cast<double>(ones[i]) / static_cast<double>(n);
    const double exact = bn::conditional(net, names[i], {});
    const double err = std::abs(freq - exact);
    worst = std::max(worst, err);
    if (err > 0.01) ++off;
  }
  // The sanity anchor: the noise root sits at 0.1 exactly.
  if (std::abs(static_cast<double>(ones[7]) / static_cast<double>(n) - 0.1) >
      0.01)
    ++off;

  Outcome o;
  o.pass = bad == 0 && off == 0;
  o.detail = std::to_string(rows) + " CPD rows at 1e-9; worst sampled "
             "marginal error " + fmt(worst, 4) + " over 10^6 draws";
  return o;
}

// ---------------------------------------------------------------- 2 --

// The computed boundary of the target must be exactly {X1..X7}, must
// screen off X8 in every context, and must contain no passenger: each
// member shifts the target's conditional somewhere.
Outcome boundary_ground_truth() {
  const auto net = bn::builtin_toy();
  const std::set<std::string> want = {"X1", "X2", "X3", "X4",
                                      "X5", "X6", "X7"};
  const bool exact = bn::markov_boundary(net, "Y") == want;

  const std::array<std::string, 7> vars = {"X1", "X2", "X3", "X4",
                                           "X5", "X6", "X7"};
  int screened = 0;
  bool screen_ok = true;
  for (int m = 0; m < 128; ++m) {
    bn::Evidence ev;
    for (int b = 0; b < 7; ++b) ev[vars[b]] = std::uint8_t((m >> b) & 1);
    const double base = bn::conditional(net, "Y", ev);
    for (int x8 = 0; x8 <= 1; ++x8) {
      ev["X8"] = std::uint8_t(x8);
      if (std::abs(bn::conditional(net, "Y", ev) - base) > 1e-9)
        screen_ok = false;
    }
    ev.erase("X8");
    ++screened;
  }

  // Necessity: dropping any member leaves a context where its value
  // still moves the target.
  bool all_needed = true;
  for (int drop = 0; drop < 7; ++drop) {
    bool matters = false;
    for (int m = 0; m < 64 && !matters; ++m) {
      bn::Evidence ev;
      int bit = 0;
      for (int b = 0; b < 7; ++b) {
        if (b == drop) continue;
        ev[vars[b]] = std::uint8_t((m >> bit) & 1);
        ++bit;
      }
      ev[vars[drop]] = 0;
      const double p0 = bn::conditional(net, "Y", ev);
      ev[vars[drop]] = 1;
      if (std::abs(bn::conditional(net, "Y", ev) - p0) > 1e-9) matters = true;
    }
    if (!matters) all_needed = false;
  }

  Outcome o;
  o.pass = exact && screen_ok && all_needed;
  o.detail = std::string(exact ? "boundary == {X1..X7}" : "boundary wrong") +
             "; X8 screened off in " + std::to_string(screened) +
             " contexts; every member moves the target";
  return o;
}

// ---------------------------------------------------------------- 3 --

// Over a full 0.1-resolution grid of three-node CPDs, the redundant
// variable earns a prune verdict at every drift rate, and the keep
// condition agrees with the informative variable's rate margin.
Outcome analytic_verdicts() {
  const double pds[3] = {0.005, 0.01, 0.05};
  int points = 0, bad = 0;
  for (int a = 1; a <= 9; ++a)
    for (int b = 1; b <= 9; ++b)
      for (int c = 1; c <= 9; ++c) {
        const auto net =
            bn::builtin_chain3(a / 10.0, b / 10.0, c / 10.0);
        for (const double pd : pds) {
          const auto rx2 = convergence::rates(net, "X2", pd);
          const auto rx1 = convergence::rates(net, "X1", pd);
          const auto kc = convergence::check_keep_condition(net, pd);
          if (rx2.verdict != convergence::Verdict::Prune) ++bad;
          if (kc.holds != (rx1.margin > 0)) ++bad;
          if (std::abs(kc.margin - rx1.margin) > 1e-9) ++bad;
          ++points;
        }
      }

  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(points) +
             " grid points: X2 always Prune, keep condition == X1 margin";
  return o;
}

// ---------------------------------------------------------------- 4 --

// With a comfortable analytic margin, long simulations through the real
// Type III path must prune the redundant literal almost always and the
// informative one almost never.
Outcome simulated_prune_agreement() {
  const auto net = bn::builtin_chain3(0.5, 0.9, 0.8);
  const double pd = 0.01;
  const double margin = convergence::rates(net, "X1", pd).margin;

  csia::CsiaConfig cc;
  cc.ia_state_bits = 10;
  cc.d = 1.0 / pd;
  const auto rep = convergence::simulate_chain(net, cc, 100'000, 200,
                                               20260816);

  Outcome o;
  o.pass = margin >= 0.1 && rep.x2.prune_frequency >= 0.95 &&
           rep.x1.prune_frequency <= 0.05;
  o.detail = "keep margin " + fmt(margin) + "; 200 runs, 10^5 pairs: X2 "
             "pruned " + fmt(rep.x2.prune_frequency) + ", X1 pruned " +
             fmt(rep.x1.prune_frequency);
  return o;
}

// ---------------------------------------------------------------- 5 --

// Full-scale run on the nine-node network: the noise variable ends up
// rarest, a healthy fraction of clauses never touch it, and the clause
// set jointly covers the whole boundary.
//
// Pruning budget at these settings: a fresh cell starts 2^(ia_bits-1)
// states above the prune line and drifts down ~2/d per event pair, so it
// must survive about d * 2^(ia_bits-2) pairs inside a single inclusion
// spell (~58k here, against typical spells carrying a few hundred).
Outcome toy_noise_exclusion() {
  const auto net = bn::builtin_toy();
  harness::ExperimentConfig cfg;
  cfg.tm.num_clauses = 200;
  cfg.tm.T = 17.33;
  cfg.tm.s = 66.81;
  cfg.tm.ta_state_bits = 6;
  cfg.tm.weighted = true;
  cfg.csia.ia_state_bits = 10;
  cfg.csia.d = 226.18;
  cfg.type3 = true;
  cfg.epochs = 100'000;
  cfg.samples_per_epoch = 100;
  cfg.metrics_every = 500;

  int rarest = 0, clean = 0, covered = 0;
  std::string per_seed, ranks;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const auto res = harness::train_bn_experiment(net, cfg);
    const auto& r = res.history.records.back();

    bool strict = true;
    int rank = 1;  // 1 = strictly rarest
    for (int i = 0; i < 7; ++i) {
      if (r.variable_frequency[7] >= r.variable_frequency[i]) strict = false;
      if (r.variable_frequency[7] > r.variable_frequency[i]) ++rank;
    }
    rarest += strict ? 1 : 0;
    ranks += (ranks.empty() ? "" : " ") + std::to_string(rank) + "of8@" +
             std::to_string(r.variable_frequency[7]);

    const double frac =
        r.categories.non_empty
            ? static_cast<double>(r.categories.clean()) /
                  static_cast<double>(r.categories.non_empty)
            : 0.0;
    clean += frac >= 0.40 ? 1 : 0;
    covered += res.history.first_covered_epoch().has_value() ? 1 : 0;

    per_seed += (per_seed.empty() ? "" : " ") + std::string("s") +
                std::to_string(seed) + "=" + fmt(frac, 2);
  }

  Outcome o;
  o.pass = rarest >= 4 && clean >= 4 && covered >= 4;
  o.detail = "noise var rarest " + std::to_string(rarest) +
             "/5 (rank@freq: " + ranks + "), clean fraction >= 0.40 in " +
             std::to_string(clean) + "/5 (" + per_seed +
             "), boundary OR-covered " + std::to_string(covered) + "/5";
  return o;
}

// ---------------------------------------------------------------- 6 --

// Image-scale check: with identical configurations, turning Type III on
// must cut mean literals per clause to a quarter or less without giving
// up accuracy. Uses MNIST digits 0 and 1 when a local copy exists,
// otherwise a generated stand-in with the same shape and format.

data::RawImageDataset synth_digits(std::size_t count, std::uint64_t seed) {
  data::RawImageDataset raw;
  raw.rows = 28;
  raw.cols = 28;
  Rng g(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::array<std::uint8_t, 784> img{};
    const std::uint8_t label = i % 2;  // 0: ring, 1: bar
    if (label == 1) {
      const int col = 11 + static_cast<int>(uniform01(g) * 5.0);
      const int width = 2 + static_cast<int>(uniform01(g) * 2.0);
      for (int r = 4; r < 24; ++r)
        for (int c = col; c < col + width && c < 28; ++c)
          img[static_cast<std::size_t>(r) * 28 + c] = 220;
    } else {
      const double cr = 13.5 + (uniform01(g) - 0.5) * 4.0;
      const double cc = 13.5 + (uniform01(g) - 0.5) * 4.0;
      const double radius = 6.5 + uniform01(g) * 2.5;
      for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) {
          const double dist = std::hypot(r - cr, c - cc);
          if (std::abs(dist - radius) < 1.6)
            img[static_cast<std::size_t>(r) * 28 + c] = 220;
        }
    }
    for (int k = 0; k < 16; ++k) {  // ~2% salt and pepper
      const auto p =
          static_cast<std::size_t>(uniform01(g) * 784.0) % 784;
      img[p] = img[p] > 75 ? 0 : 220;
    }
    raw.pixels.insert(raw.pixels.end(), img.begin(), img.end());
    raw.labels.push_back(label);
  }
  return raw;
}

bool load_mnist_pair(const fs::path& dir, const std::string& images,
                     const std::string& labels, data::RawImageDataset& out) {
  if (!fs::exists(dir / images) || !fs::exists(dir / labels)) return false;
  out = data::load_idx(dir / images, dir / labels);
  return true;
}

// Returns {train, test} with labels digit-0 -> 1, digit-1 -> 0.
std::pair<data::Dataset, data::Dataset> desk_data(bool& real) {
  data::RawImageDataset raw_train, raw_test;
  real = false;
  std::vector<fs::path> candidates;
  if (const char* env = std::getenv("MBTM_MNIST_DIR")) candidates.push_back(env);
  candidates.push_back("/root/data/mnist");
  candidates.push_back("/root/proj/data/mnist");
  for (const auto& dir : candidates) {
    try {
      if (load_mnist_pair(dir, "train-images-idx3-ubyte",
                          "train-labels-idx1-ubyte", raw_train) &&
          load_mnist_pair(dir, "t10k-images-idx3-ubyte",
                          "t10k-labels-idx1-ubyte", raw_test)) {
        real = true;
        break;
      }
    } catch (const std::exception&) {
      // Unreadable copy: fall through to the generated stand-in.
    }
  }
  if (!real) {
    // Round-trip through IDX files so the whole loading path is the
    // one under test.
    const fs::path dir = fs::temp_directory_path() / "mbtm_acceptance";
    fs::create_directories(dir);
    const auto train = synth_digits(4000, 1);
    const auto test = synth_digits(1000, 2);
    data::write_idx_images(dir / "train.img", 4000, 28, 28, train.pixels);
    data::write_idx_labels(dir / "train.lab", train.labels);
    data::write_idx_images(dir / "test.img", 1000, 28, 28, test.pixels);
    data::write_idx_labels(dir / "test.lab", test.labels);
    raw_train = data::load_idx(dir / "train.img", dir / "train.lab");
    raw_test = data::load_idx(dir / "test.img", dir / "test.lab");
  }
  auto train = data::filter_classes(data::binarize(raw_train), 0, 1);
  auto test = data::filter_classes(data::binarize(raw_test), 0, 1);
  return {data::head(train, 4000), data::head(test, 1000)};
}

Outcome desk_scale_pruning() {
  bool real = false;
  const auto [train, test] = desk_data(real);

  harness::ExperimentConfig base;
  base.tm.num_clauses = 100;
  base.tm.T = 25;
  base.tm.s = 50;
  base.tm.ta_state_bits = 8;
  base.tm.weighted = true;
  base.epochs = 60;
  base.metrics_every = 60;

  auto pruned = base;
  pruned.type3 = true;
  pruned.csia.ia_state_bits = 6;
  pruned.csia.d = 30;

  double lit_base = 0, lit_pruned = 0;
  bool acc_ok = true;
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    base.seed = seed;
    pruned.seed = seed;
    const auto rb = harness::train_dataset_experiment(train, &test, base);
    const auto rp = harness::train_dataset_experiment(train, &test, pruned);
    const auto& fb = rb.history.records.back();
    const auto& fp = rp.history.records.back();
    lit_base += fb.mean_literals;
    lit_pruned += fp.mean_literals;
    if (std::abs(fp.accuracy - fb.accuracy) > 0.02) acc_ok = false;
    accs += (accs.empty() ? "" : " ") + fmt(fb.accuracy) + "/" +
            fmt(fp.accuracy);
  }
  lit_base /= 3;
  lit_pruned /= 3;

  Outcome o;
  o.pass = lit_pruned <= 0.25 * lit_base && acc_ok && lit_base > 0;
  o.detail = std::string(real ? "mnist 0v1" : "generated 0v1") +
             ": mean literals " + fmt(lit_base, 1) + " -> " +
             fmt(lit_pruned, 1) + " (ratio " +
             fmt(lit_base > 0 ? lit_pruned / lit_base : 0.0) +
             "), accuracies base/pruned " + accs;
  return o;
}

// ---------------------------------------------------------------- 7 --

// Property sweep: state bounds under a long random stream, strict phase
// alternation, brute-force clause equivalence, serialization identity,
// and bit-level determinism of seeded runs.
Outcome property_suites() {
  std::vector<std::string> fails;

  {  // Action states stay in range with the include mask in sync.
    tm::TMConfig c;
    c.num_clauses = 4;
    c.T = 2;
    c.s = 3;
    c.ta_state_bits = 3;
    c.weighted = true;
    c.seed = 11;
    tm::TMModel m(c, 3);
    Rng g(99);
    std::vector<std::uint8_t> x(3);
    long violations = 0;
    for (int i = 0; i < 1'000'000; ++i) {
      for (auto& b : x) b = chance(g, 0.5) ? 1 : 0;
      const int y = chance(g, 0.5) ? 1 : 0;
      tm::fit_sample(m, x, y, g);
      for (const auto& cl : m.clauses())
        for (std::size_t k = 0; k < 6; ++k) {
          const auto st = cl.ta[k];
          if (st < 1 || st > m.max_state()) ++violations;
          if (cl.includes(k) != (st > m.midpoint())) ++violations;
        }
    }
    if (violations != 0) fails.push_back("ta-bounds");
  }

  {  // Confidence states stay in range; phases alternate strictly.
    csia::CsiaConfig cc;
    cc.ia_state_bits = 3;
    cc.d = 4;
    csia::CsiaCell cell;
    cell.state = csia::num_states(cc);
    cell.phase = csia::Phase::AwaitStep1;
    Rng g(7);
    long violations = 0;
    auto expected = csia::Scenario::Step1;
    for (int i = 0; i < 1'000'000; ++i) {
      csia::csia_update(cell, expected, chance(g, 0.5) ? 1 : 0, g, cc);
      if (cell.state < 1 || cell.state > csia::num_states(cc)) ++violations;
      const auto next = expected == csia::Scenario::Step1
                            ? csia::Phase::AwaitStep2
                            : csia::Phase::AwaitStep1;
      if (cell.phase != next) ++violations;
      expected = expected == csia::Scenario::Step1 ? csia::Scenario::Step2
                                                   : csia::Scenario::Step1;
    }
    if (violations != 0) fails.push_back("csia-bounds");
  }

  {  // Mask evaluation == literal-by-literal evaluation, all inputs.
    Rng g(1234);
    bool ok = true;
    for (int trial = 0; trial < 40 && ok; ++trial) {
      const std::uint32_t F = 1 + trial % 10;
      tm::TMConfig c;
      c.num_clauses = 2;
      c.T = 1;
      c.s = 3;
      c.ta_state_bits = 4;
      tm::TMModel m(c, F);
      for (std::size_t k = 0; k < 2 * F; ++k)
        m.set_ta_state(0, k,
                       chance(g, 0.35) ? m.midpoint() + 1 : m.midpoint());
      const auto& cl = m.clauses()[0];
      std::vector<std::uint8_t> x(F);
      for (std::uint32_t mask = 0; mask < (1u << F); ++mask) {
        for (std::uint32_t i = 0; i < F; ++i) x[i] = (mask >> i) & 1;
        for (const auto mode : {tm::EvalMode::Train, tm::EvalMode::Infer}) {
          int want;
          if (cl.included_count == 0) {
            want = mode == tm::EvalMode::Train ? 1 : 0;
          } else {
            want = 1;
            for (std::uint32_t i = 0; i < F; ++i) {
              if (cl.includes(2 * i) && x[i] != 1) want = 0;
              if (cl.includes(2 * i + 1) && x[i] != 0) want = 0;
            }
          }
          if (tm::clause_eval(m, cl, x, mode) != want) ok = false;
        }
      }
    }
    if (!ok) fails.push_back("clause-eval");
  }

  {  // Serialized bytes reload to the same bytes.
    Rng g(5150);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      tm::TMConfig c;
      c.num_clauses = 2 + 2 * (trial % 4);
      c.T = 5;
      c.s = 4;
      c.ta_state_bits = 4 + trial % 6;
      c.weighted = trial % 2 == 0;
      c.seed = static_cast<std::uint64_t>(trial) * 977;
      const std::uint32_t F = 1 + trial % 6;
      tm::TMModel m(c, F);
      for (auto& cl : m.clauses()) {
        if (c.weighted)
          cl.weight = 1 + static_cast<std::uint32_t>(uniform01(g) * 9.0);
      }
      for (std::size_t j = 0; j < c.num_clauses; ++j)
        for (std::size_t k = 0; k < 2 * F; ++k)
          m.set_ta_state(
              j, k,
              1 + static_cast<std::int64_t>(uniform01(g) *
                                            (m.max_state() - 1)));
      csia::CsiaConfig cc;
      cc.ia_state_bits = 5;
      cc.d = 20;
      auto bank = csia::init_bank(m, cc);
      const auto bytes = serialize::save_model(m, &bank);
      const auto loaded = serialize::load_model(bytes);
      const auto again = serialize::save_model(
          loaded.model, loaded.bank ? &*loaded.bank : nullptr);
      if (again != bytes) ok = false;

      const auto bare = serialize::save_model(m);
      if (serialize::save_model(serialize::load_model(bare).model) != bare)
        ok = false;
    }
    if (!ok) fails.push_back("serialize-roundtrip");
  }

  {  // Same seed, same run: models, metrics and sweeps byte-identical.
    const auto net = bn::builtin_toy();
    harness::ExperimentConfig cfg;
    cfg.tm.num_clauses = 20;
    cfg.tm.T = 8;
    cfg.tm.s = 5;
    cfg.tm.ta_state_bits = 6;
    cfg.tm.weighted = true;
    cfg.csia.ia_state_bits = 6;
    cfg.csia.d = 60;
    cfg.type3 = true;
    cfg.epochs = 300;
    cfg.samples_per_epoch = 20;
    cfg.metrics_every = 50;
    cfg.seed = 31337;
    const auto r1 = harness::train_bn_experiment(net, cfg);
    const auto r2 = harness::train_bn_experiment(net, cfg);
    const auto bytes1 =
        serialize::save_model(r1.model, r1.bank ? &*r1.bank : nullptr);
    const auto bytes2 =
        serialize::save_model(r2.model, r2.bank ? &*r2.bank : nullptr);
    if (bytes1 != bytes2) fails.push_back("train-determinism");
    if (analysis::to_csv(r1.history) != analysis::to_csv(r2.history))
      fails.push_back("metrics-determinism");

    harness::SweepSpec spec;
    spec.T = {5, 15};
    spec.s = {3, 20};
    spec.d = {30, 200};
    spec.ta_bits = {5, 8};
    spec.ia_bits = {5, 8};
    spec.trials = 4;
    spec.seed = 99;
    harness::ExperimentConfig base;
    base.tm.num_clauses = 10;
    base.epochs = 50;
    base.samples_per_epoch = 20;
    base.metrics_every = 10;
    const auto s1 = harness::sweep_csv(harness::run_sweep(net, spec, base));
    const auto s2 = harness::sweep_csv(harness::run_sweep(net, spec, base));
    if (s1 != s2) fails.push_back("sweep-determinism");
  }

  Outcome o;
  o.pass = fails.empty();
  if (o.pass) {
    o.detail = "state bounds over 10^6 updates, phase alternation, "
               "brute-force clause equivalence, serialization identity, "
               "seeded determinism";
  } else {
    o.detail = "failed:";
    for (const auto& f : fails) o.detail += " " + f;
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    double budget_seconds;  // 0: no budget
  };
  const Criterion criteria[] = {
      {"oracle-fidelity", oracle_fidelity, 10},
      {"boundary-ground-truth", boundary_ground_truth, 0},
      {"analytic-verdicts", analytic_verdicts, 5},
      {"simulated-prune-agreement", simulated_prune_agreement, 120},
      {"toy-noise-exclusion", toy_noise_exclusion, 900},
      {"desk-scale-pruning", desk_scale_pruning, 600},
      {"property-suites", property_suites, 0},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    bool pass = out.pass;
    std::string detail = out.detail;
    if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
      pass = false;
      detail += "; exceeded " + fmt(c.budget_seconds, 0) + "s budget";
    }
    if (!pass) ++failures;
    std::printf("[%s] %d %-26s %8.1fs  %s\n", pass ? "PASS" : "FAIL", index,
                c.name, secs, detail.c_str());
    std::fflush(stdout);
  }

  std::printf("acceptance: %d/7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
