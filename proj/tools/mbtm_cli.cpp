// Command-line front end: sampling, training, hyperparameter sweeps,
// convergence reports, and model inspection.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime
// failure (unreadable files, corrupt data, impossible queries).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mbtm/analysis.hpp"
#include "mbtm/bn.hpp"
#include "mbtm/convergence.hpp"
#include "mbtm/csia.hpp"
#include "mbtm/data.hpp"
#include "mbtm/harness.hpp"
#include "mbtm/net_format.hpp"
#include "mbtm/serialize.hpp"
#include "mbtm/tm.hpp"
#include "mbtm/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mbtm;

namespace {

struct NetChoice {
  std::string spec = "builtin-toy";
  double root_p = 0.5;
  double y_fid = 0.9;
  double x2_fid = 0.8;
};

void add_net_options(CLI::App* sub, NetChoice& net) {
  sub->add_option("--net", net.spec,
                  "builtin-toy, builtin-chain3, or a JSON network file")
      ->capture_default_str();
  sub->add_option("--root-p", net.root_p,
                  "builtin-chain3: P(X1=1)")
      ->capture_default_str();
  sub->add_option("--y-fid", net.y_fid,
                  "builtin-chain3: P(Y=1|X1=1) = 1 - P(Y=1|X1=0)")
      ->capture_default_str();
  sub->add_option("--x2-fid", net.x2_fid,
                  "builtin-chain3: P(X2=1|X1=1) = 1 - P(X2=1|X1=0)")
      ->capture_default_str();
}

bn::BayesNet load_net(const NetChoice& net) {
  if (net.spec == "builtin-toy") return bn::builtin_toy();
  if (net.spec == "builtin-chain3")
    return bn::builtin_chain3(net.root_p, net.y_fid, net.x2_fid);
  return bn::load_net(serialize::read_file(net.spec));
}

void emit(const std::optional<std::string>& out_path,
          const std::string& text) {
  if (out_path)
    serialize::write_file_atomic(*out_path, text);
  else
    std::cout << text;
}

std::vector<std::string> feature_names_for(
    const tm::TMModel& model, const std::optional<NetChoice>& net_choice) {
  if (!net_choice) {
    std::vector<std::string> names;
    for (std::uint32_t i = 0; i < model.feature_count(); ++i)
      names.push_back("X" + std::to_string(i + 1));
    return names;
  }
  const auto net = load_net(*net_choice);
  if (net.size() - 1 != model.feature_count())
    throw std::invalid_argument(
        "network feature count does not match the model");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (i != net.target_index()) names.push_back(net.node(i).name);
  return names;
}

// --- bn-sample ---

struct SampleArgs {
  NetChoice net;
  std::uint64_t count = 100;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

void run_bn_sample(const SampleArgs& a) {
  const auto net = load_net(a.net);
  std::ostringstream text;
  for (std::size_t i = 0; i < net.size(); ++i)
    text << (i ? " " : "") << net.node(i).name;
  text << "\n";

  Rng rng(a.seed);
  bn::Assignment row;
  for (std::uint64_t n = 0; n < a.count; ++n) {
    bn::sample_into(net, rng, row);
    for (std::size_t i = 0; i < row.size(); ++i)
      text << (i ? " " : "") << int(row[i]);
    text << "\n";
  }
  emit(a.out, text.str());
}

// --- train ---

struct TrainArgs {
  harness::ExperimentConfig cfg;
  NetChoice net;
  bool net_given = false;
  std::string train_images, train_labels, test_images, test_labels;
  std::uint32_t class_a = 0, class_b = 1;
  std::uint32_t threshold = 75;
  std::uint64_t max_train = 0, max_test = 0;  // 0: keep everything
  std::string out_dir;
};

data::Dataset idx_two_class(const std::string& images,
                            const std::string& labels, std::uint32_t class_a,
                            std::uint32_t class_b, std::uint32_t threshold,
                            std::uint64_t cap) {
  const auto raw = data::load_idx(images, labels);
  const auto mc = data::binarize(raw, static_cast<std::uint8_t>(threshold));
  auto ds = data::filter_classes(mc, static_cast<std::uint8_t>(class_a),
                                 static_cast<std::uint8_t>(class_b));
  if (cap > 0 && ds.size() > cap) ds = data::head(ds, cap);
  return ds;
}

void run_train(const TrainArgs& a) {
  harness::ExperimentResult result = [&] {
    if (a.net_given)
      return harness::train_bn_experiment(load_net(a.net), a.cfg);
    const auto train = idx_two_class(a.train_images, a.train_labels,
                                     a.class_a, a.class_b, a.threshold,
                                     a.max_train);
    std::optional<data::Dataset> eval;
    if (!a.test_images.empty())
      eval = idx_two_class(a.test_images, a.test_labels, a.class_a,
                           a.class_b, a.threshold, a.max_test);
    return harness::train_dataset_experiment(train, eval ? &*eval : nullptr,
                                             a.cfg);
  }();

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  serialize::write_file_atomic(dir / "metrics.csv",
                               analysis::to_csv(result.history));
  serialize::write_file_atomic(
      dir / "model.bin",
      serialize::save_model(result.model,
                            result.bank ? &*result.bank : nullptr));
  serialize::write_file_atomic(
      dir / "rules.txt",
      tm::export_rules(result.model, result.history.feature_names));

  const auto& recs = result.history.records;
  std::cout << "epochs=" << a.cfg.epochs
            << " accuracy=" << (recs.empty() ? 0.0 : recs.back().accuracy)
            << " mean_literals="
            << (recs.empty() ? 0.0 : recs.back().mean_literals)
            << " prunes=" << result.total_prunes << "\n";
}

// --- sweep ---

struct SweepArgs {
  harness::SweepSpec spec;
  harness::ExperimentConfig base;
  NetChoice net;
  std::vector<std::uint32_t> weighted_choices = {0, 1};
  std::optional<std::string> out;
};

void run_sweep_cmd(const SweepArgs& a) {
  const auto rows = harness::run_sweep(load_net(a.net), a.spec, a.base);
  emit(a.out, harness::sweep_csv(rows));
  if (a.out && !rows.empty()) {
    const auto& top = rows.front();
    std::cout << "best trial=" << top.trial << " T=" << top.T
              << " s=" << top.s << " d=" << top.d
              << " ta_bits=" << top.ta_bits << " ia_bits=" << top.ia_bits
              << " weighted=" << (top.weighted ? 1 : 0)
              << " mb_clauses_final=" << top.mb_clauses_final << "\n";
  }
}

// --- converge ---

struct ConvergeArgs {
  NetChoice net;
  csia::CsiaConfig csia;
  double pd = 0.0;  // 0: derive from csia.d
  std::uint64_t horizon = 100'000;
  std::uint32_t runs = 200;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

json rate_json(const convergence::RateReport& r) {
  return {{"p_inc", r.p_inc},
          {"p_dec", r.p_dec},
          {"margin", r.margin},
          {"event_bound", r.event_bound},
          {"verdict",
           r.verdict == convergence::Verdict::Keep ? "keep" : "prune"}};
}

void run_converge(const ConvergeArgs& a) {
  auto cfg = a.csia;
  if (a.pd > 0.0) cfg.d = 1.0 / a.pd;
  const double p_d = csia::drift_probability(cfg);
  const auto net = load_net(a.net);

  json report;
  report["p_d"] = p_d;
  report["ia_state_bits"] = cfg.ia_state_bits;
  report["rates"] = {{"X1", rate_json(convergence::rates(net, "X1", p_d))},
                     {"X2", rate_json(convergence::rates(net, "X2", p_d))}};
  const auto kc = convergence::check_keep_condition(net, p_d);
  report["keep_condition"] = {{"holds", kc.holds}, {"margin", kc.margin}};

  if (a.runs > 0) {
    const auto sim =
        convergence::simulate_chain(net, cfg, a.horizon, a.runs, a.seed);
    report["simulation"] = {
        {"runs", sim.runs},
        {"horizon", sim.horizon},
        {"total_samples", sim.total_samples},
        {"x1",
         {{"prune_frequency", sim.x1.prune_frequency},
          {"mean_final_state", sim.x1.mean_final_state}}},
        {"x2",
         {{"prune_frequency", sim.x2.prune_frequency},
          {"mean_final_state", sim.x2.mean_final_state}}}};
  }
  emit(a.out, report.dump(2) + "\n");
}

// --- analyze ---

struct AnalyzeArgs {
  std::string model_path;
  std::optional<NetChoice> net;
  std::optional<std::string> out;
};

void run_analyze(const AnalyzeArgs& a) {
  const auto loaded =
      serialize::load_model(serialize::read_file(a.model_path));
  const auto& model = loaded.model;
  const auto names = feature_names_for(model, a.net);

  json report;
  report["num_clauses"] = model.config().num_clauses;
  report["feature_count"] = model.feature_count();
  report["weighted"] = model.config().weighted;
  report["mean_literals"] = analysis::mean_literals(model);

  const auto freq = analysis::literal_frequency(model);
  json vf = json::object();
  for (std::size_t i = 0; i < names.size(); ++i)
    vf[names[i]] = freq.per_variable[i];
  report["variable_frequency"] = vf;

  std::uint32_t non_empty = 0;
  for (const auto& c : model.clauses()) non_empty += c.included_count > 0;
  report["non_empty_clauses"] = non_empty;

  if (a.net) {
    const auto net = load_net(*a.net);
    const auto boundary = bn::markov_boundary(net, net.target());
    const auto cats = analysis::categorize_clauses(model, boundary, names);
    json jc = json::object();
    for (std::size_t i = 0; i < analysis::kCategoryNames.size(); ++i)
      jc[analysis::kCategoryNames[i]] = cats.total[i];
    report["categories"] = jc;
    report["boundary_clean_clauses"] = cats.clean();
  }

  report["bank"] = json::object();
  report["bank"]["present"] = loaded.bank.has_value();
  if (loaded.bank) report["bank"]["cells"] = loaded.bank->size();

  emit(a.out, report.dump(2) + "\n");
}

// --- export-rules ---

struct ExportArgs {
  std::string model_path;
  std::optional<NetChoice> net;
  std::optional<std::string> out;
};

void run_export(const ExportArgs& a) {
  const auto loaded =
      serialize::load_model(serialize::read_file(a.model_path));
  emit(a.out, tm::export_rules(loaded.model,
                               feature_names_for(loaded.model, a.net)));
}

void add_tm_options(CLI::App* sub, harness::ExperimentConfig& cfg) {
  sub->add_option("--clauses", cfg.tm.num_clauses, "clause count (even)")
      ->capture_default_str();
  sub->add_option("-T,--threshold-T", cfg.tm.T, "voting clamp T")
      ->capture_default_str();
  sub->add_option("-s,--specificity", cfg.tm.s, "specificity s")
      ->capture_default_str();
  sub->add_option("--ta-bits", cfg.tm.ta_state_bits, "TA state bits")
      ->capture_default_str();
  sub->add_flag("--weighted", cfg.tm.weighted, "use clause weights");
  sub->add_flag("--boost", cfg.tm.boost_true_positive,
                "always reinforce true-positive literals");
  sub->add_flag("--type3", cfg.type3, "enable confidence-driven pruning");
  sub->add_option("--d", cfg.csia.d, "drift divisor, p_d = 1/d")
      ->capture_default_str();
  sub->add_option("--ia-bits", cfg.csia.ia_state_bits,
                  "confidence automaton state bits")
      ->capture_default_str();
  sub->add_option("--epochs", cfg.epochs, "training epochs")
      ->capture_default_str();
  sub->add_option("--metrics-every", cfg.metrics_every,
                  "record metrics every K epochs")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tsetlin machine training with confidence-driven pruning"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* sample_cmd =
      app.add_subcommand("bn-sample", "Write network samples as text");
  add_net_options(sample_cmd, sample.net);
  sample_cmd->add_option("--count", sample.count, "number of samples")
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "RNG seed")
      ->capture_default_str();
  sample_cmd->add_option("--out", sample.out, "output file (default stdout)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand(
      "train", "Train on network samples or IDX image files");
  add_tm_options(train_cmd, train.cfg);
  auto* net_opt =
      train_cmd->add_option("--net", train.net.spec,
                            "builtin-toy, builtin-chain3, or a JSON file");
  train_cmd->add_option("--root-p", train.net.root_p, "builtin-chain3 root");
  train_cmd->add_option("--y-fid", train.net.y_fid, "builtin-chain3 Y row");
  train_cmd->add_option("--x2-fid", train.net.x2_fid,
                        "builtin-chain3 X2 row");
  train_cmd
      ->add_option("--samples-per-epoch", train.cfg.samples_per_epoch,
                   "fresh samples per epoch (network mode)")
      ->capture_default_str();
  auto* imgs_opt = train_cmd->add_option("--train-images", train.train_images,
                                         "IDX image file");
  auto* labs_opt = train_cmd->add_option("--train-labels", train.train_labels,
                                         "IDX label file");
  imgs_opt->needs(labs_opt);
  labs_opt->needs(imgs_opt);
  imgs_opt->excludes(net_opt);
  auto* test_imgs = train_cmd->add_option("--test-images", train.test_images,
                                          "IDX evaluation images");
  auto* test_labs = train_cmd->add_option("--test-labels", train.test_labels,
                                          "IDX evaluation labels");
  test_imgs->needs(test_labs);
  test_labs->needs(test_imgs);
  train_cmd->add_option("--class-a", train.class_a, "label mapped to 1")
      ->capture_default_str();
  train_cmd->add_option("--class-b", train.class_b, "label mapped to 0")
      ->capture_default_str();
  train_cmd
      ->add_option("--binarize-threshold", train.threshold,
                   "pixels above this become 1")
      ->capture_default_str();
  train_cmd->add_option("--max-train", train.max_train,
                        "cap on training rows (0: all)");
  train_cmd->add_option("--max-test", train.max_test,
                        "cap on evaluation rows (0: all)");
  train_cmd->add_flag("--no-shuffle",
                      [&train](std::int64_t) { train.cfg.shuffle = false; },
                      "keep dataset order every epoch");
  train_cmd->add_option("--out", train.out_dir, "output directory")
      ->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Random hyperparameter search on a network experiment");
  add_net_options(sweep_cmd, sweep.net);
  sweep_cmd->add_option("--trials", sweep.spec.trials, "configs to draw")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.spec.seed, "sweep seed")
      ->capture_default_str();
  sweep_cmd->add_option("--T-range", sweep.spec.T, "min max");
  sweep_cmd->add_option("--s-range", sweep.spec.s, "min max");
  sweep_cmd->add_option("--d-range", sweep.spec.d, "min max");
  sweep_cmd->add_option("--ta-bits-range", sweep.spec.ta_bits, "min max");
  sweep_cmd->add_option("--ia-bits-range", sweep.spec.ia_bits, "min max");
  sweep_cmd
      ->add_option("--weighted-choices", sweep.weighted_choices,
                   "0, 1, or both")
      ->delimiter(',');
  sweep_cmd->add_option("--clauses", sweep.base.tm.num_clauses, "clause count")
      ->capture_default_str();
  sweep_cmd->add_option("--epochs", sweep.base.epochs, "epochs per trial")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--samples-per-epoch", sweep.base.samples_per_epoch,
                   "fresh samples per epoch")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--metrics-every", sweep.base.metrics_every,
                   "record metrics every K epochs")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "leaderboard CSV file");

  ConvergeArgs conv;
  auto* conv_cmd = app.add_subcommand(
      "converge", "Analytic keep/prune rates plus a chain simulation");
  add_net_options(conv_cmd, conv.net);
  conv_cmd->get_option("--net")->default_str("builtin-chain3");
  conv.net.spec = "builtin-chain3";
  auto* d_opt = conv_cmd->add_option("--d", conv.csia.d,
                                     "drift divisor, p_d = 1/d");
  conv_cmd->add_option("--pd", conv.pd, "drift probability (overrides --d)")
      ->excludes(d_opt);
  conv_cmd->add_option("--ia-bits", conv.csia.ia_state_bits,
                       "confidence automaton state bits")
      ->capture_default_str();
  conv_cmd->add_option("--horizon", conv.horizon, "step pairs per automaton")
      ->capture_default_str();
  conv_cmd->add_option("--runs", conv.runs, "simulation runs (0: skip)")
      ->capture_default_str();
  conv_cmd->add_option("--seed", conv.seed, "RNG seed")
      ->capture_default_str();
  conv_cmd->add_option("--out", conv.out, "JSON report file");

  AnalyzeArgs analyze;
  NetChoice analyze_net;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Summarize a saved model as JSON");
  analyze_cmd->add_option("--model", analyze.model_path, "model file")
      ->required();
  auto* analyze_net_opt = analyze_cmd->add_option(
      "--net", analyze_net.spec, "network for names and clause categories");
  analyze_cmd->add_option("--root-p", analyze_net.root_p, "chain3 root");
  analyze_cmd->add_option("--y-fid", analyze_net.y_fid, "chain3 Y row");
  analyze_cmd->add_option("--x2-fid", analyze_net.x2_fid, "chain3 X2 row");
  analyze_cmd->add_option("--out", analyze.out, "JSON report file");

  ExportArgs exp;
  NetChoice export_net;
  auto* export_cmd = app.add_subcommand(
      "export-rules", "Print a saved model's clauses as boolean rules");
  export_cmd->add_option("--model", exp.model_path, "model file")->required();
  auto* export_net_opt = export_cmd->add_option(
      "--net", export_net.spec, "network supplying feature names");
  export_cmd->add_option("--out", exp.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  train.net_given = net_opt->count() > 0 || train.train_images.empty();
  if (analyze_net_opt->count() > 0) analyze.net = analyze_net;
  if (export_net_opt->count() > 0) exp.net = export_net;
  sweep.spec.weighted.clear();
  for (const auto w : sweep.weighted_choices)
    sweep.spec.weighted.push_back(w != 0);

  const std::function<void()> action = [&]() -> std::function<void()> {
    if (app.got_subcommand(sample_cmd)) return [&] { run_bn_sample(sample); };
    if (app.got_subcommand(train_cmd)) return [&] { run_train(train); };
    if (app.got_subcommand(sweep_cmd)) return [&] { run_sweep_cmd(sweep); };
    if (app.got_subcommand(conv_cmd)) return [&] { run_converge(conv); };
    if (app.got_subcommand(analyze_cmd)) return [&] { run_analyze(analyze); };
    return [&] { run_export(exp); };
  }();

  try {
    action();
  } catch (const mbtm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mbtm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
