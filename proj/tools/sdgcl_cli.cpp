// sdgcl: dataset preparation, training, evaluation, perturbation sweeps and ablations
// for signed directed graph contrastive learning.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdgcl/checkpoint.hpp"
#include "sdgcl/error.hpp"
#include "sdgcl/pipeline.hpp"
#include "sdgcl/spectral.hpp"
#include "sdgcl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sdgcl;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// "0.1pi" -> 0.1 * pi; plain numbers are radians / plain values.
double parse_value(const std::string& token) {
  std::string t = token;
  double scale = 1.0;
  if (t.size() > 2 && (t.ends_with("pi") || t.ends_with("PI"))) {
    scale = std::numbers::pi;
    t.resize(t.size() - 2);
    if (t.ends_with("*")) t.pop_back();
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse number '" + token + "'");
  }
  if (used != t.size()) throw InputError("cannot parse number '" + token + "'");
  return value * scale;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(parse_value(token));
  }
  if (out.empty()) throw InputError("empty value list '" + text + "'");
  return out;
}

std::vector<std::string> split_paths(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

/// Flags shared by train / sweep / ablate. Every field overrides the config file when set.
struct RunFlags {
  std::string config_file;
  std::string dataset;
  std::optional<std::string> format;
  std::string out;
  std::optional<std::uint64_t> seed, split_seed;
  std::optional<int> seeds, epochs, patience, layers;
  std::optional<double> alpha, tau, p, r, q_base, q_noise_std, lr, weight_decay, threshold, sample_ratio;
  std::optional<std::string> q_grid;
  std::optional<Index> dim;
  bool symmetric_inter = false, no_projection = false, freeze_sampling = false, verbose = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON run configuration (flags override it)");
    app->add_option("--dataset", dataset, "prepared split directory or raw edge-list file");
    app->add_option("--format", format, "raw edge-list format: three-column | snap-rating");
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--seed", seed, "training seed (first seed with --seeds)");
    app->add_option("--split-seed", split_seed, "split seed when --dataset is a raw file");
    app->add_option("--seeds", seeds, "number of consecutive seeds to run");
    app->add_option("--alpha", alpha, "contrastive loss weight");
    app->add_option("--tau", tau, "contrastive temperature");
    app->add_option("--p", p, "sign perturbation ratio");
    app->add_option("--r", r, "direction perturbation ratio");
    app->add_option("--q-grid", q_grid, "comma-separated phase choices, e.g. 0,0.1pi,0.2pi");
    app->add_option("--q-base", q_base, "base phase for Gaussian-noise mode");
    app->add_option("--q-noise-std", q_noise_std, "phase noise std (0 = discrete grid)");
    app->add_option("--epochs", epochs, "maximum epochs");
    app->add_option("--patience", patience, "early-stopping patience on validation AUC");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--weight-decay", weight_decay, "L2 weight decay");
    app->add_option("--dim", dim, "embedding dimension d");
    app->add_option("--layers", layers, "number of convolution layers");
    app->add_option("--threshold", threshold, "decision threshold for F1 metrics");
    app->add_option("--sample-ratio", sample_ratio, "positive:negative training sample ratio");
    app->add_flag("--symmetric-inter", symmetric_inter, "average both anchor directions of the inter-view loss");
    app->add_flag("--no-projection", no_projection, "contrastive losses on Z without projection head");
    app->add_flag("--freeze-sampling", freeze_sampling, "draw the 3:1 training sample once");
    app->add_flag("--verbose", verbose, "print per-epoch progress to stderr");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw InputError("cannot open config " + config_file);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw InputError(config_file + ": " + e.what());
      }
      c = apply_config_json(c, j);
    }
    if (!dataset.empty()) c.dataset = dataset;
    if (format) c.format = parse_format(*format);
    if (seed) c.train.seed = c.perturbation.seed = *seed;
    if (split_seed) c.split_seed = *split_seed;
    if (seeds) c.seeds = *seeds;
    if (alpha) c.train.alpha = *alpha;
    if (tau) c.train.tau = *tau;
    if (p) c.perturbation.sign_flip_ratio = *p;
    if (r) c.perturbation.direction_flip_ratio = *r;
    if (q_grid) c.perturbation.q_choices = parse_list(*q_grid);
    if (q_base) c.perturbation.q_base = *q_base;
    if (q_noise_std) c.perturbation.q_noise_std = *q_noise_std;
    if (epochs) c.train.max_epochs = *epochs;
    if (patience) c.train.patience = *patience;
    if (lr) c.train.lr = *lr;
    if (weight_decay) c.train.weight_decay = *weight_decay;
    if (dim) c.dims.embed_dim = c.dims.hidden_dim = c.dims.input_dim = *dim;
    if (layers) c.dims.num_layers = *layers;
    if (threshold) c.train.threshold = *threshold;
    if (sample_ratio) c.train.sample_ratio = *sample_ratio;
    if (symmetric_inter) c.train.symmetric_inter_loss = true;
    if (no_projection) c.train.use_projection = false;
    if (freeze_sampling) c.train.freeze_sampling = true;
    if (c.dataset.empty()) throw InputError("--dataset is required");
    c.validate();
    return c;
  }
};

void report_self_loops(const PreparedData& data) {
  if (data.dropped_self_loops > 0) {
    std::cerr << "dropped " << data.dropped_self_loops << " self-loop edge(s)\n";
  }
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::uint64_t> seed_list(const RunConfig& c) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < c.seeds; ++k) seeds.push_back(c.train.seed + static_cast<std::uint64_t>(k));
  return seeds;
}

RunConfig with_seed(RunConfig c, std::uint64_t seed) {
  c.train.seed = c.perturbation.seed = seed;
  c.seeds = 1;
  return c;
}

// One full run written to `dir`: config snapshot, epoch log, checkpoint, metrics.
RunResult run_and_record(const PreparedData& data, const RunConfig& config, const fs::path& dir,
                         bool verbose) {
  fs::create_directories(dir);
  write_json(dir / "config.json", to_json(config));
  std::ofstream log(dir / "train_log.jsonl");
  if (!log) throw InputError("cannot write " + (dir / "train_log.jsonl").string());

  RunResult result;
  result.fit = fit(data.num_nodes, data.split, config.perturbation, config.train, config.dims,
                   [&](const EpochLog& e) {
                     log << epoch_json(e).dump() << '\n';
                     if (verbose) {
                       std::cerr << "epoch " << e.epoch << " total " << e.loss.total << " val_auc "
                                 << e.val_auc << '\n';
                     }
                   });
  result.valid = evaluate_split(result.fit.params, data, config.perturbation, data.split.valid,
                                config.train.threshold);
  result.test = evaluate_split(result.fit.params, data, config.perturbation, data.split.test,
                               config.train.threshold);
  save_checkpoint(dir / "checkpoint.txt", result.fit.params);

  nlohmann::ordered_json metrics;
  metrics["seed"] = config.train.seed;
  metrics["best_epoch"] = result.fit.best_epoch;
  metrics["epochs_run"] = result.fit.log.size();
  metrics["best_val_auc"] = result.fit.best_val_auc;
  metrics["valid"] = metrics_json(result.valid, config.train.seed);
  metrics["test"] = metrics_json(result.test, config.train.seed);
  write_json(dir / "metrics.json", metrics);
  return result;
}

struct SeedAggregate {
  std::vector<MetricsReport> valid, test;
};

SeedAggregate run_seeds(const PreparedData& data, const RunConfig& config, const fs::path& out,
                        bool verbose) {
  SeedAggregate agg;
  const auto seeds = seed_list(config);
  for (std::uint64_t seed : seeds) {
    const fs::path dir = seeds.size() == 1 ? out : out / ("seed_" + std::to_string(seed));
    const RunResult r = run_and_record(data, with_seed(config, seed), dir, verbose);
    agg.valid.push_back(r.valid);
    agg.test.push_back(r.test);
  }
  return agg;
}

int cmd_prepare(const std::string& dataset, const std::string& format, std::uint64_t seed,
                const std::string& out) {
  if (!fs::exists(dataset)) throw InputError("dataset not found: " + dataset);
  const PreparedData data = prepare_dataset(dataset, parse_format(format), seed);
  report_self_loops(data);
  write_prepared(out, data);
  std::cout << "nodes " << data.num_nodes << " train " << data.split.train.size() << " valid "
            << data.split.valid.size() << " test " << data.split.test.size() << '\n';
  return 0;
}

int cmd_train(const RunFlags& flags) {
  const RunConfig config = flags.resolve();
  const PreparedData data = load_dataset(config.dataset, config.format, config.split_seed);
  report_self_loops(data);
  const fs::path out = flags.out;
  fs::create_directories(out);
  const SeedAggregate agg = run_seeds(data, config, out, flags.verbose);

  if (agg.test.size() > 1) {
    nlohmann::ordered_json summary;
    summary["seeds"] = seed_list(config);
    summary["valid"] = summarize(agg.valid);
    summary["test"] = summarize(agg.test);
    write_json(out / "summary.json", summary);
    const auto test = summarize(agg.test);
    std::cout << "test over " << agg.test.size() << " seeds:";
    for (const auto& [name, s] : test.items()) {
      std::cout << ' ' << name << ' ' << s["mean"].get<double>() << " ± " << s["std"].get<double>();
    }
    std::cout << '\n';
  } else {
    const auto& t = agg.test.front();
    std::cout << "test auc " << t.auc << " macro_f1 " << t.macro_f1 << " micro_f1 " << t.micro_f1
              << " binary_f1 " << t.binary_f1 << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& checkpoint, const std::string& dataset,
             const std::optional<std::string>& format, const std::string& split, std::optional<double> threshold, const std::string& out) {
  RunConfig config;
  const fs::path run = run_dir;
  if (!run_dir.empty()) {
    std::ifstream in(run / "config.json");
    if (!in) throw InputError("missing " + (run / "config.json").string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError((run / "config.json").string() + ": " + e.what());
    }
    config = apply_config_json(config, j);
  }
  if (!dataset.empty()) config.dataset = dataset;
  if (format) config.format = parse_format(*format);
  if (threshold) config.train.threshold = *threshold;
  if (config.dataset.empty()) throw InputError("--dataset is required without --run");
  const fs::path ckpt = checkpoint.empty() ? run / "checkpoint.txt" : fs::path(checkpoint);

  const PreparedData data = load_dataset(config.dataset, config.format, config.split_seed);
  ModelDims expected = config.dims;
  expected.num_nodes = data.num_nodes;
  const EncoderParams params = load_checkpoint(ckpt, expected);

  const std::vector<EdgeRecord>* edges = nullptr;
  if (split == "test") edges = &data.split.test;
  else if (split == "valid") edges = &data.split.valid;
  else if (split == "train") edges = &data.split.train;
  else throw InputError("--split must be train, valid or test");

  const MetricsReport report =
      evaluate_split(params, data, config.perturbation, *edges, config.train.threshold);
  const auto j = metrics_json(report, config.train.seed);
  std::cout << j.dump(2) << '\n';
  if (!out.empty()) write_json(out, j);
  return 0;
}

int cmd_sweep(const RunFlags& flags, const std::string& parameter, const std::string& values) {
  const RunConfig base = flags.resolve();
  const PreparedData data = load_dataset(base.dataset, base.format, base.split_seed);
  const fs::path out = flags.out;
  fs::create_directories(out);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::ofstream tsv(out / "sweep.tsv");
  tsv << parameter << "\tauc_mean\tauc_std\tmacro_f1_mean\tmacro_f1_std\n";
  std::cout << parameter << "\tauc_mean\tauc_std\tmacro_f1_mean\tmacro_f1_std\n";
  for (double value : parse_list(values)) {
    const RunConfig config = apply_sweep_point(base, parameter, value);
    std::ostringstream tag;
    tag << parameter << '_' << value;
    const SeedAggregate agg = run_seeds(data, config, out / tag.str(), flags.verbose);
    const auto summary = summarize(agg.test);
    nlohmann::ordered_json row;
    row["value"] = value;
    row["test"] = summary;
    rows.push_back(row);
    std::ostringstream line;
    line << value << '\t' << summary["auc"]["mean"].get<double>() << '\t'
         << summary["auc"]["std"].get<double>() << '\t' << summary["macro_f1"]["mean"].get<double>()
         << '\t' << summary["macro_f1"]["std"].get<double>() << '\n';
    tsv << line.str();
    std::cout << line.str() << std::flush;
  }
  nlohmann::ordered_json j;
  j["parameter"] = parameter;
  j["seeds"] = seed_list(base);
  j["rows"] = rows;
  write_json(out / "sweep.json", j);
  return 0;
}

int cmd_ablate(const RunFlags& flags) {
  const RunConfig base = flags.resolve();
  const auto datasets = split_paths(base.dataset.string());
  const fs::path out = flags.out;
  fs::create_directories(out);

  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  std::vector<std::vector<double>> auc_means(std::size(kAllVariants));
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    RunConfig per_dataset = base;
    per_dataset.dataset = datasets[d];
    const PreparedData data = load_dataset(per_dataset.dataset, base.format, base.split_seed);
    for (std::size_t v = 0; v < std::size(kAllVariants); ++v) {
      const RunConfig config = apply_variant(per_dataset, kAllVariants[v]);
      const fs::path dir = out / ("dataset_" + std::to_string(d)) / ("variant_" + std::to_string(v));
      const SeedAggregate agg = run_seeds(data, config, dir, flags.verbose);
      const auto summary = summarize(agg.test);
      auc_means[v].push_back(summary["auc"]["mean"].get<double>());
      nlohmann::ordered_json row;
      row["dataset"] = datasets[d];
      row["variant"] = variant_name(kAllVariants[v]);
      row["test"] = summary;
      table.push_back(row);
    }
  }

  std::ostringstream tsv;
  tsv << "variant";
  for (const auto& d : datasets) tsv << '\t' << fs::path(d).filename().string();
  tsv << '\n';
  for (std::size_t v = 0; v < std::size(kAllVariants); ++v) {
    tsv << variant_name(kAllVariants[v]);
    for (double a : auc_means[v]) tsv << '\t' << std::setprecision(4) << std::fixed << a;
    tsv << '\n';
  }
  std::ofstream(out / "ablation.tsv") << tsv.str();
  nlohmann::ordered_json j;
  j["seeds"] = seed_list(base);
  j["rows"] = table;
  write_json(out / "ablation.json", j);
  std::cout << tsv.str();
  return 0;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out) {
  const SignedDiGraph g = make_synthetic_graph(spec);
  write_edges(out, g.edges());
  std::cout << "nodes " << g.num_nodes() << " positive " << g.num_positive() << " negative "
            << g.num_negative() << '\n';
  return 0;
}

int cmd_operator(const std::string& dataset, const std::string& format, const std::string& kind,
                 double q, const std::string& out) {
  const LoadedGraph loaded = load_edge_list(dataset, parse_format(format));
  const PhaseSpec spec{q};
  HermitianMatrix m;
  if (kind == "hermitian") m = hermitian_adjacency(loaded.graph, spec);
  else if (kind == "unnormalized") m = laplacian_unnormalized(loaded.graph, spec);
  else if (kind == "normalized") m = laplacian_normalized(loaded.graph, spec);
  else if (kind == "propagation") m = renormalized_propagation(loaded.graph, spec);
  else throw InputError("--kind must be hermitian, unnormalized, normalized or propagation");
  if (out.empty()) {
    write_operator(std::cout, m);
  } else {
    std::ofstream file(out);
    if (!file) throw InputError("cannot write " + out);
    write_operator(file, m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signed directed graph contrastive learning"};
  app.require_subcommand(1);

  std::string prep_dataset, prep_format = "snap-rating", prep_out;
  std::uint64_t prep_seed = 0;
  auto* prepare = app.add_subcommand("prepare", "load an edge list and write a 60/20/20 split");
  prepare->add_option("--dataset", prep_dataset, "raw edge-list file")->required();
  prepare->add_option("--format", prep_format, "three-column | snap-rating");
  prepare->add_option("--seed", prep_seed, "split seed");
  prepare->add_option("--out", prep_out, "output directory")->required();

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "train, checkpoint and evaluate");
  train_flags.attach(train);

  std::string eval_run, eval_ckpt, eval_dataset, eval_split = "test", eval_out;
  std::optional<double> eval_threshold;
  std::optional<std::string> eval_format;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval->add_option("--run", eval_run, "run directory written by train");
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file (default <run>/checkpoint.txt)");
  eval->add_option("--dataset", eval_dataset, "prepared split directory (default from run config)");
  eval->add_option("--format", eval_format, "raw edge-list format when --dataset is a file");
  eval->add_option("--split", eval_split, "train | valid | test");
  eval->add_option("--threshold", eval_threshold, "decision threshold");
  eval->add_option("--out", eval_out, "write the metrics JSON here");

  RunFlags sweep_flags;
  std::string sweep_param, sweep_values;
  auto* sweep = app.add_subcommand("sweep", "metric vs perturbation strength");
  sweep_flags.attach(sweep);
  sweep->add_option("--sweep", sweep_param, "p | r | pr | q_noise_std")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  RunFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "AUC table over the six model variants");
  ablate_flags.attach(ablate);

  SyntheticSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a planted-signal synthetic signed graph");
  synth->add_option("--nodes", synth_spec.num_nodes, "node count");
  synth->add_option("--edges", synth_spec.num_edges, "edge count");
  synth->add_option("--positive-ratio", synth_spec.positive_ratio, "fraction of positive edges");
  synth->add_option("--reciprocity", synth_spec.reciprocity, "probability of a reverse edge");
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--out", synth_out, "three-column output file")->required();

  std::string op_dataset, op_format = "three-column", op_kind = "propagation", op_out;
  double op_q = 0.2 * std::numbers::pi;
  auto* op = app.add_subcommand("operator", "dump an operator as 'row col real imag' lines");
  op->add_option("--dataset", op_dataset, "edge-list file")->required();
  op->add_option("--format", op_format, "three-column | snap-rating");
  op->add_option("--kind", op_kind, "hermitian | unnormalized | normalized | propagation");
  op->add_option("--q", op_q, "phase q in radians");
  op->add_option("--out", op_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*prepare) return cmd_prepare(prep_dataset, prep_format, prep_seed, prep_out);
    if (*train) return cmd_train(train_flags);
    if (*eval) return cmd_eval(eval_run, eval_ckpt, eval_dataset, eval_format, eval_split, eval_threshold, eval_out);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_param, sweep_values);
    if (*ablate) return cmd_ablate(ablate_flags);
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*op) return cmd_operator(op_dataset, op_format, op_kind, op_q, op_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
