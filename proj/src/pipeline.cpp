#include "sdgcl/pipeline.hpp"

#include <cmath>
#include <numeric>

#include "sdgcl/error.hpp"

namespace sdgcl {

void RunConfig::validate() const {
  perturbation.validate();
  train.validate();
  ModelDims d = dims;
  d.num_nodes = 0;
  d.validate();
  if (seeds < 1) throw InputError("--seeds must be at least 1");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = c.dataset.string();
  j["format"] = format_name(c.format);
  j["split_seed"] = c.split_seed;
  j["seed"] = c.train.seed;
  j["seeds"] = c.seeds;
  j["p"] = c.perturbation.sign_flip_ratio;
  j["r"] = c.perturbation.direction_flip_ratio;
  j["q_grid"] = c.perturbation.q_choices;
  j["q_base"] = c.perturbation.q_base;
  j["q_noise_std"] = c.perturbation.q_noise_std;
  j["alpha"] = c.train.alpha;
  j["tau"] = c.train.tau;
  j["lr"] = c.train.lr;
  j["weight_decay"] = c.train.weight_decay;
  j["epochs"] = c.train.max_epochs;
  j["patience"] = c.train.patience;
  j["symmetric_inter"] = c.train.symmetric_inter_loss;
  j["projection"] = c.train.use_projection;
  j["sample_ratio"] = c.train.sample_ratio;
  j["freeze_sampling"] = c.train.freeze_sampling;
  j["threshold"] = c.train.threshold;
  j["dim"] = c.dims.embed_dim;
  j["input_dim"] = c.dims.input_dim;
  j["hidden_dim"] = c.dims.hidden_dim;
  j["layers"] = c.dims.num_layers;
  return j;
}

RunConfig apply_config_json(RunConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "dataset") c.dataset = value.get<std::string>();
      else if (key == "format") c.format = parse_format(value.get<std::string>());
      else if (key == "split_seed") c.split_seed = value.get<std::uint64_t>();
      else if (key == "seed") c.train.seed = c.perturbation.seed = value.get<std::uint64_t>();
      else if (key == "seeds") c.seeds = value.get<int>();
      else if (key == "p") c.perturbation.sign_flip_ratio = value.get<double>();
      else if (key == "r") c.perturbation.direction_flip_ratio = value.get<double>();
      else if (key == "q_grid") c.perturbation.q_choices = value.get<std::vector<double>>();
      else if (key == "q_base") c.perturbation.q_base = value.get<double>();
      else if (key == "q_noise_std") c.perturbation.q_noise_std = value.get<double>();
      else if (key == "alpha") c.train.alpha = value.get<double>();
      else if (key == "tau") c.train.tau = value.get<double>();
      else if (key == "lr") c.train.lr = value.get<double>();
      else if (key == "weight_decay") c.train.weight_decay = value.get<double>();
      else if (key == "epochs") c.train.max_epochs = value.get<int>();
      else if (key == "patience") c.train.patience = value.get<int>();
      else if (key == "symmetric_inter") c.train.symmetric_inter_loss = value.get<bool>();
      else if (key == "projection") c.train.use_projection = value.get<bool>();
      else if (key == "sample_ratio") c.train.sample_ratio = value.get<double>();
      else if (key == "freeze_sampling") c.train.freeze_sampling = value.get<bool>();
      else if (key == "threshold") c.train.threshold = value.get<double>();
      else if (key == "dim") c.dims.embed_dim = value.get<Index>();
      else if (key == "input_dim") c.dims.input_dim = value.get<Index>();
      else if (key == "hidden_dim") c.dims.hidden_dim = value.get<Index>();
      else if (key == "layers") c.dims.num_layers = value.get<int>();
      else throw InputError("unknown configuration key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("configuration: ") + e.what());
  }
  return c;
}

PreparedData prepare_dataset(const std::filesystem::path& raw, EdgeListFormat format,
                             std::uint64_t split_seed) {
  LoadedGraph loaded = load_edge_list(raw, format);
  PreparedData data;
  data.num_nodes = loaded.graph.num_nodes();
  data.split = split_edges(loaded.graph, split_seed);
  data.original_ids = std::move(loaded.original_ids);
  data.dropped_self_loops = loaded.dropped_self_loops;
  return data;
}

PreparedData load_dataset(const std::filesystem::path& path, EdgeListFormat format,
                          std::uint64_t split_seed) {
  if (std::filesystem::is_directory(path)) return read_prepared(path);
  if (!std::filesystem::exists(path)) throw InputError("dataset not found: " + path.string());
  return prepare_dataset(path, format, split_seed);
}

MetricsReport evaluate_split(const EncoderParams& params, const PreparedData& data,
                             const PerturbationConfig& perturbation,
                             const std::vector<EdgeRecord>& edges, double threshold) {
  const SignedDiGraph train_graph = graph_from_edges(data.num_nodes, data.split.train);
  return evaluate(params, train_graph, perturbation.reference_q(), edges, threshold);
}

RunResult train_once(const PreparedData& data, const RunConfig& config) {
  config.validate();
  RunResult result;
  result.fit = fit(data.num_nodes, data.split, config.perturbation, config.train, config.dims);
  result.valid = evaluate_split(result.fit.params, data, config.perturbation, data.split.valid,
                                config.train.threshold);
  result.test = evaluate_split(result.fit.params, data, config.perturbation, data.split.test,
                               config.train.threshold);
  return result;
}

nlohmann::ordered_json metrics_json(const MetricsReport& r, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["auc"] = r.auc;
  j["macro_f1"] = r.macro_f1;
  j["micro_f1"] = r.micro_f1;
  j["binary_f1"] = r.binary_f1;
  j["tp"] = r.confusion.tp;
  j["fp"] = r.confusion.fp;
  j["tn"] = r.confusion.tn;
  j["fn"] = r.confusion.fn;
  j["threshold"] = r.threshold;
  j["seed"] = seed;
  return j;
}

nlohmann::ordered_json epoch_json(const EpochLog& e) {
  nlohmann::ordered_json j;
  j["epoch"] = e.epoch;
  j["inter"] = e.loss.inter;
  j["intra"] = e.loss.intra;
  j["label"] = e.loss.label;
  j["total"] = e.loss.total;
  j["val_auc"] = e.val_auc;
  j["q1"] = e.q1;
  j["q2"] = e.q2;
  return j;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / n)};
}

nlohmann::ordered_json summarize(const std::vector<MetricsReport>& reports) {
  nlohmann::ordered_json j;
  const auto add = [&](const char* name, auto field) {
    std::vector<double> values;
    for (const auto& r : reports) values.push_back(r.*field);
    const MeanStd s = mean_std(values);
    j[name] = {{"mean", s.mean}, {"std", s.std}};
  };
  add("auc", &MetricsReport::auc);
  add("macro_f1", &MetricsReport::macro_f1);
  add("micro_f1", &MetricsReport::micro_f1);
  add("binary_f1", &MetricsReport::binary_f1);
  return j;
}

std::string variant_name(Variant variant) {
  switch (variant) {
    case Variant::Full: return "full";
    case Variant::NoStructureAug: return "w/o structure aug";
    case Variant::NoLaplacianAug: return "w/o Laplacian aug";
    case Variant::NoAugmentation: return "w/o augmentation";
    case Variant::NoContrastive: return "w/o contrastive loss";
    case Variant::NoProjection: return "w/o projection";
  }
  return "unknown";
}

namespace {

void disable_structure(RunConfig& c) {
  c.perturbation.sign_flip_ratio = 0.0;
  c.perturbation.direction_flip_ratio = 0.0;
}

void disable_laplacian(RunConfig& c) {
  c.perturbation.q_choices = {c.perturbation.q_base};
  c.perturbation.q_noise_std = 0.0;
}

}  // namespace

RunConfig apply_variant(RunConfig c, Variant variant) {
  switch (variant) {
    case Variant::Full: break;
    case Variant::NoStructureAug: disable_structure(c); break;
    case Variant::NoLaplacianAug: disable_laplacian(c); break;
    case Variant::NoAugmentation:
      disable_structure(c);
      disable_laplacian(c);
      break;
    case Variant::NoContrastive: c.train.alpha = 0.0; break;
    case Variant::NoProjection: c.train.use_projection = false; break;
  }
  return c;
}

RunConfig apply_sweep_point(RunConfig c, const std::string& parameter, double value) {
  if (parameter == "p" || parameter == "r" || parameter == "pr") {
    disable_laplacian(c);
    if (parameter != "r") c.perturbation.sign_flip_ratio = value;
    if (parameter != "p") c.perturbation.direction_flip_ratio = value;
  } else if (parameter == "q_noise_std") {
    disable_structure(c);
    if (value > 0.0) {
      c.perturbation.q_noise_std = value;
    } else {
      disable_laplacian(c);
    }
  } else {
    throw InputError("unknown sweep parameter '" + parameter + "' (expected p, r, pr or q_noise_std)");
  }
  c.perturbation.validate();
  return c;
}

}  // namespace sdgcl
