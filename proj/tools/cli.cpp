#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoadapt/checkpoint.hpp"
#include "emoadapt/dataset.hpp"
#include "emoadapt/digest.hpp"
#include "emoadapt/eval.hpp"
#include "emoadapt/glyph.hpp"
#include "emoadapt/intersection.hpp"
#include "emoadapt/io.hpp"
#include "emoadapt/run_config.hpp"
#include "emoadapt/train.hpp"

namespace fs = std::filesystem;

namespace emoadapt::cli {
namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lambda;
  std::optional<double> w_disc;
  std::string data;
  std::string manifest;
  std::string eval_manifest;
  std::string checkpoint;
  std::string source_ckpt;
  std::string embeddings;
  std::string mode = "off-diagonal";
  std::string layers = "conv-n,fc-1,fc-2,fc-3,op";
};

enum class EpochTarget { none, pretrain, adapt, both };

RunConfig effective_config(const Options& o, EpochTarget epochs_for) {
  RunConfig cfg = o.config_path.empty() ? RunConfig() : RunConfig::load(o.config_path);
  if (o.seed) cfg.set("seed", std::to_string(*o.seed));
  if (o.epochs) {
    if (epochs_for == EpochTarget::pretrain || epochs_for == EpochTarget::both)
      cfg.set("pretrain.epochs", std::to_string(*o.epochs));
    if (epochs_for == EpochTarget::adapt || epochs_for == EpochTarget::both)
      cfg.set("adapt.epochs", std::to_string(*o.epochs));
  }
  if (o.batch_size) cfg.set("train.batch_size", std::to_string(*o.batch_size));
  if (o.lambda) cfg.set("loss.lambda", format_double(*o.lambda));
  if (o.w_disc) cfg.set("loss.w_discrepancy", format_double(*o.w_disc));
  if (!o.data.empty()) cfg.set("paths.data", o.data);
  return cfg;
}

fs::path default_manifest(const Options& o, const RunConfig& cfg, const char* domain, const char* split) {
  if (!o.manifest.empty()) return o.manifest;
  if (cfg.data_dir().empty()) {
    throw ConfigError(std::string("no --manifest given and no data directory configured (--data / paths.data)"));
  }
  return cfg.data_dir() / domain / (std::string(split) + ".csv");
}

fs::path require_out(const Options& o) {
  if (o.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

void write_config(const fs::path& out, const RunConfig& cfg) { write_text_file(out / "run_config.txt", cfg.canonical_text()); }

void print_log(const std::vector<EpochLog>& log) {
  for (const auto& e : log) {
    std::printf("epoch %zu %-5s loss %.5f (cls %.5f disc %.5f reg %.2f) acc %.4f\n", e.epoch, e.split.c_str(),
                e.loss_total, e.loss_cls, e.loss_disc, e.loss_reg, e.accuracy);
  }
}

std::vector<LayerTag> parse_layers(const std::string& list) {
  std::vector<LayerTag> tags;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      tags.push_back(parse_layer(item));
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  if (tags.empty()) throw ConfigError("--layers is empty");
  return tags;
}

// --- subcommands -------------------------------------------------------------

void cmd_gen_data(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::none);
  fs::path out = require_out(o);
  const auto shift = cfg.shift();
  const auto seed = cfg.seed();
  struct Job {
    Domain domain;
    const char* split;
    const char* key;
  };
  for (const Job& job : {Job{Domain::source, "train", "data.source_train_per_class"},
                         Job{Domain::source, "test", "data.source_test_per_class"},
                         Job{Domain::target, "train", "data.target_train_per_class"},
                         Job{Domain::target, "test", "data.target_test_per_class"}}) {
    auto set = generate_synthetic(job.domain, cfg.count(job.key), seed, out / domain_name(job.domain), job.split, shift);
    std::printf("wrote %zu %s/%s images -> %s\n", set.dataset.size(), std::string(domain_name(job.domain)).c_str(),
                job.split, set.manifest.string().c_str());
  }
  write_config(out, cfg);
}

void cmd_pretrain(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::pretrain);
  fs::path out = require_out(o);
  ModelConfig model = cfg.model();
  Dataset source = load_dataset(default_manifest(o, cfg, "source", "train"), {}, model.input_size);
  Dataset eval_set;
  if (!o.eval_manifest.empty()) eval_set = load_dataset(o.eval_manifest, {}, model.input_size);
  auto result = pretrain(model, source, cfg.pretrain_run(), eval_set.empty() ? nullptr : &eval_set);
  print_log(result.log);
  save_checkpoint_file(result.checkpoint, out / "source.ckpt");
  write_text_file(out / "pretrain_log.csv", format_training_log(result.log));
  write_config(out, cfg);
}

void cmd_adapt(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::adapt);
  fs::path out = require_out(o);
  if (o.source_ckpt.empty()) throw ConfigError("adapt needs --source-ckpt");
  ModelConfig model = cfg.model();
  Checkpoint source_ckpt = load_checkpoint_file(o.source_ckpt, model.digest());
  Dataset target = load_dataset(default_manifest(o, cfg, "target", "train"), {}, model.input_size);
  Dataset eval_set;
  if (!o.eval_manifest.empty()) eval_set = load_dataset(o.eval_manifest, {}, model.input_size);
  auto result = adapt(model, target, source_ckpt, cfg.adapt_run(), eval_set.empty() ? nullptr : &eval_set);
  print_log(result.log);
  save_checkpoint_file(result.checkpoint, out / "adapted.ckpt");
  write_text_file(out / "adapt_log.csv", format_training_log(result.log));
  write_config(out, cfg);
}

void cmd_eval(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::none);
  fs::path out = require_out(o);
  if (o.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
  Checkpoint ckpt = load_checkpoint_file(o.checkpoint);
  Dataset data = load_dataset(default_manifest(o, cfg, "target", "test"), {}, ckpt.model_config().input_size);
  EvalResult r = evaluate(ckpt, data);
  std::printf("accuracy %.4f on %zu samples\n", r.accuracy, data.size());
  write_text_file(out / "metrics.json", metrics_json(r));
  write_text_file(out / "confusion.csv", confusion_csv(r.confusion));
}

void cmd_capture(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::none);
  fs::path out = require_out(o);
  if (o.checkpoint.empty()) throw ConfigError("capture-embeddings needs --checkpoint");
  auto layers = parse_layers(o.layers);
  Checkpoint ckpt = load_checkpoint_file(o.checkpoint);
  const ModelConfig model = ckpt.model_config();
  Dataset probe = load_dataset(default_manifest(o, cfg, "target", "test"), {}, model.input_size);
  auto dumps = capture_embeddings(model, ckpt.params, probe, layers);
  write_file(out / "embeddings.bin", encode_archive(embeddings_to_archive(dumps)));
  for (const auto& d : dumps) {
    write_text_file(out / ("embedding_" + std::string(layer_name(d.layer)) + ".csv"), export_embedding_plot(d));
  }
  std::printf("captured %zu layers for %zu samples\n", dumps.size(), probe.size());
}

void cmd_explain(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::none);
  fs::path out = require_out(o);
  ScoreMode mode;
  try {
    mode = parse_score_mode(o.mode);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  IntersectionReport report;
  if (!o.embeddings.empty()) {
    report = build_report(embeddings_from_archive(decode_archive(read_file(o.embeddings))));
  } else if (!o.checkpoint.empty()) {
    Checkpoint ckpt = load_checkpoint_file(o.checkpoint);
    Dataset probe = load_dataset(default_manifest(o, cfg, "target", "test"), {}, ckpt.model_config().input_size);
    report = layer_convergence(ckpt, probe);
  } else {
    throw ConfigError("explain needs --embeddings or --checkpoint");
  }
  write_text_file(out / "intersection.csv", report.to_csv());
  for (const auto& l : report.layers) {
    std::printf("%-7s C=%.6f%s\n", std::string(layer_name(l.layer)).c_str(), l.score(mode),
                l.rank_deficient ? " (rank-deficient)" : "");
  }
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void cmd_report(const Options& o) {
  RunConfig cfg = effective_config(o, EpochTarget::both);
  fs::path out = require_out(o);
  const fs::path data = out / "data";
  cfg.set("paths.data", "data");  // relative to the bundle, so the bundle is relocatable
  const ModelConfig model = cfg.model();
  const auto shift = cfg.shift();

  auto source_train = generate_synthetic(Domain::source, cfg.count("data.source_train_per_class"), cfg.seed(),
                                         data / "source", "train", shift);
  auto source_test = generate_synthetic(Domain::source, cfg.count("data.source_test_per_class"), cfg.seed(),
                                        data / "source", "test", shift);
  auto target_train = generate_synthetic(Domain::target, cfg.count("data.target_train_per_class"), cfg.seed(),
                                         data / "target", "train", shift);
  auto target_test = generate_synthetic(Domain::target, cfg.count("data.target_test_per_class"), cfg.seed(),
                                        data / "target", "test", shift);

  std::printf("== pretrain on %zu source images\n", source_train.dataset.size());
  auto pre = pretrain(model, source_train.dataset, cfg.pretrain_run(), &source_test.dataset);
  print_log(pre.log);
  save_checkpoint_file(pre.checkpoint, out / "pretrain" / "source.ckpt");
  write_text_file(out / "pretrain" / "pretrain_log.csv", format_training_log(pre.log));

  std::printf("== adapt on %zu target images\n", target_train.dataset.size());
  auto ada = adapt(model, target_train.dataset, pre.checkpoint, cfg.adapt_run(), &target_test.dataset);
  print_log(ada.log);
  save_checkpoint_file(ada.checkpoint, out / "adapt" / "adapted.ckpt");
  write_text_file(out / "adapt" / "adapt_log.csv", format_training_log(ada.log));

  for (auto [name, ckpt] : {std::pair{"source", &pre.checkpoint}, std::pair{"adapted", &ada.checkpoint}}) {
    EvalResult r = evaluate(*ckpt, target_test.dataset);
    std::printf("%s checkpoint target-test accuracy %.4f\n", name, r.accuracy);
    write_text_file(out / ("eval_" + std::string(name)) / "metrics.json", metrics_json(r));
    write_text_file(out / ("eval_" + std::string(name)) / "confusion.csv", confusion_csv(r.confusion));
  }

  std::vector<LayerTag> layers(kAllLayers.begin(), kAllLayers.end());
  auto dumps = capture_embeddings(model, ada.checkpoint.params, target_test.dataset, layers);
  write_file(out / "embeddings" / "embeddings.bin", encode_archive(embeddings_to_archive(dumps)));
  for (const auto& d : dumps) {
    write_text_file(out / "embeddings" / ("embedding_" + std::string(layer_name(d.layer)) + ".csv"),
                    export_embedding_plot(d));
  }
  auto report = build_report(dumps);
  write_text_file(out / "explain" / "intersection.csv", report.to_csv());
  for (const auto& l : report.layers) {
    std::printf("%-7s C_offdiag=%.6f C_literal=%.6f\n", std::string(layer_name(l.layer)).c_str(), l.c_offdiag,
                l.c_literal);
  }
  write_config(out, cfg);

  // Manifest of every file in the bundle; the only place with a timestamp.
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json manifest;
  manifest["created_utc"] = utc_timestamp();
  manifest["seed"] = cfg.seed();
  manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    auto bytes = read_file(f);
    manifest["files"].push_back({{"path", fs::relative(f, out).generic_string()}, {"sha256", sha256_hex(bytes)}});
  }
  write_text_file(out / "run_manifest.json", manifest.dump(2) + "\n");
  std::printf("report bundle: %s (%zu files)\n", out.string().c_str(), files.size());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const ShapeError*>(&e)) return kExitData;
  return kExitUsage;
}

int run(int argc, char** argv) {
  CLI::App app{"Domain-adapted image emotion recognition with intersection-score explanations", "emoadapt"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key=value run configuration file");
    sub->add_option("--seed", o.seed, "Seed for every random stream");
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--data", o.data, "Data directory laid out by gen-data");
  };
  auto training = [&](CLI::App* sub) {
    sub->add_option("--epochs", o.epochs, "Training epochs");
    sub->add_option("--batch-size", o.batch_size, "Mini-batch size");
    sub->add_option("--lambda", o.lambda, "L2 weight on the FC weights");
    sub->add_option("--w-disc", o.w_disc, "Discrepancy term weight");
  };

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic source/target glyph datasets");
  common(gen);

  auto* pre = app.add_subcommand("pretrain", "Train the source-domain model");
  common(pre);
  training(pre);
  pre->add_option("--manifest", o.manifest, "Training manifest (default <data>/source/train.csv)");
  pre->add_option("--eval-manifest", o.eval_manifest, "Optional held-out manifest scored every epoch");

  auto* ada = app.add_subcommand("adapt", "Adapt a source checkpoint to the target domain");
  common(ada);
  training(ada);
  ada->add_option("--source-ckpt", o.source_ckpt, "Checkpoint written by pretrain");
  ada->add_option("--manifest", o.manifest, "Training manifest (default <data>/target/train.csv)");
  ada->add_option("--eval-manifest", o.eval_manifest, "Optional held-out manifest scored every epoch");

  auto* ev = app.add_subcommand("eval", "Accuracy and confusion matrix of a checkpoint");
  common(ev);
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint to evaluate");
  ev->add_option("--manifest", o.manifest, "Evaluation manifest (default <data>/target/test.csv)");

  auto* cap = app.add_subcommand("capture-embeddings", "Dump per-layer embeddings and PCA plot data");
  common(cap);
  cap->add_option("--checkpoint", o.checkpoint, "Checkpoint to probe");
  cap->add_option("--manifest", o.manifest, "Probe manifest (default <data>/target/test.csv)");
  cap->add_option("--layers", o.layers, "Comma-separated layer tags");

  auto* exp = app.add_subcommand("explain", "Intersection scores per layer");
  common(exp);
  exp->add_option("--embeddings", o.embeddings, "Embedding dump from capture-embeddings");
  exp->add_option("--checkpoint", o.checkpoint, "Checkpoint to probe when no dump is given");
  exp->add_option("--manifest", o.manifest, "Probe manifest (default <data>/target/test.csv)");
  exp->add_option("--mode", o.mode, "paper-literal or off-diagonal (printed score)");

  auto* rep = app.add_subcommand("report", "Run the whole workflow into one bundle directory");
  common(rep);
  training(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) cmd_gen_data(o);
    else if (*pre) cmd_pretrain(o);
    else if (*ada) cmd_adapt(o);
    else if (*ev) cmd_eval(o);
    else if (*cap) cmd_capture(o);
    else if (*exp) cmd_explain(o);
    else if (*rep) cmd_report(o);
  } catch (const std::exception& e) {
    std::cerr << "emoadapt: error: " << e.what() << std::endl;
    return exit_code_for(e);
  }
  std::fflush(stdout);
  return kExitOk;
}

}  // namespace emoadapt::cli
