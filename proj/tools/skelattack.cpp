// skelattack: synthesize skeleton data, train victims, run attack campaigns,
// evaluate stored results and export overlays.
//
// Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "skelattack/attack.hpp"
#include "skelattack/error.hpp"
#include "skelattack/model_io.hpp"
#include "skelattack/motion_io.hpp"
#include "skelattack/overlay.hpp"
#include "skelattack/results_io.hpp"

namespace fs = std::filesystem;
using namespace skelattack;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* tool_version() { return SKELATTACK_VERSION; }

// JSON file, or a CSV/TXT artifact whose first line is "# run_config=<json>".
json load_config_file(const std::string& path) {
  static constexpr std::string_view kPrefix = "# run_config=";
  const std::string text = read_file(path);
  if (text.rfind(kPrefix, 0) != 0) return load_json(path);
  const auto end = text.find('\n');
  try {
    return json::parse(text.substr(kPrefix.size(), end == std::string::npos ? end : end - kPrefix.size()));
  } catch (const json::parse_error& e) {
    throw ParseError(path, "run_config", std::string("malformed JSON: ") + e.what());
  }
}

// Flag values resolved with precedence defaults < config file < explicit flags.
// The resolved object is the run config echoed into every artifact.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON run config (or any artifact embedding one)");
  }

  template <typename T>
  CLI::Option* add(const std::string& flag, const std::string& key, T& var, const std::string& help) {
    auto* opt = app_->add_option(flag, var, help);
    entries_.push_back({key, opt, [&var] { return json(var); }, json(var)});
    return opt;
  }

  CLI::Option* flag(const std::string& flag, const std::string& key, bool& var, const std::string& help) {
    auto* opt = app_->add_flag(flag, var, help);
    entries_.push_back({key, opt, [&var] { return json(var); }, json(var)});
    return opt;
  }

  json resolve(const std::string& command, const json& preset = json::object()) const {
    json config = json::object();
    for (const auto& e : entries_) config[e.key] = e.initial;
    for (auto& [k, v] : preset.items()) config[k] = v;
    if (!config_path_.empty()) {
      json file = load_config_file(config_path_);
      if (file.contains("run_config")) file = file["run_config"];
      if (!file.is_object()) throw ParseError(config_path_, "run_config", "expected an object");
      if (file.contains("command") && file["command"] != command)
        throw ParseError(config_path_, "command", "config was written by '" + file["command"].get<std::string>() + "'");
      for (auto& [k, v] : file.items()) {
        if (k == "command" || k == "version") continue;
        if (!config.contains(k)) throw ParseError(config_path_, k, "unknown config key");
        config[k] = v;
      }
    }
    for (const auto& e : entries_)
      if (e.option->count() > 0) config[e.key] = e.value();
    config["command"] = command;
    config["version"] = tool_version();
    return config;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<json()> value;
    json initial;
  };
  CLI::App* app_;
  std::string config_path_;
  std::vector<Entry> entries_;
};

template <typename T>
T get(const json& config, const std::string& key) {
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    fail_validation("config field '" + key + "' has the wrong type or is missing");
  }
}

std::string require_string(const json& config, const std::string& key, const std::string& flag) {
  if (!config.contains(key) || config[key].is_null() || config[key].get<std::string>().empty())
    throw UsageError(flag + " is required");
  return config[key].get<std::string>();
}

void ensure_parent(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  write_file_atomic(path, text);
}

std::string with_comment(const json& config, const std::string& body) {
  return "# run_config=" + config.dump() + "\n" + body;
}

unsigned batch_threads() {
  if (const char* env = std::getenv("SKELATTACK_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) fail_validation("SKELATTACK_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// --- gen-data ---------------------------------------------------------------

struct GenData {
  std::uint64_t seed = 0;
  int classes = 0;
  int per_class = 100;
  int frames = 32;
  std::string topology = "chain16";
  double noise = 0.02;
  double test_fraction = 0.3;
  std::string preset;
  std::string out;
  std::string manifest;
};

json paper_desk_data() {
  return {{"classes", 5}, {"per_class", 100}, {"frames", 32}, {"topology", "chain16"}};
}

void setup_gen_data(CLI::App& app, GenData& g, Options& o) {
  o.add("--seed", "seed", g.seed, "RNG seed");
  o.add("--classes", "classes", g.classes, "number of classes (required)");
  o.add("--per-class", "per_class", g.per_class, "samples per class");
  o.add("--frames", "frames", g.frames, "frames per motion");
  o.add("--topology", "topology", g.topology, "chainN or starN");
  o.add("--noise", "noise", g.noise, "per-coordinate jitter");
  o.add("--test-fraction", "test_fraction", g.test_fraction, "fraction of each class held out");
  o.add("--preset", "preset", g.preset, "named preset (paper-desk)")->check(CLI::IsMember({"", "paper-desk"}));
  o.add("--out", "out", g.out, "dataset JSON path");
  o.add("--manifest", "manifest", g.manifest, "manifest path (default: <out>.manifest.json)");
  (void)app;
}

int run_gen_data(const GenData& g, const Options& o) {
  json preset = json::object();
  if (g.preset == "paper-desk") preset = paper_desk_data();
  json config = o.resolve("gen-data", preset);
  if (get<int>(config, "classes") <= 0) throw UsageError("--classes is required");
  const std::string out = require_string(config, "out", "--out");
  std::string manifest = get<std::string>(config, "manifest");
  if (manifest.empty()) manifest = out + ".manifest.json";

  SyntheticSpec spec;
  spec.seed = get<std::uint64_t>(config, "seed");
  spec.class_count = get<int>(config, "classes");
  spec.samples_per_class = get<int>(config, "per_class");
  spec.frames = get<int>(config, "frames");
  spec.topology = std::make_shared<const SkeletonTopology>(
      SkeletonTopology::from_name(get<std::string>(config, "topology")));
  spec.noise = get<double>(config, "noise");
  spec.test_fraction = get<double>(config, "test_fraction");
  const auto dataset = generate_synthetic_dataset(spec);

  ensure_parent(out);
  save_dataset(dataset, out, json{{"run_config", config}});
  json m = {{"tool", "skelattack"},
            {"version", tool_version()},
            {"seed", spec.seed},
            {"dataset", out},
            {"motions", dataset.motions.size()},
            {"train", dataset.indices(Split::train).size()},
            {"test", dataset.indices(Split::test).size()},
            {"run_config", config}};
  ensure_parent(manifest);
  save_json(m, manifest);
  std::printf("wrote %zu motions to %s\n", dataset.motions.size(), out.c_str());
  return 0;
}

// --- train ------------------------------------------------------------------

struct Train {
  std::string dataset;
  std::string arch = "mlp";
  std::uint64_t seed = 0;
  int epochs = 200;
  double lr = 1e-3;
  int hidden = 64;
  double threshold = 0.85;
  bool force = false;
  std::string out;
};

void setup_train(Train& t, Options& o) {
  o.add("--dataset", "dataset", t.dataset, "dataset JSON");
  o.add("--arch", "arch", t.arch, "mlp or linear")->check(CLI::IsMember({"mlp", "linear"}));
  o.add("--seed", "seed", t.seed, "initialization seed");
  o.add("--epochs", "epochs", t.epochs, "full-batch epochs");
  o.add("--lr", "lr", t.lr, "Adam learning rate");
  o.add("--hidden", "hidden", t.hidden, "hidden width of both MLP layers");
  o.add("--threshold", "threshold", t.threshold, "minimum test accuracy to emit the model");
  o.flag("--force", "force", t.force, "emit the model even below the threshold");
  o.add("--out", "out", t.out, "model JSON path");
}

int run_train(const Options& o) {
  const json config = o.resolve("train");
  const std::string dataset_path = require_string(config, "dataset", "--dataset");
  const std::string out = require_string(config, "out", "--out");
  const auto dataset = load_dataset(dataset_path);

  TrainConfig tc;
  const auto arch = get<std::string>(config, "arch");
  if (arch != "mlp" && arch != "linear") fail_validation("unknown architecture '" + arch + "'");
  tc.architecture = arch == "linear" ? Architecture::linear : Architecture::mlp;
  tc.seed = get<std::uint64_t>(config, "seed");
  tc.epochs = get<int>(config, "epochs");
  tc.lr = get<double>(config, "lr");
  tc.hidden1 = tc.hidden2 = get<int>(config, "hidden");
  const auto trained = train_classifier(dataset, tc);
  const auto& rep = trained.report;
  std::printf("kind=%s train_accuracy=%.4f test_accuracy=%.4f final_loss=%.6g\n",
              std::string(trained.model->kind()).c_str(), rep.train_accuracy, rep.test_accuracy,
              rep.loss_history.back());

  const double threshold = get<double>(config, "threshold");
  if (rep.test_accuracy < threshold && !get<bool>(config, "force")) {
    std::fprintf(stderr, "error: test accuracy %.4f is below the threshold %.4f (use --force to keep it)\n",
                 rep.test_accuracy, threshold);
    return kExitRuntime;
  }
  json model = classifier_to_json(*trained.model);
  model["training"] = {{"train_accuracy", rep.train_accuracy},
                       {"test_accuracy", rep.test_accuracy},
                       {"loss_history", rep.loss_history}};
  model["run_config"] = config;
  ensure_parent(out);
  save_json(model, out);
  return 0;
}

// --- attack -----------------------------------------------------------------

struct Attack {
  std::string dataset;
  std::string model;
  std::string emotion;
  std::uint64_t emotion_seed = 0;
  std::string mode = "untargeted";
  int target_label = -1;
  double gamma = 1.0;
  int iters = 1000;
  int inner_steps = 1;
  double lr = 5e-3;
  double conf = 0.0;
  double lambda0 = 0.0;
  std::string weights = "1,1,1,1,0";
  bool baseline_l2 = false;
  std::uint64_t seed = 0;
  std::size_t samples = 50;
  double eps_s_cap = -1.0;
  int patience = -1;
  bool trace = false;
  bool force = false;
  std::string model_id;
  std::string out;
};

void setup_attack(Attack& a, Options& o) {
  o.add("--dataset", "dataset", a.dataset, "dataset JSON");
  o.add("--model", "model", a.model, "victim model JSON");
  o.add("--emotion", "emotion", a.emotion, "emotion extractor JSON (default: seeded stand-in)");
  o.add("--emotion-seed", "emotion_seed", a.emotion_seed, "seed of the default emotion extractor");
  o.add("--mode", "mode", a.mode, "untargeted or targeted")->check(CLI::IsMember({"untargeted", "targeted"}));
  o.add("--target-label", "target_label", a.target_label, "target class for targeted attacks");
  o.add("--gamma", "gamma", a.gamma, "penalty weight");
  o.add("--iters", "iters", a.iters, "outer iterations");
  o.add("--inner-steps", "inner_steps", a.inner_steps, "Adam steps per dual update");
  o.add("--lr", "lr", a.lr, "Adam learning rate");
  o.add("--conf", "conf", a.conf, "required logit margin");
  o.add("--lambda0", "lambda0", a.lambda0, "initial multiplier");
  o.add("--weights", "weights", a.weights, "wb,wa,ws,we,wl2");
  o.flag("--baseline-l2", "baseline_l2", a.baseline_l2, "l2-only distance (overrides --weights)");
  o.add("--seed", "seed", a.seed, "attack seed (per sample: seed XOR index)");
  o.add("--samples", "samples", a.samples, "attack at most this many eligible test samples (0 = all)");
  o.add("--eps-s-cap", "eps_s_cap", a.eps_s_cap, "relative joint speed cap (negative = off)");
  o.add("--patience", "patience", a.patience, "stop this many iterations after first success (negative = off)");
  o.flag("--trace", "trace", a.trace, "record per-iteration traces");
  o.flag("--force", "force", a.force, "also attack misclassified samples");
  o.add("--model-id", "model_id", a.model_id, "model label in reports (default: model file stem)");
  o.add("--out", "out", a.out, "output directory");
}

LossWeights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size()) fail_validation("malformed --weights entry '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != 5) fail_validation("--weights needs 5 comma-separated values wb,wa,ws,we,wl2");
  LossWeights w{v[0], v[1], v[2], v[3], v[4]};
  w.validate();
  return w;
}

AttackConfig attack_config_from(const json& config, int class_count) {
  AttackConfig c;
  c.constraint.mode = parse_mode(get<std::string>(config, "mode"));
  const int target = get<int>(config, "target_label");
  if (c.constraint.mode == AttackMode::targeted) {
    if (target < 0) fail_validation("targeted mode requires --target-label");
    if (target >= class_count) fail_validation("target label out of range");
    c.constraint.target_label = target;
  }
  c.constraint.conf = get<double>(config, "conf");
  c.gamma = get<double>(config, "gamma");
  c.iterations = get<int>(config, "iters");
  c.inner_steps = get<int>(config, "inner_steps");
  c.lr = get<double>(config, "lr");
  c.lambda0 = get<double>(config, "lambda0");
  c.weights = get<bool>(config, "baseline_l2") ? LossWeights::l2_only() : parse_weights(get<std::string>(config, "weights"));
  c.seed = get<std::uint64_t>(config, "seed");
  if (const double cap = get<double>(config, "eps_s_cap"); cap >= 0.0) c.eps_s_cap = cap;
  if (const int p = get<int>(config, "patience"); p >= 0) c.patience = p;
  c.record_trace = get<bool>(config, "trace");
  c.force = get<bool>(config, "force");
  if (!std::isfinite(c.constraint.conf) || c.constraint.conf < 0.0) fail_validation("conf must be nonnegative");
  c.validate();
  return c;
}

GroupedEmotionExtractor load_emotion(const json& config, const ClassifierModel& model) {
  const auto path = get<std::string>(config, "emotion");
  if (path.empty()) return GroupedEmotionExtractor::make_default(model.input_shape(), get<std::uint64_t>(config, "emotion_seed"));
  auto e = load_extractor(path);
  if (!(e.input_shape() == model.input_shape())) fail_validation("emotion extractor input shape does not match the model");
  return e;
}

int run_attack_command(const Options& o) {
  const json config = o.resolve("attack");
  const std::string dataset_path = require_string(config, "dataset", "--dataset");
  const std::string model_path = require_string(config, "model", "--model");
  const fs::path out = require_string(config, "out", "--out");

  const auto dataset = load_dataset(dataset_path);
  const auto model = load_classifier(model_path);
  check_model_matches_dataset(*model, dataset);
  const AttackConfig attack = attack_config_from(config, model->class_count());
  const auto emotion = load_emotion(config, *model);
  std::string model_id = get<std::string>(config, "model_id");
  if (model_id.empty()) model_id = fs::path(model_path).stem().string();

  const auto indices = select_attack_samples(dataset, *model, attack.constraint, get<std::size_t>(config, "samples"),
                                             attack.force);
  if (indices.empty()) fail_validation("no eligible test samples to attack");
  const auto outcome = attack_batch(dataset, indices, *model, &emotion, attack, batch_threads(), model_id);

  json results = batch_to_json(outcome, attack.record_trace);
  results["run_config"] = config;
  results["version"] = tool_version();
  fs::create_directories(out);
  save_json(results, out / "results.json");
  write_text(out / "report.csv", with_comment(config, report_csv_header() + "\n" + report_csv_row(outcome.report) + "\n"));
  const std::string label = model_id + " " + std::string(mode_name(attack.constraint.mode)) + " gamma=" +
                            json(attack.gamma).dump();
  const std::vector<std::string> labels{label};
  const std::string table = format_report_table(labels, {&outcome.report, 1});
  write_text(out / "report.txt", with_comment(config, table));
  std::fputs(table.c_str(), stdout);
  for (const auto& e : outcome.entries)
    if (!e.result) std::fprintf(stderr, "sample %zu: %s\n", e.index, e.error.c_str());
  return 0;
}

// --- evaluate ---------------------------------------------------------------

struct Evaluate {
  std::string dataset;
  std::string results;
  std::string model;
  bool self = false;
  bool check = false;
  std::string out;
};

void setup_evaluate(Evaluate& e, Options& o) {
  o.add("--dataset", "dataset", e.dataset, "dataset JSON the attack ran on");
  o.add("--results", "results", e.results, "results.json of an attack run");
  o.add("--model", "model", e.model, "recompute predictions with this model");
  o.flag("--self", "self", e.self, "compare each original against itself (needs --model)");
  o.flag("--check", "check", e.check, "fail unless the recomputed report matches the stored one within 1e-12");
  o.add("--out", "out", e.out, "evaluation JSON path");
}

int run_evaluate(const Options& o) {
  const json config = o.resolve("evaluate");
  const auto dataset = load_dataset(require_string(config, "dataset", "--dataset"));
  const fs::path results_path = require_string(config, "results", "--results");
  const json results = load_json(results_path);
  const auto samples = samples_from_json(results, dataset, results_path);
  BatchReport stored;
  try {
    stored = report_from_json(results.at("report"));
  } catch (const json::exception& e) {
    throw ParseError(results_path, "report", e.what());
  }
  std::unique_ptr<DenseNetwork> model;
  if (const auto path = get<std::string>(config, "model"); !path.empty()) {
    model = load_classifier(path);
    check_model_matches_dataset(*model, dataset);
  }
  const auto outcome = evaluate_pairs(dataset, samples, stored.tag, model.get(), get<bool>(config, "self"));

  const auto& r = outcome.report;
  double diff = 0.0;
  for (auto [a, b] : {std::pair{r.dBB, stored.dBB}, {r.dAA, stored.dAA}, {r.dSS, stored.dSS}, {r.l2, stored.l2},
                      {r.sr, stored.sr}})
    diff = std::max(diff, std::fabs(a - b));
  if (r.n != stored.n) diff = std::numeric_limits<double>::infinity();

  const std::vector<std::string> labels{get<bool>(config, "self") ? "self" : "recomputed", "stored"};
  const std::vector<BatchReport> rows{r, stored};
  std::fputs(format_report_table(labels, rows).c_str(), stdout);
  std::printf("max_abs_diff=%.3g\n", diff);

  if (const auto out = get<std::string>(config, "out"); !out.empty()) {
    json records = json::array();
    for (const auto& rec : outcome.records)
      records.push_back({{"index", rec.index}, {"predicted", rec.predicted}, {"success", rec.success},
                         {"metrics", sample_metrics_to_json(rec.metrics)}});
    json doc = {{"report", report_to_json(r)},
                {"stored_report", report_to_json(stored)},
                {"max_abs_diff", diff},
                {"samples", std::move(records)},
                {"run_config", config}};
    ensure_parent(out);
    save_json(doc, out);
  }
  if (get<bool>(config, "check") && !(diff <= 1e-12)) {
    std::fprintf(stderr, "error: recomputed report differs from the stored report by %.3g\n", diff);
    return kExitRuntime;
  }
  return 0;
}

// --- export-overlay ---------------------------------------------------------

struct Overlay {
  std::string dataset;
  std::string results;
  int sample = 0;
  int sample_frames = 0;
  std::string format = "csv";
  std::string out;
};

void setup_overlay(Overlay& v, Options& o) {
  o.add("--dataset", "dataset", v.dataset, "dataset JSON the attack ran on");
  o.add("--results", "results", v.results, "results.json of an attack run");
  o.add("--sample", "sample", v.sample, "dataset index of the attacked motion");
  o.add("--sample-frames", "sample_frames", v.sample_frames, "export this many evenly spaced frames (0 = all)");
  o.add("--format", "format", v.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  o.add("--out", "out", v.out, "output path");
}

int run_overlay(const Options& o) {
  const json config = o.resolve("export-overlay");
  const auto dataset = load_dataset(require_string(config, "dataset", "--dataset"));
  const fs::path results_path = require_string(config, "results", "--results");
  const fs::path out = require_string(config, "out", "--out");
  const auto samples = samples_from_json(load_json(results_path), dataset, results_path);
  const auto index = get<std::size_t>(config, "sample");
  const StoredSample* pair = nullptr;
  for (const auto& s : samples)
    if (s.record.index == index) pair = &s;
  if (!pair) fail_validation("results contain no pair for sample " + std::to_string(index));
  const auto& original = dataset.motions[index];
  const auto frames = evenly_spaced_frames(original.frame_count(), get<int>(config, "sample_frames"));
  const auto rows = build_overlay(original, pair->adversarial, frames);
  ensure_parent(out);
  if (get<std::string>(config, "format") == "json") {
    save_json({{"sample", index}, {"frames", frames}, {"rows", overlay_json(rows)}, {"run_config", config}}, out);
  } else {
    write_file_atomic(out, with_comment(config, overlay_csv(rows)));
  }
  std::printf("wrote %zu rows (%zu frames) to %s\n", rows.size(), frames.size(), out.string().c_str());
  return 0;
}

// --- compare ----------------------------------------------------------------

struct Compare {
  std::vector<std::string> results;
  std::vector<std::string> labels;
  std::string out;
};

void setup_compare(Compare& c, Options& o) {
  o.add("--results", "results", c.results, "results.json files, one table row each");
  o.add("--labels", "labels", c.labels, "row labels (default: run directory names)");
  o.add("--out", "out", c.out, "write the table here as well");
}

int run_compare(const Options& o) {
  const json config = o.resolve("compare");
  const auto paths = get<std::vector<std::string>>(config, "results");
  auto labels = get<std::vector<std::string>>(config, "labels");
  if (paths.empty()) throw UsageError("--results is required");
  if (labels.empty())
    for (const auto& p : paths) labels.push_back(fs::path(p).parent_path().filename().string());
  if (labels.size() != paths.size()) fail_validation("one label per results file required");
  std::vector<BatchReport> rows;
  for (const auto& p : paths) {
    const json j = load_json(p);
    try {
      rows.push_back(report_from_json(j.at("report")));
    } catch (const json::exception& e) {
      throw ParseError(p, "report", e.what());
    }
  }
  const std::string table = format_report_table(labels, rows);
  std::fputs(table.c_str(), stdout);
  if (const auto out = get<std::string>(config, "out"); !out.empty()) write_text(out, with_comment(config, table));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton motion adversarial attacks"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  GenData gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "synthesize and normalize a labeled motion dataset");
  Options gen_opts(gen_cmd);
  setup_gen_data(*gen_cmd, gen, gen_opts);

  Train train;
  auto* train_cmd = app.add_subcommand("train", "train a victim classifier");
  Options train_opts(train_cmd);
  setup_train(train, train_opts);

  Attack attack;
  auto* attack_cmd = app.add_subcommand("attack", "attack the test split");
  Options attack_opts(attack_cmd);
  setup_attack(attack, attack_opts);

  Evaluate eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "recompute metrics from stored pairs");
  Options eval_opts(eval_cmd);
  setup_evaluate(eval, eval_opts);

  Overlay overlay;
  auto* overlay_cmd = app.add_subcommand("export-overlay", "export per-frame original/adversarial coordinates");
  Options overlay_opts(overlay_cmd);
  setup_overlay(overlay, overlay_opts);

  Compare compare;
  auto* compare_cmd = app.add_subcommand("compare", "tabulate several attack reports side by side");
  Options compare_opts(compare_cmd);
  setup_compare(compare, compare_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_data(gen, gen_opts);
    if (train_cmd->parsed()) return run_train(train_opts);
    if (attack_cmd->parsed()) return run_attack_command(attack_opts);
    if (eval_cmd->parsed()) return run_evaluate(eval_opts);
    if (overlay_cmd->parsed()) return run_overlay(overlay_opts);
    if (compare_cmd->parsed()) return run_compare(compare_opts);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
