// Command-line front end for the adversarial PRNG workbench: train the
// generator against an adversary, emit bitstreams, score them with the
// built-in statistical suite, and reproduce the full before/after
// experiment with one command.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "ganprng/bitstream.hpp"
#include "ganprng/checkpoint.hpp"
#include "ganprng/errors.hpp"
#include "ganprng/models.hpp"
#include "ganprng/nist/suite.hpp"
#include "ganprng/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ganprng;

namespace {

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;        // bad flags or config file
constexpr int kExitParse = 2;        // malformed input data
constexpr int kExitEnvironment = 3;  // I/O or entropy failure
constexpr int kExitNumerical = 4;    // training aborted on non-finite loss
constexpr int kExitInvalid = 5;      // rejected input (lengths, ranges)

/// Raised for configuration mistakes; mapped to the usage exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kKnownKeys = {
    "mode",
    "steps",
    "batch_size",
    "learning_rate",
    "adversary_updates_per_generator_update",
    "rng_seed",
    "reference_source",
    "checkpoint_every",
    "generator_hidden_width",
    "generator_hidden_depth",
    "eval_seed",
    "eval_count",
    "bits_per_instance",
    "instances_per_test",
    "alpha",
    "block_frequency_block_length",
    "serial_pattern_length",
    "approximate_entropy_pattern_length",
    "visualize_width",
    "visualize_height",
};

/// Flat key = value configuration file; # starts a comment, blank lines
/// are skipped, unknown keys are rejected.
class FlatConfig {
 public:
  static FlatConfig load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    FlatConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
      };
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!kKnownKeys.count(key)) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    const auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    }
  }

  double get_double(const std::string& key, double dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, std::string> values_;
};

TrainConfig train_config_from(const FlatConfig& cfg) {
  TrainConfig tc;
  const std::string mode = cfg.get_string("mode", "predictive");
  if (mode == "predictive") {
    tc.mode = TrainMode::predictive;
  } else if (mode == "discriminative") {
    tc.mode = TrainMode::discriminative;
  } else {
    throw ConfigError("mode must be 'predictive' or 'discriminative', got " + mode);
  }
  tc.steps = cfg.get_u64("steps", 10'000);
  tc.batch_size = cfg.get_u64("batch_size", 256);
  tc.learning_rate = cfg.get_double("learning_rate", 0.02);
  tc.adversary_updates_per_gen_update = static_cast<std::uint32_t>(
      cfg.get_u64("adversary_updates_per_generator_update", 3));
  tc.rng_seed = cfg.get_u64("rng_seed", 1);
  const std::string source = cfg.get_string("reference_source", "seeded-internal");
  if (source == "seeded-internal") {
    tc.reference_source = ReferenceSourceKind::seeded_internal;
  } else if (source == "os-entropy") {
    tc.reference_source = ReferenceSourceKind::os_entropy;
  } else {
    throw ConfigError("reference_source must be 'seeded-internal' or 'os-entropy'");
  }
  tc.checkpoint_every = cfg.get_u64("checkpoint_every", 0);
  return tc;
}

nist::SuiteConfig suite_config_from(const FlatConfig& cfg) {
  nist::SuiteConfig sc;
  sc.bits_per_instance = cfg.get_u64("bits_per_instance", sc.bits_per_instance);
  sc.instances_per_test = cfg.get_u64("instances_per_test", sc.instances_per_test);
  sc.alpha = cfg.get_double("alpha", sc.alpha);
  sc.block_frequency_block_length =
      cfg.get_u64("block_frequency_block_length", sc.block_frequency_block_length);
  sc.serial_pattern_length =
      cfg.get_u64("serial_pattern_length", sc.serial_pattern_length);
  sc.approximate_entropy_pattern_length = cfg.get_u64(
      "approximate_entropy_pattern_length", sc.approximate_entropy_pattern_length);
  return sc;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Records a run id, the config snapshot and every artifact path; written
/// before the command reports success.
class Manifest {
 public:
  Manifest(std::string command, std::string run_id)
      : command_(std::move(command)), run_id_(std::move(run_id)) {}

  void set_config(json config) { config_ = std::move(config); }
  void add_artifact(const std::string& name, const fs::path& path) {
    artifacts_[name] = path.string();
  }

  void write(const fs::path& path) const {
    const json j = {{"run_id", run_id_},
                    {"command", command_},
                    {"created_utc", iso8601_now()},
                    {"config", config_},
                    {"artifacts", artifacts_}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EnvironmentError("cannot write manifest " + path.string());
    out << j.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::string run_id_;
  json config_ = json::object();
  std::map<std::string, std::string> artifacts_;
};

std::string default_run_id(const std::string& command) {
  return command + "-" +
         std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count());
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON in " + path.string() + ": " + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
}

/// Streams the generator's evaluation output for `count` rows straight
/// into an ASCII bit file.
std::uint64_t generate_bits_file(GeneratorNet& gen, std::uint16_t seed,
                                 std::uint64_t count, const fs::path& out_path) {
  const EvalDataset dataset = build_eval_dataset(seed, count);
  AsciiBitWriter writer(out_path);
  emit_evaluation_stream(gen, dataset, 4096, [&](const SequenceBatch& chunk) {
    writer.append_words(quantize(chunk));
  });
  writer.close();
  return writer.bits_written();
}

// --- subcommand bodies ------------------------------------------------------

struct TrainArgs {
  std::string config_path;
  std::string out_dir;
  std::string run_id;
};

int run_train(const TrainArgs& args) {
  const FlatConfig cfg = FlatConfig::load(args.config_path);
  TrainConfig tc = train_config_from(cfg);
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  if (tc.checkpoint_every > 0) {
    tc.checkpoint_prefix = (out_dir / "checkpoint").string();
  }

  const auto width = cfg.get_u64("generator_hidden_width", 30);
  const auto depth = cfg.get_u64("generator_hidden_depth", 4);
  Rng gen_init(derive_seed(tc.rng_seed, 0));
  GeneratorNet gen(gen_init, width, depth);
  Rng adv_init(derive_seed(tc.rng_seed, 1));

  Manifest manifest("train", args.run_id.empty() ? default_run_id("train")
                                                 : args.run_id);
  manifest.set_config(cfg.to_json());

  TrainLog log;
  if (tc.mode == TrainMode::predictive) {
    PredictorNet adversary(adv_init);
    log = train_predictive(gen, adversary, tc);
    save_checkpoint(adversary, out_dir / "adversary.ckpt");
  } else {
    DiscriminatorNet adversary(adv_init);
    log = train_discriminative(gen, adversary, tc);
    save_checkpoint(adversary, out_dir / "adversary.ckpt");
  }
  save_checkpoint(gen, out_dir / "generator.ckpt");
  log.write_csv(out_dir / "loss.csv");

  manifest.add_artifact("generator_checkpoint", out_dir / "generator.ckpt");
  manifest.add_artifact("adversary_checkpoint", out_dir / "adversary.ckpt");
  manifest.add_artifact("loss_csv", out_dir / "loss.csv");
  manifest.write(out_dir / "manifest.json");
  std::cout << "trained " << log.records.size() << " steps; artifacts in "
            << out_dir.string() << "\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string checkpoint;
  std::uint64_t seed = 10;
  std::uint64_t count = 0;
  std::string out_path;
  std::string run_id;
};

int run_generate(const GenerateArgs& args) {
  if (args.seed > 0xFFFF) {
    throw InvalidInput("seed must be a 16-bit value");
  }
  GeneratorNet gen = load_generator(args.checkpoint);
  const std::uint64_t bits = generate_bits_file(
      gen, static_cast<std::uint16_t>(args.seed), args.count, args.out_path);

  Manifest manifest("generate", args.run_id.empty() ? default_run_id("generate")
                                                    : args.run_id);
  manifest.set_config({{"checkpoint", args.checkpoint},
                       {"seed", args.seed},
                       {"count", args.count}});
  manifest.add_artifact("bits", args.out_path);
  manifest.write(fs::path(args.out_path).string() + ".manifest.json");
  std::cout << "wrote " << bits << " bits to " << args.out_path << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string bits_path;
  std::string config_path;
  std::string out_json;
  std::string out_text;
  std::string run_id;
};

int run_evaluate(const EvaluateArgs& args) {
  nist::SuiteConfig sc;
  json config_snapshot = json::object();
  if (!args.config_path.empty()) {
    const FlatConfig cfg = FlatConfig::load(args.config_path);
    sc = suite_config_from(cfg);
    config_snapshot = cfg.to_json();
  }
  const BitStream stream = read_ascii_bits(args.bits_path);
  const nist::SuiteReport report = nist::run_suite(stream, sc);

  write_text_file(args.out_json, nist::to_json(report).dump(2) + "\n");
  const std::string table = nist::report_table(report);
  if (!args.out_text.empty()) write_text_file(args.out_text, table);
  std::cout << table;

  Manifest manifest("evaluate", args.run_id.empty() ? default_run_id("evaluate")
                                                    : args.run_id);
  manifest.set_config(config_snapshot);
  manifest.add_artifact("report_json", args.out_json);
  if (!args.out_text.empty()) manifest.add_artifact("report_text", args.out_text);
  manifest.write(fs::path(args.out_json).string() + ".manifest.json");
  return kExitOk;
}

struct CompareArgs {
  std::string before_path;
  std::string after_path;
  std::string out_json;
};

int run_compare(const CompareArgs& args) {
  const nist::SuiteReport before =
      nist::suite_report_from_json(read_json_file(args.before_path));
  const nist::SuiteReport after =
      nist::suite_report_from_json(read_json_file(args.after_path));
  const nist::ReportDelta delta = nist::compare_reports(before, after);

  if (!args.out_json.empty()) {
    write_text_file(args.out_json, nist::to_json(delta).dump(2) + "\n");
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%-6s %12s %12s\n", "metric", "before",
                "after");
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-6s %12.1f %12.1f\n", "F_I%",
                before.failed_instance_pct, after.failed_instance_pct);
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-6s %12zu %12zu\n", "F_p",
                before.failed_uniformity, after.failed_uniformity);
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-6s %12zu %12zu\n", "F_T",
                before.failed_tests, after.failed_tests);
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-6s %12.1f %12.1f\n", "F_%",
                before.failed_test_pct, after.failed_test_pct);
  std::cout << line;
  std::snprintf(line, sizeof(line),
                "delta: F_I%%=%+.1f F_p=%+.0f F_T=%+.0f F_%%=%+.1f\n",
                delta.delta_failed_instance_pct, delta.delta_failed_uniformity,
                delta.delta_failed_tests, delta.delta_failed_test_pct);
  std::cout << line;
  return kExitOk;
}

struct VisualizeArgs {
  std::string bits_path;
  std::size_t width = 200;
  std::size_t height = 200;
  std::string out_path;
};

int run_visualize(const VisualizeArgs& args) {
  const BitStream stream = read_ascii_bits(args.bits_path);
  visualize_grid(stream, args.width, args.height, args.out_path);
  std::cout << "byte_entropy " << byte_entropy(stream) << " bits/symbol\n";
  std::cout << "wrote " << args.width << "x" << args.height << " bitmap to "
            << args.out_path << "\n";
  return kExitOk;
}

struct ExperimentArgs {
  std::string config_path;
  std::string out_dir;
  std::string run_id;
};

/// Full experimental procedure: untrained baseline bits, evaluation,
/// adversarial training, trained bits, evaluation, comparison and grid
/// visualizations, all under one output directory.
int run_experiment(const ExperimentArgs& args) {
  const FlatConfig cfg = FlatConfig::load(args.config_path);
  TrainConfig tc = train_config_from(cfg);
  const nist::SuiteConfig sc = suite_config_from(cfg);
  sc.validate();

  const auto eval_seed_raw = cfg.get_u64("eval_seed", 10);
  if (eval_seed_raw > 0xFFFF) throw ConfigError("eval_seed must be 16-bit");
  const auto eval_seed = static_cast<std::uint16_t>(eval_seed_raw);
  // Enough rows for the suite unless overridden: one row yields 128 bits.
  const std::uint64_t needed_bits =
      sc.bits_per_instance * static_cast<std::uint64_t>(sc.instances_per_test);
  const std::uint64_t eval_count =
      cfg.get_u64("eval_count", (needed_bits + 127) / 128);
  const std::size_t vis_width = cfg.get_u64("visualize_width", 200);
  const std::size_t vis_height = cfg.get_u64("visualize_height", 200);

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  if (tc.checkpoint_every > 0) {
    tc.checkpoint_prefix = (out_dir / "checkpoint").string();
  }

  Manifest manifest("experiment", args.run_id.empty()
                                      ? default_run_id("experiment")
                                      : args.run_id);
  manifest.set_config(cfg.to_json());

  const auto width = cfg.get_u64("generator_hidden_width", 30);
  const auto depth = cfg.get_u64("generator_hidden_depth", 4);
  Rng gen_init(derive_seed(tc.rng_seed, 0));
  GeneratorNet gen(gen_init, width, depth);
  Rng adv_init(derive_seed(tc.rng_seed, 1));

  save_checkpoint(gen, out_dir / "generator-untrained.ckpt");
  manifest.add_artifact("generator_untrained", out_dir / "generator-untrained.ckpt");

  // Untrained baseline.
  generate_bits_file(gen, eval_seed, eval_count, out_dir / "bits-before.txt");
  manifest.add_artifact("bits_before", out_dir / "bits-before.txt");
  const BitStream before_bits = read_ascii_bits(out_dir / "bits-before.txt");
  const nist::SuiteReport before = nist::run_suite(before_bits, sc);
  write_text_file(out_dir / "report-before.json",
                  nist::to_json(before).dump(2) + "\n");
  write_text_file(out_dir / "report-before.txt", nist::report_table(before));
  manifest.add_artifact("report_before", out_dir / "report-before.json");
  if (before_bits.bit_count() >= vis_width * vis_height) {
    visualize_grid(before_bits, vis_width, vis_height, out_dir / "grid-before.pbm");
    manifest.add_artifact("grid_before", out_dir / "grid-before.pbm");
  }
  std::cout << "before training: F_I% = " << before.failed_instance_pct
            << ", byte entropy = " << byte_entropy(before_bits) << "\n";

  // Adversarial training.
  TrainLog log;
  if (tc.mode == TrainMode::predictive) {
    PredictorNet adversary(adv_init);
    log = train_predictive(gen, adversary, tc);
    save_checkpoint(adversary, out_dir / "adversary-trained.ckpt");
  } else {
    DiscriminatorNet adversary(adv_init);
    log = train_discriminative(gen, adversary, tc);
    save_checkpoint(adversary, out_dir / "adversary-trained.ckpt");
  }
  save_checkpoint(gen, out_dir / "generator-trained.ckpt");
  log.write_csv(out_dir / "loss.csv");
  manifest.add_artifact("generator_trained", out_dir / "generator-trained.ckpt");
  manifest.add_artifact("adversary_trained", out_dir / "adversary-trained.ckpt");
  manifest.add_artifact("loss_csv", out_dir / "loss.csv");

  // Trained evaluation.
  generate_bits_file(gen, eval_seed, eval_count, out_dir / "bits-after.txt");
  manifest.add_artifact("bits_after", out_dir / "bits-after.txt");
  const BitStream after_bits = read_ascii_bits(out_dir / "bits-after.txt");
  const nist::SuiteReport after = nist::run_suite(after_bits, sc);
  write_text_file(out_dir / "report-after.json",
                  nist::to_json(after).dump(2) + "\n");
  write_text_file(out_dir / "report-after.txt", nist::report_table(after));
  manifest.add_artifact("report_after", out_dir / "report-after.json");
  if (after_bits.bit_count() >= vis_width * vis_height) {
    visualize_grid(after_bits, vis_width, vis_height, out_dir / "grid-after.pbm");
    manifest.add_artifact("grid_after", out_dir / "grid-after.pbm");
  }
  std::cout << "after training:  F_I% = " << after.failed_instance_pct
            << ", byte entropy = " << byte_entropy(after_bits) << "\n";

  // Comparison.
  const nist::ReportDelta delta = nist::compare_reports(before, after);
  write_text_file(out_dir / "compare.json", nist::to_json(delta).dump(2) + "\n");
  manifest.add_artifact("compare", out_dir / "compare.json");
  std::cout << "delta: F_I%=" << delta.delta_failed_instance_pct
            << " F_p=" << delta.delta_failed_uniformity
            << " F_T=" << delta.delta_failed_tests
            << " F_%=" << delta.delta_failed_test_pct << "\n";

  manifest.write(out_dir / "manifest.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarially trained PRNG workbench"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Run one adversarial training job");
  train_cmd->add_option("--config", train_args.config_path, "Config file")->required();
  train_cmd->add_option("--out-dir", train_args.out_dir, "Output directory")->required();
  train_cmd->add_option("--run-id", train_args.run_id, "Run id for the manifest");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Emit an ASCII bit file from a checkpoint");
  gen_cmd->add_option("--checkpoint", gen_args.checkpoint, "Generator checkpoint")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Evaluation seed (16-bit)")->required();
  gen_cmd->add_option("--count", gen_args.count, "Number of input rows")->required();
  gen_cmd->add_option("--out", gen_args.out_path, "Output bit file")->required();
  gen_cmd->add_option("--run-id", gen_args.run_id, "Run id for the manifest");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a bit file with the statistical suite");
  eval_cmd->add_option("--bits", eval_args.bits_path, "ASCII bit file")->required();
  eval_cmd->add_option("--config", eval_args.config_path, "Config file with suite keys");
  eval_cmd->add_option("--out-json", eval_args.out_json, "Report JSON path")->required();
  eval_cmd->add_option("--out-text", eval_args.out_text, "Report table path");
  eval_cmd->add_option("--run-id", eval_args.run_id, "Run id for the manifest");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Diff two report JSONs");
  cmp_cmd->add_option("--before", cmp_args.before_path, "Baseline report")->required();
  cmp_cmd->add_option("--after", cmp_args.after_path, "Post-training report")->required();
  cmp_cmd->add_option("--out-json", cmp_args.out_json, "Delta JSON path");

  VisualizeArgs vis_args;
  auto* vis_cmd = app.add_subcommand("visualize", "Render leading bits as a P1 bitmap");
  vis_cmd->add_option("--bits", vis_args.bits_path, "ASCII bit file")->required();
  vis_cmd->add_option("--width", vis_args.width, "Grid width");
  vis_cmd->add_option("--height", vis_args.height, "Grid height");
  vis_cmd->add_option("--out", vis_args.out_path, "Output PBM path")->required();

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Full procedure: baseline, train, evaluate, compare");
  exp_cmd->add_option("--config", exp_args.config_path, "Config file")->required();
  exp_cmd->add_option("--out-dir", exp_args.out_dir, "Output directory")->required();
  exp_cmd->add_option("--run-id", exp_args.run_id, "Run id for the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*gen_cmd) return run_generate(gen_args);
    if (*eval_cmd) return run_evaluate(eval_args);
    if (*cmp_cmd) return run_compare(cmp_args);
    if (*vis_cmd) return run_visualize(vis_args);
    if (*exp_cmd) return run_experiment(exp_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const StateError& e) {
    std::cerr << "state error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
