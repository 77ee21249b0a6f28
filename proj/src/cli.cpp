// SPDX-License-Identifier: Apache-2.0

#include "copas/cli.h"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "copas/csv.h"
#include "copas/dataset.h"
#include "copas/error.h"
#include "copas/evaluation.h"
#include "copas/features.h"
#include "copas/models.h"
#include "copas/predictor.h"
#include "copas/scaffold.h"
#include "copas/screening.h"
#include "copas/selection.h"

namespace copas {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Options never echoed: they choose where or how fast, not what.
const std::set<std::string> kUnechoed{"help", "config", "threads", "out"};

struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config;
};

struct FeatureOptions {
  std::string dataset;
  std::string blocks = "D";
  std::string keyset;
  std::string latents;
  std::string fingerprints;
  bool skip_bad = false;
};

struct ModelOptions {
  std::string model = "gb";
  std::optional<int> n_estimators;
  std::optional<int> max_depth;
  std::optional<int> min_samples_leaf;
  std::optional<int> max_features;
  std::optional<double> learning_rate;
  std::optional<bool> bootstrap;
  std::optional<double> c;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  std::string kernel = "rbf";
  double svr_tol = 1e-3;
  long svr_max_iter = 100000;
};

struct SelectionOptions {
  double variance = kDefaultVarianceThreshold;
  double pcc = kDefaultPccThreshold;
  std::string scope = "D";
};

void add_common(CLI::App *sub, Common &c) {
  sub->add_option("--seed", c.seed, "Master random seed");
  sub->add_option("--threads", c.threads, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "JSON config, or any artifact embedding one");
}

void add_features(CLI::App *sub, FeatureOptions &f) {
  sub->add_option("--dataset", f.dataset, "CSV with smiles,pce[,doi]")->required();
  sub->add_option("--blocks", f.blocks, "Feature blocks, e.g. D, K+D, Z+D");
  sub->add_option("--keyset", f.keyset, "Custom substructure key set (JSON)");
  sub->add_option("--latents", f.latents, "Latent vectors CSV: smiles,z1..zd");
  sub->add_flag("--skip-bad", f.skip_bad, "Drop bad dataset rows with a warning");
}

void add_model(CLI::App *sub, ModelOptions &m, bool allow_list) {
  auto *opt = sub->add_option("--model", m.model, allow_list ? "gb, rf, svr or a comma list" : "gb, rf or svr");
  if (!allow_list) opt->check(CLI::IsMember({"gb", "rf", "svr"}));
  sub->add_option("--n-estimators", m.n_estimators)->check(CLI::NonNegativeNumber);
  sub->add_option("--max-depth", m.max_depth)->check(CLI::NonNegativeNumber);
  sub->add_option("--min-samples-leaf", m.min_samples_leaf)->check(CLI::PositiveNumber);
  sub->add_option("--max-features", m.max_features)->check(CLI::PositiveNumber);
  sub->add_option("--learning-rate", m.learning_rate)->check(CLI::PositiveNumber);
  sub->add_option("--bootstrap", m.bootstrap);
  sub->add_option("--c", m.c)->check(CLI::PositiveNumber);
  sub->add_option("--epsilon", m.epsilon)->check(CLI::NonNegativeNumber);
  sub->add_option("--gamma", m.gamma)->check(CLI::PositiveNumber);
  sub->add_option("--kernel", m.kernel)->check(CLI::IsMember({"rbf", "linear"}));
  sub->add_option("--svr-tol", m.svr_tol)->check(CLI::PositiveNumber);
  sub->add_option("--svr-max-iter", m.svr_max_iter)->check(CLI::PositiveNumber);
}

void add_selection(CLI::App *sub, SelectionOptions &s) {
  sub->add_option("--variance-threshold", s.variance, "Keep columns with sample std above this");
  sub->add_option("--pcc-threshold", s.pcc, "Link columns with |Pearson r| above this");
  sub->add_option("--selection-scope", s.scope, "Blocks the selection cascade filters");
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

ModelKind parse_model_name(const std::string &name) {
  auto kind = model_kind_from_name(name);
  if (!kind) throw Error(ErrorCode::kUsage, "unknown model '" + name + "'; expected one of {gb, rf, svr}");
  return *kind;
}

TrainConfig train_config(const ModelOptions &m, ModelKind kind, std::uint64_t seed) {
  TrainConfig c = TrainConfig::defaults(kind);
  c.seed = seed;
  if (m.n_estimators) c.n_estimators = *m.n_estimators;
  if (m.max_depth) c.max_depth = *m.max_depth;
  if (m.min_samples_leaf) c.min_samples_leaf = *m.min_samples_leaf;
  if (m.max_features) c.max_features = *m.max_features;
  if (m.learning_rate) c.learning_rate = *m.learning_rate;
  if (m.bootstrap) c.bootstrap = *m.bootstrap;
  if (m.c) c.c = *m.c;
  if (m.epsilon) c.epsilon = *m.epsilon;
  if (m.gamma) c.gamma = *m.gamma;
  c.kernel = m.kernel == "linear" ? KernelKind::kLinear : KernelKind::kRbf;
  c.tolerance = m.svr_tol;
  c.max_iterations = m.svr_max_iter;
  return c;
}

// {"command": name, "options": {long-name: value-string}} for every option
// that affects the output.
Json echo_options(const CLI::App *sub) {
  Json options = Json::object();
  for (const CLI::Option *opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || kUnechoed.count(name)) continue;
    if (opt->count() > 0) {
      options[name] = opt->results().back();
    } else if (opt->get_expected_min() == 0) {
      options[name] = "false";
    } else if (!opt->get_default_str().empty()) {
      options[name] = opt->get_default_str();
    }
  }
  return Json{{"command", sub->get_name()}, {"options", options}};
}

std::string echo_string(const CLI::App *sub) { return echo_options(sub).dump(); }

// Tokens reproducing an echoed config, placed before the user's own flags so
// explicit flags win.
std::vector<std::string> config_tokens(const std::string &path, const std::string &command) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
  if (j.value("command", command) != command) {
    throw Error(ErrorCode::kUsage, path + " configures '" + j.value("command", "") + "', not '" + command + "'");
  }
  std::vector<std::string> tokens;
  if (!j.contains("options")) return tokens;
  for (const auto &[key, value] : j.at("options").items()) {
    const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
    tokens.push_back("--" + key + "=" + v);
  }
  return tokens;
}

struct LoadedFeatures {
  Dataset dataset;
  std::optional<KeySet> keyset;
  std::optional<LatentTable> latents;
  std::optional<ExternalFingerprints> fingerprints;
  std::set<Block> blocks;
  FeatureMatrix matrix;
};

LoadedFeatures load_features(const FeatureOptions &f, std::ostream &err) {
  LoadedFeatures lf;
  lf.blocks = parse_blocks(f.blocks);
  std::vector<DatasetIssue> issues;
  lf.dataset = load_dataset(f.dataset, true, &issues);
  for (const auto &issue : issues) {
    err << (f.skip_bad ? "warning: skipped" : "error:") << " line " << issue.line << " '"
        << issue.smiles << "': " << issue.message << "\n";
  }
  if (!issues.empty() && !f.skip_bad) {
    throw Error(ErrorCode::kInvalidDataset, std::to_string(issues.size()) +
                                                " bad record(s) in " + f.dataset + " (use --skip-bad to drop them)");
  }
  if (lf.dataset.size() == 0) throw Error(ErrorCode::kInvalidDataset, "dataset has no usable rows");
  if (lf.blocks.count(Block::kLatent) && f.latents.empty()) {
    throw Error(ErrorCode::kUsage, "blocks include Z but no --latents file was given");
  }
  if (!f.keyset.empty()) lf.keyset = load_keyset(f.keyset);
  if (!f.latents.empty()) lf.latents = load_latents(f.latents);
  if (!f.fingerprints.empty()) lf.fingerprints = load_external_fingerprints(f.fingerprints);
  FeatureSources sources;
  sources.keyset = lf.keyset ? &*lf.keyset : nullptr;
  sources.external_keys = lf.fingerprints ? &*lf.fingerprints : nullptr;
  sources.latents = lf.latents ? &*lf.latents : nullptr;
  lf.matrix = assemble(lf.dataset.molecules, lf.blocks, sources);
  return lf;
}

SelectionThresholds thresholds_of(const SelectionOptions &s) { return {s.variance, s.pcc}; }

std::string sidecar_path(const std::string &out) { return out + ".config.json"; }

int cmd_featurize(CLI::App *sub, const FeatureOptions &f, const std::string &out_path,
                  std::ostream &out, std::ostream &err) {
  const LoadedFeatures lf = load_features(f, err);
  const std::string csv = feature_matrix_to_csv(lf.matrix);
  if (out_path.empty()) {
    out << csv;
  } else {
    write_file_atomic(out_path, csv);
    Json side{{"format_version", 1}, {"config", echo_options(sub)}};
    write_file_atomic(sidecar_path(out_path), side.dump(1) + "\n");
    out << "wrote " << lf.matrix.rows() << " x " << lf.matrix.cols() << " matrix to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_train(CLI::App *sub, const Common &common, const FeatureOptions &f, const ModelOptions &m,
              const SelectionOptions &s, const std::string &out_path, std::ostream &out,
              std::ostream &err) {
  if (!f.fingerprints.empty()) {
    throw Error(ErrorCode::kUsage, "trained models use the native key set; --fingerprints is not supported here");
  }
  const LoadedFeatures lf = load_features(f, err);
  const ModelKind kind = parse_model_name(m.model);
  const TrainConfig config = train_config(m, kind, common.seed);
  const std::vector<double> y = lf.dataset.targets();
  const Predictor p = train_predictor(lf.matrix, y, lf.blocks, lf.keyset, thresholds_of(s),
                                      parse_blocks(s.scope), config);
  const std::string text = predictor_to_json(p, echo_string(sub));
  if (out_path.empty()) {
    out << text;
    return kExitOk;
  }
  write_file_atomic(out_path, text);
  out << "trained " << model_kind_name(kind) << " on " << lf.dataset.size() << " molecules, "
      << p.pipeline.kept_columns().size() << " selected features";
  if (const auto *gb = std::get_if<GBModel>(&p.model)) out << ", " << gb->trees.size() << " trees";
  if (const auto *rf = std::get_if<RFModel>(&p.model)) out << ", " << rf->trees.size() << " trees";
  if (const auto *svr = std::get_if<SVRModel>(&p.model)) {
    out << ", " << svr->support_vectors.size() << " support vectors";
    if (!svr->converged) err << "warning: SVR stopped at the iteration cap before converging\n";
  }
  out << "\n";
  return kExitOk;
}

int cmd_evaluate(CLI::App *sub, const Common &common, const FeatureOptions &f,
                 const ModelOptions &m, const SelectionOptions &s, const std::string &registry_path,
                 const std::string &splitters, int repeats, double test_fraction,
                 const std::string &out_prefix, std::ostream &out, std::ostream &err) {
  std::vector<SplitMethod> methods;
  for (const auto &name : split_list(splitters)) {
    auto method = split_method_from_name(name);
    if (!method) throw Error(ErrorCode::kUsage, "unknown splitter '" + name + "'; expected msc, random or logo");
    methods.push_back(*method);
  }
  std::vector<ModelKind> kinds;
  for (const auto &name : split_list(m.model)) kinds.push_back(parse_model_name(name));
  if (methods.empty() || kinds.empty()) throw Error(ErrorCode::kUsage, "no splitter or model given");

  const LoadedFeatures lf = load_features(f, err);
  const std::vector<double> y = lf.dataset.targets();
  std::optional<Groups> groups;
  const bool needs_groups = std::any_of(methods.begin(), methods.end(),
                                        [](SplitMethod sm) { return sm != SplitMethod::kRandom; });
  if (needs_groups) {
    if (registry_path.empty()) throw Error(ErrorCode::kUsage, "msc and logo splitters need --registry");
    const ScaffoldRegistry registry = load_registry(registry_path);
    groups = group_dataset(lf.dataset.molecules, registry);
  }

  std::vector<EvalReport> reports;
  for (ModelKind kind : kinds) {
    for (SplitMethod method : methods) {
      EvalConfig ec;
      ec.method = method;
      ec.test_fraction = test_fraction;
      ec.repeats = repeats;
      ec.master_seed = common.seed;
      ec.model = train_config(m, kind, common.seed);
      ec.thresholds = thresholds_of(s);
      ec.selection_scope = parse_blocks(s.scope);
      ec.threads = common.threads;
      EvalReport r = repeated_eval(lf.matrix, y, groups ? &*groups : nullptr, ec);
      r.blocks = blocks_to_string(lf.blocks);
      if (r.nonconverged > 0) {
        err << "warning: " << r.nonconverged << " SVR fit(s) hit the iteration cap\n";
      }
      reports.push_back(std::move(r));
    }
  }

  const Json echo = echo_options(sub);
  Json j;
  j["format_version"] = 1;
  j["config"] = echo;
  j["dataset"] = {{"name", lf.dataset.name}, {"size", lf.dataset.size()}};
  if (groups) {
    Json sizes = Json::object();
    for (const auto &[id, members] : *groups) sizes[std::to_string(id)] = members.size();
    j["group_sizes"] = sizes;
  }
  Json arr = Json::array();
  for (const auto &r : reports) arr.push_back(Json::parse(report_to_json(r)));
  j["reports"] = std::move(arr);
  const std::string table = reports_to_table(reports);
  if (out_prefix.empty()) {
    out << table;
    return kExitOk;
  }
  write_file_atomic(out_prefix + ".json", j.dump(1) + "\n");
  write_file_atomic(out_prefix + ".txt", "config: " + echo.dump() + "\n" + table);
  out << table;
  return kExitOk;
}

int cmd_screen(const Common &common, std::optional<double> top_fraction,
               const std::string &out_prefix, std::ostream &out) {
  if (common.config.empty()) throw Error(ErrorCode::kUsage, "screen needs --config <funnel.json>");
  const fs::path config_path(common.config);
  std::string text = read_text_file(config_path);
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("config") && j.at("config").is_object()) text = j.at("config").dump();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, common.config + ": " + e.what());
  }
  FunnelConfig config = FunnelConfig::from_json(text, config_path.parent_path());
  if (top_fraction) {
    if (!(*top_fraction > 0.0 && *top_fraction <= 1.0)) {
      throw Error(ErrorCode::kUsage, "--top-fraction must lie in (0, 1]");
    }
    config.top_fraction = *top_fraction;
  }
  const FunnelInputs inputs = load_funnel_inputs(config);
  const ScreeningReport report = run_funnel(inputs, config, common.threads);
  const std::string summary = screening_report_to_text(report);
  if (!out_prefix.empty()) {
    write_file_atomic(out_prefix + ".json", screening_report_to_json(report));
    Json echo = Json::parse(report.config_json);
    write_file_atomic(out_prefix + ".txt", "config: " + echo.dump() + "\n" + summary);
  }
  out << summary;
  return kExitOk;
}

int cmd_scaffold(CLI::App *sub, const std::string &input, const std::string &registry_path,
                 bool skip_bad, const std::string &out_path, std::ostream &out, std::ostream &err) {
  const CsvTable table = read_csv(input);
  const std::size_t smiles_col = table.require_column("smiles");
  std::optional<ScaffoldRegistry> registry;
  if (!registry_path.empty()) registry = load_registry(registry_path);
  std::string csv = "smiles,canonical,scaffold,group,group_name\n";
  std::size_t bad = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string &smiles = table.rows[r][smiles_col];
    try {
      const MolecularGraph g = parse_smiles(smiles);
      const Scaffold sc = extract_scaffold(g);
      std::string group, name;
      if (registry) {
        if (auto id = registry->group_of(sc.canonical)) {
          group = std::to_string(*id);
          name = registry->group_name(*id);
        }
      }
      csv += csv_escape(smiles) + "," + csv_escape(canonical_smiles(g)) + "," + csv_escape(sc.canonical) +
             "," + group + "," + csv_escape(name) + "\n";
    } catch (const Error &e) {
      ++bad;
      err << (skip_bad ? "warning: skipped" : "error:") << " line " << table.line_numbers[r] << " '"
          << smiles << "': " << e.what() << "\n";
    }
  }
  if (bad > 0 && !skip_bad) {
    throw Error(ErrorCode::kInvalidDataset, std::to_string(bad) + " unparseable row(s) in " + input);
  }
  if (out_path.empty()) {
    out << csv;
  } else {
    write_file_atomic(out_path, csv);
    Json side{{"format_version", 1}, {"config", echo_options(sub)}};
    write_file_atomic(sidecar_path(out_path), side.dump(1) + "\n");
  }
  return kExitOk;
}

// Value of --config in `args`, if present.
std::string find_config(const std::vector<std::string> &args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return "";
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Perovskite additive screening: featurize, train, evaluate, screen"};
  app.name("copas");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  Common common;
  FeatureOptions features;
  ModelOptions model;
  SelectionOptions selection;
  std::string out_path;
  std::string registry_path;
  std::string splitters = "msc";
  int repeats = 200;
  double test_fraction = 0.1;
  std::optional<double> top_fraction;
  std::string scaffold_input;

  CLI::App *featurize = app.add_subcommand("featurize", "Write the feature matrix of a dataset");
  add_common(featurize, common);
  add_features(featurize, features);
  featurize->add_option("--fingerprints", features.fingerprints, "Precomputed K-block bits CSV");
  featurize->add_option("--out", out_path, "Output CSV (stdout when omitted)");

  CLI::App *train = app.add_subcommand("train", "Fit selection and a regression model");
  add_common(train, common);
  add_features(train, features);
  add_model(train, model, false);
  add_selection(train, selection);
  train->add_option("--out", out_path, "Output model JSON");

  CLI::App *evaluate = app.add_subcommand("evaluate", "Repeated split evaluation");
  add_common(evaluate, common);
  add_features(evaluate, features);
  evaluate->add_option("--fingerprints", features.fingerprints, "Precomputed K-block bits CSV");
  add_model(evaluate, model, true);
  add_selection(evaluate, selection);
  evaluate->add_option("--registry", registry_path, "Scaffold registry CSV");
  evaluate->add_option("--splitter", splitters, "msc, random, logo or a comma list");
  evaluate->add_option("--repeats", repeats, "Repeats per random or scaffold split")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--test-fraction", test_fraction, "Random split test fraction")
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--out", out_path, "Output prefix for .json and .txt reports");

  CLI::App *screen = app.add_subcommand("screen", "Run the five-tier candidate funnel");
  add_common(screen, common);
  screen->add_option("--top-fraction", top_fraction, "Override the funnel's top fraction");
  screen->add_option("--out", out_path, "Output prefix for .json and .txt reports");

  CLI::App *scaffold = app.add_subcommand("scaffold", "Scaffold and group of each molecule");
  add_common(scaffold, common);
  scaffold->add_option("--dataset", scaffold_input, "CSV with a smiles column")->required();
  scaffold->add_option("--registry", registry_path, "Scaffold registry CSV");
  scaffold->add_flag("--skip-bad", features.skip_bad, "Skip unparseable rows with a warning");
  scaffold->add_option("--out", out_path, "Output CSV (stdout when omitted)");

  try {
    std::vector<std::string> argv = args;
    const std::string config = find_config(args);
    if (!config.empty() && !args.empty() && args[0] != "screen") {
      const auto tokens = config_tokens(config, args[0]);
      argv.insert(argv.begin() + 1, tokens.begin(), tokens.end());
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? kExitUsage : kExitValidation;
  }

  try {
    if (featurize->parsed()) return cmd_featurize(featurize, features, out_path, out, err);
    if (train->parsed()) return cmd_train(train, common, features, model, selection, out_path, out, err);
    if (evaluate->parsed()) {
      return cmd_evaluate(evaluate, common, features, model, selection, registry_path, splitters,
                          repeats, test_fraction, out_path, out, err);
    }
    if (screen->parsed()) return cmd_screen(common, top_fraction, out_path, out);
    if (scaffold->parsed()) {
      return cmd_scaffold(scaffold, scaffold_input, registry_path, features.skip_bad, out_path, out, err);
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? kExitUsage : kExitValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

} // namespace copas
