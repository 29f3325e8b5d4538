// hc4rc command-line driver.
//
//   hc4rc experiment --dataset d.csv --annotations d.conllu --seed 7 --out run/
//   hc4rc inspect    --dataset d.csv [--annotations d.conllu] [--dump-features f.jsonl]
//   hc4rc train      --dataset d.csv --annotations d.conllu --seed 7 --model m.bin
//
// Exit codes: 0 ok, 2 configuration error, 3 data error, 4 degenerate run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hc4rc/hc4rc.hpp"

namespace fs = std::filesystem;
using namespace hc4rc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct Options {
  std::string dataset;
  std::string annotations;
  std::string strategy = "all";
  std::string folds = "ten";
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::string feature_mode = "plain";
  double svm_c = 1.0;
  double tolerance = 1e-4;
  std::size_t max_epochs = 1000;
  bool grid_search = false;
  std::vector<double> grid{0.01, 0.1, 1.0, 10.0};
  std::size_t inner_folds = 3;
  std::size_t min_df = 1;
  std::string weighting = "tfidf";
  bool global_decomposition = false;
  std::string undersample = "minimum";
  std::string out = ".";
  std::size_t threads = 1;
  std::string dump_features;
  std::string model_path;
};

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig c;
  c.seed = o.seed;
  c.threads = o.threads;
  c.feature_mode = o.feature_mode == "plain" ? FeatureMode::Plain : FeatureMode::RolePrefixed;
  c.global_decomposition = o.global_decomposition;
  c.undersample_target = o.undersample == "median" ? UndersampleTarget::Median : UndersampleTarget::Minimum;
  c.model.svm = {.c = o.svm_c, .tolerance = o.tolerance, .max_epochs = o.max_epochs, .seed = o.seed};
  c.model.grid_search = o.grid_search;
  c.model.grid = o.grid;
  c.model.inner_folds = o.inner_folds;
  c.model.min_df = o.min_df;
  c.model.weighting = o.weighting == "tf" ? Weighting::RawTf : Weighting::TfIdf;
  return c;
}

std::vector<Strategy> strategies(const std::string& name) {
  if (name == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
  return {*parse_strategy(name)};
}

FoldPlan fold_plan(const Dataset& ds, const Options& o) {
  if (o.folds == "project") {
    std::vector<std::string> projects;
    for (const auto& r : ds.requirements) projects.push_back(r.project_id);
    return plan_project_fold(projects, o.k, o.seed);
  }
  std::vector<Label> labels;
  for (const auto& r : ds.requirements) labels.push_back(r.label);
  return plan_stratified_kfold(labels, o.k, o.seed);
}

// Write to a sibling temp file, then rename over the target.
void write_atomic(const fs::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

int cmd_experiment(const Options& o) {
  const auto ds = load_dataset(o.dataset);
  const auto ann = load_annotations(o.annotations);
  const auto cfg = experiment_config(o);

  ExperimentInfo info{o.dataset, o.annotations, o.folds, {}};
  if (const auto stray = unknown_annotation_ids(ds, ann); !stray.empty()) {
    info.warnings.push_back("UnknownReqId: " + std::to_string(stray.size()) + " annotated req_id(s) not in the dataset");
    std::cerr << "warning: " << info.warnings.back() << "\n";
  }
  const auto features = extract_features(ds, ann, cfg.feature_mode);
  const auto plan = fold_plan(ds, o);

  std::vector<EvaluationReport> results;
  for (auto s : strategies(o.strategy)) {
    results.push_back(run_cv(ds, features, s, plan, cfg));
    for (const auto& f : results.back().folds)
      for (const auto& w : f.warnings) std::cerr << "warning: " << strategy_name(s) << " fold " << f.index << ": " << w << "\n";
  }

  const fs::path out(o.out);
  fs::create_directories(out);
  write_atomic(out / "report.json", report_json(ds, plan, cfg, info, results).dump(2) + "\n");
  std::string txt = "dataset " + o.dataset + ": " + std::to_string(ds.sample_size()) + " requirements, " +
                    std::to_string(ds.label_set.size()) + " classes; " + std::to_string(plan.k) + " " +
                    std::string(fold_kind_name(plan.kind)) + " folds, seed " + std::to_string(o.seed) + "\n\n";
  write_atomic(out / "report.txt", txt + report_text(ds, results));
  for (const auto& r : results) {
    const std::string name(strategy_name(r.strategy));
    for (const auto& f : r.folds)
      write_atomic(out / ("confusion_" + name + "_" + std::to_string(f.index) + ".csv"), f.confusion.to_csv());
    write_atomic(out / ("confusion_" + name + "_pooled.csv"), r.pooled.to_csv());
  }
  std::cout << report_text(ds, results);
  return 0;
}

int cmd_inspect(const Options& o) {
  const auto ds = load_dataset(o.dataset);
  std::cout << "dataset: " << o.dataset << "\n"
            << "requirements: " << ds.sample_size() << ", projects: " << ds.project_set.size()
            << ", classes: " << ds.label_set.size() << "\n\n";

  const auto plan = decompose(ds.class_counts());
  std::cout << "decomposition (descending count, cut at half of " << plan.total << "):\n";
  std::size_t cumulative = 0;
  for (const auto& [label, n] : plan.sorted_counts) {
    cumulative += n;
    char line[128];
    std::snprintf(line, sizeof line, "  %-6s %6zu  cumulative %6zu  %5.1f%%  %s\n", label.c_str(), n, cumulative,
                  100.0 * static_cast<double>(cumulative) / static_cast<double>(plan.total),
                  plan.is_maj(label) ? "maj" : "min");
    std::cout << line;
  }
  std::cout << "maj = {" << join(plan.maj_classes) << "} (" << plan.maj_count << "), min = ";
  if (plan.min_classes.empty()) {
    std::cout << "∅ (0)\n";
    std::cout << "warning: DegenerateMin: minority subset empty; hierarchy reduces to a flat classifier\n";
  } else {
    std::cout << plan.min_classes.size() << (plan.min_classes.size() == 1 ? " class" : " classes") << " ("
              << plan.min_count << ")\n";
    if (plan.min_classes.size() == 1)
      std::cout << "warning: DegenerateMin: minority subset has a single class\n";
  }

  if (o.annotations.empty()) return 0;
  const auto ann = load_annotations(o.annotations);
  std::vector<std::string> missing;
  for (const auto& r : ds.requirements)
    if (!ann.contains(r.req_id)) missing.push_back(r.req_id);
  const auto covered = ds.sample_size() - missing.size();
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.1f%%", 100.0 * static_cast<double>(covered) / static_cast<double>(ds.sample_size()));
  std::cout << "\nannotation coverage: " << covered << " of " << ds.sample_size() << " (" << pct << ")\n";
  if (!missing.empty()) std::cout << "missing req_ids: " << join(missing) << "\n";
  if (const auto stray = unknown_annotation_ids(ds, ann); !stray.empty())
    std::cout << "annotated req_ids not in the dataset: " << join(stray) << "\n";

  const auto mode = o.feature_mode == "plain" ? FeatureMode::Plain : FeatureMode::RolePrefixed;
  std::set<std::string> all_terms, selected_terms;
  std::ofstream dump;
  if (!o.dump_features.empty()) {
    dump.open(o.dump_features, std::ios::binary | std::ios::trunc);
    if (!dump) throw DataError("cannot write " + o.dump_features);
  }
  for (const auto& r : ds.requirements) {
    auto it = ann.find(r.req_id);
    if (it == ann.end()) continue;
    for (const auto& s : it->second)
      for (auto& t : preprocess(s.tokens)) all_terms.insert(std::move(t));
    const auto roles = extract_roles(it->second);
    const auto features = roles_to_features(roles, it->second, mode);
    selected_terms.insert(features.features.begin(), features.features.end());
    if (dump) dump << roles_debug_json(roles, it->second, features) << "\n";
  }
  std::cout << "\nHDLSS: n = " << covered << " requirements, d = " << all_terms.size()
            << " terms after pre-processing, d = " << selected_terms.size() << " after role-based selection\n";
  return 0;
}

int cmd_train(const Options& o) {
  const auto ds = load_dataset(o.dataset);
  const auto ann = load_annotations(o.annotations);
  const auto cfg = experiment_config(o);
  const auto features = extract_features(ds, ann, cfg.feature_mode);
  const auto model = train_hierarchical(ds.requirements, features, cfg.model);
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
  fs::path path(o.model_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_atomic(path, serialize(model));
  std::cout << "maj = {" << join(model.plan.maj_classes) << "}, min = {" << join(model.plan.min_classes) << "}, "
            << model.vocab.dimension() << " features, written to " << o.model_path << "\n";
  return 0;
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Seed for every random choice")->required();
  cmd->add_option("--feature-mode", o.feature_mode, "Feature terms: plain lemmas or role:lemma")
      ->check(CLI::IsMember({"plain", "role-prefixed"}));
  cmd->add_option("--svm-c", o.svm_c, "SVM cost C when not grid-searching")->check(CLI::PositiveNumber);
  cmd->add_option("--svm-tol", o.tolerance, "Relative duality-gap tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--svm-max-epochs", o.max_epochs, "Solver epoch cap")->check(CLI::PositiveNumber);
  cmd->add_flag("--grid-search", o.grid_search, "Choose C per classifier by inner stratified CV");
  cmd->add_option("--grid", o.grid, "C values for the grid search")->delimiter(',')->check(CLI::PositiveNumber);
  cmd->add_option("--inner-folds", o.inner_folds, "Inner folds for the grid search")->check(CLI::Range(2, 100));
  cmd->add_option("--min-df", o.min_df, "Drop terms in fewer training documents");
  cmd->add_option("--weighting", o.weighting, "Term weighting")->check(CLI::IsMember({"tfidf", "tf"}));
  cmd->add_flag("--global-decomposition", o.global_decomposition,
                "Decompose once over the whole dataset instead of per training fold (leaks fold labels)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical requirements classification with role-based feature selection"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;

  auto* exp = app.add_subcommand("experiment", "Cross-validate one or all strategies and write reports");
  exp->add_option("--dataset", o.dataset, "Requirements CSV")->required()->check(CLI::ExistingFile);
  exp->add_option("--annotations", o.annotations, "CoNLL-U annotations")->required()->check(CLI::ExistingFile);
  exp->add_option("--strategy", o.strategy, "Strategy to evaluate")
      ->check(CLI::IsMember({"hc4rc", "flat", "flat+oversample", "flat+undersample", "all"}));
  exp->add_option("--folds", o.folds, "ten: stratified k-fold; project: whole projects per fold")
      ->check(CLI::IsMember({"ten", "project"}));
  exp->add_option("--k", o.k, "Number of folds")->check(CLI::Range(2, 1000));
  exp->add_option("--undersample-target", o.undersample, "Class size after undersampling")
      ->check(CLI::IsMember({"minimum", "median"}));
  exp->add_option("--out", o.out, "Output directory");
  exp->add_option("--threads", o.threads, "Folds trained in parallel")->check(CLI::Range(1, 1024));
  add_model_flags(exp, o);

  auto* ins = app.add_subcommand("inspect", "Class counts, decomposition trace, coverage and dimensionality");
  ins->add_option("--dataset", o.dataset, "Requirements CSV")->required()->check(CLI::ExistingFile);
  ins->add_option("--annotations", o.annotations, "CoNLL-U annotations")->check(CLI::ExistingFile);
  ins->add_option("--feature-mode", o.feature_mode, "Feature terms: plain lemmas or role:lemma")
      ->check(CLI::IsMember({"plain", "role-prefixed"}));
  ins->add_option("--dump-features", o.dump_features, "Write per-requirement roles and features as JSON lines")
      ->needs(ins->get_option("--annotations"));

  auto* trn = app.add_subcommand("train", "Fit the hierarchy on the whole dataset and save it");
  trn->add_option("--dataset", o.dataset, "Requirements CSV")->required()->check(CLI::ExistingFile);
  trn->add_option("--annotations", o.annotations, "CoNLL-U annotations")->required()->check(CLI::ExistingFile);
  trn->add_option("--model", o.model_path, "Output model file")->required();
  add_model_flags(trn, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*exp) return cmd_experiment(o);
    if (*ins) return cmd_inspect(o);
    return cmd_train(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
