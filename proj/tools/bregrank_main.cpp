/*
 * Copyright 2026 The bregrank authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bregrank/glm.hpp"
#include "bregrank/letordata.hpp"
#include "bregrank/mrtrain.hpp"
#include "bregrank/rankmetrics.hpp"

namespace {

using namespace bregrank;

// Exit codes: 0 ok, 1 unexpected, 2 input/parse problems, 3 domain or
// dimension violations raised by the library.
template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyDataset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct TrainFlags {
  std::string train_path;
  std::string out_dir = ".";
  std::string divergence = "kl";
  std::vector<double> div_weights;
  std::string retarget = "auto";
  double C = 0.0;
  bool normalized = true;
  bool query_norm = false;
  bool baseline = false;
  double outer_tol = 1e-6;
  int max_outer = 200;
  double glm_tol = 1e-8;
  int glm_max_iter = 500;
  double inner_tol = 1e-9;
  int inner_max_iter = 2000;
  std::string parallel_combine = "sequential";
  double margin = 1e-6;
  std::uint64_t seed = 0;
  std::string config_path;
};

void add_train_flags(CLI::App* cmd, TrainFlags* f, bool with_train_path) {
  if (with_train_path) {
    cmd->add_option("--train", f->train_path, "training data (LETOR text)")
        ->required();
  }
  cmd->add_option("--out", f->out_dir, "output directory");
  cmd->add_option("--divergence", f->divergence, "divergence kind")
      ->check(CLI::IsMember({"squared", "kl", "gi"}));
  cmd->add_option("--div-weights", f->div_weights,
                  "positional divergence weights (empty = unit)")
      ->delimiter(',');
  cmd->add_option("--retarget", f->retarget, "retarget path")
      ->check(CLI::IsMember({"auto", "dualmap", "inner", "simplex"}));
  cmd->add_option("--c", f->C, "ridge regularization strength");
  cmd->add_option("--normalized", f->normalized,
                  "divide query terms by query length");
  cmd->add_flag("--query-norm", f->query_norm,
                "per-query min-max feature scaling");
  cmd->add_flag("--baseline", f->baseline,
                "fixed gain-normalized targets, no retargeting");
  cmd->add_option("--outer-tol", f->outer_tol, "outer loop relative tolerance");
  cmd->add_option("--max-outer", f->max_outer, "outer iteration cap");
  cmd->add_option("--glm-tol", f->glm_tol, "model fit relative tolerance");
  cmd->add_option("--glm-max-iter", f->glm_max_iter, "model fit iteration cap");
  cmd->add_option("--inner-tol", f->inner_tol, "iterative retarget tolerance");
  cmd->add_option("--inner-max-iter", f->inner_max_iter,
                  "iterative retarget iteration cap");
  cmd->add_option("--parallel-combine", f->parallel_combine,
                  "projection step combination rule")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  cmd->add_option("--margin", f->margin, "strict block-order margin");
  cmd->add_option("--seed", f->seed, "run seed (recorded for reproducibility)");
  cmd->add_option("--config", f->config_path,
                  "flat key=value config file; flags override");
}

std::string trimmed(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double config_double(const std::string& value, long line) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad numeric config value: " + value);
  }
}

int config_int(const std::string& value, long line) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad integer config value: " + value);
  }
}

bool config_bool(const std::string& value, long line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError(line, "bad boolean config value: " + value);
}

std::string config_member(const std::string& value,
                          std::initializer_list<const char*> allowed,
                          long line) {
  for (const char* a : allowed) {
    if (value == a) return value;
  }
  throw ParseError(line, "config value out of range: " + value);
}

// Flat key=value file; keys are the train flag names without the leading
// dashes. Flags given on the command line keep their values.
void apply_config_file(const CLI::App& cmd, TrainFlags* f) {
  std::ifstream in(f->config_path);
  if (!in) throw ParseError(0, "cannot open config file: " + f->config_path);
  const auto given = [&](const char* flag) { return cmd.count(flag) > 0; };

  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trimmed(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(lineno, "config line is not key=value: " + line);
    }
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));

    if (key == "divergence") {
      if (!given("--divergence")) {
        f->divergence = config_member(value, {"squared", "kl", "gi"}, lineno);
      }
    } else if (key == "div-weights") {
      if (!given("--div-weights")) {
        f->div_weights.clear();
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          if (!tok.empty()) f->div_weights.push_back(config_double(tok, lineno));
        }
      }
    } else if (key == "retarget") {
      if (!given("--retarget")) {
        f->retarget =
            config_member(value, {"auto", "dualmap", "inner", "simplex"}, lineno);
      }
    } else if (key == "c") {
      if (!given("--c")) f->C = config_double(value, lineno);
    } else if (key == "normalized") {
      if (!given("--normalized")) f->normalized = config_bool(value, lineno);
    } else if (key == "query-norm") {
      if (!given("--query-norm")) f->query_norm = config_bool(value, lineno);
    } else if (key == "baseline") {
      if (!given("--baseline")) f->baseline = config_bool(value, lineno);
    } else if (key == "outer-tol") {
      if (!given("--outer-tol")) f->outer_tol = config_double(value, lineno);
    } else if (key == "max-outer") {
      if (!given("--max-outer")) f->max_outer = config_int(value, lineno);
    } else if (key == "glm-tol") {
      if (!given("--glm-tol")) f->glm_tol = config_double(value, lineno);
    } else if (key == "glm-max-iter") {
      if (!given("--glm-max-iter")) f->glm_max_iter = config_int(value, lineno);
    } else if (key == "inner-tol") {
      if (!given("--inner-tol")) f->inner_tol = config_double(value, lineno);
    } else if (key == "inner-max-iter") {
      if (!given("--inner-max-iter")) {
        f->inner_max_iter = config_int(value, lineno);
      }
    } else if (key == "parallel-combine") {
      if (!given("--parallel-combine")) {
        f->parallel_combine =
            config_member(value, {"sequential", "parallel"}, lineno);
      }
    } else if (key == "margin") {
      if (!given("--margin")) f->margin = config_double(value, lineno);
    } else if (key == "seed") {
      if (!given("--seed")) {
        f->seed = static_cast<std::uint64_t>(config_double(value, lineno));
      }
    } else {
      throw ParseError(lineno, "unknown config key: " + key);
    }
  }
}

TrainConfig to_config(const TrainFlags& f) {
  TrainConfig config;
  Eigen::VectorXd weights;
  if (!f.div_weights.empty()) {
    weights = Eigen::Map<const Eigen::VectorXd>(
        f.div_weights.data(), static_cast<Eigen::Index>(f.div_weights.size()));
  }
  DivergenceKind kind = DivergenceKind::KLSimplex;
  if (f.divergence == "squared") kind = DivergenceKind::SquaredEuclidean;
  if (f.divergence == "gi") kind = DivergenceKind::ShiftedGI;
  config.divergence = DivergenceSpec::make(kind, std::move(weights));
  config.C = f.C;
  config.normalized = f.normalized;
  if (f.retarget == "dualmap") config.retarget = RetargetPath::DualMap;
  if (f.retarget == "inner") config.retarget = RetargetPath::Inner;
  if (f.retarget == "simplex") config.retarget = RetargetPath::SquaredSimplex;
  config.outer_tol = f.outer_tol;
  config.max_outer = f.max_outer;
  config.glm.tol = f.glm_tol;
  config.glm.max_iter = f.glm_max_iter;
  config.glm.normalized = f.normalized;
  config.inner_tol = f.inner_tol;
  config.inner_max_iter = f.inner_max_iter;
  config.parallel_combine = f.parallel_combine == "parallel"
                                ? UpdateMode::Parallel
                                : UpdateMode::Sequential;
  config.margin = f.margin;
  config.seed = f.seed;
  return config;
}

// Queries parsed from a narrower file than the model was trained on get
// zero columns appended (absent feature indices mean zero); wider data is a
// real mismatch.
void fit_feature_dim(Dataset* ds, Eigen::Index dim) {
  if (ds->feature_dim > dim) {
    throw DimensionMismatch("dataset has more features than the model");
  }
  if (ds->feature_dim == dim) return;
  for (QuerySet& qs : ds->queries) {
    Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(qs.features.rows(), dim);
    wide.leftCols(qs.features.cols()) = qs.features;
    qs.features = std::move(wide);
  }
  ds->feature_dim = dim;
}

TrainResult run_training(const TrainFlags& flags, const Dataset& data) {
  const TrainConfig config = to_config(flags);
  if (flags.baseline) {
    std::cout << "baseline=simplified\n";
    return train_baseline(config, data);
  }
  return train_mr(config, data);
}

int cmd_train(const TrainFlags& flags) {
  Dataset data = parse_letor_file(flags.train_path);
  if (flags.query_norm) data = normalize_query_level(data).first;

  TrainResult result = run_training(flags, data);
  if (flags.query_norm) result.model.feature_norm.mode = FeatureNormMode::QueryMinMax;

  const std::filesystem::path out(flags.out_dir);
  std::filesystem::create_directories(out);
  save_model(result.model, (out / "model.json").string());
  write_trace_csv(result.trace, (out / "trace.csv").string());
  std::cout.precision(12);
  std::cout << "final objective " << result.trace.rows.back().objective << "\n";
  if (!result.trace.converged && !flags.baseline) {
    std::cout << "note: outer iteration cap reached before the tolerance\n";
  }
  return 0;
}

// Comma list of positive cutoffs; an empty string selects no cutoffs, which
// keeps only the list-level metrics in the report.
std::vector<int> parse_cutoffs(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(0, "bad cutoff value: " + tok);
    }
    if (used != tok.size() || value <= 0) {
      throw ParseError(0, "bad cutoff value: " + tok);
    }
    out.push_back(value);
  }
  return out;
}

double dataset_map(const Model& model, const Dataset& raw,
                   const std::vector<int>& cutoffs, MetricReport* report) {
  Dataset data = raw;
  if (model.feature_norm.mode == FeatureNormMode::QueryMinMax) {
    data = normalize_query_level(data).first;
  }
  fit_feature_dim(&data, model.w.size());
  std::vector<RankedQuery> ranked;
  ranked.reserve(data.queries.size());
  for (const QuerySet& qs : data.queries) {
    ranked.push_back({qs.grades, predict(model, qs.features), data.gmax});
  }
  const MetricReport local = evaluate_queries(ranked, cutoffs);
  if (report != nullptr) *report = local;
  return local.map;
}

int cmd_eval(const std::string& model_path, const std::string& test_path,
             const std::string& out_dir, const std::vector<int>& cutoffs) {
  const Model model = load_model(model_path);
  const Dataset test = parse_letor_file(test_path);
  MetricReport report;
  dataset_map(model, test, cutoffs, &report);

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  write_metrics_csv(report, (out / "metrics.csv").string());

  std::cout.precision(6);
  std::cout << std::fixed;
  for (size_t c = 0; c < report.cutoffs.size(); ++c) {
    std::cout << "ndcg@" << report.cutoffs[c] << "  " << report.ndcg[c] << "\n";
  }
  for (size_t c = 0; c < report.cutoffs.size(); ++c) {
    std::cout << "p@" << report.cutoffs[c] << "     " << report.precision[c] << "\n";
  }
  std::cout << "err     " << report.err << "\n";
  std::cout << "map     " << report.map << "\n";
  std::cout << "ndcg    " << report.ndcg_full << "  (full list, "
            << report.flagged << " queries flagged)\n";
  return 0;
}

int cmd_sweep(const TrainFlags& flags, const std::string& vali_path,
              std::vector<double> grid, const std::vector<int>& cutoffs) {
  if (grid.empty()) throw DimensionMismatch("sweep: empty C grid");
  std::sort(grid.begin(), grid.end());

  Dataset train = parse_letor_file(flags.train_path);
  const Dataset vali = parse_letor_file(vali_path);
  if (flags.query_norm) train = normalize_query_level(train).first;

  const std::filesystem::path out(flags.out_dir);
  std::filesystem::create_directories(out);
  std::ofstream report((out / "sweep.csv").string());
  if (!report) throw ParseError(0, "cannot open for writing: sweep.csv");
  report.precision(17);
  report << "C,objective,vali_map\n";

  double best_map = -1.0;
  double best_c = grid.front();
  Model best_model;
  for (const double c : grid) {
    TrainFlags local = flags;
    local.C = c;
    TrainResult result = run_training(local, train);
    if (flags.query_norm) result.model.feature_norm.mode = FeatureNormMode::QueryMinMax;
    const double map = dataset_map(result.model, vali, cutoffs, nullptr);
    report << c << ',' << result.trace.rows.back().objective << ',' << map << "\n";
    std::cout << "C=" << c << " vali map=" << map << "\n";
    // Strict improvement on an ascending grid ties toward the smaller C.
    if (map > best_map) {
      best_map = map;
      best_c = c;
      best_model = std::move(result.model);
    }
  }

  save_model(best_model, (out / "model.json").string());
  std::cout << "selected C=" << best_c << " map=" << best_map << "\n";
  return 0;
}

int cmd_gen_synth(const SynthConfig& base, const std::string& out_dir) {
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);

  SynthConfig cfg = base;
  const std::pair<const char*, std::uint64_t> splits[] = {
      {"train.txt", 0}, {"vali.txt", 1}, {"test.txt", 2}};
  Eigen::VectorXd wstar;
  for (const auto& [name, salt] : splits) {
    cfg.salt = salt;
    auto [ds, w] = synth_generate(cfg);
    wstar = std::move(w);
    write_letor_file(ds, (out / name).string());
  }

  Model truth;
  truth.w = wstar;
  truth.divergence = DivergenceSpec::squared();
  truth.feature_norm.mode = FeatureNormMode::None;
  truth.feature_norm.min = Eigen::VectorXd::Zero(wstar.size());
  truth.feature_norm.max = Eigen::VectorXd::Ones(wstar.size());
  save_model(truth, (out / "model_true.json").string());
  std::cout << "wrote train.txt vali.txt test.txt model_true.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Listwise ranking by alternating target and model updates"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a ranking model");
  add_train_flags(train_cmd, &train_flags, true);

  std::string eval_model, eval_test, eval_out = ".";
  std::string cutoffs_csv = "1,2,3,4,5,6,7,8,9,10";
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a model on test data");
  eval_cmd->add_option("--model", eval_model, "model JSON path")->required();
  eval_cmd->add_option("--test", eval_test, "test data (LETOR text)")->required();
  eval_cmd->add_option("--out", eval_out, "output directory");
  eval_cmd->add_option("--cutoffs", cutoffs_csv,
                       "comma list of metric cutoffs, empty for none");

  TrainFlags sweep_flags;
  std::string sweep_vali;
  std::vector<double> c_grid = {1e-50, 1e-20, 1e-10, 1e-5, 1.0, 10.0};
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "select C by validation mean average precision");
  add_train_flags(sweep_cmd, &sweep_flags, true);
  sweep_cmd->add_option("--vali", sweep_vali, "validation data (LETOR text)")
      ->required();
  sweep_cmd->add_option("--c-grid", c_grid, "C values to try")->delimiter(',');

  SynthConfig synth;
  std::string synth_out = ".";
  CLI::App* synth_cmd =
      app.add_subcommand("gen-synth", "generate a synthetic train/vali/test world");
  synth_cmd->add_option("--queries", synth.n_queries, "queries per split");
  synth_cmd->add_option("--docs", synth.docs_per_query, "documents per query");
  synth_cmd->add_option("--features", synth.n_features, "feature count");
  synth_cmd->add_option("--levels", synth.grade_levels, "grade levels");
  synth_cmd->add_option("--noise", synth.noise_sd, "latent score noise sd");
  synth_cmd->add_option("--seed", synth.seed, "world seed");
  synth_cmd->add_option("--out", synth_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (train_cmd->parsed()) {
    return guarded([&] {
      if (!train_flags.config_path.empty()) {
        apply_config_file(*train_cmd, &train_flags);
      }
      return cmd_train(train_flags);
    });
  }
  if (eval_cmd->parsed()) {
    return guarded([&] {
      return cmd_eval(eval_model, eval_test, eval_out, parse_cutoffs(cutoffs_csv));
    });
  }
  if (sweep_cmd->parsed()) {
    return guarded([&] {
      if (!sweep_flags.config_path.empty()) {
        apply_config_file(*sweep_cmd, &sweep_flags);
      }
      return cmd_sweep(sweep_flags, sweep_vali, c_grid, parse_cutoffs(cutoffs_csv));
    });
  }
  if (synth_cmd->parsed()) {
    return guarded([&] { return cmd_gen_synth(synth, synth_out); });
  }
  return 1;
}
