// Copyright 2026 The FFormation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fformation: train, detect, evaluate, and synthesize conversational-group
// data from the command line. Exit codes: 0 success, 2 input or parse error,
// 3 internal invariant violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ff/checkpoint.hpp"
#include "ff/clustering.hpp"
#include "ff/dante.hpp"
#include "ff/data_io.hpp"
#include "ff/errors.hpp"
#include "ff/evaluation.hpp"
#include "ff/geometry.hpp"
#include "ff/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ff::FeatureMode mode_from(const std::string& name) {
  return name == "velocity" ? ff::FeatureMode::kVelocity
                            : ff::FeatureMode::kOrientation;
}

std::string mode_name(ff::FeatureMode mode) {
  return mode == ff::FeatureMode::kVelocity ? "velocity" : "orientation";
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    try {
      const unsigned long v = std::stoul(token);
      if (v == 0) throw std::invalid_argument("zero");
      widths.push_back(v);
    } catch (const std::exception&) {
      throw ff::InputError("invalid layer width '" + token + "' in '" + text +
                           "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return widths;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ff::InputError("cannot create output directory '" + dir + "': " +
                         ec.message());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ff::InputError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

// Every run with an output directory records the settings it resolved to.
void write_snapshot(CLI::App& app, const std::string& out_dir) {
  ensure_dir(out_dir);
  std::ofstream snap = open_out(fs::path(out_dir) / "resolved_config.ini");
  snap << app.config_to_str(true, true);
}

void write_history(const std::vector<ff::EpochStats>& history,
                   const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "epoch train_loss val_loss\n";
  for (const ff::EpochStats& row : history) {
    out << row.epoch << ' ' << row.train_loss << ' ' << row.val_loss << '\n';
  }
}

json report_json(const ff::EvalReport& report) {
  json j{{"tp", report.tp},           {"fp", report.fp},
         {"fn", report.fn},           {"precision", report.precision},
         {"recall", report.recall},   {"f1", report.f1}};
  if (report.gdsr.has_value()) j["gdsr"] = *report.gdsr;
  return j;
}

// Settings shared by several subcommands.
struct CommonOpts {
  std::string features;
  std::string groups;
  std::string mode = "orientation";
  std::string out;
  std::size_t jobs = 1;
};

int cmd_train(CLI::App& app, const CommonOpts& common,
              const ff::PipelineConfig& config,
              std::optional<double> threshold) {
  ff::PipelineConfig resolved = config;
  if (threshold.has_value()) resolved.fixed_threshold = *threshold;
  const ff::Corpus corpus = ff::parse_corpus(common.features, common.groups,
                                             mode_from(common.mode));
  resolved.hyper.mode = corpus.mode;
  resolved.jobs = common.jobs;

  write_snapshot(app, common.out);
  const ff::CrossValResult result = ff::run_cross_validation(corpus, resolved);

  const fs::path out_dir(common.out);
  std::ofstream report = open_out(out_dir / "report.txt");
  json folds_json = json::array();
  for (const ff::FoldOutcome& fold : result.folds) {
    const fs::path fold_dir = out_dir / ("fold_" + std::to_string(fold.fold_index));
    ensure_dir(fold_dir.string());
    ff::save_checkpoint(fold.params, (fold_dir / "checkpoint.json").string());
    open_out(fold_dir / "threshold.txt") << fold.threshold << '\n';
    write_history(fold.history, fold_dir / "history.txt");

    report << "fold " << fold.fold_index << '\n';
    report << "threshold " << fold.threshold << '\n';
    report << "f1_t1 " << fold.t1.f1 << '\n';
    report << "f1_t23 " << fold.t23.f1 << '\n';
    report << "gdsr " << fold.gdsr_value << '\n';
    report << '\n';
    folds_json.push_back(json{{"fold", fold.fold_index},
                              {"threshold", fold.threshold},
                              {"t1", report_json(fold.t1)},
                              {"t23", report_json(fold.t23)},
                              {"gdsr", fold.gdsr_value}});
  }
  report << "mean\n";
  report << "f1_t1 " << result.mean_f1_t1 << '\n';
  report << "f1_t23 " << result.mean_f1_t23 << '\n';
  report << "gdsr " << result.mean_gdsr << '\n';

  json summary{{"folds", folds_json},
               {"mean",
                {{"f1_t1", result.mean_f1_t1},
                 {"f1_t23", result.mean_f1_t23},
                 {"gdsr", result.mean_gdsr}}}};
  open_out(out_dir / "report.json") << summary.dump(2) << '\n';

  std::cout << "trained " << result.folds.size() << " folds: mean T=1 F1 "
            << result.mean_f1_t1 << ", GDSR " << result.mean_gdsr << '\n';
  return 0;
}

// Parses features with the checkpoint's mode unless --mode insists otherwise.
ff::Corpus load_features_for(const ff::DanteParams& params,
                             const CommonOpts& common, bool mode_given) {
  if (mode_given && mode_from(common.mode) != params.hyper.mode) {
    throw ff::InputError("checkpoint expects " + mode_name(params.hyper.mode) +
                         " features but --mode " + common.mode +
                         " was requested");
  }
  ff::Corpus corpus;
  corpus.mode = params.hyper.mode;
  corpus.scenes = ff::parse_features(common.features, corpus.mode);
  return corpus;
}

int cmd_detect(CLI::App& app, const CommonOpts& common,
               const std::string& checkpoint_path, double threshold,
               bool mode_given, bool dump_affinities) {
  const ff::DanteParams params = ff::load_checkpoint(checkpoint_path);
  const ff::Corpus corpus = load_features_for(params, common, mode_given);
  write_snapshot(app, common.out);

  const fs::path out_dir(common.out);
  const std::vector<ff::AffinityMatrix> matrices =
      ff::affinity_matrices(corpus.scenes, params, common.jobs);

  ff::Corpus detected;
  detected.mode = corpus.mode;
  detected.scenes = corpus.scenes;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    detected.scenes[k].ground_truth =
        ff::dominant_sets_partition(matrices[k], threshold);
  }
  ff::write_groups(detected, (out_dir / "groups.txt").string());

  if (dump_affinities) {
    std::ofstream dump = open_out(out_dir / "affinities.txt");
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      const ff::AffinityMatrix& m = matrices[k];
      dump << corpus.scenes[k].frame_id << ' ' << m.size();
      for (const std::string& id : m.ids) dump << ' ' << id;
      dump << '\n';
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
          char cell[32];
          std::snprintf(cell, sizeof(cell), "%.6f", m.at(i, j));
          dump << (j == 0 ? "" : " ") << cell;
        }
        dump << '\n';
      }
    }
  }
  std::cout << "detected groups for " << corpus.scenes.size() << " frames\n";
  return 0;
}

int cmd_eval(CLI::App& app, const CommonOpts& common, const std::string& pred,
             std::size_t folds) {
  const ff::Corpus truth_corpus = ff::parse_corpus(
      common.features, common.groups, mode_from(common.mode));
  std::vector<ff::GroupPartition> truth;
  truth.reserve(truth_corpus.scenes.size());
  for (const ff::Scene& scene : truth_corpus.scenes) {
    truth.push_back(*scene.ground_truth);
  }
  const std::vector<ff::GroupPartition> predicted = ff::partitions_for(
      truth_corpus.scenes, ff::parse_group_lines(pred));

  std::ostringstream text;
  json folds_json = json::array();
  const auto report_block = [&](const std::string& title,
                                const std::vector<ff::GroupPartition>& p,
                                const std::vector<ff::GroupPartition>& t) {
    ff::EvalReport t1 = ff::f1_at(p, t, 1.0);
    const ff::EvalReport t23 = ff::f1_at(p, t, 2.0 / 3.0);
    t1.gdsr = ff::gdsr(p, t);
    text << title << '\n';
    text << "f1_t1 " << t1.f1 << '\n';
    text << "f1_t23 " << t23.f1 << '\n';
    text << ff::report_text(t1) << '\n';
    folds_json.push_back(json{{"name", title},
                              {"t1", report_json(t1)},
                              {"t23", report_json(t23)}});
  };

  if (folds >= 2) {
    const ff::FoldSplit split = ff::make_folds(truth.size(), folds);
    for (std::size_t k = 0; k < split.folds.size(); ++k) {
      std::vector<ff::GroupPartition> p, t;
      for (std::size_t idx : split.folds[k].test) {
        p.push_back(predicted[idx]);
        t.push_back(truth[idx]);
      }
      report_block("fold " + std::to_string(k), p, t);
    }
  }
  report_block("overall", predicted, truth);

  std::cout << text.str();
  if (!common.out.empty()) {
    write_snapshot(app, common.out);
    open_out(fs::path(common.out) / "report.txt") << text.str();
    open_out(fs::path(common.out) / "report.json")
        << json{{"records", folds_json}}.dump(2) << '\n';
  }
  return 0;
}

int cmd_synth(CLI::App& app, const std::string& out_dir,
              const ff::SynthConfig& config, std::uint64_t seed) {
  const ff::Corpus corpus = ff::generate_synthetic(config, seed);
  write_snapshot(app, out_dir);
  const fs::path dir(out_dir);
  ff::serialize_corpus(corpus, (dir / "features.txt").string(),
                       (dir / "groups.txt").string());
  ff::write_metadata(corpus, (dir / "metadata.txt").string(),
                     {{"seed", std::to_string(seed)}});
  std::cout << "wrote " << corpus.scenes.size() << " scenes to " << out_dir
            << '\n';
  return 0;
}

int cmd_tune(CLI::App& app, const CommonOpts& common,
             const std::string& checkpoint_path, bool mode_given) {
  const ff::DanteParams params = ff::load_checkpoint(checkpoint_path);
  ff::Corpus corpus = load_features_for(params, common, mode_given);
  const std::vector<ff::GroupPartition> truth = ff::partitions_for(
      corpus.scenes, ff::parse_group_lines(common.groups));

  std::vector<ff::AffinityMatrix> matrices =
      ff::affinity_matrices(corpus.scenes, params, common.jobs);
  std::vector<std::pair<ff::AffinityMatrix, ff::GroupPartition>> validation;
  validation.reserve(matrices.size());
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    validation.emplace_back(std::move(matrices[k]), truth[k]);
  }
  const double threshold = ff::tune_threshold(validation);
  std::cout << threshold << '\n';
  if (!common.out.empty()) {
    write_snapshot(app, common.out);
    open_out(fs::path(common.out) / "threshold.txt") << threshold << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F-formation (conversational group) detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a config file");

  CommonOpts common;
  ff::PipelineConfig pipeline;
  ff::SynthConfig synth;
  std::uint64_t seed = 0;
  std::string checkpoint_path;
  std::string pred_path;
  std::string dyad_widths, context_widths, combiner_widths;
  bool no_context = false;
  std::optional<double> train_threshold;
  double detect_threshold = 0.5;
  bool dump_affinities = false;
  std::size_t eval_folds = 0;

  const auto add_common = [&](CLI::App* cmd, bool features, bool groups) {
    if (features) {
      cmd->add_option("--features", common.features, "Features file")
          ->required();
    }
    if (groups) {
      cmd->add_option("--groups", common.groups, "Ground-truth groups file")
          ->required();
    }
    cmd->add_option("--jobs", common.jobs, "Worker threads for detection");
    return cmd->add_option("--mode", common.mode, "Feature mode")
        ->check(CLI::IsMember({"orientation", "velocity"}));
  };

  CLI::App* train = app.add_subcommand("train", "Cross-validated training");
  add_common(train, true, true);
  train->add_option("--out", common.out, "Output directory")->required();
  train->add_option("--folds", pipeline.fold_count, "Contiguous fold count");
  train->add_option("--seed", pipeline.train.seed, "Training seed");
  train->add_option("--lr", pipeline.train.learning_rate, "Learning rate");
  train->add_option("--batch-size", pipeline.train.batch_size, "Batch size");
  train->add_option("--epochs", pipeline.train.max_epochs, "Epoch cap");
  train->add_option("--patience", pipeline.train.patience,
                    "Early-stopping patience in epochs");
  train->add_option("--threshold", train_threshold,
                    "Fixed clustering threshold (skips per-fold tuning)");
  train->add_option("--dyad-widths", dyad_widths, "Dyad MLP widths, comma-separated");
  train->add_option("--context-widths", context_widths, "Context MLP widths");
  train->add_option("--combiner-widths", combiner_widths,
                    "Combiner hidden widths");
  train->add_flag("--no-context", no_context,
                  "Ablation: drop the context branch");

  CLI::App* detect = app.add_subcommand("detect", "Detect groups per frame");
  CLI::Option* detect_mode = add_common(detect, true, false);
  detect->add_option("--checkpoint", checkpoint_path, "Model checkpoint")
      ->required();
  detect->add_option("--threshold", detect_threshold, "Clustering threshold");
  detect->add_option("--out", common.out, "Output directory")->required();
  detect->add_flag("--dump-affinities", dump_affinities,
                   "Also write per-frame affinity matrices");

  CLI::App* eval = app.add_subcommand("eval", "Score predictions vs truth");
  add_common(eval, true, true);
  eval->add_option("--pred", pred_path, "Predicted groups file")->required();
  eval->add_option("--folds", eval_folds,
                   "Also report per contiguous fold block");
  eval->add_option("--out", common.out, "Output directory (optional)");

  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--out", common.out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Generator seed");
  synth_cmd->add_option("--scenes", synth.scene_count, "Scene count");
  synth_cmd->add_option("--agents-min", synth.agents_min, "Min agents");
  synth_cmd->add_option("--agents-max", synth.agents_max, "Max agents");
  synth_cmd->add_option("--groups-min", synth.groups_min, "Min groups");
  synth_cmd->add_option("--groups-max", synth.groups_max, "Max groups");
  synth_cmd->add_option("--sigma-theta", synth.sigma_theta, "Heading noise");
  synth_cmd->add_option("--sigma-x", synth.sigma_x, "Position jitter");
  synth_cmd->add_option("--group-size-max", synth.group_size_max,
                        "Max members per group");
  synth_cmd->add_option("--radius-min", synth.radius_min,
                        "Min conversation circle radius");
  synth_cmd->add_option("--radius-max", synth.radius_max,
                        "Max conversation circle radius");
  synth_cmd->add_option("--area", synth.area_half_extent,
                        "Arena half extent");
  synth_cmd->add_option("--group-gap", synth.group_gap,
                        "Min rim-to-rim distance between circles");
  synth_cmd->add_option("--distractor-clearance", synth.distractor_clearance,
                        "Min distractor distance to any circle center");
  synth_cmd->add_option("--agent-clearance", synth.agent_clearance,
                        "Min distance between any two agents");
  synth_cmd->add_option("--distractor-prob", synth.distractor_probability,
                        "Chance an extra agent roams alone");
  synth_cmd->add_option("--hover-prob", synth.distractor_hover_probability,
                        "Chance a distractor lingers near a group");
  synth_cmd->add_option("--hover-band", synth.distractor_hover_band,
                        "Width of the hover ring beyond the clearance");
  synth_cmd->add_option("--name", synth.name, "Corpus name");

  CLI::App* tune = app.add_subcommand("tune-threshold",
                                      "Pick the best clustering threshold");
  CLI::Option* tune_mode = add_common(tune, true, true);
  tune->add_option("--checkpoint", checkpoint_path, "Model checkpoint")
      ->required();
  tune->add_option("--out", common.out, "Output directory (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) {
      if (!dyad_widths.empty()) {
        pipeline.hyper.dyad_widths = parse_widths(dyad_widths);
      }
      if (!context_widths.empty()) {
        pipeline.hyper.context_widths = parse_widths(context_widths);
      }
      if (!combiner_widths.empty()) {
        pipeline.hyper.combiner_widths = parse_widths(combiner_widths);
      }
      pipeline.hyper.use_context = !no_context;
      return cmd_train(app, common, pipeline, train_threshold);
    }
    if (detect->parsed()) {
      return cmd_detect(app, common, checkpoint_path, detect_threshold,
                        !detect_mode->empty(), dump_affinities);
    }
    if (eval->parsed()) {
      return cmd_eval(app, common, pred_path, eval_folds);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(app, common.out, synth, seed);
    }
    if (tune->parsed()) {
      return cmd_tune(app, common, checkpoint_path, !tune_mode->empty());
    }
    std::cerr << "error: no subcommand given\n";
    return 2;
  } catch (const ff::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ff::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ff::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
