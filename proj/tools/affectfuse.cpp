// affectfuse: synthetic data generation, feature export, leave-one-session-out
// evaluation and model dumps from the command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "affectfuse.hpp"

namespace fs = std::filesystem;
using namespace affectfuse;

namespace {

struct RunConfig {
  std::string manifest;
  std::string out;
  eval::EvalConfig eval;
  std::string holdout;
};

void add_pipeline_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--manifest", rc.manifest, "Manifest JSON listing session CSVs")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--entropy-bins", rc.eval.entropy_bins, "Histogram bins for entropy")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cutoff-emg", rc.eval.cutoffs.emg_hz, "EMG low-pass cutoff (Hz)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cutoff-bvp", rc.eval.cutoffs.bvp_hz, "BVP low-pass cutoff (Hz)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cutoff-gsr", rc.eval.cutoffs.gsr_hz, "GSR low-pass cutoff (Hz)")
      ->check(CLI::PositiveNumber);
}

void add_model_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_flag("--prune", rc.eval.prune, "Enable correlation-threshold feature pruning");
  cmd->add_option("--threshold", rc.eval.threshold, "Absolute correlation threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--shrinkage", rc.eval.lda.shrinkage, "Covariance shrinkage toward its diagonal")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--ridge", rc.eval.lda.ridge, "Diagonal ridge added to the covariance")
      ->check(CLI::PositiveNumber);
}

int cmd_synth(const synth::SynthConfig& cfg, const std::string& out) {
  const auto sessions = synth::generate(cfg);
  const auto manifest = synth::write_dataset(out, sessions);
  log::info("wrote " + std::to_string(manifest.sessions.size()) + " sessions to " + out);
  return 0;
}

int cmd_features(const RunConfig& rc) {
  const auto manifest = io::read_manifest(rc.manifest);
  const auto sessions = io::load_sessions(manifest);
  const auto data = eval::prepare(sessions, rc.eval);
  if (rc.out.empty()) {
    report::write_features_csv(std::cout, data.table);
  } else {
    std::ofstream os(rc.out, std::ios::binary);
    if (!os) throw IngestError("cannot open " + rc.out + " for writing");
    report::write_features_csv(os, data.table);
  }
  return 0;
}

int cmd_evaluate(const RunConfig& rc) {
  const auto manifest = io::read_manifest(rc.manifest);
  const auto rep = eval::run_loocv(manifest, rc.eval);
  report::write_report(rc.out, rep);
  std::cout << "accuracy " << io::format_double(rep.metrics.accuracy) << " ("
            << rep.metrics.total << " predictions, " << rep.folds.size() << " folds)\n";
  return 0;
}

int cmd_dump_model(const RunConfig& rc) {
  const auto manifest = io::read_manifest(rc.manifest);
  const auto sessions = io::load_sessions(manifest);
  const auto data = eval::prepare(sessions, rc.eval);
  const auto models = eval::train_fold(data.table, rc.holdout, rc.eval);
  auto j = report::fold_models_json(models);
  j["held_out"] = rc.holdout;
  j["config"] = report::config_json(rc.eval, data.plan.designs);
  if (rc.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream os(rc.out, std::ios::binary);
    if (!os) throw IngestError("cannot open " + rc.out + " for writing");
    os << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion decoding from EMG/BVP/GSR with fused per-modality LDA learners"};
  app.require_subcommand(1);

  synth::SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic dataset");
  synth_cmd->add_option("--days", synth_cfg.days, "Number of sessions")->check(CLI::Range(2, 100000));
  synth_cmd->add_option("--seed", synth_cfg.seed, "RNG seed");
  synth_cmd->add_option("--separation", synth_cfg.separation, "Class separation (0 = no signal)")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--fs", synth_cfg.fs_hz, "Sampling rate (Hz)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--segment-seconds", synth_cfg.segment_seconds, "Seconds per emotion")
      ->check(CLI::Range(kMinSegmentSeconds, 1e6));
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  RunConfig features_rc;
  auto* features_cmd = app.add_subcommand("features", "Emit the per-(session, emotion) feature table");
  add_pipeline_options(features_cmd, features_rc);
  features_cmd->add_option("--out", features_rc.out, "CSV path (default stdout)");

  RunConfig eval_rc;
  eval_rc.out = ".";
  auto* eval_cmd = app.add_subcommand("evaluate", "Leave-one-session-out evaluation");
  add_pipeline_options(eval_cmd, eval_rc);
  add_model_options(eval_cmd, eval_rc);
  eval_cmd->add_option("--seed", eval_rc.eval.seed, "Seed echoed into the report");
  eval_cmd->add_option("--out", eval_rc.out, "Report directory");
  bool serial = false;
  eval_cmd->add_flag("--serial", serial, "Run folds on one thread");

  RunConfig dump_rc;
  auto* dump_cmd = app.add_subcommand("dump-model", "Fit the three learners and dump them as JSON");
  add_pipeline_options(dump_cmd, dump_rc);
  add_model_options(dump_cmd, dump_rc);
  dump_cmd->add_option("--holdout", dump_rc.holdout, "Session id to exclude from training");
  dump_cmd->add_option("--out", dump_rc.out, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth_cfg, synth_out);
    if (*features_cmd) return cmd_features(features_rc);
    if (*eval_cmd) {
      eval_rc.eval.parallel = !serial;
      return cmd_evaluate(eval_rc);
    }
    if (*dump_cmd) return cmd_dump_model(dump_rc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
