// Command-line front end. Stages hand off through files: synth writes a raw
// dataset tree, ingest preprocesses it into a trial store, features builds
// the 34-column table, train/evaluate/report run the classification
// protocol. One root seed drives every stage, so reruns are byte-identical.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "eegemo/eval.hpp"
#include "eegemo/model_io.hpp"
#include "eegemo/pipeline.hpp"
#include "eegemo/svm.hpp"
#include "eegemo/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace eegemo;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

struct ProtocolFlags {
  std::string features_path;
  std::string kernel = "polynomial";
  double c = 1.0;
  int degree = 2;
  double gamma = 1.0 / kNumFeatures;
  double sigma = 1.0;
  int folds = 10;
  double split = 0.8;
  uint64_t seed = 0;
  bool refit_full_train = false;
};

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& f) {
  cmd->add_option("--features", f.features_path, "feature table file")
      ->required();
  cmd->add_option("--kernel", f.kernel, "SVM kernel")
      ->check(CLI::IsMember({"linear", "rbf", "gaussian", "polynomial"}));
  cmd->add_option("--c", f.c, "soft-margin penalty C");
  cmd->add_option("--degree", f.degree, "polynomial kernel degree");
  cmd->add_option("--gamma", f.gamma, "rbf/polynomial kernel gamma");
  cmd->add_option("--sigma", f.sigma, "gaussian kernel width");
  cmd->add_option("--folds", f.folds, "cross-validation folds");
  cmd->add_option("--split", f.split, "train fraction of the 80/20 split");
  cmd->add_option("--seed", f.seed, "root seed for split and solver");
  cmd->add_flag("--refit-full-train", f.refit_full_train,
                "refit the final model on the whole training split");
}

EvalConfig to_eval_config(const ProtocolFlags& f) {
  EvalConfig cfg;
  cfg.kernel.kind = parse_kernel(f.kernel);
  cfg.kernel.gamma = f.gamma;
  cfg.kernel.sigma = f.sigma;
  cfg.kernel.degree = f.degree;
  cfg.c = f.c;
  cfg.folds = f.folds;
  cfg.train_frac = f.split;
  cfg.seed = f.seed;
  cfg.refit_full_train = f.refit_full_train;
  return cfg;
}

int run_synth(const SynthConfig& cfg, const std::string& out_dir) {
  const SessionManifest manifest = generate_dataset(cfg, out_dir);
  std::cout << "wrote " << manifest.trials.size() << " recordings and "
            << (fs::path(out_dir) / "manifest.json").string() << "\n";
  return 0;
}

int run_ingest_cmd(const std::string& manifest_path, const std::string& out_dir,
                   const PreprocessOptions& opt) {
  const SessionManifest store = run_ingest(manifest_path, out_dir, opt);
  std::cout << "wrote " << store.trials.size() << " preprocessed trials and "
            << (fs::path(out_dir) / "manifest.json").string() << "\n";
  return 0;
}

int run_features_cmd(const std::string& store_path, const std::string& out_path,
                     const WelchSpec& welch) {
  const FeatureSet data = run_features(store_path, welch);
  save_features(data, out_path, welch);
  std::cout << "wrote " << data.size() << " feature rows to " << out_path
            << "\n";
  return 0;
}

int run_train(const ProtocolFlags& flags, const std::string& model_path) {
  const FeatureSet data = load_features(flags.features_path);
  const ProtocolResult res = run_protocol(data, to_eval_config(flags));
  save_model(res.model, model_path);
  std::cout << render_report_text(res.report);
  std::cout << "model written to " << model_path << "\n";
  return 0;
}

int run_evaluate(const ProtocolFlags& flags, const std::string& out_dir) {
  const FeatureSet data = load_features(flags.features_path);
  const ProtocolResult res = run_protocol(data, to_eval_config(flags));
  fs::create_directories(out_dir);
  const fs::path root(out_dir);
  write_text(root / "report.txt", render_report_text(res.report));
  write_text(root / "report.json", report_to_json(res.report).dump(2) + "\n");
  write_text(root / "confusion.csv", confusion_csv(res.report.cm));
  std::cout << render_report_text(res.report);
  std::cout << "report files written to " << out_dir << "\n";
  return 0;
}

int run_report(const ProtocolFlags& flags, const std::string& out_dir) {
  const FeatureSet data = load_features(flags.features_path);
  const KernelComparison cmp = compare_kernels(data, to_eval_config(flags));
  fs::create_directories(out_dir);
  const fs::path root(out_dir);
  write_text(root / "comparison.txt", render_comparison_text(cmp));
  write_text(root / "comparison.json", comparison_to_json(cmp).dump(2) + "\n");
  std::cout << render_comparison_text(cmp);
  std::cout << "comparison files written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG emotion recognition pipeline"};
  app.require_subcommand(1);

  // synth
  SynthConfig synth_cfg;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--subjects", synth_cfg.n_subjects, "number of subjects");
  synth->add_option("--videos-per-quadrant", synth_cfg.videos_per_quadrant,
                    "stimulus videos per emotion quadrant");
  synth->add_option("--duration", synth_cfg.duration_s, "stimulus seconds");
  synth->add_option("--rate", synth_cfg.fs, "sample rate in Hz");
  synth->add_option("--lead-in", synth_cfg.lead_in_s,
                    "pre/post-roll seconds around the stimulus");
  synth->add_option("--noise-std", synth_cfg.noise_std, "pink noise level");
  synth->add_option("--missing-rate", synth_cfg.missing_rate,
                    "per-cell dropout probability");
  synth->add_option("--seed", synth_cfg.seed, "root seed");

  // ingest
  std::string ingest_manifest;
  std::string ingest_out;
  PreprocessOptions pre;
  CLI::App* ingest = app.add_subcommand(
      "ingest", "validate, impute, truncate and smooth a raw dataset");
  ingest->add_option("--manifest", ingest_manifest, "raw manifest file")
      ->required();
  ingest->add_option("--out", ingest_out, "trial store directory")->required();
  ingest->add_option("--sg-window", pre.savgol.window_len,
                     "Savitzky-Golay window length (odd)");
  ingest->add_option("--sg-order", pre.savgol.poly_order,
                     "Savitzky-Golay polynomial order");
  ingest->add_option("--impute-radius", pre.impute_radius,
                     "neighbors per side for missing-sample means");

  // features
  std::string feat_manifest;
  std::string feat_out;
  WelchSpec welch;
  CLI::App* features = app.add_subcommand(
      "features", "extract the 34-column feature table from a trial store");
  features->add_option("--manifest", feat_manifest, "trial store manifest")
      ->required();
  features->add_option("--out", feat_out, "feature table output file")
      ->required();
  features->add_option("--segment-len", welch.segment_len,
                       "Welch segment length in samples");
  features->add_option("--overlap", welch.overlap, "Welch segment overlap");

  // train / evaluate / report
  ProtocolFlags train_flags;
  std::string model_out;
  CLI::App* train =
      app.add_subcommand("train", "run the protocol and save the best model");
  add_protocol_flags(train, train_flags);
  train->add_option("--out", model_out, "model output file")->required();

  ProtocolFlags eval_flags;
  std::string eval_out;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "run the protocol and write report files");
  add_protocol_flags(evaluate, eval_flags);
  evaluate->add_option("--out", eval_out, "report output directory")
      ->required();

  ProtocolFlags report_flags;
  std::string report_out;
  CLI::App* report = app.add_subcommand(
      "report", "compare all four kernels on one feature table");
  add_protocol_flags(report, report_flags);
  report->add_option("--out", report_out, "comparison output directory")
      ->required();
  report->get_option("--kernel")->description(
      "ignored; report always sweeps all four kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*synth) return run_synth(synth_cfg, synth_out);
    if (*ingest) return run_ingest_cmd(ingest_manifest, ingest_out, pre);
    if (*features) return run_features_cmd(feat_manifest, feat_out, welch);
    if (*train) return run_train(train_flags, model_out);
    if (*evaluate) return run_evaluate(eval_flags, eval_out);
    if (*report) return run_report(report_flags, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command selected\n";
  return 1;
}
