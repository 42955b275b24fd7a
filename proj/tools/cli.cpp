#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "edda/checkpoint.hpp"
#include "edda/datasets.hpp"
#include "edda/errors.hpp"
#include "edda/explainers.hpp"
#include "edda/image_io.hpp"
#include "edda/metrics.hpp"
#include "edda/occlusion.hpp"
#include "edda/trainer.hpp"

namespace edda::cli {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

struct TrainArgs {
  std::string config;
  std::string out_dir;
};

void cmd_train(const TrainArgs& a, std::optional<std::uint64_t> seed, std::ostream& out) {
  TrainConfig config = load_train_config(a.config);
  if (seed) config.seed = *seed;
  const Dataset data = load_dataset(config.data);
  const bool background =
      config.strategy == Strategy::kEddaMc && config.augmentation.background_enabled;
  Network model = make_small_cnn(data.shape, data.num_classes, data.task, background,
                                 config.model, config.seed);

  fs::create_directories(a.out_dir);
  TrainOptions options;
  options.on_epoch = [&out](const EpochRecord& r) {
    out << "epoch " << r.epoch << "  loss " << std::fixed << std::setprecision(4) << r.loss
        << "  acc " << r.accuracy << "  samples " << r.examples_seen << "\n"
        << std::defaultfloat;
  };
  TrainResult result = train(config, data, std::move(model), options);

  nlohmann::json provenance;
  provenance["strategy"] = std::string(to_string(config.strategy));
  provenance["config"] = to_json(config);
  const fs::path dir(a.out_dir);
  save_checkpoint((dir / "model.ckpt").string(), result.model, provenance);
  write_text(dir / "run_log.jsonl", run_log_to_jsonl(result.log));
  write_text(dir / "config.json", to_json(config).dump(2) + "\n");
  out << "wrote " << (dir / "model.ckpt").string() << "\n";
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string explainer = "gradcam";
  std::string layer;
  double keep_fraction = kDefaultKeepFraction;
  std::string run;
  std::string out_path;
};

void check_compatible(const Classifier& model, const Dataset& data) {
  if (model.task() != data.task) {
    throw ConfigError(std::string("checkpoint is a ") + std::string(to_string(model.task())) +
                      " model but the data is " + std::string(to_string(data.task)));
  }
  if (model.num_classes() != data.num_classes) {
    throw ConfigError("checkpoint has " + std::to_string(model.num_classes()) +
                      " classes but the data has " + std::to_string(data.num_classes));
  }
  if (!(model.input_shape() == data.shape)) {
    throw ConfigError("checkpoint input shape does not match the data");
  }
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const Dataset data = load_dataset(DatasetSpec::parse(a.data));
  check_compatible(ckpt.model, data);

  ExplainerSpec spec;
  spec.method = explainer_method_from_string(a.explainer);
  spec.target_layer = a.layer;
  FaithfulnessReport report =
      evaluate_faithfulness(ckpt.model, data.examples, spec, a.keep_fraction);
  if (!a.run.empty()) {
    report.run = a.run;
  } else if (ckpt.provenance.contains("strategy")) {
    report.run = ckpt.provenance["strategy"].get<std::string>();
  } else {
    report.run = fs::path(a.checkpoint).stem().string();
  }
  write_text(a.out_path, report_to_json(report) + "\n");

  out << std::fixed << std::setprecision(4) << "drop_prop      " << report.drop_prop << "\n"
      << "increase_prop  " << report.increase_prop << "\n"
      << "drop_mag       " << report.drop_mag << "\n"
      << "increase_mag   " << report.increase_mag << "\n"
      << std::defaultfloat;
}

struct ExplainArgs {
  std::string checkpoint;
  std::string image;
  int class_index = 0;
  std::string method = "gradcam";
  std::string layer;
  bool signed_output = false;
  std::string mask;
  std::string out_path;
};

void cmd_explain(const ExplainArgs& a, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const ImageTensor image = read_pnm(a.image);
  ExplainerSpec spec;
  spec.method = explainer_method_from_string(a.method);
  spec.target_layer = a.layer;
  if (a.signed_output && spec.method != ExplainerMethod::kGradCam) {
    throw ArgumentError("--signed is only available for gradcam");
  }
  spec.signed_output = a.signed_output;
  const SaliencyMap map = explain(spec, ckpt.model, image, a.class_index);
  write_pnm(a.out_path, render_overlay(image, map));
  out << "wrote " << a.out_path << "\n";

  if (!a.mask.empty()) {
    const ImageTensor mask_image = read_pnm(a.mask);
    if (mask_image.width() != image.width() || mask_image.height() != image.height()) {
      throw InputShapeError("mask size does not match the image");
    }
    std::vector<std::uint8_t> truth(image.shape().plane());
    const auto m = mask_image.data();
    for (std::size_t p = 0; p < truth.size(); ++p) truth[p] = m[p] > 0.5 ? 1 : 0;
    const SaliencyMap plain = explain(ExplainerSpec{spec.method, spec.target_layer, false},
                                      ckpt.model, image, a.class_index);
    const double iou = mask_iou(top_fraction_mask(plain, kDefaultKeepFraction), truth);
    out << "top-15% IoU with mask " << std::fixed << std::setprecision(4) << iou << "\n"
        << std::defaultfloat;
  }
}

void cmd_compare(const std::vector<std::string>& paths, const std::string& out_path,
                 std::ostream& out) {
  std::vector<FaithfulnessReport> reports;
  for (const auto& p : paths) {
    auto records = read_report_file(p);
    reports.insert(reports.end(), records.begin(), records.end());
  }
  const std::string table = format_comparison_table(compare_runs(reports));
  write_text(out_path, table);
  out << table;
}

struct ExportArgs {
  std::string data;
  std::string out_dir;
  int images = 0;
};

void cmd_export(const ExportArgs& a, std::optional<std::uint64_t> seed, std::ostream& out) {
  DatasetSpec spec = DatasetSpec::parse(a.data);
  if (spec.source == DatasetSource::kArchive) {
    throw ConfigError("export-synthetic needs a synthetic data spec");
  }
  if (seed) spec.seed = *seed;
  const Dataset data = load_dataset(spec);
  const int label_bytes = data.task == TaskKind::kMultilabel
                              ? std::max(spec.label_bytes, (data.num_classes + 7) / 8)
                              : spec.label_bytes;
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_archive((dir / "data.bin").string(), data, label_bytes);
  write_mask_file((dir / "masks.txt").string(), data);

  const int count = std::min<int>(a.images, static_cast<int>(data.size()));
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05d", i);
    write_pnm((dir / (std::string("image_") + name + ".ppm")).string(), data.examples[i].image);
    ImageTensor mask(data.shape.width, data.shape.height, 1);
    auto m = mask.data();
    for (const auto& region : data.regions[i]) {
      for (std::size_t p = 0; p < region.mask.size(); ++p) {
        if (region.mask[p]) m[p] = 1.0;
      }
    }
    write_pnm((dir / (std::string("mask_") + name + ".pgm")).string(), mask);
  }
  out << "wrote " << data.size() << " records (label_bytes=" << label_bytes << ") to "
      << dir.string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanation-driven data augmentation toolkit", "edda"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the random seed");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a JSON config");
  train_cmd->add_option("--config", train_args.config, "Config file")->required();
  train_cmd->add_option("--out", train_args.out_dir, "Output directory")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compute Drop/Increase faithfulness metrics");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", eval_args.data, "Dataset spec")->required();
  eval_cmd->add_option("--explainer", eval_args.explainer, "gradcam or saliency")
      ->check(CLI::IsMember({"gradcam", "saliency"}));
  eval_cmd->add_option("--layer", eval_args.layer, "Grad-CAM feature layer");
  eval_cmd->add_option("--keep-fraction", eval_args.keep_fraction, "Fraction of pixels kept")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--run", eval_args.run, "Run label stored in the report");
  eval_cmd->add_option("--out", eval_args.out_path, "Report file")->required();

  ExplainArgs explain_args;
  auto* explain_cmd = app.add_subcommand("explain", "Render a saliency overlay");
  explain_cmd->add_option("--checkpoint", explain_args.checkpoint, "Checkpoint file")
      ->required();
  explain_cmd->add_option("--image", explain_args.image, "PPM/PGM image")->required();
  explain_cmd->add_option("--class", explain_args.class_index, "Class index")->required();
  explain_cmd->add_option("--method", explain_args.method, "gradcam or saliency")
      ->check(CLI::IsMember({"gradcam", "saliency"}));
  explain_cmd->add_option("--layer", explain_args.layer, "Grad-CAM feature layer");
  explain_cmd->add_flag("--signed", explain_args.signed_output, "Signed Grad-CAM map");
  explain_cmd->add_option("--mask", explain_args.mask, "Ground-truth PGM mask for an IoU score");
  explain_cmd->add_option("--out", explain_args.out_path, "Overlay image (PPM)")->required();

  std::vector<std::string> report_paths;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate faithfulness reports");
  compare_cmd->add_option("--out", compare_out, "Table file")->required();
  compare_cmd->add_option("reports", report_paths, "Report files")->required()->expected(2, -1);

  ExportArgs export_args;
  auto* export_cmd =
      app.add_subcommand("export-synthetic", "Write a synthetic set as archive plus masks");
  export_cmd->add_option("--data", export_args.data, "Synthetic dataset spec")->required();
  export_cmd->add_option("--out", export_args.out_dir, "Output directory")->required();
  export_cmd->add_option("--images", export_args.images, "Also write the first N as images")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train_cmd) cmd_train(train_args, seed, out);
    if (*eval_cmd) cmd_eval(eval_args, out);
    if (*explain_cmd) cmd_explain(explain_args, out);
    if (*compare_cmd) cmd_compare(report_paths, compare_out, out);
    if (*export_cmd) cmd_export(export_args, seed, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace edda::cli
