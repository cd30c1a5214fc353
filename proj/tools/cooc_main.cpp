// Command-line front end: reproducible fits, sweeps, digit texturization,
// per-class training, classification and code-length pricing over the
// significance-map model library.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cooc/classify.hpp"
#include "cooc/errors.hpp"
#include "cooc/io.hpp"
#include "cooc/optimizer.hpp"
#include "cooc/sparsity.hpp"
#include "cooc/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct FitFlags {
  int size = 0;
  int bins = 8;
  int max_iterations = 50;
  double tolerance = 1e-6;
  std::string init = "random";
  std::string z_mode = "empirical";
  int swap_passes = 4;
  std::uint64_t seed = 0;

  void attach(CLI::App& cmd, bool need_size = true) {
    auto* size_opt =
        cmd.add_option("--size,-s", size, "Group size s")->check(CLI::PositiveNumber);
    if (need_size) size_opt->required();
    cmd.add_option("--bins", bins, "Histogram bins per group")
        ->capture_default_str();
    cmd.add_option("--max-iterations", max_iterations, "Iteration cap")
        ->capture_default_str();
    cmd.add_option("--tolerance", tolerance,
                   "Stop below this bits-per-pixel improvement")
        ->capture_default_str();
    cmd.add_option("--init", init,
                   "Initial grouping: random, square-blocks, or frequency")
        ->capture_default_str();
    cmd.add_option("--z-mode", z_mode,
                   "Count quantization: quantized or empirical")
        ->capture_default_str();
    cmd.add_option("--swap-passes", swap_passes, "Step-3 sweeps per iteration")
        ->capture_default_str();
    cmd.add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  cooc::FitConfig config() const {
    cooc::FitConfig c;
    c.group_size = size;
    c.bins = bins;
    c.max_iterations = max_iterations;
    c.tolerance = tolerance;
    c.init = cooc::init_mode_from_string(init);
    c.seed = seed;
    c.z_mode = cooc::z_mode_from_string(z_mode);
    c.swap_passes = swap_passes;
    return c;
  }

  json to_json() const {
    return {{"size", size},
            {"bins", bins},
            {"max_iterations", max_iterations},
            {"tolerance", tolerance},
            {"init", init},
            {"z_mode", z_mode},
            {"swap_passes", swap_passes},
            {"seed", seed}};
  }
};

// Every run leaves its effective configuration beside its outputs.
void write_run_json(const json& effective, const std::vector<fs::path>& outputs) {
  std::set<fs::path> dirs;
  for (const fs::path& p : outputs) {
    fs::path dir = p.parent_path();
    dirs.insert(dir.empty() ? fs::path(".") : dir);
  }
  for (const fs::path& dir : dirs) {
    fs::create_directories(dir);
    std::ofstream out(dir / "run.json");
    if (!out)
      throw cooc::format_error("cannot create file: " + (dir / "run.json").string());
    out << effective.dump(2) << "\n";
  }
}

struct DatasetFlags {
  std::string synthetic_path;
  std::string maps_dir;

  void attach(CLI::App& cmd, const char* what) {
    auto* synth = cmd.add_option("--synthetic", synthetic_path,
                                 std::string("Synthetic corpus spec (JSON) as ") + what);
    auto* maps = cmd.add_option("--maps", maps_dir,
                                std::string("Saved maps dataset directory as ") + what);
    synth->excludes(maps);
    maps->excludes(synth);
  }

  bool given() const { return !synthetic_path.empty() || !maps_dir.empty(); }

  // Loaded maps plus labels when the source stores them.
  std::pair<std::vector<cooc::SignificanceMap>, std::vector<int>> load() const {
    if (!synthetic_path.empty()) {
      cooc::SyntheticSpec spec = cooc::load_synthetic_spec(synthetic_path);
      return {cooc::gen_synthetic(spec), {}};
    }
    cooc::MapsDataset ds = cooc::load_maps(maps_dir);
    return {ds.significance_maps(), ds.labels};
  }

  json to_json() const {
    json j;
    if (!synthetic_path.empty()) j["synthetic"] = synthetic_path;
    if (!maps_dir.empty()) j["maps"] = maps_dir;
    return j;
  }
};

fs::path default_trace_path(const fs::path& model_out) {
  fs::path p = model_out;
  p.replace_extension(".trace.csv");
  return p;
}

void cmd_fit(const DatasetFlags& data, const FitFlags& flags,
             const std::string& out, std::string trace_out) {
  auto [maps, labels] = data.load();
  auto [model, trace] = cooc::fit(maps, flags.config());
  if (trace_out.empty()) trace_out = default_trace_path(out).string();
  cooc::save_model(model, out);
  cooc::write_trace_csv(trace, trace_out);
  json effective = {{"command", "fit"},
                    {"input", data.to_json()},
                    {"fit", flags.to_json()},
                    {"out", out},
                    {"trace", trace_out}};
  write_run_json(effective, {fs::path(out), fs::path(trace_out)});
  cooc::TotalBits totals = cooc::total_bits(maps, model);
  std::cout << "fit: " << maps.size() << " maps, " << model.grouping.group_count
            << " groups of " << model.grouping.group_size << ", "
            << trace.iterations.size() << " iterations, " << std::setprecision(10)
            << totals.bits_per_pixel << " bits/pixel\n";
}

void cmd_sweep(const DatasetFlags& train_data, const DatasetFlags& test_data,
               std::vector<int> sizes, const FitFlags& flags,
               const std::string& out) {
  auto [train, train_labels] = train_data.load();
  std::vector<cooc::SignificanceMap> test;
  if (test_data.given()) test = test_data.load().first;
  cooc::SweepResult sweep =
      cooc::sweep_group_sizes(train, test, sizes, flags.config());
  cooc::write_sweep_csv(sweep, out);
  json effective = {{"command", "sweep"},
                    {"input", train_data.to_json()},
                    {"test", test_data.to_json()},
                    {"sizes", sizes},
                    {"fit", flags.to_json()},
                    {"out", out}};
  write_run_json(effective, {fs::path(out)});
  const cooc::SweepRow* best = nullptr;
  for (const cooc::SweepRow& row : sweep.rows) {
    double bpp = test.empty() ? row.train_optimized : row.test_optimized;
    double best_bpp =
        best ? (test.empty() ? best->train_optimized : best->test_optimized) : 0.0;
    if (!best || bpp < best_bpp) best = &row;
  }
  std::cout << "sweep: best size " << best->group_size << " at "
            << std::setprecision(10)
            << (test.empty() ? best->train_optimized : best->test_optimized)
            << " bits/pixel (" << (test.empty() ? "train" : "held-out") << ")\n";
}

void cmd_texturize(const std::string& images_path, const std::string& labels_path,
                   std::size_t count, const cooc::TexturizeParams& params,
                   const std::string& out) {
  std::vector<cooc::Image> images = cooc::read_idx_images(images_path);
  std::vector<int> labels;
  if (!labels_path.empty()) {
    labels = cooc::read_idx_labels(labels_path);
    if (labels.size() != images.size())
      throw cooc::format_error("texturize: image/label counts differ");
  }
  if (count > 0 && count < images.size()) {
    images.resize(count);
    if (!labels.empty()) labels.resize(count);
  }
  if (images.empty()) throw cooc::format_error("texturize: no input images");

  cooc::MapsDataset ds;
  ds.source = cooc::DatasetSource::idx;
  ds.domain = cooc::IndexDomain::pixel(images.front().width, images.front().height);
  std::vector<cooc::SignificanceMap> maps = cooc::texturize_dataset(images, params);
  ds.maps.reserve(maps.size());
  for (cooc::SignificanceMap& y : maps) ds.maps.push_back(std::move(y.bits));
  ds.labels = std::move(labels);
  cooc::save_maps(ds, out);

  json effective = {{"command", "texturize"},
                    {"images", images_path},
                    {"labels", labels_path},
                    {"count", ds.maps.size()},
                    {"offset", params.offset},
                    {"threshold", params.threshold},
                    {"seed", params.seed},
                    {"out", out}};
  write_run_json(effective, {fs::path(out) / "manifest.json"});

  std::size_t significant = 0;
  for (const cooc::Bitset& b : ds.maps) significant += b.count();
  double density =
      double(significant) / (double(ds.maps.size()) * double(ds.domain.size()));
  std::cout << "texturize: " << ds.maps.size() << " maps of " << ds.domain.width
            << "x" << ds.domain.height << ", mean significance density "
            << std::setprecision(6) << density << "\n";
}

void cmd_train_digits(const std::string& maps_dir, const FitFlags& flags,
                      int threads, const std::string& out) {
  cooc::MapsDataset ds = cooc::load_maps(maps_dir);
  if (ds.labels.empty())
    throw cooc::format_error("train-digits: dataset has no labels");
  cooc::ClassModelSet models = cooc::train_class_models(
      ds.significance_maps(), ds.labels, flags.config(), threads);
  cooc::save_class_models(models.models, out);
  json effective = {{"command", "train-digits"},
                    {"maps", maps_dir},
                    {"fit", flags.to_json()},
                    {"threads", threads},
                    {"out", out}};
  write_run_json(effective, {fs::path(out)});
  std::cout << "train-digits: 10 models, " << models.groups_per_class()
            << " groups of " << models.models.front().grouping.group_size
            << " each\n";
}

void cmd_classify(const std::string& models_path, const std::string& maps_dir,
                  const std::string& mode, int threads, const std::string& out) {
  cooc::ClassModelSet models{cooc::load_class_models(models_path)};
  models.validate();
  cooc::MapsDataset ds = cooc::load_maps(maps_dir);
  std::vector<cooc::SignificanceMap> maps = ds.significance_maps();

  json effective = {{"command", "classify"}, {"models", models_path},
                    {"maps", maps_dir},      {"mode", mode},
                    {"threads", threads},    {"out", out}};

  if (mode == "features") {
    std::vector<cooc::FeatureVector> features =
        cooc::extract_features_all(maps, models, threads);
    cooc::write_features_csv(features, ds.labels, out);
    write_run_json(effective, {fs::path(out)});
    std::cout << "features: " << features.size() << " rows of dimension "
              << features.front().dimension() << "\n";
    return;
  }
  if (mode != "predictions")
    throw std::invalid_argument("classify: mode must be predictions or features");
  std::vector<int> predictions = cooc::classify_all(maps, models, threads);
  cooc::write_predictions_csv(predictions, ds.labels, out);
  write_run_json(effective, {fs::path(out)});
  if (!ds.labels.empty()) {
    double error = cooc::evaluate_error(predictions, ds.labels);
    std::cout << "error " << std::fixed << std::setprecision(4) << error << "\n";
  } else {
    std::cout << "classified " << predictions.size() << " maps (no labels)\n";
  }
}

void cmd_encode_cost(const std::string& model_path, const std::string& maps_dir,
                     const std::string& out) {
  cooc::CoocModel model = cooc::load_model(model_path);
  cooc::MapsDataset ds = cooc::load_maps(maps_dir);
  cooc::ModelEvaluator eval(model);
  std::vector<double> bits;
  bits.reserve(ds.count());
  double total = 0.0;
  for (std::size_t i = 0; i < ds.count(); ++i) {
    bits.push_back(eval.map_bits(ds.map(i)));
    total += bits.back();
  }
  cooc::write_costs_csv(bits, ds.domain.size(), out);
  json effective = {{"command", "encode-cost"},
                    {"model", model_path},
                    {"maps", maps_dir},
                    {"out", out}};
  write_run_json(effective, {fs::path(out)});
  std::cout << "encode-cost: " << bits.size() << " maps, total "
            << std::setprecision(10) << total << " bits, "
            << total / (double(bits.size()) * double(ds.domain.size()))
            << " bits/pixel\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-occurrence group models for significance maps"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a config file");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a map dataset");
  DatasetFlags fit_data;
  FitFlags fit_flags;
  std::string fit_out, fit_trace;
  fit_data.attach(*fit_cmd, "training set");
  fit_flags.attach(*fit_cmd);
  fit_cmd->add_option("--out,-o", fit_out, "Model JSON path")->required();
  fit_cmd->add_option("--trace", fit_trace,
                      "Trace CSV path (default: <out>.trace.csv)");
  fit_cmd->callback([&] {
    if (!fit_data.given())
      throw CLI::RequiredError("--synthetic or --maps");
    cmd_fit(fit_data, fit_flags, fit_out, fit_trace);
  });

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Compare bit rates across group sizes");
  DatasetFlags sweep_data, sweep_test;
  FitFlags sweep_flags;
  std::vector<int> sweep_sizes;
  std::string sweep_out;
  sweep_data.attach(*sweep_cmd, "training set");
  {
    auto* synth = sweep_cmd->add_option("--test-synthetic", sweep_test.synthetic_path,
                                        "Synthetic spec for the held-out set");
    auto* maps = sweep_cmd->add_option("--test-maps", sweep_test.maps_dir,
                                       "Maps dataset directory for the held-out set");
    synth->excludes(maps);
    maps->excludes(synth);
  }
  sweep_flags.attach(*sweep_cmd, /*need_size=*/false);
  sweep_cmd->add_option("--sizes", sweep_sizes, "Group sizes to sweep")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out,-o", sweep_out, "Sweep CSV path")->required();
  sweep_cmd->callback([&] {
    if (!sweep_data.given())
      throw CLI::RequiredError("--synthetic or --maps");
    cmd_sweep(sweep_data, sweep_test, sweep_sizes, sweep_flags, sweep_out);
  });

  // texturize
  auto* tex_cmd = app.add_subcommand(
      "texturize", "Turn digit images into textured significance maps");
  std::string tex_images, tex_labels, tex_out;
  std::size_t tex_count = 0;
  cooc::TexturizeParams tex_params;
  tex_cmd->add_option("--images", tex_images, "idx3-ubyte image file (.gz ok)")
      ->required();
  tex_cmd->add_option("--labels", tex_labels, "idx1-ubyte label file (.gz ok)");
  tex_cmd->add_option("--count", tex_count, "Use only the first N images (0 = all)")
      ->capture_default_str();
  tex_cmd->add_option("--offset", tex_params.offset, "Additive offset C")
      ->capture_default_str();
  tex_cmd->add_option("--threshold", tex_params.threshold, "Significance threshold T")
      ->capture_default_str();
  tex_cmd->add_option("--seed", tex_params.seed, "Noise seed")->capture_default_str();
  tex_cmd->add_option("--out,-o", tex_out, "Output maps dataset directory")
      ->required();
  tex_cmd->callback(
      [&] { cmd_texturize(tex_images, tex_labels, tex_count, tex_params, tex_out); });

  // train-digits
  auto* train_cmd = app.add_subcommand(
      "train-digits", "Fit one model per digit class from a labeled dataset");
  std::string train_maps, train_out;
  FitFlags train_flags;
  int train_threads = 1;
  train_cmd->add_option("--maps", train_maps, "Labeled maps dataset directory")
      ->required();
  train_flags.attach(*train_cmd);
  train_cmd->add_option("--threads", train_threads, "Parallel class fits")
      ->capture_default_str();
  train_cmd->add_option("--out,-o", train_out, "Class model set JSON path")
      ->required();
  train_cmd->callback(
      [&] { cmd_train_digits(train_maps, train_flags, train_threads, train_out); });

  // classify
  auto* cls_cmd =
      app.add_subcommand("classify", "Classify maps against class models");
  std::string cls_models, cls_maps, cls_mode = "predictions", cls_out;
  int cls_threads = 1;
  cls_cmd->add_option("--models", cls_models, "Class model set JSON path")
      ->required();
  cls_cmd->add_option("--maps", cls_maps, "Maps dataset directory")->required();
  cls_cmd->add_option("--mode", cls_mode, "predictions or features")
      ->capture_default_str();
  cls_cmd->add_option("--threads", cls_threads, "Parallel examples")
      ->capture_default_str();
  cls_cmd->add_option("--out,-o", cls_out, "Output CSV path")->required();
  cls_cmd->callback(
      [&] { cmd_classify(cls_models, cls_maps, cls_mode, cls_threads, cls_out); });

  // encode-cost
  auto* cost_cmd = app.add_subcommand(
      "encode-cost", "Price each map's exact code length under a model");
  std::string cost_model, cost_maps, cost_out;
  cost_cmd->add_option("--model", cost_model, "Model JSON path")->required();
  cost_cmd->add_option("--maps", cost_maps, "Maps dataset directory")->required();
  cost_cmd->add_option("--out,-o", cost_out, "Costs CSV path")->required();
  cost_cmd->callback([&] { cmd_encode_cost(cost_model, cost_maps, cost_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const cooc::format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
