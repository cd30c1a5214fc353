#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "cooc/io.hpp"
#include "cooc/model.hpp"
#include "cooc/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

fs::path scratch_root() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cooc_cli_scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int call = 0;
  fs::path log = scratch_root() / ("out" + std::to_string(call++) + ".log");
  std::string cmd = std::string(COOC_CLI_PATH) + " " + args + " > " +
                    log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path write_spec(const std::string& name, int count, std::uint64_t seed) {
  cooc::SyntheticSpec spec = cooc::SyntheticSpec::uniform(16, 4, 0.9, 0.05, count, seed);
  fs::path path = scratch_root() / name;
  cooc::save_synthetic_spec(spec, path);
  return path;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("fit writes the model, trace and run record") {
  fs::path spec = write_spec("fit.spec.json", 50, 5);
  fs::path out_dir = scratch_root() / "fit";
  fs::path model_path = out_dir / "model.json";

  RunResult r = run_cli("fit --synthetic " + spec.string() + " --size 4 --bins 4 --out " +
                        model_path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("fit: 50 maps, 4 groups of 4") != std::string::npos);

  cooc::CoocModel model = cooc::load_model(model_path);
  CHECK(model.grouping.group_count == 4);
  CHECK(fs::exists(out_dir / "model.trace.csv"));
  REQUIRE(fs::exists(out_dir / "run.json"));

  json run = json::parse(std::ifstream(out_dir / "run.json"));
  CHECK(run.at("command") == "fit");
  CHECK(run.at("fit").at("size") == 4);
  CHECK(run.at("input").at("synthetic") == spec.string());

  // Same spec and flags, fresh output: identical model bytes.
  fs::path again = scratch_root() / "fit2" / "model.json";
  RunResult r2 = run_cli("fit --synthetic " + spec.string() + " --size 4 --bins 4 --out " +
                         again.string());
  CHECK(r2.exit_code == 0);
  CHECK(cooc::load_model(again) == model);
}

TEST_CASE("fit accepts the other initializations by name") {
  fs::path spec = write_spec("init.spec.json", 30, 9);
  fs::path out = scratch_root() / "init" / "m.json";
  CHECK(run_cli("fit --synthetic " + spec.string() +
                " --size 4 --init square-blocks --out " + out.string())
            .exit_code == 0);
  CHECK(run_cli("fit --synthetic " + spec.string() +
                " --size 4 --init frequency --out " + out.string())
            .exit_code == 0);
  RunResult bad = run_cli("fit --synthetic " + spec.string() +
                          " --size 4 --init bogus --out " + out.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("error") != std::string::npos);
}

TEST_CASE("sweep prices the requested sizes into one csv") {
  fs::path train = write_spec("sweep_train.spec.json", 60, 7);
  fs::path test = write_spec("sweep_test.spec.json", 40, 8);
  fs::path out = scratch_root() / "sweep" / "sweep.csv";

  RunResult r = run_cli("sweep --synthetic " + train.string() + " --test-synthetic " +
                        test.string() + " --sizes 2,4 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("sweep: best size") != std::string::npos);
  CHECK(r.output.find("held-out") != std::string::npos);
  REQUIRE(fs::exists(out));
  CHECK(line_count(out) == 3);  // header + two sizes

  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "size,log2_size,train_optimized,test_optimized,train_square,"
        "test_square,train_single,test_single");
}

TEST_CASE("texturize builds a labeled maps dataset from idx files") {
  fs::path dir = scratch_root() / "tex_in";
  fs::create_directories(dir);
  std::vector<cooc::Image> images;
  std::vector<int> labels;
  for (int k = 0; k < 20; ++k) {
    cooc::Image img(8, 8);
    for (std::size_t i = 0; i < img.size(); ++i)
      img.samples[i] = ((i + k) % 5 == 0) ? 1.0 : 0.0;
    images.push_back(img);
    labels.push_back(k % 10);
  }
  cooc::write_idx_images(dir / "imgs.idx3-ubyte", images);
  cooc::write_idx_labels(dir / "labels.idx1-ubyte", labels);

  fs::path out = scratch_root() / "tex_out";
  RunResult r = run_cli("texturize --images " + (dir / "imgs.idx3-ubyte").string() +
                        " --labels " + (dir / "labels.idx1-ubyte").string() +
                        " --count 10 --seed 3 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("texturize: 10 maps of 8x8") != std::string::npos);

  cooc::MapsDataset ds = cooc::load_maps(out);
  CHECK(ds.count() == 10);
  CHECK(ds.domain == cooc::IndexDomain::pixel(8, 8));
  CHECK(ds.labels == std::vector<int>(labels.begin(), labels.begin() + 10));
  CHECK(ds.source == cooc::DatasetSource::idx);
  CHECK(fs::exists(out / "run.json"));

  RunResult mismatched =
      run_cli("texturize --images " + (dir / "imgs.idx3-ubyte").string() +
              " --labels " + (dir / "imgs.idx3-ubyte").string() + " --out " +
              (scratch_root() / "tex_bad").string());
  CHECK(mismatched.exit_code == 2);
}

TEST_CASE("train-digits, classify and encode-cost chain end to end") {
  // Ten labeled synthetic classes saved as a maps dataset.
  std::vector<cooc::Bitset> bits;
  std::vector<int> labels;
  cooc::IndexDomain domain = cooc::IndexDomain::pixel(4, 4);
  for (int d = 0; d < 10; ++d) {
    cooc::SyntheticSpec spec = cooc::SyntheticSpec::uniform(
        16, 4, 0.6 + 0.04 * d, 0.05, 20, 40 + d);
    for (cooc::SignificanceMap& y : cooc::gen_synthetic(spec)) {
      bits.push_back(std::move(y.bits));
      labels.push_back(d);
    }
  }
  cooc::MapsDataset ds;
  ds.domain = domain;
  ds.maps = std::move(bits);
  ds.labels = std::move(labels);
  fs::path maps_dir = scratch_root() / "digit_maps";
  cooc::save_maps(ds, maps_dir);

  fs::path models_path = scratch_root() / "digits" / "models.json";
  RunResult train = run_cli("train-digits --maps " + maps_dir.string() +
                            " --size 4 --bins 4 --max-iterations 10 --out " +
                            models_path.string());
  CHECK(train.exit_code == 0);
  CHECK(train.output.find("train-digits: 10 models, 4 groups of 4") !=
        std::string::npos);
  CHECK(cooc::load_class_models(models_path).size() == 10);

  fs::path pred = scratch_root() / "digits" / "pred.csv";
  RunResult cls = run_cli("classify --models " + models_path.string() + " --maps " +
                          maps_dir.string() + " --out " + pred.string());
  CHECK(cls.exit_code == 0);
  CHECK(cls.output.find("error 0.") != std::string::npos);
  CHECK(line_count(pred) == 201);  // header + 200 predictions

  fs::path feats = scratch_root() / "digits" / "features.csv";
  RunResult fr = run_cli("classify --models " + models_path.string() + " --maps " +
                         maps_dir.string() + " --mode features --threads 2 --out " +
                         feats.string());
  CHECK(fr.exit_code == 0);
  CHECK(fr.output.find("features: 200 rows of dimension 40") != std::string::npos);

  RunResult badmode = run_cli("classify --models " + models_path.string() +
                              " --maps " + maps_dir.string() +
                              " --mode bogus --out " + pred.string());
  CHECK(badmode.exit_code == 1);

  // encode-cost against the class-0 model exported through fit.
  fs::path spec = write_spec("cost.spec.json", 30, 40);
  fs::path model_path = scratch_root() / "cost" / "model.json";
  CHECK(run_cli("fit --synthetic " + spec.string() + " --size 4 --out " +
                model_path.string())
            .exit_code == 0);
  fs::path costs = scratch_root() / "cost" / "costs.csv";
  RunResult ec = run_cli("encode-cost --model " + model_path.string() + " --maps " +
                         maps_dir.string() + " --out " + costs.string());
  CHECK(ec.exit_code == 0);
  CHECK(ec.output.find("encode-cost: 200 maps") != std::string::npos);
  CHECK(line_count(costs) == 201);
}

TEST_CASE("usage and data errors map to distinct exit codes") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);           // a subcommand is required
  CHECK(run_cli("frobnicate").exit_code == 1);  // unknown subcommand

  fs::path out = scratch_root() / "err" / "m.json";
  CHECK(run_cli("fit --size 4 --out " + out.string()).exit_code == 1);  // no input

  RunResult missing = run_cli("fit --synthetic " +
                              (scratch_root() / "nope.json").string() +
                              " --size 4 --out " + out.string());
  CHECK(missing.exit_code == 2);  // unreadable input is a data error
  CHECK(missing.output.find("error") != std::string::npos);

  // Group size must divide into the sweep's legal range.
  fs::path spec = write_spec("err.spec.json", 20, 2);
  CHECK(run_cli("sweep --synthetic " + spec.string() + " --sizes 1 --out " +
                (scratch_root() / "err" / "s.csv").string())
            .exit_code == 1);
}
