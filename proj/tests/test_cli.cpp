#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcgdn/commands.hpp"
#include "mcgdn/config.hpp"
#include "mcgdn/dataset_io.hpp"
#include "support/synthetic_ecg.hpp"
#include "test_helpers.hpp"

using namespace mcgdn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string &name) {
  auto dir = fs::temp_directory_path() / "mcgdn_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path &p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "mcgdn");
  return cli::run(args);
}

// Three beats at two realizations each, preconditioned and synthesized.
fs::path synth_small(const fs::path &root, const std::string &name, const std::string &format = "binary") {
  const auto csv = root / "beats.csv";
  testing::write_rows_csv(csv, testing::synthetic_beat_rows(3, 17));
  const auto out = root / name;
  const int code = run({"synth", "--out", out.string(), "--seed", "5", "--set", "data.ecg_csv=" + csv.string(),
                        "noise.realizations=2", "data.format=" + format});
  REQUIRE(code == 0);
  return out;
}

std::vector<std::string> tiny_model_flags(const fs::path &data) {
  return {"--set", "data.dataset_dir=" + data.string(), "model.filters=3", "model.hidden=2", "window.stride=64",
          "train.epochs=1", "train.batch_size=8"};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults") {
    RunConfig c;
    auto n = c.noise_spec();
    CHECK(n.psd_white == 1e-18);
    CHECK(n.beta == 0.5);
    CHECK(n.f_knee == 250.0);
    auto a = c.architecture();
    CHECK(a.window == 50);
    CHECK(a.kernel == 20);
    CHECK(a.filters == 300);
    CHECK(a.hidden == 100);
    auto t = c.train_config();
    CHECK(t.learning_rate == 1e-3);
    CHECK(t.beta1 == 0.9);
    CHECK(t.beta2 == 0.999);
    CHECK(t.epsilon == 1e-8);
    CHECK(!t.clip_norm.has_value());
    CHECK(c.window().stride == 1);
    CHECK(c.psd_params().segment_length == 512);
    CHECK(c.get_double("eval.band_lo") == 0.02);
    CHECK(c.get_double("eval.band_hi") == 0.05);
    CHECK(c.get_size("data.cycle_length") == 3008);
    CHECK(c.get_double("data.sample_rate") == 2000.0);
    CHECK(!c.explicit_noise_gain().has_value());
  }

  TEST_CASE("config layering and validation") {
    RunConfig c;
    std::istringstream file("# comment\nnoise.beta = 0.7\ntrain.lr=0.01\n\n");
    c.merge_text(file, "test");
    CHECK(c.noise_spec().beta == 0.7);
    c.set("noise.beta=0.9");
    CHECK(c.noise_spec().beta == 0.9);
    CHECK(c.train_config().learning_rate == 0.01);
    CHECK_THROWS_KIND(c.set("noise.bogus=1"), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(c.set("missing_equals"), ErrorKind::InvalidArgument);
    std::istringstream bad("nope=1\n");
    CHECK_THROWS_KIND(c.merge_text(bad, "bad"), ErrorKind::InvalidArgument);
    c.set("noise.gain", "2.5");
    CHECK(*c.explicit_noise_gain() == 2.5);
    c.set("train.clip_norm", "1.5");
    CHECK(*c.train_config().clip_norm == 1.5);
    CHECK(c.dump().find("noise.beta=0.9\n") != std::string::npos);

    auto s1 = derive_seeds(1);
    auto s2 = derive_seeds(2);
    CHECK(s1.noise != s1.split);
    CHECK(s1.init != s1.train);
    CHECK(s1.noise != s2.noise);
  }

  TEST_CASE("file config loses to --set and --seed") {
    auto root = fresh_dir("precedence");
    testing::write_rows_csv(root / "beats.csv", testing::synthetic_beat_rows(2, 3));
    {
      std::ofstream cfg(root / "run.cfg");
      cfg << "seed=1\nnoise.realizations=3\nnoise.beta=0.2\ndata.ecg_csv=" << (root / "beats.csv").string() << "\n";
    }
    REQUIRE(run({"synth", "--config", (root / "run.cfg").string(), "--out", (root / "out").string(), "--seed", "9",
                 "--set", "noise.realizations=1"}) == 0);
    const auto eff = slurp(root / "out" / cli::kEffectiveConfig);
    CHECK(eff.find("seed=9\n") != std::string::npos);
    CHECK(eff.find("noise.realizations=1\n") != std::string::npos);
    CHECK(eff.find("noise.beta=0.2\n") != std::string::npos);
    auto manifest = nlohmann::json::parse(slurp(root / "out" / cli::kManifestFile));
    CHECK(manifest["mcg_count"] == 2);
    CHECK(manifest["global_seed"] == 9);
  }

  TEST_CASE("synth writes a dataset and reruns are byte-identical") {
    auto root = fresh_dir("synth");
    auto a = synth_small(root, "a");
    auto b = synth_small(root, "b");
    auto container = read_container(a / cli::kMcgBinary);
    CHECK(container.records.size() == 6);
    CHECK(container.length == 3008);
    CHECK(container.sample_rate == 2000.0);
    CHECK(read_container(a / cli::kEcgBinary).records.size() == 3);
    CHECK(slurp(a / cli::kMcgBinary) == slurp(b / cli::kMcgBinary));
    CHECK(slurp(a / cli::kEcgBinary) == slurp(b / cli::kEcgBinary));
    CHECK(slurp(a / cli::kEffectiveConfig) == slurp(b / cli::kEffectiveConfig));

    auto ma = nlohmann::json::parse(slurp(a / cli::kManifestFile));
    auto mb = nlohmann::json::parse(slurp(b / cli::kManifestFile));
    ma.erase("created_at");
    mb.erase("created_at");
    CHECK(ma == mb);
    CHECK(ma["label_column_dropped"] == true);
    CHECK(ma["cycles"].size() == 3);
    CHECK(!fs::exists(a / ".mcgdn.lock"));

    auto csv = synth_small(root, "csv", "csv");
    auto from_csv = read_container_csv(csv / cli::kMcgCsv);
    REQUIRE(from_csv.records.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(from_csv.records[i].samples == container.records[i].samples);
  }

  TEST_CASE("malformed rows exit with code 2") {
    auto root = fresh_dir("malformed");
    auto rows = testing::synthetic_beat_rows(3, 1);
    for (std::size_t i = 0; i + 1 < rows[1].size(); ++i) rows[1][i] = 0.0;
    testing::write_rows_csv(root / "beats.csv", rows);
    CHECK(run({"synth", "--out", (root / "out").string(), "--set", "data.ecg_csv=" + (root / "beats.csv").string()}) ==
          2);
    {
      std::ofstream garbage(root / "text.csv");
      garbage << "0.1,0.2\n0.3,abc\n";
    }
    CHECK(run({"synth", "--out", (root / "out2").string(), "--set",
               "data.ecg_csv=" + (root / "text.csv").string()}) == 2);
    CHECK(run({"synth", "--out", (root / "out3").string(), "--set",
               "data.ecg_csv=" + (root / "absent.csv").string()}) == 3);
    CHECK(run({"synth", "--set", "no.such.key=1"}) == 1);
    CHECK(run({"bogus"}) == 1);
  }

  TEST_CASE("train, denoise and eval") {
    auto root = fresh_dir("pipeline");
    auto data = synth_small(root, "data");
    auto flags = tiny_model_flags(data);
    auto with = [&](std::vector<std::string> head, std::vector<std::string> extra = {}) {
      head.insert(head.end(), flags.begin(), flags.end());
      head.insert(head.end(), extra.begin(), extra.end());
      return run(head);
    };
    REQUIRE(with({"train", "--seed", "3", "--out", (root / "m1").string()}) == 0);
    REQUIRE(with({"train", "--seed", "3", "--out", (root / "m2").string()}) == 0);
    CHECK(slurp(root / "m1" / cli::kModelFile) == slurp(root / "m2" / cli::kModelFile));
    CHECK(first_line(root / "m1" / cli::kHistoryFile) == "epoch,train_mse,val_mse");

    const auto model = (root / "m1" / cli::kModelFile).string();
    REQUIRE(with({"denoise", "--out", (root / "dn").string()}, {"model.path=" + model, "denoise.cycle=1"}) == 0);
    std::ifstream dn(root / "dn" / "denoised.csv");
    std::string line;
    std::getline(dn, line);
    CHECK(line == "sample_index,prediction");
    std::getline(dn, line);
    CHECK(line.rfind("49,", 0) == 0);
    std::size_t rows = 1;
    while (std::getline(dn, line)) ++rows;
    CHECK(rows == 2959);

    {
      std::ofstream row(root / "row.csv");
      for (int i = 0; i < 200; ++i) row << (i ? "," : "") << 0.001 * i;
      row << "\n";
    }
    REQUIRE(with({"denoise", "--out", (root / "row").string()},
                 {"model.path=" + model, "denoise.input=" + (root / "row.csv").string()}) == 0);
    std::ifstream row_out(root / "row" / "denoised.csv");
    rows = 0;
    while (std::getline(row_out, line)) ++rows;
    CHECK(rows == 1 + 151);

    REQUIRE(with({"eval", "--out", (root / "ev").string()}, {"model.path=" + model}) == 0);
    CHECK(first_line(root / "ev" / "ratio.csv") == "f_norm,ratio");
    CHECK(first_line(root / "ev" / "psd_prediction.csv") == "f_norm,psd");
    auto summary = nlohmann::json::parse(slurp(root / "ev" / "summary.json"));
    CHECK(summary["band_mean_ratio"].get<double>() > 0.0);
    CHECK(summary["test_cycles"].get<int>() >= 1);

    REQUIRE(with({"eval", "--out", (root / "self").string()}, {"eval.mode=self"}) == 0);
    auto self = nlohmann::json::parse(slurp(root / "self" / "summary.json"));
    CHECK(self["band_mean_ratio"].get<double>() == 1.0);
    CHECK(self["prediction_mse"].get<double>() == self["moving_average_mse"].get<double>());

    CHECK(with({"eval", "--out", (root / "ev2").string()}, {"model.path=" + (root / "nothing.mcgm").string()}) == 3);
    CHECK(with({"eval", "--out", (root / "ev3").string()},
               {"model.path=" + (root / "m1" / cli::kHistoryFile).string()}) == 2);
  }

  TEST_CASE("zero epochs saves the initial model") {
    auto root = fresh_dir("zero_epochs");
    auto data = synth_small(root, "data");
    auto flags = tiny_model_flags(data);
    std::vector<std::string> args = {"train", "--out", (root / "m").string()};
    args.insert(args.end(), flags.begin(), flags.end());
    args.push_back("train.epochs=0");
    REQUIRE(run(args) == 0);
    CHECK(first_line(root / "m" / cli::kHistoryFile) == "epoch,train_mse,val_mse");
    CHECK(fs::file_size(root / "m" / cli::kModelFile) > 0);
  }

  TEST_CASE("a held lock refuses a second writer") {
    auto root = fresh_dir("lock");
    testing::write_rows_csv(root / "beats.csv", testing::synthetic_beat_rows(1, 1));
    fs::create_directories(root / "out");
    { std::ofstream(root / "out" / ".mcgdn.lock") << ""; }
    CHECK(run({"synth", "--out", (root / "out").string(), "--set", "data.ecg_csv=" + (root / "beats.csv").string(),
               "noise.realizations=1"}) == 3);
    CHECK(!fs::exists(root / "out" / cli::kManifestFile));
    fs::remove(root / "out" / ".mcgdn.lock");
    CHECK(run({"synth", "--out", (root / "out").string(), "--set", "data.ecg_csv=" + (root / "beats.csv").string(),
               "noise.realizations=1"}) == 0);
  }
}
