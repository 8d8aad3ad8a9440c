#include "mcgdn/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fcntl.h>
#include <fstream>
#include <map>
#include <unistd.h>

#include "mcgdn/dataset_io.hpp"
#include "mcgdn/ecg_csv.hpp"
#include "mcgdn/model_io.hpp"
#include "mcgdn/network.hpp"
#include "mcgdn/noise.hpp"
#include "mcgdn/rng.hpp"
#include "mcgdn/signal.hpp"
#include "mcgdn/spectral.hpp"
#include "mcgdn/train.hpp"
#include "mcgdn/windowing.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mcgdn::cli {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("mcgdn");
    l->set_pattern("[%l] %v");
    const char *env = std::getenv("MCG_LOG");
    std::string level = env ? env : "info";
    if (level == "debug") {
      l->set_level(spdlog::level::debug);
    } else if (level == "error") {
      l->set_level(spdlog::level::err);
    } else {
      l->set_level(spdlog::level::info);
    }
    return l;
  }();
  return log;
}

// One writer per output directory.
class OutputLock {
public:
  explicit OutputLock(const fs::path &dir) : path_(dir / ".mcgdn.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) fail(ErrorKind::Io, "output directory " + dir.string() + " is locked by another run");
  }
  ~OutputLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock &) = delete;
  OutputLock &operator=(const OutputLock &) = delete;

private:
  fs::path path_;
  int fd_ = -1;
};

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(const std::string &s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  fail(ErrorKind::MalformedInput, "unknown split '" + s + "' in manifest");
}

struct Dataset {
  std::vector<EcgCycle> ecgs;
  std::vector<McgCycle> mcgs;
  std::map<std::string, Split> splits;
};

fs::path require_dir(const RunConfig &config) {
  const std::string &dir = config.get("data.dataset_dir");
  if (dir.empty()) fail(ErrorKind::InvalidArgument, "data.dataset_dir is not set");
  return dir;
}

Dataset load_dataset(const fs::path &dir) {
  std::ifstream in(dir / kManifestFile);
  if (!in) fail(ErrorKind::Io, "cannot open " + (dir / kManifestFile).string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception &e) {
    fail(ErrorKind::MalformedInput, std::string("manifest: ") + e.what());
  }
  Dataset ds;
  try {
    const std::string format = manifest.at("files").at("format").get<std::string>();
    const fs::path ecg_file = dir / manifest.at("files").at("ecg").get<std::string>();
    const fs::path mcg_file = dir / manifest.at("files").at("mcg").get<std::string>();
    auto ecg = format == "csv" ? read_container_csv(ecg_file) : read_container(ecg_file);
    auto mcg = format == "csv" ? read_container_csv(mcg_file) : read_container(mcg_file);
    ds.ecgs = ecg_cycles(ecg);
    ds.mcgs = mcg_cycles(mcg);
    for (const auto &c : manifest.at("cycles")) {
      ds.splits[c.at("id").get<std::string>()] = parse_split(c.at("split").get<std::string>());
    }
  } catch (const json::exception &e) {
    fail(ErrorKind::MalformedInput, std::string("manifest: ") + e.what());
  }
  return ds;
}

std::vector<McgCycle> select_split(const Dataset &ds, Split which) {
  std::vector<McgCycle> out;
  for (const auto &m : ds.mcgs) {
    auto it = ds.splits.find(m.ecg_ref);
    if (it != ds.splits.end() && it->second == which) out.push_back(m);
  }
  return out;
}

const EcgCycle &find_ecg(const Dataset &ds, const std::string &id) {
  for (const auto &e : ds.ecgs) {
    if (e.source_id == id) return e;
  }
  fail(ErrorKind::MalformedInput, "dataset has no ECG cycle '" + id + "'");
}

void dump_config(const RunConfig &config, const fs::path &out) {
  write_text(out / kEffectiveConfig, config.dump());
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput:
    case ErrorKind::AllZeroSignal:
    case ErrorKind::BadMagic:
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::TruncatedFile:
    case ErrorKind::ArchMismatch:
      return kExitMalformedInput;
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::DivergenceDetected: return kExitDivergence;
    case ErrorKind::GridMismatch: return kExitGridMismatch;
    default: return kExitUsage;
  }
}

void cmd_synth(const RunConfig &config, const fs::path &out) {
  const std::string &csv = config.get("data.ecg_csv");
  if (csv.empty()) fail(ErrorKind::InvalidArgument, "data.ecg_csv is not set");
  OutputLock lock(out);

  const auto table = read_ecg_csv(csv);
  const auto ecgs = precondition_table(table, config.get_double("data.source_rate"),
                                       config.get_size("data.cycle_length"), config.get_double("data.sample_rate"));
  logger()->info("preconditioned {} ECG cycles (label column {})", ecgs.size(),
                 table.label_column_dropped ? "dropped" : "absent");

  NoiseSpec spec = config.noise_spec();
  const bool auto_gain = !config.explicit_noise_gain();
  const double rms_ratio = config.get_double("noise.rms_ratio");
  if (auto_gain) spec.noise_gain = calibrate_noise_gain(ecgs, spec, rms_ratio);
  logger()->info("noise gain {} ({})", g17(spec.noise_gain), auto_gain ? "calibrated" : "configured");

  const std::size_t realizations = config.get_size("noise.realizations");
  const auto mcgs = generate_dataset(ecgs, spec, realizations);

  std::vector<std::string> ids;
  for (const auto &e : ecgs) ids.push_back(e.source_id);
  const auto splits = split_by_cycle(ids, config.split(), derive_seeds(config.seed()).split);

  const bool as_csv = config.get("data.format") == "csv";
  if (!as_csv && config.get("data.format") != "binary") {
    fail(ErrorKind::InvalidArgument, "data.format must be binary or csv");
  }
  const char *ecg_name = as_csv ? kEcgCsv : kEcgBinary;
  const char *mcg_name = as_csv ? kMcgCsv : kMcgBinary;
  if (as_csv) {
    write_container_csv(out / ecg_name, to_container(std::span<const EcgCycle>(ecgs)));
    write_container_csv(out / mcg_name, to_container(std::span<const McgCycle>(mcgs)));
  } else {
    write_container(out / ecg_name, to_container(std::span<const EcgCycle>(ecgs)));
    write_container(out / mcg_name, to_container(std::span<const McgCycle>(mcgs)));
  }

  json manifest;
  manifest["format"] = "mcgdn-dataset";
  manifest["version"] = 1;
  manifest["rng"] = std::string(kRngAlgorithm);
  manifest["seed_scheme"] =
      "noise seed = derive_seed(global, 'noise', 0); cycle seed = noise seed ^ "
      "splitmix64(fnv1a64(ecg id) ^ splitmix64(realization))";
  manifest["global_seed"] = config.seed();
  manifest["noise"] = {{"psd_white", spec.psd_white},
                       {"beta", spec.beta},
                       {"f_knee", spec.f_knee},
                       {"noise_gain", spec.noise_gain},
                       {"gain_mode", auto_gain ? "calibrated" : "configured"},
                       {"rms_ratio", rms_ratio},
                       {"seed", spec.seed}};
  manifest["source_rate"] = config.get_double("data.source_rate");
  manifest["sample_rate"] = config.get_double("data.sample_rate");
  manifest["cycle_length"] = config.get_size("data.cycle_length");
  manifest["realizations"] = realizations;
  manifest["label_column_dropped"] = table.label_column_dropped;
  manifest["ecg_count"] = ecgs.size();
  manifest["mcg_count"] = mcgs.size();
  json cycles = json::array();
  for (const auto &id : ids) cycles.push_back({{"id", id}, {"split", split_name(splits.at(id))}});
  manifest["cycles"] = cycles;
  manifest["files"] = {{"format", as_csv ? "csv" : "binary"}, {"ecg", ecg_name}, {"mcg", mcg_name}};
  manifest["created_at"] = utc_timestamp();
  write_text(out / kManifestFile, manifest.dump(2) + "\n");
  dump_config(config, out);
  logger()->info("wrote {} MCG cycles to {}", mcgs.size(), out.string());
}

void cmd_train(const RunConfig &config, const fs::path &out) {
  const auto dir = require_dir(config);
  OutputLock lock(out);
  const Dataset ds = load_dataset(dir);
  const WindowParams window = config.window();
  const auto train_mcgs = select_split(ds, Split::Train);
  const auto val_mcgs = select_split(ds, Split::Validation);
  if (train_mcgs.empty()) fail(ErrorKind::MalformedInput, "dataset has no training cycles");
  const SegmentDataset train_set = segment_cycles(train_mcgs, ds.ecgs, window);
  const SegmentDataset val_set = segment_cycles(val_mcgs, ds.ecgs, window);
  logger()->info("training on {} segments ({} cycles), validating on {} segments", train_set.size(),
                 train_mcgs.size(), val_set.size());

  const Architecture arch = config.architecture();
  const DenoiserModel initial = DenoiserModel::initialized(arch, derive_seeds(config.seed()).init);
  const TrainConfig tc = config.train_config();
  auto result = train(initial, train_set, val_set, tc, [](const EpochRecord &r) {
    logger()->info("epoch {} train_mse={} val_mse={}", r.epoch, g17(r.train_mse),
                   r.val_mse ? g17(*r.val_mse) : std::string("-"));
  });
  save_model(result.model, out / kModelFile);
  write_history_csv(out / kHistoryFile, result.history);
  dump_config(config, out);
  logger()->info("saved {} (best epoch {})", (out / kModelFile).string(),
                 result.best_epoch ? std::to_string(*result.best_epoch) : std::string("none"));
}

void cmd_denoise(const RunConfig &config, const fs::path &out) {
  const std::string &model_path = config.get("model.path");
  if (model_path.empty()) fail(ErrorKind::InvalidArgument, "model.path is not set");
  OutputLock lock(out);
  const DenoiserModel model = load_model(model_path);

  McgCycle mcg{SampledSignal({0.0}, 1.0), "", 0, 0};
  const std::string &input = config.get("denoise.input");
  if (!input.empty()) {
    std::ifstream raw(input);
    if (!raw) fail(ErrorKind::Io, "cannot open " + input);
    const auto rows = parse_csv_rows(raw);
    if (rows.size() != 1) fail(ErrorKind::MalformedInput, "denoise.input must hold exactly one cycle row");
    mcg = McgCycle{SampledSignal(rows.front(), config.get_double("data.sample_rate")), "input", 0, 0};
  } else {
    const Dataset ds = load_dataset(require_dir(config));
    const std::size_t index = config.get_size("denoise.cycle");
    if (index >= ds.mcgs.size()) fail(ErrorKind::InvalidArgument, "denoise.cycle out of range");
    mcg = ds.mcgs[index];
  }
  const auto pred = predict_cycle(model, mcg);
  const std::size_t offset = label_offset(model.arch.window, config.window().alignment);
  std::ofstream csv(out / "denoised.csv", std::ios::trunc);
  if (!csv) fail(ErrorKind::Io, "cannot write denoised.csv");
  csv << "sample_index,prediction\n";
  for (std::size_t i = 0; i < pred.size(); ++i) csv << (i + offset) << ',' << g17(pred[i]) << '\n';
  if (!csv) fail(ErrorKind::Io, "write failed for denoised.csv");
  dump_config(config, out);
}

void cmd_eval(const RunConfig &config, const fs::path &out) {
  const Dataset ds = load_dataset(require_dir(config));
  const std::string mode = config.get("eval.mode");
  if (mode != "model" && mode != "self") fail(ErrorKind::InvalidArgument, "eval.mode must be model or self");
  OutputLock lock(out);

  std::optional<DenoiserModel> model;
  if (mode == "model") {
    const std::string &path = config.get("model.path");
    if (path.empty()) fail(ErrorKind::InvalidArgument, "model.path is not set");
    model = load_model(path);
  }
  const auto test = select_split(ds, Split::Test);
  if (test.empty()) fail(ErrorKind::MalformedInput, "dataset has no test cycles");

  const std::size_t ma_window = config.get_size("eval.ma_window");
  const std::size_t pred_offset =
      model ? label_offset(model->arch.window, config.window().alignment) : ma_window - 1;
  const PsdParams psd = config.psd_params();

  std::vector<PsdEstimate> pred_psds, ma_psds;
  double pred_sq = 0.0, ma_sq = 0.0, input_sq = 0.0;
  std::size_t pred_n = 0, ma_n = 0, input_n = 0;
  for (const auto &mcg : test) {
    const EcgCycle &truth = find_ecg(ds, mcg.ecg_ref);
    const SampledSignal ma = moving_average(mcg.signal, ma_window);
    const SampledSignal pred = model ? predict_cycle(*model, mcg) : ma;
    const auto pred_res = residual_noise(pred, truth, pred_offset);
    const auto ma_res = residual_noise(ma, truth, ma_window - 1);
    pred_psds.push_back(psd_estimate(pred_res, psd));
    ma_psds.push_back(psd_estimate(ma_res, psd));
    for (double v : pred_res.samples()) pred_sq += v * v;
    for (double v : ma_res.samples()) ma_sq += v * v;
    pred_n += pred_res.size();
    ma_n += ma_res.size();
    for (std::size_t i = pred_offset; i < pred_offset + pred.size(); ++i) {
      const double d = mcg.signal[i] - truth.signal[i];
      input_sq += d * d;
    }
    input_n += pred.size();
  }
  const PsdEstimate pred_avg = average_psds(pred_psds);
  const PsdEstimate ma_avg = average_psds(ma_psds);
  const NoiseRatioCurve curve = noise_ratio(pred_avg, ma_avg);
  const double lo = config.get_double("eval.band_lo");
  const double hi = config.get_double("eval.band_hi");
  const double band = band_mean(curve, lo, hi);

  write_psd_csv(out / "psd_prediction.csv", pred_avg);
  write_psd_csv(out / "psd_moving_average.csv", ma_avg);
  write_ratio_csv(out / "ratio.csv", curve);
  json summary;
  summary["mode"] = mode;
  summary["test_cycles"] = test.size();
  summary["band"] = {lo, hi};
  summary["band_mean_ratio"] = band;
  summary["prediction_mse"] = pred_sq / static_cast<double>(pred_n);
  summary["moving_average_mse"] = ma_sq / static_cast<double>(ma_n);
  summary["input_noise_mse"] = input_sq / static_cast<double>(input_n);
  summary["psd"] = {{"segment_length", psd.segment_length},
                    {"overlap", psd.overlap},
                    {"window", "hann"},
                    {"segments_averaged", pred_avg.segments_averaged}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  dump_config(config, out);
  logger()->info("band mean ratio over [{}, {}]: {}", lo, hi, g17(band));
}

int run(const std::vector<std::string> &args) {
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char *const *argv) {
  CLI::App app{"MCG denoising: synthesize noisy cycles, train the Conv1D-GRU denoiser, evaluate"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--seed", seed, "global seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "override one key, key=value")->take_all();
  };
  auto *synth = app.add_subcommand("synth", "precondition ECG cycles and synthesize MCG cycles");
  auto *train_cmd = app.add_subcommand("train", "train the denoiser on a synthesized dataset");
  auto *denoise = app.add_subcommand("denoise", "denoise one cycle to CSV");
  auto *eval = app.add_subcommand("eval", "compare residual-noise spectra against the moving average");
  for (auto *sub : {synth, train_cmd, denoise, eval}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.merge_file(config_path);
    for (const auto &kv : overrides) config.set(kv);
    if (seed) config.set("seed", std::to_string(*seed));

    const fs::path out(out_dir);
    if (synth->parsed()) cmd_synth(config, out);
    if (train_cmd->parsed()) cmd_train(config, out);
    if (denoise->parsed()) cmd_denoise(config, out);
    if (eval->parsed()) cmd_eval(config, out);
    return kExitOk;
  } catch (const Error &e) {
    logger()->error("{}", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    logger()->error("{}", e.what());
    return kExitIo;
  }
}

}  // namespace mcgdn::cli
