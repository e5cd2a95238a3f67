#include "geocert/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "geocert/errors.hpp"
#include "geocert/report_io.hpp"

namespace geocert {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (data.kind != "idx") {
    parse_dataset_kind(data.kind);
    if (data.dim < 2) throw ConfigError("dataset dim must be at least 2");
    if (data.n_train < 10 || data.n_test < 1) throw ConfigError("dataset sizes too small");
  }
  smoothing.validate();
  search.validate();
  train.validate();
  if (jobs == 0) throw ConfigError("jobs must be positive");
  if (!(curve_step > 0.0)) throw ConfigError("curve_step must be positive");
  if (!(window > 0.0)) throw ConfigError("window must be positive");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw ConfigError("sigma values must be positive");
  }
}

namespace {

Dataset limited(Dataset d, std::size_t limit) {
  if (limit > 0 && d.size() > limit) {
    d.inputs.resize(limit);
    d.labels.resize(limit);
  }
  return d;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("idx dataset needs ") + what);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

}  // namespace

Dataset load_train_split(const DatasetSpec& spec) {
  if (spec.kind == "idx") {
    require_file(spec.train_images, "train_images");
    require_file(spec.train_labels, "train_labels");
    return load_idx(spec.train_images, spec.train_labels);
  }
  return synth_dataset(parse_dataset_kind(spec.kind), spec.dim, spec.n_train, spec.seed);
}

Dataset load_test_split(const DatasetSpec& spec) {
  if (spec.kind == "idx") {
    require_file(spec.test_images, "test_images");
    require_file(spec.test_labels, "test_labels");
    return limited(load_idx(spec.test_images, spec.test_labels), spec.limit);
  }
  const std::size_t n = std::max<std::size_t>(spec.n_test, 10);
  return limited(synth_dataset(parse_dataset_kind(spec.kind), spec.dim, n, spec.seed + 1),
                 spec.limit > 0 ? spec.limit : spec.n_test);
}

std::vector<double> run_train(const RunConfig& cfg) {
  cfg.validate();
  const Dataset data = load_train_split(cfg.data);
  std::vector<double> loss;
  const MlpParams params = train_noise_augmented(data, cfg.train, &loss);
  save_checkpoint(params, cfg.checkpoint);
  return loss;
}

std::vector<CertificationReport> certify_dataset(const Classifier& model, const Dataset& data,
                                                 const SmoothingConfig& smoothing,
                                                 const SearchConfig& search, std::uint64_t seed,
                                                 std::size_t jobs) {
  std::vector<CertificationReport> rows(data.size());
  const RngStream root(seed);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < data.size(); i = next++) {
      try {
        CertificationReport r =
            certify_geometric(model, data.inputs[i], data.labels[i], smoothing, search,
                              root.child(i));
        r.instance_id = i;
        r.seed = seed;
        rows[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = data.size();
      }
    }
  };

  const std::size_t n_workers = std::min(std::max<std::size_t>(jobs, 1), data.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace {

std::vector<CertificationReport> certify_into(const RunConfig& cfg, const fs::path& out_dir,
                                              const fs::path& checkpoint, double sigma) {
  const Mlp model(load_checkpoint(checkpoint));
  const Dataset data = load_test_split(cfg.data);
  data.validate();
  if (model.input_dim() != data.dim) {
    throw DataError("checkpoint expects dimension " + std::to_string(model.input_dim()) +
                    " but the dataset has " + std::to_string(data.dim));
  }
  if (model.num_classes() < data.num_classes) {
    throw DataError("checkpoint has " + std::to_string(model.num_classes()) +
                    " classes but the dataset has " + std::to_string(data.num_classes));
  }

  SmoothingConfig smoothing = cfg.smoothing;
  smoothing.sigma = sigma;
  const std::vector<CertificationReport> rows =
      certify_dataset(model, data, smoothing, cfg.search, cfg.seed, cfg.jobs);

  fs::create_directories(out_dir);
  double max_r = 0.0;
  for (const CertificationReport& r : rows) max_r = std::max(max_r, r.r_best);
  const std::vector<double> grid = radius_grid(max_r + cfg.curve_step, cfg.curve_step);
  const ImprovementMetrics metrics = improvement_metrics(rows, grid, cfg.window);
  {
    auto os = open_out(out_dir / "results.csv");
    write_results_csv(os, rows, cfg.timing);
  }
  {
    auto os = open_out(out_dir / "summary.txt");
    write_summary(os, rows, metrics);
  }
  {
    auto os = open_out(out_dir / "certified_accuracy.csv");
    write_curve_csv(os, certified_accuracy_curve(rows, grid));
  }
  {
    auto os = open_out(out_dir / "improvement.csv");
    write_improvement_csv(os, metrics);
  }
  return rows;
}

}  // namespace

std::vector<CertificationReport> run_certify(const RunConfig& cfg) {
  cfg.validate();
  if (!fs::exists(cfg.checkpoint)) throw DataError("checkpoint not found: " + cfg.checkpoint);
  return certify_into(cfg, cfg.output_dir, cfg.checkpoint, cfg.smoothing.sigma);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.sigmas.empty()) throw ConfigError("sweep needs at least one sigma");
  std::vector<double> sigmas = cfg.sigmas;
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());

  std::vector<SweepRow> out;
  for (double sigma : sigmas) {
    const fs::path dir = fs::path(cfg.output_dir) / ("sigma_" + format_double(sigma));
    fs::path checkpoint = cfg.checkpoint;
    if (cfg.train_per_sigma) {
      RunConfig tc = cfg;
      tc.train.sigma_train = sigma;
      tc.checkpoint = (dir / "model.ckpt").string();
      run_train(tc);
      checkpoint = tc.checkpoint;
    } else if (!fs::exists(checkpoint)) {
      throw DataError("checkpoint not found: " + checkpoint.string());
    }
    const std::vector<CertificationReport> rows = certify_into(cfg, dir, checkpoint, sigma);

    SweepRow row;
    row.sigma = sigma;
    row.instances = rows.size();
    std::size_t abstained = 0;
    for (const CertificationReport& r : rows) {
      if (r.abstained) ++abstained;
      if (r.correct()) {
        row.mean_r_cohen += r.r_cohen;
        row.mean_r_best += r.r_best;
      }
    }
    row.metrics = improvement_metrics(rows, {}, cfg.window);
    const double n = static_cast<double>(rows.size());
    row.abstention_rate = static_cast<double>(abstained) / n;
    row.certified_accuracy = static_cast<double>(row.metrics.correct) / n;
    if (row.metrics.correct > 0) {
      row.mean_r_cohen /= static_cast<double>(row.metrics.correct);
      row.mean_r_best /= static_cast<double>(row.metrics.correct);
    }
    out.push_back(std::move(row));
  }

  fs::create_directories(cfg.output_dir);
  auto os = open_out(fs::path(cfg.output_dir) / "sweep.csv");
  os << "sigma,instances,abstention_rate,certified_accuracy,mean_r_cohen,mean_r_best,"
        "median_improvement_pct,mean_improvement_pct,best_cohen,best_single,best_double,"
        "best_boundary\n";
  for (const SweepRow& r : out) {
    const MethodProportions& p = r.metrics.best_method;
    os << format_double(r.sigma) << ',' << r.instances << ',' << format_double(r.abstention_rate)
       << ',' << format_double(r.certified_accuracy) << ',' << format_double(r.mean_r_cohen)
       << ',' << format_double(r.mean_r_best) << ','
       << format_double(r.metrics.median_improvement) << ','
       << format_double(r.metrics.mean_improvement) << ',' << format_double(p.cohen) << ','
       << format_double(p.single) << ',' << format_double(p.double_transitive) << ','
       << format_double(p.boundary) << '\n';
  }
  return out;
}

}  // namespace geocert
