#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "geocert/metrics.hpp"
#include "geocert/model.hpp"
#include "geocert/search.hpp"
#include "geocert/smoothing.hpp"

namespace geocert {

/// Synthetic data is generated from `seed` (training split) and `seed + 1`
/// (test split); IDX data is read from the given files instead when
/// `kind` is "idx".
struct DatasetSpec {
  std::string kind = "wedge";
  std::size_t dim = 2;
  std::size_t n_train = 2000;
  std::size_t n_test = 200;
  std::uint64_t seed = 7;
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t limit = 0;  // keep at most this many test instances (0 = all)
};

struct RunConfig {
  DatasetSpec data;
  std::string checkpoint = "model.ckpt";
  TrainConfig train;
  SmoothingConfig smoothing;
  SearchConfig search;
  std::vector<double> sigmas;
  bool train_per_sigma = false;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool timing = false;
  double curve_step = 0.05;
  double window = kDefaultWindow;

  /// Throws ConfigError on invalid settings.
  void validate() const;
};

Dataset load_train_split(const DatasetSpec& spec);
Dataset load_test_split(const DatasetSpec& spec);

/// Trains on the training split and writes cfg.checkpoint. Returns the
/// per-epoch loss.
std::vector<double> run_train(const RunConfig& cfg);

/// Certifies every instance, instance i using RngStream(seed).child(i).
/// Rows come back in instance order regardless of `jobs`.
std::vector<CertificationReport> certify_dataset(const Classifier& model, const Dataset& data,
                                                 const SmoothingConfig& smoothing,
                                                 const SearchConfig& search, std::uint64_t seed,
                                                 std::size_t jobs);

/// Loads checkpoint and test split, certifies, and writes results.csv,
/// summary.txt, certified_accuracy.csv and improvement.csv to output_dir.
/// Throws DataError when the checkpoint and dataset disagree in dimension or
/// class count.
std::vector<CertificationReport> run_certify(const RunConfig& cfg);

struct SweepRow {
  double sigma = 0.0;
  std::size_t instances = 0;
  double abstention_rate = 0.0;
  double certified_accuracy = 0.0;
  double mean_r_cohen = 0.0;
  double mean_r_best = 0.0;
  ImprovementMetrics metrics;
};

/// run_certify once per sigma (ascending) into output_dir/sigma_<value>, then
/// writes output_dir/sweep.csv. With train_per_sigma each sigma gets its own
/// model trained at sigma_train = sigma.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

}  // namespace geocert
