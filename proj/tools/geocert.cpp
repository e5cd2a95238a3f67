// geocert command-line front end: train, certify, sweep, oracle-check.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "geocert/commands.hpp"
#include "geocert/errors.hpp"
#include "geocert/oracle_suite.hpp"
#include "geocert/report_io.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kInternal = 3 };

struct Options {
  geocert::RunConfig run;
  std::string sampling = "argmax";
  std::string gradient = "approx";
  bool no_double = false;
  bool no_boundary = false;
};

void add_options(CLI::App& app, Options& o) {
  geocert::RunConfig& r = o.run;
  app.add_option("--dataset", r.data.kind, "blobs, wedge, annulus or idx")->capture_default_str();
  app.add_option("--dim", r.data.dim, "input dimension of synthetic data")->capture_default_str();
  app.add_option("--n-train", r.data.n_train, "synthetic training examples")->capture_default_str();
  app.add_option("--n-test", r.data.n_test, "synthetic test instances")->capture_default_str();
  app.add_option("--data-seed", r.data.seed, "synthetic data seed")->capture_default_str();
  app.add_option("--train-images", r.data.train_images, "IDX training images");
  app.add_option("--train-labels", r.data.train_labels, "IDX training labels");
  app.add_option("--test-images", r.data.test_images, "IDX test images");
  app.add_option("--test-labels", r.data.test_labels, "IDX test labels");
  app.add_option("--limit", r.data.limit, "certify at most this many instances (0 = all)");

  app.add_option("--checkpoint", r.checkpoint, "model checkpoint path")->capture_default_str();
  app.add_option("--epochs", r.train.epochs)->capture_default_str();
  app.add_option("--batch-size", r.train.batch_size)->capture_default_str();
  app.add_option("--learning-rate", r.train.learning_rate)->capture_default_str();
  app.add_option("--sigma-train", r.train.sigma_train, "training noise level")->capture_default_str();
  app.add_option("--train-seed", r.train.seed)->capture_default_str();
  app.add_option("--hidden", r.train.hidden, "hidden layer widths")->capture_default_str();

  app.add_option("--sigma", r.smoothing.sigma, "smoothing noise level")->capture_default_str();
  app.add_option("--alpha", r.smoothing.alpha, "confidence level of the bounds")->capture_default_str();
  app.add_option("--tau", r.smoothing.tau, "Gumbel-Softmax temperature")->capture_default_str();
  app.add_option("--sampling", o.sampling, "vote rule: argmax or gumbel")->capture_default_str();

  app.add_option("--iterations", r.search.iterations, "search iterations M")->capture_default_str();
  app.add_option("--gamma0", r.search.gamma0, "initial step size")->capture_default_str();
  app.add_option("--s-grid", r.search.s_grid, "double-transitivity grid size")->capture_default_str();
  app.add_option("--gradient", o.gradient, "approx or full")->capture_default_str();
  app.add_option("--search-n", r.search.search_n_samples, "samples per search probe")
      ->capture_default_str();
  app.add_option("--final-n", r.search.final_n_samples, "samples per final certification")
      ->capture_default_str();
  app.add_option("--golden-iterations", r.search.golden_iterations)->capture_default_str();
  app.add_option("--max-step", r.search.max_step, "largest probe move per iteration")
      ->capture_default_str();
  app.add_flag("--no-double", o.no_double, "skip double transitivity");
  app.add_flag("--no-boundary", o.no_boundary, "skip boundary treatment");

  app.add_option("--sigmas", r.sigmas, "noise levels for sweep");
  app.add_flag("--train-per-sigma", r.train_per_sigma, "sweep trains one model per sigma");
  app.add_option("--out", r.output_dir, "output directory")->capture_default_str();
  app.add_option("--seed", r.seed, "certification seed")->capture_default_str();
  app.add_option("--jobs", r.jobs, "worker threads")->capture_default_str();
  app.add_flag("--timing", r.timing, "write measured wall_time_ms instead of 0");
  app.add_option("--curve-step", r.curve_step, "radius step of the accuracy curve")
      ->capture_default_str();
  app.add_option("--window", r.window, "half-width of improvement bins")->capture_default_str();
}

geocert::RunConfig finish(Options& o) {
  geocert::RunConfig r = o.run;
  r.smoothing.mode = geocert::parse_sampling_mode(o.sampling);
  r.search.mode = geocert::parse_gradient_mode(o.gradient);
  r.search.enable_double = !o.no_double;
  r.search.enable_boundary = !o.no_boundary;
  r.smoothing.n_samples = r.search.final_n_samples;
  return r;
}

int run(int argc, char** argv) {
  CLI::App app{"Geometric certification of smoothed classifiers"};
  app.set_config("--config", "", "INI file with option values");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  add_options(app, o);

  auto* train = app.add_subcommand("train", "train a noise-augmented MLP and save a checkpoint");
  auto* certify = app.add_subcommand("certify", "certify the test split and write results");
  auto* sweep = app.add_subcommand("sweep", "certify across several noise levels");
  auto* oracle = app.add_subcommand("oracle-check", "run formula-versus-oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (oracle->parsed()) {
    return geocert::print_oracle_table(std::cout, geocert::run_oracle_checks()) ? kOk : kInternal;
  }
  const geocert::RunConfig cfg = finish(o);
  if (train->parsed()) {
    const auto loss = geocert::run_train(cfg);
    std::cout << "trained " << loss.size() << " epochs, final loss "
              << geocert::format_double(loss.empty() ? 0.0 : loss.back()) << ", wrote "
              << cfg.checkpoint << '\n';
  } else if (certify->parsed()) {
    const auto rows = geocert::run_certify(cfg);
    std::cout << "certified " << rows.size() << " instances into " << cfg.output_dir << '\n';
  } else if (sweep->parsed()) {
    const auto rows = geocert::run_sweep(cfg);
    std::cout << "swept " << rows.size() << " noise levels into " << cfg.output_dir << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const geocert::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const geocert::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
