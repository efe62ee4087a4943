#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ipdd/datasets.hpp"
#include "ipdd/stream.hpp"
#include "support/synthetic.hpp"

using namespace ipdd;

namespace {

StreamConfig small_config(std::uint64_t seed) {
  StreamConfig cfg;
  cfg.arch = Architecture{4, {10}, 2};
  cfg.arch_name = "ann";
  cfg.train.epochs = 40;
  cfg.train.batch_size = 20;
  cfg.train.learning_rate = 0.3;
  cfg.m = 8;
  cfg.k = 3;
  cfg.delta = 0.01;
  cfg.adwin_delta = 0.001;
  cfg.seed = seed;
  return cfg;
}

// A one-logit model emitting softmax((z, 0)) = (p, 1-p) for every input.
ModelParams constant_output_model(double p) {
  ModelParams m = init_model(Architecture{4, {1}, 2}, 0);
  for (auto& w : m.weights) w.setZero();
  m.biases[1](0) = std::log(p / (1.0 - p));
  m.biases[1](1) = 0.0;
  return m;
}

}  // namespace

TEST_CASE("method tokens parse and print") {
  CHECK(Method::parse("ipdd").kind == MethodKind::ipdd);
  CHECK(Method::parse("no_retrain").name() == "no_retrain");
  CHECK(Method::parse("dp(0.5)").epsilon == 0.5);
  CHECK(Method::parse("dp(0.5)").name() == "dp(0.5)");
  CHECK_THROWS_AS(Method::parse("kswin"), std::invalid_argument);
  CHECK_THROWS_AS(Method::parse("dp(-1)"), std::invalid_argument);
}

TEST_CASE("training window keeps a contiguous suffix, oldest evicted first") {
  TrainingWindow window(5);
  std::vector<int> appended;
  for (int i = 0; i < 17; ++i) {
    window.append(Eigen::VectorXd::Constant(2, static_cast<double>(i)), i % 2);
    appended.push_back(i);
    REQUIRE(window.size() == std::min(i + 1, 5));
    const auto ds = window.to_dataset(2, {"a", "b"});
    for (int r = 0; r < ds.rows(); ++r)
      REQUIRE(ds.features(r, 0) ==
              static_cast<double>(appended[appended.size() - ds.rows() + r]));
  }
  CHECK_THROWS_AS(TrainingWindow(0), std::invalid_argument);
}

TEST_CASE("ensemble_predict: degenerate ensemble equals plain forward argmax") {
  const auto pool = testing::make_blobs(100, 3, 2.0, 31);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 20;
  const auto build = build_ensemble(pool, Architecture{3, {4}, 2}, tc, 20, 4, 1e9, 1, 7);
  REQUIRE(build.ensemble.members.size() == 1);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = pool.features.row(i).transpose();
    const Eigen::VectorXd probs = forward(build.ensemble.members.front(), x);
    int argmax = 0;
    if (probs(1) > probs(0)) argmax = 1;
    CHECK(ensemble_predict(build.ensemble, x).label == argmax);
  }
}

TEST_CASE("ensemble_predict averages members and breaks ties low") {
  Ensemble ens;
  ens.members = {constant_output_model(0.9), constant_output_model(0.2)};
  ens.effective_k = 2;
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.3);
  const Prediction p = ensemble_predict(ens, x);
  CHECK(p.mean_probs(0) == doctest::Approx(0.55).epsilon(1e-9));
  CHECK(p.label == 0);

  Ensemble tie;
  tie.members = {constant_output_model(0.5)};
  tie.effective_k = 1;
  CHECK(ensemble_predict(tie, x).label == 0);

  Ensemble empty;
  CHECK_THROWS_AS(ensemble_predict(empty, x), std::invalid_argument);
}

TEST_CASE("dp_train is reproducible and clips the minibatch gradient") {
  auto data = testing::make_blobs(40, 3, 2.0, 41);
  data.features *= 40.0;  // inflate gradients well past the clip norm
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 40;  // single minibatch: one update total
  cfg.learning_rate = 0.5;
  cfg.shuffle_seed = 5;
  const ModelParams start = init_model(Architecture{3, {4}, 2}, 13);

  const ModelParams a = dp_train(start, data, cfg, 0.7);
  const ModelParams b = dp_train(start, data, cfg, 0.7);
  CHECK(flatten_params(a) == flatten_params(b));

  // With epsilon huge the noise vanishes; the single step must move the
  // parameters by exactly lr * clipped gradient, i.e. at most lr * C.
  const Gradients g = mean_gradient(start, data.features, data.labels);
  REQUIRE(std::sqrt(g.squared_norm()) > 10.0);
  const ModelParams stepped = dp_train(start, data, cfg, 1e12);
  const double moved =
      std::sqrt((flatten_params(stepped) - flatten_params(start)).squaredNorm());
  CHECK(moved == doctest::Approx(cfg.learning_rate * 1.0).epsilon(1e-6));
}

TEST_CASE("dp_train approaches plain sgd as epsilon grows") {
  const auto data = testing::make_blobs(60, 3, 0.8, 42);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 20;
  cfg.learning_rate = 0.05;
  cfg.shuffle_seed = 9;
  const ModelParams start = init_model(Architecture{3, {4}, 2}, 17);

  const ModelParams plain = train(start, data, cfg);
  const ModelParams almost = dp_train(start, data, cfg, 1e9);
  const double gap =
      (flatten_params(plain) - flatten_params(almost)).cwiseAbs().maxCoeff();
  CHECK(gap <= 1e-3);
}

TEST_CASE("no_retrain never asks for labels and never drifts") {
  const auto ds = gen_sine(3000, DriftSpec::none(), 51);
  const auto result = run_baseline(Method{MethodKind::no_retrain, 0.0}, ds, small_config(1));
  CHECK(result.drift_events.empty());
  CHECK(result.labels_requested == 0);
  CHECK(result.retrain_count == 0);
  CHECK(result.overall.drift_count == 0);
  CHECK(result.signal_series.empty());
  CHECK(result.chunk_metrics.size() == 45);
  CHECK(result.overall.accuracy > 0.5);
}

TEST_CASE("ipdd detects a feature-distribution shift and retrains") {
  // Virtual drift: the input distribution moves, the ensemble saturates and
  // the entropy stream changes level.
  const auto ds = testing::make_feature_shift_stream(6000, 3600, 5.0, 61);
  StreamConfig cfg = small_config(2);
  const auto result = run_ipdd(ds, cfg);

  REQUIRE(!result.drift_events.empty());
  // Shift lands at chunk (3600-600)/120 = 25; detection within a few chunks.
  CHECK(result.drift_events.front().chunk_index >= 25);
  CHECK(result.drift_events.front().chunk_index <= 30);
  CHECK(result.retrain_count == static_cast<int>(result.drift_events.size()));

  // Label economy: exactly the drifted chunks were paid for.
  std::int64_t expected_labels = 0;
  for (const auto& record : result.chunk_metrics)
    if (record.drifted) expected_labels += 120;
  CHECK(result.labels_requested == expected_labels);
  CHECK(result.labels_requested < 6000 - 600);

  // Detector width right before the drop stays within the evaluated prefix.
  for (const auto& event : result.drift_events) {
    CHECK(event.detector_width_before > 0);
    CHECK(event.detector_width_before <= event.instance_index + 1);
    CHECK(event.labels_requested == 120);
  }
}

TEST_CASE("ipdd run is deterministic") {
  const auto ds = testing::make_feature_shift_stream(4000, 2500, 5.0, 62);
  const auto a = run_ipdd(ds, small_config(3));
  const auto b = run_ipdd(ds, small_config(3));
  CHECK(a.chunk_predictions == b.chunk_predictions);
  CHECK(a.signal_series == b.signal_series);
  CHECK(a.overall.accuracy == b.overall.accuracy);
  CHECK(a.drift_events.size() == b.drift_events.size());
  CHECK(a.labels_requested == b.labels_requested);
}

TEST_CASE("ipdd stays quiet on stationary streams") {
  int drifts = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ds = gen_sine(3000, DriftSpec::none(), 100 + seed);
    StreamConfig cfg = small_config(seed);
    drifts += static_cast<int>(run_ipdd(ds, cfg).drift_events.size());
  }
  CHECK(drifts <= 5);  // mean at most one per run
}

TEST_CASE("adwin_unlim sees a label reversal through the error stream") {
  DriftSpec drift;
  drift.kind = DriftKind::abrupt;
  drift.positions = {3000};
  const auto ds = gen_sine(6000, drift, 71);
  StreamConfig cfg = small_config(4);
  const auto result = run_baseline(Method{MethodKind::adwin_unlim, 0.0}, ds, cfg);

  // Reversal lands at chunk (3000-600)/120 = 20.
  REQUIRE(!result.drift_events.empty());
  CHECK(result.drift_events.front().chunk_index == 20);
  // Unlimited labels: every evaluated instance consumed its label.
  CHECK(result.labels_requested == 6000 - 600);

  // The error level visibly jumps at the reversal.
  const double before = std::accumulate(result.signal_series.begin() + 2000,
                                        result.signal_series.begin() + 2400, 0.0) /
                        400.0;
  CHECK(before <= 0.3);
  const auto& chunk20 = result.chunk_metrics[20];
  CHECK(chunk20.accuracy <= 0.3);

  // With the default window (2x initial) the single labeled chunk is
  // outvoted by stale pre-reversal records: the retrained model stays on
  // the old concept, the error level stays flat and the detector has
  // nothing further to cut on. The stall is the genuine behavior of
  // chunk-limited labeling with a large FIFO window.
  double tail = 0.0;
  for (std::size_t i = 25; i < 30; ++i) tail += result.chunk_metrics[i].accuracy;
  CHECK(tail / 5.0 <= 0.3);
}

TEST_CASE("adwin_unlim recovers when the window is sized to the chunk") {
  DriftSpec drift;
  drift.kind = DriftKind::abrupt;
  drift.positions = {3000};
  const auto ds = gen_sine(6000, drift, 71);
  StreamConfig cfg = small_config(4);
  cfg.window_capacity = 120;  // retrain purely on the freshly labeled chunk
  const auto result = run_baseline(Method{MethodKind::adwin_unlim, 0.0}, ds, cfg);

  REQUIRE(!result.drift_events.empty());
  CHECK(result.drift_events.front().chunk_index == 20);
  double tail = 0.0;
  for (std::size_t i = 25; i < 30; ++i) tail += result.chunk_metrics[i].accuracy;
  CHECK(tail / 5.0 >= 0.6);
}

TEST_CASE("adwin_lim requests labels only for drifted chunks") {
  const auto ds = testing::make_feature_shift_stream(6000, 3600, 5.0, 63);
  StreamConfig cfg = small_config(5);
  const auto result = run_baseline(Method{MethodKind::adwin_lim, 0.0}, ds, cfg);
  std::int64_t expected = 0;
  for (const auto& record : result.chunk_metrics)
    if (record.drifted) expected += 120;
  CHECK(result.labels_requested == expected);
  CHECK(result.retrain_count == static_cast<int>(result.drift_events.size()));
}

TEST_CASE("dp noise hurts utility monotonically on a stationary stream") {
  double acc_low_noise = 0.0;
  double acc_high_noise = 0.0;
  const int repeats = 6;
  for (std::uint64_t seed = 1; seed <= repeats; ++seed) {
    const auto ds = gen_sine(2500, DriftSpec::none(), 200 + seed);
    StreamConfig cfg = small_config(seed);
    cfg.k = 3;
    cfg.train.epochs = 8;
    acc_low_noise +=
        run_baseline(Method{MethodKind::dp, 1.0}, ds, cfg).overall.accuracy;
    acc_high_noise +=
        run_baseline(Method{MethodKind::dp, 0.1}, ds, cfg).overall.accuracy;
  }
  CHECK(acc_low_noise / repeats >= acc_high_noise / repeats);
}

TEST_CASE("a retrain that cannot satisfy the subsample demand aborts the run") {
  const auto ds = gen_sine(1000, DriftSpec::none(), 81);
  StreamConfig cfg = small_config(6);
  cfg.m = 500;  // initial window holds only 100 records
  CHECK_THROWS(run_ipdd(ds, cfg));
}
