// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ipdd/adwin.hpp"
#include "ipdd/config.hpp"
#include "ipdd/datasets.hpp"
#include "ipdd/ensemble.hpp"
#include "ipdd/experiment.hpp"
#include "ipdd/metrics.hpp"
#include "ipdd/nn.hpp"
#include "ipdd/rng.hpp"
#include "ipdd/stream.hpp"
#include "ipdd/theory.hpp"
#include "ipdd/uncertainty.hpp"
#include "support/reference_adwin.hpp"
#include "support/synthetic.hpp"

using namespace ipdd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness

double min_abs_preactivation(const ModelParams& m, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd act = X;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::MatrixXd z = (act * m.weights[l].transpose()).rowwise() + m.biases[l].transpose();
    lo = std::min(lo, z.cwiseAbs().minCoeff());
    act = z.cwiseMax(0.0);
  }
  return lo;
}

void criterion_gradients() {
  Timer timer;
  Rng rng(1001);
  double worst = 0.0;
  const std::vector<std::vector<int>> hidden_menu = {
      {10}, {10, 20}, {10, 20, 10}, {8, 10}, {4, 4}};
  for (int trial = 0; trial < 50; ++trial) {
    Architecture arch;
    arch.input_dim = 2 + static_cast<int>(rng.uniform_int(7));   // <= 8
    arch.num_classes = 2 + static_cast<int>(rng.uniform_int(3)); // <= 4
    arch.hidden_layers = hidden_menu[static_cast<std::size_t>(rng.uniform_int(hidden_menu.size()))];

    // Generic point: jittered parameters, inputs resampled away from kinks
    // (finite differences are meaningless on a kink).
    ModelParams model;
    Eigen::MatrixXd X;
    std::vector<int> y;
    for (;;) {
      model = init_model(arch, rng.next_u64());
      Eigen::VectorXd flat = flatten_params(model);
      for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) += rng.uniform(-0.2, 0.2);
      set_flat_params(model, flat);
      const int batch = 1 + static_cast<int>(rng.uniform_int(6));
      X.resize(batch, arch.input_dim);
      y.resize(static_cast<std::size_t>(batch));
      for (int r = 0; r < batch; ++r) {
        for (int c = 0; c < arch.input_dim; ++c) X(r, c) = rng.uniform(-2.0, 2.0);
        y[static_cast<std::size_t>(r)] = static_cast<int>(rng.uniform_int(arch.num_classes));
      }
      if (min_abs_preactivation(model, X) > 1e-3) break;
    }

    const Eigen::VectorXd analytic = flatten_gradients(mean_gradient(model, X, y));
    ModelParams probe = model;
    const Eigen::VectorXd base = flatten_params(model);
    Eigen::VectorXd numeric(base.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      Eigen::VectorXd p = base;
      p(i) = base(i) + h;
      set_flat_params(probe, p);
      const double up = mean_cross_entropy(probe, X, y);
      p(i) = base(i) - h;
      set_flat_params(probe, p);
      const double down = mean_cross_entropy(probe, X, y);
      numeric(i) = (up - down) / (2.0 * h);
    }
    worst = std::max(worst,
                     (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12));
  }
  const double elapsed = timer.seconds();
  report(1, "backprop matches central finite differences",
         worst <= 1e-4 && elapsed < 10.0,
         fmt("50 triples, worst relative error %.3g, %.1fs (budget 10s)", worst, elapsed));
}

// ---------------------------------------------------------------------------
// 2. ADWIN vs exact-window oracle, plus false-alarm calibration

void criterion_adwin() {
  Timer timer;
  Rng rng(2002);
  int worst_gap = 0;
  int disagreements = 0;
  int compared = 0;
  for (int seq = 0; seq < 100; ++seq) {
    const int n = 400 + static_cast<int>(rng.uniform_int(1600));
    const int kind = seq % 4;  // 0: stationary bernoulli, 1: stationary real,
                               // 2: shifted bernoulli, 3: shifted real
    const int change = kind >= 2 ? n / 2 : n;
    const double base = 0.1 + 0.3 * rng.uniform01();
    const double jump = 0.5 + 0.1 * rng.uniform01();

    Adwin detector(0.001);
    testing::ReferenceAdwin oracle(0.001);
    int detector_hit = -1;
    int oracle_hit = -1;
    for (int i = 0; i < n; ++i) {
      double x;
      if (kind % 2 == 0) {
        const double p = i < change ? base : base + jump;
        x = rng.uniform01() < p ? 1.0 : 0.0;
      } else {
        x = 0.4 * rng.uniform01() + (i < change ? 0.0 : jump);
      }
      if (detector.update(x).drift && detector_hit < 0) detector_hit = i;
      if (oracle.update(x).drift && oracle_hit < 0) oracle_hit = i;
    }
    if (oracle_hit < 0 && detector_hit < 0) continue;
    ++compared;
    if (oracle_hit < 0 || detector_hit < 0) {
      ++disagreements;
    } else {
      worst_gap = std::max(worst_gap, std::abs(detector_hit - oracle_hit));
    }
  }

  int false_alarms = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng stream(seed);
    Adwin detector(0.001);
    for (int i = 0; i < 10000; ++i)
      if (detector.update(stream.uniform01()).drift) ++false_alarms;
  }

  const double elapsed = timer.seconds();
  report(2, "exponential-histogram ADWIN matches the brute-force oracle",
         disagreements == 0 && worst_gap <= 32 && false_alarms <= 5 && elapsed < 60.0,
         fmt("%d drifting sequences, worst index gap %d (<=32), one-sided fires %d, "
             "false alarms %d/200k (<=5), %.1fs (budget 60s)",
             compared, worst_gap, disagreements, false_alarms, elapsed));
}

// ---------------------------------------------------------------------------
// 3. Entropy exactness

void criterion_entropy() {
  Eigen::VectorXd onehot(3);
  onehot << 0.0, 1.0, 0.0;
  Eigen::VectorXd uniform2(2);
  uniform2 << 0.5, 0.5;
  Eigen::VectorXd a(2), b(2);
  a << 0.9, 0.1;
  b << 0.5, 0.5;

  const double zero = predictive_entropy({onehot, onehot, onehot});
  const double ln2 = predictive_entropy({uniform2});
  const double mixed = predictive_entropy({a, b});
  const bool pass = zero == 0.0 && std::abs(ln2 - std::log(2.0)) <= 1e-12 &&
                    std::abs(mixed - 0.610864) <= 1e-6;
  report(3, "predictive entropy reproduces the closed-form cases", pass,
         fmt("unanimous %.2g, uniform %.9f (ln2), mixed %.9f (0.610864 +- 1e-6)", zero,
             ln2, mixed));
}

// ---------------------------------------------------------------------------
// 4. Algorithm-1 invariants over seeded builds

void criterion_algorithm1() {
  Timer timer;
  const auto pool = gen_sine(10000, DriftSpec::none(), 404);
  TrainConfig train_cfg;
  train_cfg.epochs = 50;
  train_cfg.batch_size = 32;
  train_cfg.learning_rate = 0.1;
  const Architecture arch{4, {10}, 2};

  bool disjoint = true;
  bool members_close = true;
  bool means_close = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto build = build_ensemble(pool, arch, train_cfg, 500, 20, 0.01, 5, seed);
    std::vector<char> seen(static_cast<std::size_t>(pool.rows()), 0);
    for (const auto& sample : build.subsamples.subsamples)
      for (const int idx : sample) {
        if (seen[static_cast<std::size_t>(idx)]) disjoint = false;
        seen[static_cast<std::size_t>(idx)] = 1;
      }
    for (const auto& bucket : build.buckets)
      for (const auto& member : bucket.members)
        if (model_distance(bucket.representative, member) > 0.01) members_close = false;
    for (std::size_t i = 0; i < build.ensemble.members.size(); ++i)
      if (model_distance(build.buckets[i].representative, build.ensemble.members[i]) > 0.01)
        means_close = false;
  }
  report(4, "disjoint subsamples, sound buckets, in-ball ensemble means",
         disjoint && members_close && means_close,
         fmt("20 builds (pool 10k, m=20, delta=0.01): disjoint=%d members<=delta=%d "
             "means<=delta=%d, %.1fs",
             disjoint, members_close, means_close, timer.seconds()));
}

// ---------------------------------------------------------------------------
// 5 & 6. End-to-end reversal streams: drift recovery and the privacy-utility
// ordering. Streams, seeds and models are shared between the two criteria.

struct ReversalRuns {
  std::vector<RunResult> ipdd, no_retrain, dp10, dp01;
};

StreamConfig reversal_config(std::uint64_t seed) {
  StreamConfig cfg;
  cfg.arch = Architecture{4, {10}, 2};
  cfg.arch_name = "ann";
  cfg.train.epochs = 50;
  cfg.train.batch_size = 32;
  cfg.train.learning_rate = 0.3;
  cfg.m = 10;
  cfg.k = 5;
  cfg.delta = 0.01;
  cfg.adwin_delta = 0.001;
  cfg.seed = seed;
  return cfg;
}

ReversalRuns run_reversal_streams() {
  ReversalRuns runs;
  const int seeds = 10;
  runs.ipdd.resize(seeds);
  runs.no_retrain.resize(seeds);
  runs.dp10.resize(seeds);
  runs.dp01.resize(seeds);
  for (int s = 0; s < seeds; ++s) {
    DriftSpec drift;
    drift.kind = DriftKind::abrupt;
    drift.positions = {10000};
    const auto ds = gen_sine(20000, drift, 5000 + static_cast<std::uint64_t>(s));
    const StreamConfig cfg = reversal_config(static_cast<std::uint64_t>(s) + 1);
    runs.ipdd[static_cast<std::size_t>(s)] = run_ipdd(ds, cfg);
    runs.no_retrain[static_cast<std::size_t>(s)] =
        run_baseline(Method{MethodKind::no_retrain, 0.0}, ds, cfg);
    runs.dp10[static_cast<std::size_t>(s)] =
        run_baseline(Method{MethodKind::dp, 1.0}, ds, cfg);
    runs.dp01[static_cast<std::size_t>(s)] =
        run_baseline(Method{MethodKind::dp, 0.1}, ds, cfg);
  }
  return runs;
}

double mean_accuracy(const std::vector<RunResult>& runs) {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.overall.accuracy;
  return sum / static_cast<double>(runs.size());
}

void criterion_drift_recovery(const ReversalRuns& runs, double elapsed) {
  // Reversal at instance 10000 = chunk (10000 - 2000) / 400 = 20.
  const int reversal_chunk = 20;
  int seeds_detected = 0;
  for (const auto& run : runs.ipdd)
    for (const auto& event : run.drift_events)
      if (event.chunk_index >= reversal_chunk && event.chunk_index < reversal_chunk + 5) {
        ++seeds_detected;
        break;
      }
  const double ipdd_acc = mean_accuracy(runs.ipdd);
  const double no_retrain_acc = mean_accuracy(runs.no_retrain);
  int no_retrain_drifts = 0;
  for (const auto& run : runs.no_retrain) no_retrain_drifts += run.overall.drift_count;

  const bool detected_ok = seeds_detected >= 9;
  const bool margin_ok = ipdd_acc - no_retrain_acc >= 0.15;
  const bool quiet_ok = no_retrain_drifts == 0;
  report(5, "label-reversal recovery: detection, margin, silent no_retrain",
         detected_ok && margin_ok && quiet_ok && elapsed < 600.0,
         fmt("detected in %d/10 seeds (need >=9), ipdd %.4f vs no_retrain %.4f "
             "(margin %.4f, need >=0.15), no_retrain drifts %d (need 0), %.0fs (budget 600s)",
             seeds_detected, ipdd_acc, no_retrain_acc, ipdd_acc - no_retrain_acc,
             no_retrain_drifts, elapsed));
}

// One-sided sign test: P(Binomial(n, 1/2) >= wins).
double sign_test_p(int wins, int n) {
  double p = 0.0;
  for (int i = wins; i <= n; ++i) {
    double choose = 1.0;
    for (int j = 1; j <= i; ++j) choose *= static_cast<double>(n - i + j) / j;
    p += choose * std::pow(0.5, n);
  }
  return p;
}

void criterion_privacy_ordering(const ReversalRuns& runs) {
  const double acc_ipdd = mean_accuracy(runs.ipdd);
  const double acc_dp10 = mean_accuracy(runs.dp10);
  const double acc_dp01 = mean_accuracy(runs.dp01);

  int wins_a = 0, ties_a = 0, wins_b = 0, ties_b = 0;
  for (std::size_t s = 0; s < runs.ipdd.size(); ++s) {
    const double i = runs.ipdd[s].overall.accuracy;
    const double d10 = runs.dp10[s].overall.accuracy;
    const double d01 = runs.dp01[s].overall.accuracy;
    if (i > d10) ++wins_a;
    if (i == d10) ++ties_a;
    if (d10 > d01) ++wins_b;
    if (d10 == d01) ++ties_b;
  }
  const double p_a = sign_test_p(wins_a, 10 - ties_a);
  const double p_b = sign_test_p(wins_b, 10 - ties_b);
  const bool mean_order = acc_ipdd >= acc_dp10 && acc_dp10 >= acc_dp01;
  const bool significant = p_a <= 0.05 && p_b <= 0.05;
  report(6, "mean accuracy ordering ipdd >= dp(1.0) >= dp(0.1) with sign test",
         mean_order && significant,
         fmt("means %.4f / %.4f / %.4f; ipdd>dp(1.0) in %d/10 (p=%.3f), "
             "dp(1.0)>dp(0.1) in %d/10 (p=%.3f)",
             acc_ipdd, acc_dp10, acc_dp01, wins_a, p_a, wins_b, p_b));
}

// ---------------------------------------------------------------------------
// 7. Theorem bounds: analytic cases and Monte Carlo domination

void criterion_bounds() {
  Timer timer;
  BoundInputs case1{2, 1, 1, 1.0, 0.5, 2};
  BoundInputs case2{5, 1, 3, 1.0, 0.1, 2};
  BoundInputs case3{4, 1, 1, 1.0, 0.5, 3};
  const bool analytic_ok =
      std::abs(bound_pair_recurrence(case1) - 0.25) <= 1e-12 &&
      std::abs(bound_all_recurrence(case2) - std::pow(0.9, 15)) <= 1e-12 &&
      std::abs(bound_k_anonymity(case3) - 0.3125) <= 1e-12;

  const auto pool = testing::make_blobs(2000, 2, 2.0, 707);
  const Architecture arch{2, {3}, 2};
  int dominated = 0;
  int total = 0;
  std::string worst_cell = "none";
  for (const double delta : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    for (const int m : {5, 10}) {
      for (const int epochs : {2, 5}) {
        TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.batch_size = 20;
        cfg.learning_rate = 0.02;
        const auto est = monte_carlo_recurrence(arch, pool, m, 100, delta, cfg, 30,
                                                900 + total);
        const double se = std::sqrt(est.bound_pair * (1.0 - est.bound_pair) / 30.0);
        ++total;
        if (est.recur_freq >= est.bound_pair - 2.0 * se)
          ++dominated;
        else
          worst_cell = fmt("delta=%.1f m=%d T=%d freq=%.2f bound=%.2f", delta, m, epochs,
                           est.recur_freq, est.bound_pair);
      }
    }
  }
  const double elapsed = timer.seconds();
  report(7, "recurrence bounds: analytic identities and Monte Carlo domination",
         analytic_ok && dominated >= (total * 95 + 99) / 100 && elapsed < 900.0,
         fmt("analytic=%d, dominated %d/%d configs (need >=95%%), worst %s, %.0fs "
             "(budget 900s)",
             analytic_ok, dominated, total, worst_cell.c_str(), elapsed));
}

// ---------------------------------------------------------------------------
// 8. k-anonymity sweeps

void criterion_kanonymity_sweeps() {
  Timer timer;
  const auto pool = gen_sine(6000, DriftSpec::none(), 808);
  const Architecture arch{4, {10}, 2};
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 25;
  cfg.learning_rate = 0.05;

  // (a) Delta sweep on a fixed trained model set, non-decreasing per seed.
  bool sweep_monotone = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto build = build_ensemble(pool, arch, cfg, 50, 20, 1e9, 1, seed);
    int prev = 0;
    for (const double delta : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const int top = bucket_models(build.models, delta).front().size();
      if (top < prev) sweep_monotone = false;
      prev = top;
    }
  }

  // (b) Mean max-bucket size non-decreasing in m at fixed delta and N.
  const double fixed_delta = 0.1;
  std::vector<double> mean_k;
  for (const int m : {20, 50, 100}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto build = build_ensemble(pool, arch, cfg, 50, m, fixed_delta, 1,
                                        1000 * seed + static_cast<std::uint64_t>(m));
      sum += build.buckets.front().size();
    }
    mean_k.push_back(sum / 10.0);
  }
  const bool m_monotone = mean_k[0] <= mean_k[1] && mean_k[1] <= mean_k[2];

  report(8, "k-anonymity grows with delta per seed and with m on average",
         sweep_monotone && m_monotone,
         fmt("delta sweep monotone in 10/10 seeds: %d; mean max bucket at m={20,50,100} "
             "= {%.1f, %.1f, %.1f}, %.0fs",
             sweep_monotone, mean_k[0], mean_k[1], mean_k[2], timer.seconds()));
}

// ---------------------------------------------------------------------------
// 9. Metric identities

void criterion_metrics() {
  Rng rng(909);
  bool mcc_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int tp = static_cast<int>(rng.uniform_int(40));
    const int tn = static_cast<int>(rng.uniform_int(40));
    const int fp = static_cast<int>(rng.uniform_int(40));
    const int fn = static_cast<int>(rng.uniform_int(40));
    if (tp + tn + fp + fn == 0) continue;
    ConfusionMatrix cm(2);
    for (int i = 0; i < tp; ++i) cm.add(1, 1);
    for (int i = 0; i < tn; ++i) cm.add(0, 0);
    for (int i = 0; i < fp; ++i) cm.add(0, 1);
    for (int i = 0; i < fn; ++i) cm.add(1, 0);
    const double num = static_cast<double>(tp) * tn - static_cast<double>(fp) * fn;
    const double den = std::sqrt(static_cast<double>(tp + fp)) *
                       std::sqrt(static_cast<double>(tp + fn)) *
                       std::sqrt(static_cast<double>(tn + fp)) *
                       std::sqrt(static_cast<double>(tn + fn));
    const double expected = den == 0.0 ? 0.0 : num / den;
    if (std::abs(mcc(cm) - expected) > 1e-12) mcc_ok = false;
  }

  bool auc_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(49));
    std::vector<int> truth(static_cast<std::size_t>(n));
    std::vector<double> scores(static_cast<std::size_t>(n));
    bool has0 = false, has1 = false;
    for (int i = 0; i < n; ++i) {
      truth[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(2));
      scores[static_cast<std::size_t>(i)] = rng.uniform_int(10) / 10.0;
      has0 |= truth[static_cast<std::size_t>(i)] == 0;
      has1 |= truth[static_cast<std::size_t>(i)] == 1;
    }
    if (!has0 || !has1) continue;
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (int i = 0; i < n; ++i) {
      if (truth[static_cast<std::size_t>(i)] != 1) continue;
      for (int j = 0; j < n; ++j) {
        if (truth[static_cast<std::size_t>(j)] != 0) continue;
        ++pairs;
        if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(j)])
          wins += 1.0;
        else if (scores[static_cast<std::size_t>(i)] == scores[static_cast<std::size_t>(j)])
          wins += 0.5;
      }
    }
    if (auc_binary(truth, scores) != wins / static_cast<double>(pairs)) auc_ok = false;
  }
  report(9, "mcc matches the binary closed form, auc matches pair counting",
         mcc_ok && auc_ok, fmt("1000 random tables: %d; 1000 score vectors: %d", mcc_ok, auc_ok));
}

// ---------------------------------------------------------------------------
// 10. Byte-identical compare outputs

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  Timer timer;
  const fs::path base =
      fs::temp_directory_path() / ("ipdd_accept_" + std::to_string(::getpid()));
  fs::create_directories(base);

  const ExperimentConfig cfg = config_from_overrides(
      {"dataset.n=2500", "dataset.drift=abrupt", "dataset.drift_positions=1400",
       "dataset.seed=5", "train.epochs=12", "train.lr=0.3", "ensemble.m=6",
       "ensemble.k=2", "seeds=1,2", "methods=ipdd,no_retrain,adwin_lim"});
  cmd_compare(cfg, base / "a", nullptr);
  cmd_compare(cfg, base / "b", nullptr);

  bool identical = true;
  for (const char* name : {"compare.csv", "metrics.csv", "drift_events.csv", "summary.json"})
    if (slurp(base / "a" / name) != slurp(base / "b" / name)) identical = false;

  std::error_code ec;
  fs::remove_all(base, ec);
  report(10, "compare reruns produce byte-identical outputs", identical,
         fmt("compare.csv, metrics.csv, drift_events.csv, summary.json, %.0fs",
             timer.seconds()));
}

}  // namespace

int main() {
  std::printf("ipdd acceptance suite\n");
  criterion_gradients();
  criterion_adwin();
  criterion_entropy();
  criterion_algorithm1();
  {
    Timer timer;
    const ReversalRuns runs = run_reversal_streams();
    const double elapsed = timer.seconds();
    criterion_drift_recovery(runs, elapsed);
    criterion_privacy_ordering(runs);
  }
  criterion_bounds();
  criterion_kanonymity_sweeps();
  criterion_metrics();
  criterion_determinism();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
