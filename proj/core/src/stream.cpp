#include "ipdd/stream.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ipdd/adwin.hpp"
#include "ipdd/parallel.hpp"
#include "ipdd/rng.hpp"
#include "ipdd/uncertainty.hpp"

namespace ipdd {

std::string Method::name() const {
  switch (kind) {
    case MethodKind::ipdd:
      return "ipdd";
    case MethodKind::no_retrain:
      return "no_retrain";
    case MethodKind::adwin_unlim:
      return "adwin_unlim";
    case MethodKind::adwin_lim:
      return "adwin_lim";
    case MethodKind::dp: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "dp(%g)", epsilon);
      return buf;
    }
  }
  return "unknown";
}

Method Method::parse(const std::string& token) {
  if (token == "ipdd") return {MethodKind::ipdd, 0.0};
  if (token == "no_retrain") return {MethodKind::no_retrain, 0.0};
  if (token == "adwin_unlim") return {MethodKind::adwin_unlim, 0.0};
  if (token == "adwin_lim") return {MethodKind::adwin_lim, 0.0};
  if (token.rfind("dp(", 0) == 0 && token.back() == ')') {
    const std::string num = token.substr(3, token.size() - 4);
    char* end = nullptr;
    const double eps = std::strtod(num.c_str(), &end);
    if (end == num.c_str() + num.size() && eps > 0.0) return {MethodKind::dp, eps};
  }
  throw std::invalid_argument("unknown method '" + token + "'");
}

TrainingWindow::TrainingWindow(int capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("training window: capacity must be >= 1");
}

void TrainingWindow::append(const Eigen::VectorXd& features, int label) {
  records_.emplace_back(features, label);
  while (static_cast<int>(records_.size()) > capacity_) records_.pop_front();
}

void TrainingWindow::append_all(const LabeledDataset& ds) {
  for (int r = 0; r < ds.rows(); ++r)
    append(ds.features.row(r).transpose(), ds.labels[static_cast<std::size_t>(r)]);
}

void TrainingWindow::append_all(const StreamChunk& chunk) {
  for (int r = 0; r < chunk.rows(); ++r)
    append(chunk.features.row(r).transpose(), chunk.labels[static_cast<std::size_t>(r)]);
}

LabeledDataset TrainingWindow::to_dataset(int num_classes,
                                          std::vector<std::string> feature_names) const {
  if (records_.empty()) throw std::runtime_error("training window: empty");
  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.feature_names = std::move(feature_names);
  ds.features.resize(static_cast<Eigen::Index>(records_.size()), records_.front().first.size());
  ds.labels.reserve(records_.size());
  Eigen::Index r = 0;
  for (const auto& [x, y] : records_) {
    ds.features.row(r++) = x.transpose();
    ds.labels.push_back(y);
  }
  return ds;
}

Prediction ensemble_predict(const Ensemble& ensemble, const Eigen::VectorXd& x) {
  if (ensemble.members.empty())
    throw std::invalid_argument("ensemble_predict: empty ensemble");
  Prediction out;
  out.member_probs.reserve(ensemble.members.size());
  for (const auto& member : ensemble.members)
    out.member_probs.push_back(forward(member, x));
  out.mean_probs = Eigen::VectorXd::Zero(out.member_probs.front().size());
  for (const auto& p : out.member_probs) out.mean_probs += p;
  out.mean_probs /= static_cast<double>(out.member_probs.size());

  out.label = 0;
  for (Eigen::Index c = 1; c < out.mean_probs.size(); ++c)
    if (out.mean_probs(c) > out.mean_probs(out.label)) out.label = static_cast<int>(c);
  return out;
}

ModelParams dp_train(ModelParams model, const LabeledDataset& data,
                     const TrainConfig& cfg, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("dp_train: epsilon must be positive");
  const int n = data.rows();
  if (n == 0) throw std::invalid_argument("dp_train: empty dataset");
  if (cfg.batch_size <= 0 || cfg.batch_size > n)
    throw std::invalid_argument("dp_train: invalid batch_size");

  constexpr double kClipNorm = 1.0;
  constexpr double kDpDelta = 1e-5;
  const double sigma = kClipNorm * std::sqrt(2.0 * std::log(1.25 / kDpDelta)) / epsilon;

  Rng order_rng(cfg.shuffle_seed);
  Rng noise_rng(mix_seed(cfg.shuffle_seed, 0x6e01u));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(b, data.features.cols());
      std::vector<int> yb(static_cast<std::size_t>(b));
      for (int i = 0; i < b; ++i) {
        xb.row(i) = data.features.row(order[static_cast<std::size_t>(start + i)]);
        yb[static_cast<std::size_t>(i)] =
            data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
      }
      Gradients g = mean_gradient(model, xb, yb);
      const double norm = std::sqrt(g.squared_norm());
      if (!std::isfinite(norm)) throw std::runtime_error("dp_train: non-finite gradient");
      if (norm > kClipNorm) g.scale(kClipNorm / norm);
      for (auto& w : g.weights)
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] += sigma * noise_rng.gaussian();
      for (auto& bias : g.biases)
        for (Eigen::Index i = 0; i < bias.size(); ++i) bias(i) += sigma * noise_rng.gaussian();
      apply_step(model, g, cfg.learning_rate);
    }
  }
  return model;
}

namespace {

// The working model set of one pipeline: IPDD's private ensemble, a single
// model, or a k-member (possibly DP) ensemble.
struct ModelSet {
  Ensemble ensemble;
  std::vector<std::string> warnings;
};

int auto_subsample_size(const StreamConfig& cfg, int pool_rows) {
  if (cfg.subsample_size > 0) return cfg.subsample_size;
  const int n = pool_rows / std::max(cfg.m, 1);
  if (n < 1) throw std::runtime_error("stream: pool too small for m subsamples");
  return n;
}

ModelSet build_model_set(const Method& method, const LabeledDataset& pool,
                         const StreamConfig& cfg, std::uint64_t build_seed) {
  ModelSet set;
  switch (method.kind) {
    case MethodKind::ipdd: {
      EnsembleBuildOptions opts;
      opts.init_seed_count = cfg.init_seed_count;
      EnsembleBuild build =
          build_ensemble(pool, cfg.arch, cfg.train, auto_subsample_size(cfg, pool.rows()),
                         cfg.m, cfg.delta, cfg.k, build_seed, opts);
      set.ensemble = std::move(build.ensemble);
      set.warnings = std::move(build.warnings);
      return set;
    }
    case MethodKind::no_retrain:
    case MethodKind::adwin_unlim: {
      TrainConfig tc = cfg.train;
      tc.shuffle_seed = mix_seed(build_seed, 0);
      tc.batch_size = std::min(tc.batch_size, pool.rows());
      set.ensemble.members.push_back(train(init_model(cfg.arch, build_seed), pool, tc));
      set.ensemble.bucket_sizes.push_back(1);
      set.ensemble.requested_k = 1;
      set.ensemble.effective_k = 1;
      return set;
    }
    case MethodKind::adwin_lim:
    case MethodKind::dp: {
      const int k = std::max(cfg.k, 1);
      set.ensemble.members.resize(static_cast<std::size_t>(k));
      std::vector<ModelParams>& members = set.ensemble.members;
      parallel_for(k, [&](int i) {
        TrainConfig tc = cfg.train;
        tc.shuffle_seed = mix_seed(build_seed, 2 * static_cast<std::uint64_t>(i));
        tc.batch_size = std::min(tc.batch_size, pool.rows());
        ModelParams start =
            init_model(cfg.arch, mix_seed(build_seed, 2 * static_cast<std::uint64_t>(i) + 1));
        members[static_cast<std::size_t>(i)] =
            method.kind == MethodKind::dp
                ? dp_train(std::move(start), pool, tc, method.epsilon)
                : train(std::move(start), pool, tc);
      });
      set.ensemble.bucket_sizes.assign(static_cast<std::size_t>(k), 1);
      set.ensemble.requested_k = k;
      set.ensemble.effective_k = k;
      return set;
    }
  }
  throw std::logic_error("unreachable method kind");
}

double chunk_mcc(const std::vector<int>& truth, const std::vector<int>& pred, int c) {
  return mcc(ConfusionMatrix(truth, pred, c));
}

double chunk_auc_or_nan(const std::vector<int>& truth, const Eigen::MatrixXd& scores) {
  try {
    return auc_macro_ovr(truth, scores);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

RunResult run_stream(const Method& method, const LabeledDataset& ds,
                     const StreamConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  ds.validate();

  StreamConfig local = cfg;
  local.arch.input_dim = ds.cols();
  local.arch.num_classes = ds.num_classes;

  ChunkedStream stream = chunk_stream(ds, local.init_frac, local.chunk_frac);
  const int initial_rows = stream.initial.rows();

  TrainingWindow window(local.window_capacity > 0 ? local.window_capacity
                                                  : 2 * initial_rows);
  window.append_all(stream.initial);

  RunResult result;
  result.method = method.name();
  result.arch_name = local.arch_name;
  result.seed = local.seed;

  std::uint64_t build_counter = 0;
  ModelSet models = build_model_set(
      method, window.to_dataset(ds.num_classes, ds.feature_names), local,
      mix_seed(local.seed, build_counter));
  for (auto& w : models.warnings) result.notes.push_back(w);
  result.last_effective_k = models.ensemble.effective_k;

  const bool uses_detector = method.kind != MethodKind::no_retrain;
  const bool error_signal = method.kind == MethodKind::adwin_unlim;
  std::optional<Adwin> detector;
  if (uses_detector) detector.emplace(local.adwin_delta);

  int total_eval = 0;
  for (const auto& chunk : stream.chunks) total_eval += chunk.rows();
  Eigen::MatrixXd all_scores(total_eval, ds.num_classes);
  std::vector<int> all_true;
  std::vector<int> all_pred;
  all_true.reserve(static_cast<std::size_t>(total_eval));
  all_pred.reserve(static_cast<std::size_t>(total_eval));
  result.signal_series.reserve(uses_detector ? static_cast<std::size_t>(total_eval) : 0);

  int eval_index = 0;
  for (const auto& chunk : stream.chunks) {
    std::vector<int> pred(static_cast<std::size_t>(chunk.rows()));
    Eigen::MatrixXd chunk_scores(chunk.rows(), ds.num_classes);
    bool drift_fired = false;
    DriftEvent event;

    for (int i = 0; i < chunk.rows(); ++i) {
      const Eigen::VectorXd x = chunk.features.row(i).transpose();
      const Prediction p = ensemble_predict(models.ensemble, x);
      pred[static_cast<std::size_t>(i)] = p.label;
      chunk_scores.row(i) = p.mean_probs.transpose();

      if (uses_detector) {
        double signal;
        if (error_signal) {
          // Unlimited-label mode: the true label is consumed per instance.
          ++result.labels_requested;
          signal = p.label == chunk.labels[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
        } else {
          signal = predictive_entropy(p.member_probs);
        }
        result.signal_series.push_back(signal);
        const int width_before = detector->width();
        const Adwin::Update upd = detector->update(signal);
        if (upd.drift && !drift_fired) {
          drift_fired = true;
          event.chunk_index = chunk.chunk_index;
          event.instance_index = eval_index;
          event.detector_width_before = width_before;
          event.labels_requested = error_signal ? 0 : chunk.rows();
        }
      }
      ++eval_index;
    }

    all_scores.middleRows(eval_index - chunk.rows(), chunk.rows()) = chunk_scores;
    all_true.insert(all_true.end(), chunk.labels.begin(), chunk.labels.end());
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());

    ChunkRecord record;
    record.chunk_index = chunk.chunk_index;
    record.accuracy = accuracy(chunk.labels, pred);
    record.mcc = chunk_mcc(chunk.labels, pred, ds.num_classes);
    record.auc = chunk_auc_or_nan(chunk.labels, chunk_scores);
    record.drifted = drift_fired ? 1 : 0;
    result.chunk_metrics.push_back(record);
    result.chunk_predictions.push_back(std::move(pred));

    if (drift_fired) {
      // True labels for the drifted chunk are requested, the FIFO window is
      // updated, the model set is rebuilt and the detector starts afresh.
      if (!error_signal) result.labels_requested += chunk.rows();
      window.append_all(chunk);
      ModelSet rebuilt = build_model_set(
          method, window.to_dataset(ds.num_classes, ds.feature_names), local,
          mix_seed(local.seed, ++build_counter));
      models = std::move(rebuilt);
      for (auto& w : models.warnings) result.notes.push_back(w);
      result.last_effective_k = models.ensemble.effective_k;
      detector.emplace(local.adwin_delta);
      result.drift_events.push_back(event);
      ++result.retrain_count;
    }
  }

  result.overall.accuracy = accuracy(all_true, all_pred);
  result.overall.mcc = mcc(ConfusionMatrix(all_true, all_pred, ds.num_classes));
  result.overall.auc = chunk_auc_or_nan(all_true, all_scores);
  result.overall.drift_count = static_cast<int>(result.drift_events.size());
  for (const auto& record : result.chunk_metrics) {
    result.overall.chunk_accuracy.push_back(record.accuracy);
    result.overall.chunk_mcc.push_back(record.mcc);
    result.overall.chunk_auc.push_back(record.auc);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace

RunResult run_ipdd(const LabeledDataset& ds, const StreamConfig& cfg) {
  return run_stream(Method{MethodKind::ipdd, 0.0}, ds, cfg);
}

RunResult run_baseline(const Method& method, const LabeledDataset& ds,
                       const StreamConfig& cfg) {
  return run_stream(method, ds, cfg);
}

}  // namespace ipdd
