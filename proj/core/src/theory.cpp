#include "ipdd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ipdd/parallel.hpp"
#include "ipdd/rng.hpp"

namespace ipdd {

namespace {

double clamped_q(const BoundInputs& in) {
  if (!(in.delta > 0.0)) throw std::invalid_argument("bounds: delta must be positive");
  if (in.b < 1) throw std::invalid_argument("bounds: b must be >= 1");
  if (in.sigma2 < 0.0) throw std::invalid_argument("bounds: sigma2 must be >= 0");
  const double q = in.sigma2 / (in.b * in.delta * in.delta);
  return std::clamp(q, 0.0, 1.0);
}

// sum_{r=lo..m} C(m,r) p^r q^(m-r), evaluated term by term.
double binomial_tail(int m, int lo, double p, double q) {
  double sum = 0.0;
  for (int r = lo; r <= m; ++r) {
    double choose = 1.0;
    for (int i = 1; i <= r; ++i)
      choose *= static_cast<double>(m - r + i) / static_cast<double>(i);
    sum += choose * std::pow(p, r) * std::pow(q, m - r);
  }
  return sum;
}

}  // namespace

double bound_pair_recurrence(const BoundInputs& in) {
  BoundInputs pair = in;
  pair.k = 2;
  return bound_k_anonymity(pair);
}

double bound_all_recurrence(const BoundInputs& in) {
  if (in.m < 1) throw std::invalid_argument("bounds: m must be >= 1");
  if (in.T < 1) throw std::invalid_argument("bounds: T must be >= 1");
  const double p = 1.0 - clamped_q(in);
  return std::pow(p, static_cast<double>(in.m) * in.T);
}

double bound_k_anonymity(const BoundInputs& in) {
  if (in.m < 2) throw std::invalid_argument("bounds: m must be >= 2");
  if (in.k < 2 || in.k > in.m)
    throw std::invalid_argument("bounds: k must lie in [2, m]");
  if (in.T < 1) throw std::invalid_argument("bounds: T must be >= 1");
  const double q = clamped_q(in);
  const double per_epoch = binomial_tail(in.m, in.k, 1.0 - q, q);
  return std::pow(std::clamp(per_epoch, 0.0, 1.0), in.T);
}

double estimate_sigma2(const LabeledDataset& data, const ModelParams& model,
                       int batch_size) {
  const int n = data.rows();
  if (n < 2) throw std::invalid_argument("estimate_sigma2: too few examples");
  if (batch_size < 1) throw std::invalid_argument("estimate_sigma2: batch_size must be >= 1");
  if ((n + batch_size - 1) / batch_size < 2)
    throw std::invalid_argument("estimate_sigma2: need at least two minibatches");

  const Eigen::Index dim = static_cast<Eigen::Index>(model.param_count());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  std::vector<Eigen::VectorXd> grads(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd xi = data.features.row(i);
    const int yi[] = {data.labels[static_cast<std::size_t>(i)]};
    grads[static_cast<std::size_t>(i)] = flatten_gradients(mean_gradient(model, xi, yi));
    mean += grads[static_cast<std::size_t>(i)];
  }
  mean /= static_cast<double>(n);

  double trace = 0.0;
  for (const auto& g : grads) trace += (g - mean).squaredNorm();
  return trace / static_cast<double>(n);
}

namespace {

// Trains one trial's model set: fresh disjoint subsamples, shared (or
// grouped) initialization, per-model shuffle streams.
std::vector<ModelParams> train_trial_models(const Architecture& arch,
                                            const LabeledDataset& pool, int m, int N,
                                            const TrainConfig& train_cfg,
                                            std::uint64_t trial_seed, int init_count) {
  const SubsampleSet subs = generate_subsamples(pool.rows(), N, m, trial_seed);
  const ModelParams shared_init = init_model(arch, trial_seed);
  std::vector<ModelParams> models(static_cast<std::size_t>(m));
  parallel_for(m, [&](int i) {
    ModelParams start =
        init_count == 1
            ? shared_init
            : init_model(arch, mix_seed(trial_seed,
                                        2 * static_cast<std::uint64_t>(i % init_count) + 1));
    TrainConfig cfg = train_cfg;
    cfg.shuffle_seed = mix_seed(trial_seed, 2 * static_cast<std::uint64_t>(i));
    cfg.batch_size = std::min(cfg.batch_size, N);
    models[static_cast<std::size_t>(i)] =
        train(std::move(start), take_rows(pool, subs.subsamples[static_cast<std::size_t>(i)]), cfg);
  });
  return models;
}

int minibatches_per_epoch(int N, int batch_size) {
  return (N + std::min(batch_size, N) - 1) / std::min(batch_size, N);
}

}  // namespace

RecurrenceEstimate monte_carlo_recurrence(const Architecture& arch,
                                          const LabeledDataset& pool, int m, int N,
                                          double delta, const TrainConfig& train_cfg,
                                          int trials, std::uint64_t seed, int k) {
  if (m < 2) throw std::invalid_argument("monte_carlo_recurrence: m must be >= 2");
  if (trials < 1) throw std::invalid_argument("monte_carlo_recurrence: trials must be >= 1");
  if (k < 2 || k > m) throw std::invalid_argument("monte_carlo_recurrence: k must lie in [2, m]");

  RecurrenceEstimate est;
  est.trials = trials;
  int recur = 0;
  int recur_k = 0;
  for (int t = 0; t < trials; ++t) {
    const auto models =
        train_trial_models(arch, pool, m, N, train_cfg, mix_seed(seed, static_cast<std::uint64_t>(t)), 1);
    const auto buckets = bucket_models(models, delta);
    const int max_bucket = buckets.front().size();
    est.max_bucket_sizes.push_back(max_bucket);
    recur += max_bucket >= 2;
    recur_k += max_bucket >= k;
  }
  est.recur_freq = static_cast<double>(recur) / trials;
  est.recur_freq_k = static_cast<double>(recur_k) / trials;

  est.sigma2 = estimate_sigma2(pool, init_model(arch, mix_seed(seed, 0)),
                               train_cfg.batch_size);
  BoundInputs in;
  in.m = m;
  in.b = minibatches_per_epoch(N, train_cfg.batch_size);
  in.T = train_cfg.epochs;
  in.delta = delta;
  in.sigma2 = est.sigma2;
  in.k = k;
  est.bound_pair = bound_pair_recurrence(in);
  est.bound_k = bound_k_anonymity(in);
  return est;
}

std::vector<TheorySweepRow> recurrence_sweep(
    const Architecture& arch, const LabeledDataset& pool,
    const std::vector<int>& ms, const std::vector<double>& deltas,
    const std::vector<int>& init_counts, int trials, const TrainConfig& train_cfg,
    int N, std::uint64_t seed) {
  if (ms.empty() || deltas.empty())
    throw std::invalid_argument("recurrence_sweep: need at least one m and one delta");
  if (trials < 1) throw std::invalid_argument("recurrence_sweep: trials must be >= 1");
  const std::vector<int> inits = init_counts.empty() ? std::vector<int>{1} : init_counts;

  std::vector<TheorySweepRow> rows;
  for (const int m : ms) {
    const int n_per = N > 0 ? N : pool.rows() / m;
    const double sigma2 = estimate_sigma2(pool, init_model(arch, mix_seed(seed, 0)),
                                          train_cfg.batch_size);
    for (const int init_count : inits) {
      // Train each trial's model set once; every delta re-buckets the same
      // models.
      std::vector<std::vector<ModelParams>> trial_models(static_cast<std::size_t>(trials));
      for (int t = 0; t < trials; ++t)
        trial_models[static_cast<std::size_t>(t)] = train_trial_models(
            arch, pool, m, n_per, train_cfg,
            mix_seed(seed, static_cast<std::uint64_t>(t)), init_count);

      for (const double delta : deltas) {
        TheorySweepRow row;
        row.delta = delta;
        row.m = m;
        row.init_count = init_count;
        row.trials = trials;
        double k_sum = 0.0;
        int recur = 0;
        for (const auto& models : trial_models) {
          const auto buckets = bucket_models(models, delta);
          const int max_bucket = buckets.front().size();
          k_sum += max_bucket;
          recur += max_bucket >= 2;
        }
        row.k_anonymity = k_sum / trials;
        row.recur_freq = static_cast<double>(recur) / trials;
        BoundInputs in;
        in.m = m;
        in.b = minibatches_per_epoch(n_per, train_cfg.batch_size);
        in.T = train_cfg.epochs;
        in.delta = delta;
        in.sigma2 = sigma2;
        row.bound = bound_pair_recurrence(in);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace ipdd
