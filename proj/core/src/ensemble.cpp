#include "ipdd/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "ipdd/parallel.hpp"
#include "ipdd/rng.hpp"

namespace ipdd {

SubsampleSet generate_subsamples(int pool_size, int N, int m, std::uint64_t seed) {
  if (N <= 0 || m <= 0)
    throw std::invalid_argument("generate_subsamples: N and m must be positive");
  if (static_cast<std::int64_t>(m) * N > pool_size)
    throw std::invalid_argument("generate_subsamples: insufficient data, m*N > pool size");

  std::vector<int> pool(static_cast<std::size_t>(pool_size));
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(seed);
  rng.shuffle(pool);

  SubsampleSet out;
  out.subsample_size = N;
  out.seed = seed;
  out.subsamples.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    out.subsamples.emplace_back(pool.begin() + static_cast<std::ptrdiff_t>(i) * N,
                                pool.begin() + static_cast<std::ptrdiff_t>(i + 1) * N);
  return out;
}

std::vector<Bucket> bucket_models(std::span<const ModelParams> models, double delta) {
  if (models.empty()) throw std::invalid_argument("bucket_models: empty model list");
  if (!(delta > 0.0)) throw std::invalid_argument("bucket_models: delta must be positive");

  std::vector<Bucket> buckets;
  for (std::size_t i = 0; i < models.size(); ++i) {
    bool placed = false;
    for (auto& bucket : buckets) {
      if (model_distance(bucket.representative, models[i]) <= delta) {
        bucket.members.push_back(models[i]);
        bucket.source_subsample_ids.push_back(static_cast<int>(i));
        placed = true;
        break;
      }
    }
    if (!placed) {
      Bucket fresh;
      fresh.representative = models[i];
      fresh.members.push_back(models[i]);
      fresh.source_subsample_ids.push_back(static_cast<int>(i));
      buckets.push_back(std::move(fresh));
    }
  }
  // stable_sort keeps creation order among equal-sized buckets.
  std::stable_sort(buckets.begin(), buckets.end(),
                   [](const Bucket& a, const Bucket& b) { return a.size() > b.size(); });
  return buckets;
}

EnsembleBuild build_ensemble(const LabeledDataset& pool, const Architecture& arch,
                             const TrainConfig& train_cfg, int N, int m,
                             double delta, int k, std::uint64_t seed,
                             const EnsembleBuildOptions& opts) {
  if (k < 1) throw std::invalid_argument("build_ensemble: k must be >= 1");
  if (opts.init_seed_count < 1)
    throw std::invalid_argument("build_ensemble: init_seed_count must be >= 1");

  EnsembleBuild out;
  out.subsamples = generate_subsamples(pool.rows(), N, m, seed);

  const ModelParams shared_init = init_model(arch, seed);
  out.models.resize(static_cast<std::size_t>(m));
  parallel_for(m, [&](int i) {
    ModelParams start =
        opts.init_seed_count == 1
            ? shared_init
            : init_model(arch, mix_seed(seed, 2 * static_cast<std::uint64_t>(
                                                  i % opts.init_seed_count) + 1));
    TrainConfig cfg = train_cfg;
    cfg.shuffle_seed = mix_seed(seed, 2 * static_cast<std::uint64_t>(i));
    cfg.batch_size = std::min(cfg.batch_size, N);  // full batch on small subsamples
    const LabeledDataset sample = take_rows(pool, out.subsamples.subsamples[static_cast<std::size_t>(i)]);
    out.models[static_cast<std::size_t>(i)] = train(std::move(start), sample, cfg);
  });

  out.buckets = bucket_models(out.models, delta);

  Ensemble& ens = out.ensemble;
  ens.delta = delta;
  ens.requested_k = k;
  ens.effective_k = std::min<int>(k, static_cast<int>(out.buckets.size()));
  if (ens.effective_k < k)
    out.warnings.push_back("requested k=" + std::to_string(k) + " but only " +
                           std::to_string(out.buckets.size()) +
                           " buckets formed; ensemble degraded to effective_k=" +
                           std::to_string(ens.effective_k));
  for (int i = 0; i < ens.effective_k; ++i) {
    ens.members.push_back(mean_models(out.buckets[static_cast<std::size_t>(i)].members));
    ens.bucket_sizes.push_back(out.buckets[static_cast<std::size_t>(i)].size());
  }
  return out;
}

KAnonymityReport kanonymity_report(std::span<const Bucket> buckets) {
  if (buckets.empty()) throw std::invalid_argument("kanonymity_report: no buckets");
  KAnonymityReport report;
  std::unordered_set<int> seen;
  std::size_t total_ids = 0;
  for (const auto& bucket : buckets) {
    report.bucket_sizes.push_back(bucket.size());
    report.max_k = std::max(report.max_k, bucket.size());
    for (const int id : bucket.source_subsample_ids) seen.insert(id);
    total_ids += bucket.source_subsample_ids.size();
  }
  std::sort(report.bucket_sizes.begin(), report.bucket_sizes.end(), std::greater<>());
  report.sources_disjoint = seen.size() == total_ids;
  return report;
}

}  // namespace ipdd
