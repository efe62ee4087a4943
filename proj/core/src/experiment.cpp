#include "ipdd/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ipdd/parallel.hpp"
#include "ipdd/report.hpp"
#include "ipdd/version.hpp"

namespace ipdd {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

double finite_or_zero(double v) { return std::isnan(v) ? 0.0 : v; }

}  // namespace

ExperimentResult run_methods(const ExperimentConfig& cfg) {
  const LabeledDataset ds = make_dataset(cfg.dataset, cfg.init_frac);
  const std::vector<Method> methods = resolve_methods(cfg);

  struct Job {
    Method method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& method : methods)
    for (const std::uint64_t seed : cfg.seeds) jobs.push_back({method, seed});

  ExperimentResult result;
  result.config_hash = config_hash(cfg);
  result.runs.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    const StreamConfig sc = make_stream_config(cfg, ds, job.seed);
    result.runs[static_cast<std::size_t>(i)] = run_baseline(job.method, ds, sc);
  });
  return result;
}

std::vector<CompareRow> aggregate(const ExperimentResult& result) {
  std::vector<CompareRow> rows;
  for (const auto& run : result.runs) {
    CompareRow* row = nullptr;
    for (auto& r : rows)
      if (r.method == run.method && r.arch == run.arch_name) row = &r;
    if (!row) {
      rows.push_back({});
      row = &rows.back();
      row->method = run.method;
      row->arch = run.arch_name;
    }
    row->accuracy += run.overall.accuracy;
    row->mcc += run.overall.mcc;
    row->auc += finite_or_zero(run.overall.auc);
    row->drift_count += run.overall.drift_count;
    row->labels_requested += static_cast<double>(run.labels_requested);
    row->retrains += run.retrain_count;
    row->seeds += 1;
  }
  for (auto& row : rows) {
    const double n = std::max(1, row.seeds);
    row.accuracy /= n;
    row.mcc /= n;
    row.auc /= n;
    row.drift_count /= n;
    row.labels_requested /= n;
    row.retrains /= n;
  }
  return rows;
}

std::filesystem::path write_metrics_csv(const ExperimentResult& result,
                                        const fs::path& out_dir) {
  CsvWriter csv({"method", "arch", "seed", "chunk", "accuracy", "mcc", "auc", "drifted"});
  for (const auto& run : result.runs)
    for (const auto& record : run.chunk_metrics)
      csv.add_row({run.method, run.arch_name, std::to_string(run.seed),
                   std::to_string(record.chunk_index), format_double(record.accuracy),
                   format_double(record.mcc), format_double(record.auc),
                   std::to_string(record.drifted)});
  const fs::path path = out_dir / "metrics.csv";
  csv.write(path);
  return path;
}

std::filesystem::path write_drift_events_csv(const ExperimentResult& result,
                                             const fs::path& out_dir) {
  CsvWriter csv({"method", "arch", "seed", "chunk_index", "instance_index",
                 "detector_width_before", "labels_requested"});
  for (const auto& run : result.runs)
    for (const auto& event : run.drift_events)
      csv.add_row({run.method, run.arch_name, std::to_string(run.seed),
                   std::to_string(event.chunk_index), std::to_string(event.instance_index),
                   std::to_string(event.detector_width_before),
                   std::to_string(event.labels_requested)});
  const fs::path path = out_dir / "drift_events.csv";
  csv.write(path);
  return path;
}

std::filesystem::path write_summary_json(const ExperimentConfig& cfg,
                                         const ExperimentResult& result,
                                         const fs::path& out_dir) {
  ordered_json summary;
  summary["version"] = kVersion;
  summary["config_hash"] = result.config_hash;
  summary["arch"] = cfg.arch;
  summary["dataset"] = cfg.dataset.kind == "csv" ? cfg.dataset.csv_path : cfg.dataset.kind;
  summary["seeds"] = cfg.seeds;

  int drift_total = 0;
  ordered_json methods = ordered_json::object();
  for (const auto& row : aggregate(result)) {
    ordered_json entry;
    entry["accuracy_mean"] = row.accuracy;
    entry["mcc_mean"] = row.mcc;
    entry["auc_mean"] = row.auc;
    entry["drift_count_mean"] = row.drift_count;
    entry["labels_requested_mean"] = row.labels_requested;
    entry["retrains_mean"] = row.retrains;
    ordered_json per_seed = ordered_json::array();
    for (const auto& run : result.runs) {
      if (run.method != row.method || run.arch_name != row.arch) continue;
      drift_total += static_cast<int>(run.drift_events.size());
      ordered_json one;
      one["seed"] = run.seed;
      one["accuracy"] = run.overall.accuracy;
      one["mcc"] = run.overall.mcc;
      one["auc"] = run.overall.auc;
      one["drift_count"] = run.overall.drift_count;
      one["labels_requested"] = run.labels_requested;
      one["retrains"] = run.retrain_count;
      one["effective_k"] = run.last_effective_k;
      one["notes"] = run.notes;
      per_seed.push_back(std::move(one));
    }
    entry["per_seed"] = std::move(per_seed);
    methods[row.method] = std::move(entry);
  }
  summary["methods"] = std::move(methods);
  summary["drift_events_total"] = drift_total;

  const fs::path path = out_dir / "summary.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << summary.dump(2) << '\n';
  return path;
}

std::filesystem::path write_compare_csv(const std::vector<CompareRow>& rows,
                                        const fs::path& out_dir) {
  CsvWriter csv({"method", "arch", "accuracy", "mcc", "auc", "drift_count",
                 "labels_requested", "retrains", "seeds"});
  for (const auto& row : rows)
    csv.add_row({row.method, row.arch, format_double(row.accuracy),
                 format_double(row.mcc), format_double(row.auc),
                 format_double(row.drift_count), format_double(row.labels_requested),
                 format_double(row.retrains), std::to_string(row.seeds)});
  const fs::path path = out_dir / "compare.csv";
  csv.write(path);
  return path;
}

std::filesystem::path write_theory_csv(const std::vector<TheorySweepRow>& rows,
                                       const fs::path& out_dir) {
  CsvWriter csv({"delta", "m", "init_count", "k_anonymity", "bound", "recur_freq",
                 "trials"});
  for (const auto& row : rows)
    csv.add_row({format_double(row.delta), std::to_string(row.m),
                 std::to_string(row.init_count), format_double(row.k_anonymity),
                 format_double(row.bound), format_double(row.recur_freq),
                 std::to_string(row.trials)});
  const fs::path path = out_dir / "theory.csv";
  csv.write(path);
  return path;
}

std::filesystem::path write_manifest(const ExperimentConfig& cfg,
                                     const std::vector<fs::path>& outputs,
                                     double wall_seconds, const fs::path& out_dir) {
  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = config_hash(cfg);
  manifest["config"] = canonical_config_lines(cfg);
  manifest["seeds"] = cfg.seeds;
  ordered_json files = ordered_json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  manifest["outputs"] = std::move(files);

  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  manifest["created_utc"] = stamp;
  manifest["wall_seconds"] = wall_seconds;

  const fs::path path = out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
  return path;
}

std::vector<std::filesystem::path> write_run_charts(const ExperimentResult& result,
                                                    const fs::path& out_dir) {
  std::vector<fs::path> paths;
  for (const auto& run : result.runs) {
    const std::string base = run.method + "_" + run.arch_name + "_seed" +
                             std::to_string(run.seed);

    SvgSeries acc{"accuracy per chunk", {}};
    std::vector<int> drift_chunks;
    for (const auto& record : run.chunk_metrics) acc.values.push_back(record.accuracy);
    for (const auto& event : run.drift_events) drift_chunks.push_back(event.chunk_index);
    fs::path acc_path = out_dir / ("accuracy_" + base + ".svg");
    svg_line_chart(acc_path, "accuracy per chunk: " + base, {acc}, drift_chunks);
    paths.push_back(std::move(acc_path));

    if (!run.signal_series.empty()) {
      SvgSeries sig{"detector input per instance", run.signal_series};
      std::vector<int> marks;
      for (const auto& event : run.drift_events) marks.push_back(event.instance_index);
      fs::path sig_path = out_dir / ("signal_" + base + ".svg");
      svg_line_chart(sig_path, "detector input: " + base, {sig}, marks);
      paths.push_back(std::move(sig_path));
    }
  }
  return paths;
}

std::string render_compare_table(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof line, "%-12s %-6s %9s %9s %9s %8s %9s %9s\n", "method",
                "arch", "accuracy", "mcc", "auc", "drifts", "labels", "retrains");
  out << line;
  out << std::string(76, '-') << '\n';
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-12s %-6s %9.4f %9.4f %9.4f %8.1f %9.1f %9.1f\n",
                  row.method.c_str(), row.arch.c_str(), row.accuracy, row.mcc, row.auc,
                  row.drift_count, row.labels_requested, row.retrains);
    out << line;
  }
  return out.str();
}

namespace {

void ensure_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " + out_dir.string());
}

}  // namespace

std::vector<std::filesystem::path> cmd_run(const ExperimentConfig& cfg,
                                           const fs::path& out_dir, bool svg) {
  ensure_dir(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult result = run_methods(cfg);

  std::vector<fs::path> outputs;
  outputs.push_back(write_metrics_csv(result, out_dir));
  outputs.push_back(write_drift_events_csv(result, out_dir));
  outputs.push_back(write_summary_json(cfg, result, out_dir));
  if (svg)
    for (auto& p : write_run_charts(result, out_dir)) outputs.push_back(std::move(p));

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  outputs.push_back(write_manifest(cfg, outputs, wall, out_dir));
  return outputs;
}

std::vector<std::filesystem::path> cmd_compare(const ExperimentConfig& cfg,
                                               const fs::path& out_dir,
                                               std::string* table_text) {
  if (resolve_methods(cfg).size() < 2)
    throw ConfigError("compare needs at least two methods");
  ensure_dir(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult result = run_methods(cfg);
  const std::vector<CompareRow> rows = aggregate(result);

  std::vector<fs::path> outputs;
  outputs.push_back(write_compare_csv(rows, out_dir));
  outputs.push_back(write_metrics_csv(result, out_dir));
  outputs.push_back(write_drift_events_csv(result, out_dir));
  outputs.push_back(write_summary_json(cfg, result, out_dir));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  outputs.push_back(write_manifest(cfg, outputs, wall, out_dir));
  if (table_text) *table_text = render_compare_table(rows);
  return outputs;
}

std::vector<std::filesystem::path> cmd_theory(const ExperimentConfig& cfg,
                                              const fs::path& out_dir) {
  ensure_dir(out_dir);
  const auto t0 = std::chrono::steady_clock::now();

  // The sweep pool is a stationary stream from the configured generator.
  DatasetSpec pool_spec = cfg.dataset;
  pool_spec.kind = "sine";
  pool_spec.n = cfg.theory.pool_n;
  pool_spec.drift = "none";
  const LabeledDataset pool = make_dataset(pool_spec, cfg.init_frac);

  const Architecture arch = resolve_architecture(cfg.arch, pool.cols(), pool.num_classes);
  const std::vector<TheorySweepRow> rows = recurrence_sweep(
      arch, pool, cfg.theory.ms, cfg.theory.deltas, cfg.theory.init_counts,
      cfg.theory.trials, cfg.train, cfg.theory.subsample_size, cfg.seeds.front());

  std::vector<fs::path> outputs;
  outputs.push_back(write_theory_csv(rows, out_dir));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  outputs.push_back(write_manifest(cfg, outputs, wall, out_dir));
  return outputs;
}

std::vector<std::filesystem::path> cmd_gen(const ExperimentConfig& cfg,
                                           const fs::path& out_dir) {
  ensure_dir(out_dir);
  const LabeledDataset ds = make_dataset(cfg.dataset, cfg.init_frac);
  const fs::path path = out_dir / "dataset.csv";
  write_csv(ds, path, cfg.dataset.label_column);
  std::vector<fs::path> outputs{path};
  outputs.push_back(write_manifest(cfg, outputs, 0.0, out_dir));
  return outputs;
}

}  // namespace ipdd
