#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipdd/config.hpp"
#include "ipdd/stream.hpp"
#include "ipdd/theory.hpp"

namespace ipdd {

/// All runs of one experiment: every configured method crossed with every
/// seed, in a fixed declaration order.
struct ExperimentResult {
  std::vector<RunResult> runs;
  std::string config_hash;
};

/// Executes the configured methods over the configured seeds. Runs are
/// independent and execute on a worker pool; output order is deterministic.
ExperimentResult run_methods(const ExperimentConfig& cfg);

/// Aggregate row of the comparison table (means over seeds).
struct CompareRow {
  std::string method;
  std::string arch;
  double accuracy = 0.0;
  double mcc = 0.0;
  double auc = 0.0;
  double drift_count = 0.0;
  double labels_requested = 0.0;
  double retrains = 0.0;
  int seeds = 0;
};

std::vector<CompareRow> aggregate(const ExperimentResult& result);

/// File emitters. Every file is re-parseable by the tool itself; numeric
/// content is a pure function of (config hash, seeds). Wall-clock fields are
/// confined to the manifest.
std::filesystem::path write_metrics_csv(const ExperimentResult& result,
                                        const std::filesystem::path& out_dir);
std::filesystem::path write_drift_events_csv(const ExperimentResult& result,
                                             const std::filesystem::path& out_dir);
std::filesystem::path write_summary_json(const ExperimentConfig& cfg,
                                         const ExperimentResult& result,
                                         const std::filesystem::path& out_dir);
std::filesystem::path write_compare_csv(const std::vector<CompareRow>& rows,
                                        const std::filesystem::path& out_dir);
std::filesystem::path write_theory_csv(const std::vector<TheorySweepRow>& rows,
                                       const std::filesystem::path& out_dir);
std::filesystem::path write_manifest(const ExperimentConfig& cfg,
                                     const std::vector<std::filesystem::path>& outputs,
                                     double wall_seconds,
                                     const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_run_charts(const ExperimentResult& result,
                                                    const std::filesystem::path& out_dir);

/// Renders the comparison table for the terminal.
std::string render_compare_table(const std::vector<CompareRow>& rows);

/// Command bodies used by the CLI: emit files under out_dir and return the
/// paths written.
std::vector<std::filesystem::path> cmd_run(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir,
                                           bool svg);
std::vector<std::filesystem::path> cmd_compare(const ExperimentConfig& cfg,
                                               const std::filesystem::path& out_dir,
                                               std::string* table_text = nullptr);
std::vector<std::filesystem::path> cmd_theory(const ExperimentConfig& cfg,
                                              const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> cmd_gen(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir);

}  // namespace ipdd
