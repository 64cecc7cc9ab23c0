#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fraudbench/metrics.hpp"
#include "fraudbench/models.hpp"
#include "fraudbench/sim.hpp"
#include "fraudbench/splits.hpp"

namespace fraudbench {

enum class Protocol { stratified, temporal };

const char* to_string(Protocol protocol);

struct ExperimentConfig {
  std::string name = "dataset";
  std::optional<SimConfig> generate;   // exactly one of generate / load_dir
  std::optional<std::string> load_dir;
  Protocol protocol = Protocol::stratified;
  std::vector<ModelSpec> models;
  TrainConfig train;
  std::vector<std::uint64_t> seeds;  // default: 10 consecutive from base 1
  std::array<double, 3> ratios = {0.6, 0.2, 0.2};
  WindowSpec train_window = {1, 4};
  std::vector<WindowSpec> test_windows = {{5, 8}, {9, 12}};
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig experiment_config_from_file(const std::string& path);

struct ReportCell {
  std::string model;
  std::string window;  // "full" for stratified, "months_a_b" for temporal
  AggregateSummary summary;
};

struct ExperimentReport {
  std::string dataset_name;
  Protocol protocol = Protocol::stratified;
  std::string config_hash;  // FNV-1a 64 over the canonical config text
  std::string tool_version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> models;
  std::vector<std::string> windows;
  std::vector<ReportCell> cells;  // model-major, window-minor order
  std::vector<MonthlyMeanRow> drift_curve;
};

enum class ReportFormat { md, csv };

/// Runs the full protocol for every seed: generate or load the dataset,
/// split, train every model, score every test window, aggregate over
/// seeds. Writes per-seed datasets, splits and model files plus
/// report.json, report.md, metrics.csv and driftcurve.csv under out_dir.
/// Deterministic end to end for a fixed config.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);

/// Re-emits report files from an assembled report. md renders mean ± std
/// tables with the strictly-best mean per column bolded; csv writes
/// metrics.csv and driftcurve.csv. Byte-deterministic.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 ReportFormat format);

void write_report_json(const ExperimentReport& report, const std::filesystem::path& file);
ExperimentReport read_report_json(const std::filesystem::path& file);

}  // namespace fraudbench
