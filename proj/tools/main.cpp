#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "fraudbench/bench.hpp"
#include "fraudbench/error.hpp"
#include "fraudbench/graph.hpp"
#include "fraudbench/sim.hpp"

namespace {

int run_generate(const std::string& config_path, const std::string& out_dir) {
  const auto config = fraudbench::sim_config_from_file(config_path);
  const auto [log, accounts] = fraudbench::generate(config);
  fraudbench::export_dataset(out_dir, log, accounts);
  std::printf("wrote %zu transactions, %lld accounts to %s\n", log.size(),
              static_cast<long long>(accounts.size()), out_dir.c_str());
  return 0;
}

int run_evaluate(const std::string& data_dir, const std::string& model,
                 const std::string& protocol, int seeds, const std::string& out_dir) {
  fraudbench::ExperimentConfig config;
  config.name = std::filesystem::path(data_dir).filename().string();
  if (config.name.empty()) config.name = "dataset";
  config.load_dir = data_dir;
  config.protocol =
      protocol == "temporal" ? fraudbench::Protocol::temporal : fraudbench::Protocol::stratified;
  fraudbench::ModelSpec spec;
  spec.kind = fraudbench::model_kind_from_string(model);
  config.models.push_back(spec);
  config.seeds.clear();
  for (int s = 1; s <= seeds; ++s) config.seeds.push_back(static_cast<std::uint64_t>(s));
  fraudbench::run_experiment(config, out_dir);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir) {
  const auto config = fraudbench::experiment_config_from_file(config_path);
  fraudbench::run_experiment(config, out_dir);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

int run_report(const std::string& in_dir, const std::string& format) {
  const auto report = fraudbench::read_report_json(std::filesystem::path(in_dir) / "report.json");
  fraudbench::emit_report(report, in_dir,
                          format == "csv" ? fraudbench::ReportFormat::csv
                                          : fraudbench::ReportFormat::md);
  std::printf("%s emitted to %s\n", format.c_str(), in_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraudbench: synthetic transaction graphs and fraud-model benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_dir, model, in_dir;
  std::string protocol = "stratified";
  std::string format = "md";
  int seeds = 10;

  auto* generate = app.add_subcommand("generate", "Generate a dataset from a simulator config");
  generate->add_option("--config", config_path, "Simulator config JSON")->required();
  generate->add_option("--out", out_dir, "Output dataset directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate one model on a stored dataset");
  evaluate->add_option("--data", data_dir, "Dataset directory")->required();
  evaluate->add_option("--model", model, "Model kind")->required();
  evaluate->add_option("--protocol", protocol, "stratified|temporal")
      ->check(CLI::IsMember({"stratified", "temporal"}));
  evaluate->add_option("--seeds", seeds, "Number of seeds (1..n)")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--out", out_dir, "Output directory")->required();

  auto* experiment = app.add_subcommand("experiment", "Run a full experiment config");
  experiment->add_option("--config", config_path, "Experiment config JSON")->required();
  experiment->add_option("--out", out_dir, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Re-emit report files from report.json");
  report->add_option("--in", in_dir, "Directory holding report.json")->required();
  report->add_option("--format", format, "md|csv")
      ->check(CLI::IsMember({"md", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(config_path, out_dir);
    if (evaluate->parsed()) return run_evaluate(data_dir, model, protocol, seeds, out_dir);
    if (experiment->parsed()) return run_experiment_cmd(config_path, out_dir);
    if (report->parsed()) return run_report(in_dir, format);
  } catch (const fraudbench::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
