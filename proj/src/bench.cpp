#include "fraudbench/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fraudbench/error.hpp"
#include "fraudbench/graph.hpp"
#include "json_util.hpp"

namespace fraudbench {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string window_label(const WindowSpec& w) {
  return "months_" + std::to_string(w.first_month) + "_" + std::to_string(w.last_month);
}

std::string window_title(const std::string& label) {
  if (label == "full") return "";
  WindowSpec w{};
  if (std::sscanf(label.c_str(), "months_%d_%d", &w.first_month, &w.last_month) == 2)
    return "months " + std::to_string(w.first_month) + "-" + std::to_string(w.last_month);
  return label;
}

}  // namespace

const char* to_string(Protocol protocol) {
  return protocol == Protocol::stratified ? "stratified" : "temporal";
}

namespace {

using detail::json;

ModelSpec model_spec_from_json(const json& entry) {
  ModelSpec spec;
  if (entry.is_string()) {
    spec.kind = model_kind_from_string(entry.get<std::string>());
    return spec;
  }
  if (!entry.is_object())
    throw ConfigError("models", "entries must be kind strings or objects");
  detail::reject_unknown_keys(entry, "models",
                              {"kind", "hidden_dim", "layers", "pick_size", "oversample_k",
                               "undersample_keep"});
  spec.kind = model_kind_from_string(
      detail::get_string(detail::require(entry, "models", "kind"), "models.kind"));
  if (const json* v = detail::find(entry, "hidden_dim"))
    spec.hidden_dim = static_cast<int>(detail::get_int(*v, "models.hidden_dim"));
  if (const json* v = detail::find(entry, "layers"))
    spec.layers = static_cast<int>(detail::get_int(*v, "models.layers"));
  if (const json* v = detail::find(entry, "pick_size"))
    spec.pcgnn.pick_size = static_cast<int>(detail::get_int(*v, "models.pick_size"));
  if (const json* v = detail::find(entry, "oversample_k"))
    spec.pcgnn.oversample_k = static_cast<int>(detail::get_int(*v, "models.oversample_k"));
  if (const json* v = detail::find(entry, "undersample_keep"))
    spec.pcgnn.undersample_keep = detail::get_number<double>(*v, "models.undersample_keep");
  return spec;
}

WindowSpec window_from_json(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(field, "expected [first_month, last_month]");
  WindowSpec w;
  w.first_month = static_cast<int>(detail::get_int(v[0], field));
  w.last_month = static_cast<int>(detail::get_int(v[1], field));
  return w;
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  nlohmann::ordered_json root;
  root["name"] = cfg.name;
  if (cfg.generate) root["dataset"]["generate"] = nlohmann::ordered_json::parse(
      sim_config_to_json(*cfg.generate));
  if (cfg.load_dir) root["dataset"]["load"] = *cfg.load_dir;
  root["protocol"] = to_string(cfg.protocol);
  for (const auto& m : cfg.models) {
    root["models"].push_back({{"kind", to_string(m.kind)},
                              {"hidden_dim", m.hidden_dim},
                              {"layers", m.layers},
                              {"pick_size", m.pcgnn.pick_size},
                              {"oversample_k", m.pcgnn.oversample_k},
                              {"undersample_keep", m.pcgnn.undersample_keep}});
  }
  root["train"] = {{"epochs", cfg.train.epochs},
                   {"learning_rate", cfg.train.learning_rate},
                   {"weight_decay", cfg.train.weight_decay},
                   {"class_weighting",
                    cfg.train.class_weighting == TrainConfig::ClassWeighting::none
                        ? "none"
                        : "inverse_frequency"},
                   {"patience", cfg.train.patience}};
  root["seeds"] = cfg.seeds;
  root["ratios"] = cfg.ratios;
  root["temporal"] = {{"train", {cfg.train_window.first_month, cfg.train_window.last_month}}};
  for (const auto& w : cfg.test_windows)
    root["temporal"]["tests"].push_back({w.first_month, w.last_month});
  return root.dump();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  using namespace detail;
  const json root = parse_or_throw(text, "experiment config");
  if (!root.is_object()) throw SchemaError("experiment config: top level must be an object");
  reject_unknown_keys(root, "",
                      {"name", "dataset", "protocol", "models", "train", "seeds", "ratios",
                       "temporal"});

  ExperimentConfig cfg;
  if (const json* v = find(root, "name")) cfg.name = get_string(*v, "name");

  const json& dataset = require(root, "", "dataset");
  if (!dataset.is_object()) throw ConfigError("dataset", "expected an object");
  reject_unknown_keys(dataset, "dataset", {"generate", "load"});
  if (const json* v = find(dataset, "generate"))
    cfg.generate = sim_config_from_json(v->dump());
  if (const json* v = find(dataset, "load"))
    cfg.load_dir = get_string(*v, "dataset.load");
  if (cfg.generate.has_value() == cfg.load_dir.has_value())
    throw ConfigError("dataset", "exactly one of generate / load is required");

  if (const json* v = find(root, "protocol")) {
    const auto p = get_string(*v, "protocol");
    if (p == "stratified")
      cfg.protocol = Protocol::stratified;
    else if (p == "temporal")
      cfg.protocol = Protocol::temporal;
    else
      throw ConfigError("protocol", "must be 'stratified' or 'temporal'");
  }

  const json& models = require(root, "", "models");
  if (!models.is_array() || models.empty())
    throw ConfigError("models", "expected a non-empty array");
  for (const json& entry : models) cfg.models.push_back(model_spec_from_json(entry));

  if (const json* train = find(root, "train")) {
    if (!train->is_object()) throw ConfigError("train", "expected an object");
    reject_unknown_keys(*train, "train",
                        {"epochs", "learning_rate", "weight_decay", "class_weighting",
                         "patience"});
    if (const json* v = find(*train, "epochs"))
      cfg.train.epochs = static_cast<int>(get_int(*v, "train.epochs"));
    if (const json* v = find(*train, "learning_rate"))
      cfg.train.learning_rate = get_number<double>(*v, "train.learning_rate");
    if (const json* v = find(*train, "weight_decay"))
      cfg.train.weight_decay = get_number<double>(*v, "train.weight_decay");
    if (const json* v = find(*train, "class_weighting")) {
      const auto w = get_string(*v, "train.class_weighting");
      if (w == "none")
        cfg.train.class_weighting = TrainConfig::ClassWeighting::none;
      else if (w == "inverse_frequency")
        cfg.train.class_weighting = TrainConfig::ClassWeighting::inverse_frequency;
      else
        throw ConfigError("train.class_weighting", "must be 'none' or 'inverse_frequency'");
    }
    if (const json* v = find(*train, "patience"))
      cfg.train.patience = static_cast<int>(get_int(*v, "train.patience"));
  }

  if (const json* seeds = find(root, "seeds")) {
    if (seeds->is_array()) {
      for (const json& v : *seeds) cfg.seeds.push_back(get_uint(v, "seeds"));
    } else if (seeds->is_object()) {
      reject_unknown_keys(*seeds, "seeds", {"base", "count"});
      const auto base = get_uint(require(*seeds, "seeds", "base"), "seeds.base");
      const auto count = get_int(require(*seeds, "seeds", "count"), "seeds.count");
      if (count < 1) throw ConfigError("seeds.count", "must be >= 1");
      for (std::int64_t i = 0; i < count; ++i)
        cfg.seeds.push_back(base + static_cast<std::uint64_t>(i));
    } else {
      throw ConfigError("seeds", "expected an array or {base, count}");
    }
  } else {
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  }

  if (const json* v = find(root, "ratios")) {
    if (!v->is_array() || v->size() != 3)
      throw ConfigError("ratios", "expected [train, validation, test]");
    for (int k = 0; k < 3; ++k) cfg.ratios[k] = get_number<double>((*v)[k], "ratios");
  }

  if (const json* temporal = find(root, "temporal")) {
    if (!temporal->is_object()) throw ConfigError("temporal", "expected an object");
    reject_unknown_keys(*temporal, "temporal", {"train", "tests"});
    if (const json* v = find(*temporal, "train"))
      cfg.train_window = window_from_json(*v, "temporal.train");
    if (const json* v = find(*temporal, "tests")) {
      if (!v->is_array() || v->empty())
        throw ConfigError("temporal.tests", "expected a non-empty array of windows");
      cfg.test_windows.clear();
      for (const json& w : *v)
        cfg.test_windows.push_back(window_from_json(w, "temporal.tests"));
    }
  }

  std::set<std::uint64_t> distinct(cfg.seeds.begin(), cfg.seeds.end());
  if (cfg.seeds.empty() || distinct.size() != cfg.seeds.size())
    throw ConfigError("seeds", "must be non-empty and distinct");
  return cfg;
}

ExperimentConfig experiment_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return experiment_config_from_json(buffer.str());
}

namespace {

struct SeedOutcome {
  std::vector<MetricsRecord> by_window;  // aligned with report window order
};

MetricsRecord evaluate_nodes(const Eigen::VectorXd& scores, const NodeTable& nodes,
                             const std::vector<char>& eval_mask) {
  std::vector<std::int8_t> labels, predicted;
  std::vector<double> node_scores;
  for (std::size_t i = 0; i < eval_mask.size(); ++i) {
    if (!eval_mask[i]) continue;
    labels.push_back(nodes.labels[i]);
    predicted.push_back(scores[static_cast<Eigen::Index>(i)] >= 0.5 ? 1 : 0);
    node_scores.push_back(scores[static_cast<Eigen::Index>(i)]);
  }
  MetricsRecord record = classification_metrics(labels, predicted);
  record.auc = auc(labels, node_scores);
  return record;
}

template <typename Fn>
auto annotate(const std::string& model, std::uint64_t seed, const std::string& stage,
              Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigLikeError& e) {
    throw ConfigLikeError("model=" + model + " seed=" + std::to_string(seed) +
                          " stage=" + stage + ": " + e.what());
  } catch (const Error& e) {
    throw Error("model=" + model + " seed=" + std::to_string(seed) + " stage=" + stage +
                ": " + e.what());
  }
}

AggregateSummary aggregate_cell(const std::vector<MetricsRecord>& records) {
  if (records.size() >= 2) return aggregate_runs(records);
  AggregateSummary agg;
  agg.runs = 1;
  const auto& r = records.at(0);
  agg.f1_class0 = {r.f1_class0, 0.0};
  agg.f1_class1 = {r.f1_class1, 0.0};
  agg.f1_macro = {r.f1_macro, 0.0};
  agg.f1_fraud = {r.f1_fraud, 0.0};
  if (r.auc) agg.auc = MetricSummary{*r.auc, 0.0};
  return agg;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir) {
  if (cfg.models.empty()) throw ConfigError("models", "at least one model is required");
  if (cfg.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (cfg.generate.has_value() == cfg.load_dir.has_value())
    throw ConfigError("dataset", "exactly one of generate / load is required");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory: " + out_dir.string());

  std::optional<Dataset> loaded;
  if (cfg.load_dir) loaded = load_dataset(*cfg.load_dir);

  ExperimentReport report;
  report.dataset_name = cfg.name;
  report.protocol = cfg.protocol;
  report.config_hash = fnv1a_hex(canonical_config_text(cfg));
  report.tool_version = kToolVersion;
  report.seeds = cfg.seeds;
  for (const auto& m : cfg.models) report.models.push_back(to_string(m.kind));
  if (cfg.protocol == Protocol::stratified) {
    report.windows = {"full"};
  } else {
    for (const auto& w : cfg.test_windows) report.windows.push_back(window_label(w));
  }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<MetricsRecord>> cells;

  for (const auto seed : cfg.seeds) {
    TransactionLog log;
    AccountTable accounts;
    int months = 0;
    if (cfg.generate) {
      SimConfig sim = *cfg.generate;
      sim.seed = seed;
      auto generated = generate(sim);
      log = std::move(generated.first);
      accounts = std::move(generated.second);
      months = sim.months;
      export_dataset(out_dir / "seeds" / ("seed_" + std::to_string(seed)) / "dataset", log,
                     accounts);
    } else {
      log = loaded->log;
      accounts = loaded->accounts;
      months = loaded->months;
    }
    if (log.empty()) throw ValueError("dataset has no transactions");
    if (seed == cfg.seeds.front()) report.drift_curve = monthly_means(log);

    const auto seed_dir = out_dir / "seeds" / ("seed_" + std::to_string(seed));
    std::filesystem::create_directories(seed_dir / "models", ec);
    if (ec) throw IoError("cannot create directory: " + (seed_dir / "models").string());

    if (cfg.protocol == Protocol::stratified) {
      const WindowSpec window{1, months};
      const MultiGraph graph = build_graph(log, accounts, window);
      const NodeTable nodes = extract_features(log, accounts, window);
      const SplitAssignment split = stratified_split(accounts.labels, cfg.ratios, seed);
      export_splits(seed_dir / "splits.csv", split);
      const auto test_mask = split.mask(SplitTag::test);

      for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const auto& spec = cfg.models[mi];
        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = seed;
        const std::string name = to_string(spec.kind);
        const TrainedModel model = annotate(name, seed, "train", [&] {
          return train_model(spec, graph, nodes, split, train_cfg);
        });
        save_model(seed_dir / "models" / (name + ".model.json"), model);
        const MetricsRecord record = annotate(name, seed, "evaluate", [&] {
          return evaluate_nodes(predict_scores(model, graph, nodes), nodes, test_mask);
        });
        cells[{mi, 0}].push_back(record);
      }
    } else {
      // Reserve the last training month as the validation window when early
      // stopping is on and the training window is longer than one month.
      WindowSpec fit_window = cfg.train_window;
      std::optional<WindowSpec> val_window;
      if (cfg.train.patience > 0 && fit_window.last_month > fit_window.first_month) {
        val_window = WindowSpec{fit_window.last_month, fit_window.last_month};
        fit_window.last_month -= 1;
      }
      std::vector<WindowSpec> eval_windows;
      if (val_window) eval_windows.push_back(*val_window);
      eval_windows.insert(eval_windows.end(), cfg.test_windows.begin(),
                          cfg.test_windows.end());
      auto datasets = temporal_windows(log, accounts, fit_window, eval_windows);

      const WindowDataset& train_ds = datasets.front();
      const WindowDataset* val_ds = val_window ? &datasets[1] : nullptr;
      const std::size_t first_test = val_window ? 2 : 1;

      SplitAssignment split;
      split.tags.assign(accounts.labels.size(), SplitTag::excluded);
      for (std::size_t i = 0; i < split.tags.size(); ++i)
        if (train_ds.nodes.active[i]) split.tags[i] = SplitTag::train;
      export_splits(seed_dir / "splits.csv", split);

      ValContext val_ctx;
      if (val_ds) {
        val_ctx.graph = &val_ds->graph;
        val_ctx.nodes = &val_ds->nodes;
        val_ctx.eval_mask.assign(val_ds->nodes.active.begin(), val_ds->nodes.active.end());
      }

      for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const auto& spec = cfg.models[mi];
        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = seed;
        const std::string name = to_string(spec.kind);
        const TrainedModel model = annotate(name, seed, "train", [&] {
          return train_model(spec, train_ds.graph, train_ds.nodes, split, train_cfg,
                             val_ds ? &val_ctx : nullptr);
        });
        save_model(seed_dir / "models" / (name + ".model.json"), model);
        for (std::size_t wi = first_test; wi < datasets.size(); ++wi) {
          const auto& ds = datasets[wi];
          const MetricsRecord record = annotate(name, seed, "evaluate", [&] {
            std::vector<char> eval_mask(ds.nodes.active.begin(), ds.nodes.active.end());
            return evaluate_nodes(predict_scores(model, ds.graph, ds.nodes), ds.nodes,
                                  eval_mask);
          });
          cells[{mi, wi - first_test}].push_back(record);
        }
      }
    }
  }

  for (std::size_t mi = 0; mi < report.models.size(); ++mi) {
    for (std::size_t wi = 0; wi < report.windows.size(); ++wi) {
      ReportCell cell;
      cell.model = report.models[mi];
      cell.window = report.windows[wi];
      cell.summary = aggregate_cell(cells.at({mi, wi}));
      report.cells.push_back(std::move(cell));
    }
  }

  write_report_json(report, out_dir / "report.json");
  emit_report(report, out_dir, ReportFormat::md);
  emit_report(report, out_dir, ReportFormat::csv);
  return report;
}

namespace {

class FileWriter {
 public:
  explicit FileWriter(const std::filesystem::path& file) : path_(file.string()) {
    out_ = std::fopen(path_.c_str(), "wb");
    if (!out_) throw IoError("cannot open for writing: " + path_);
  }
  ~FileWriter() {
    if (out_) std::fclose(out_);
  }
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  void write(const std::string& text) {
    if (std::fwrite(text.data(), 1, text.size(), out_) != text.size())
      throw IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::FILE* out_ = nullptr;
};

const ReportCell& cell_at(const ExperimentReport& report, const std::string& model,
                          const std::string& window) {
  for (const auto& cell : report.cells)
    if (cell.model == model && cell.window == window) return cell;
  throw ValueError("report is missing cell (" + model + ", " + window + ")");
}

struct MetricColumn {
  const char* title;
  const MetricSummary& (*take)(const AggregateSummary&);
};

const MetricSummary& take_f1_macro(const AggregateSummary& s) { return s.f1_macro; }
const MetricSummary& take_f1_fraud(const AggregateSummary& s) { return s.f1_fraud; }
const MetricSummary& take_auc(const AggregateSummary& s) {
  if (!s.auc) throw ValueError("report cell has no AUC");
  return *s.auc;
}

constexpr MetricColumn kColumns[] = {
    {"F1-macro", take_f1_macro}, {"F1-fraud", take_f1_fraud}, {"AUC", take_auc}};

}  // namespace

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                 ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory: " + out_dir.string());

  if (format == ReportFormat::csv) {
    {
      FileWriter out(out_dir / "metrics.csv");
      out.write("model,dataset,metric,mean,std,n_seeds\n");
      const char* metric_names[] = {"f1_macro", "f1_fraud", "auc"};
      for (const auto& model : report.models) {
        for (const auto& window : report.windows) {
          const auto& cell = cell_at(report, model, window);
          std::string dataset = report.dataset_name;
          if (window != "full") dataset += ":" + window;
          for (int k = 0; k < 3; ++k) {
            const MetricSummary& s = kColumns[k].take(cell.summary);
            out.write(model + "," + dataset + "," + metric_names[k] + "," +
                      format_g(s.mean) + "," + format_g(s.stddev) + "," +
                      std::to_string(cell.summary.runs) + "\n");
          }
        }
      }
    }
    {
      FileWriter out(out_dir / "driftcurve.csv");
      out.write("month,class,mean_amount,count\n");
      for (const auto& row : report.drift_curve) {
        out.write(std::to_string(row.month) + "," + std::to_string(row.label_class) + "," +
                  format_g(row.mean_amount) + "," + std::to_string(row.count) + "\n");
      }
    }
    return;
  }

  // Markdown: one row per model, metric columns grouped per window, best
  // mean per column in bold when strictly greatest.
  std::string md;
  md += "# fraudbench report\n\n";
  md += "- dataset: " + report.dataset_name + "\n";
  md += "- protocol: " + std::string(to_string(report.protocol)) + "\n";
  md += "- seeds:";
  for (auto s : report.seeds) md += " " + std::to_string(s);
  md += "\n- config hash: " + report.config_hash + "\n";
  md += "- tool version: " + report.tool_version + "\n\n";
  md += "## Results (mean \xC2\xB1 std over " + std::to_string(report.seeds.size()) +
        " seeds)\n\n";

  struct Column {
    std::string title;
    std::string window;
    int metric = 0;
  };
  std::vector<Column> columns;
  for (const auto& window : report.windows) {
    const std::string suffix =
        window_title(window).empty() ? "" : " (" + window_title(window) + ")";
    for (int k = 0; k < 3; ++k)
      columns.push_back({std::string(kColumns[k].title) + suffix, window, k});
  }

  md += "| Model |";
  for (const auto& c : columns) md += " " + c.title + " |";
  md += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) md += "---|";
  md += "\n";

  for (const auto& model : report.models) {
    md += "| " + model + " |";
    for (const auto& c : columns) {
      const MetricSummary& s = kColumns[c.metric].take(cell_at(report, model, c.window).summary);
      bool strictly_best = true;
      for (const auto& other : report.models) {
        if (other == model) continue;
        const MetricSummary& o =
            kColumns[c.metric].take(cell_at(report, other, c.window).summary);
        if (o.mean >= s.mean) {
          strictly_best = false;
          break;
        }
      }
      const std::string text =
          format_short(s.mean) + " \xC2\xB1 " + format_short(s.stddev);
      md += strictly_best ? " **" + text + "** |" : " " + text + " |";
    }
    md += "\n";
  }

  FileWriter out(out_dir / "report.md");
  out.write(md);
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& file) {
  nlohmann::ordered_json root;
  root["dataset"] = report.dataset_name;
  root["protocol"] = to_string(report.protocol);
  root["config_hash"] = report.config_hash;
  root["tool_version"] = report.tool_version;
  root["seeds"] = report.seeds;
  root["models"] = report.models;
  root["windows"] = report.windows;
  root["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : report.cells) {
    nlohmann::ordered_json c;
    c["model"] = cell.model;
    c["window"] = cell.window;
    c["runs"] = cell.summary.runs;
    auto put = [&](const char* name, const MetricSummary& s) {
      c[name] = {{"mean", s.mean}, {"std", s.stddev}};
    };
    put("f1_class0", cell.summary.f1_class0);
    put("f1_class1", cell.summary.f1_class1);
    put("f1_macro", cell.summary.f1_macro);
    put("f1_fraud", cell.summary.f1_fraud);
    if (cell.summary.auc) put("auc", *cell.summary.auc);
    root["cells"].push_back(std::move(c));
  }
  root["drift_curve"] = nlohmann::ordered_json::array();
  for (const auto& row : report.drift_curve) {
    root["drift_curve"].push_back({{"month", row.month},
                                   {"class", row.label_class},
                                   {"mean_amount", row.mean_amount},
                                   {"count", row.count}});
  }

  FileWriter out(file);
  out.write(root.dump(2) + "\n");
}

namespace {

ExperimentReport report_from_json(const detail::json& root) {
  ExperimentReport report;
  report.dataset_name = root.at("dataset").get<std::string>();
  report.protocol = root.at("protocol").get<std::string>() == "temporal"
                        ? Protocol::temporal
                        : Protocol::stratified;
  report.config_hash = root.at("config_hash").get<std::string>();
  report.tool_version = root.at("tool_version").get<std::string>();
  report.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
  report.models = root.at("models").get<std::vector<std::string>>();
  report.windows = root.at("windows").get<std::vector<std::string>>();
  for (const auto& c : root.at("cells")) {
    ReportCell cell;
    cell.model = c.at("model").get<std::string>();
    cell.window = c.at("window").get<std::string>();
    cell.summary.runs = c.at("runs").get<int>();
    auto take = [&](const char* name) {
      return MetricSummary{c.at(name).at("mean").get<double>(),
                           c.at(name).at("std").get<double>()};
    };
    cell.summary.f1_class0 = take("f1_class0");
    cell.summary.f1_class1 = take("f1_class1");
    cell.summary.f1_macro = take("f1_macro");
    cell.summary.f1_fraud = take("f1_fraud");
    if (c.contains("auc")) cell.summary.auc = take("auc");
    report.cells.push_back(std::move(cell));
  }
  for (const auto& r : root.at("drift_curve")) {
    report.drift_curve.push_back({r.at("month").get<int>(), r.at("class").get<int>(),
                                  r.at("mean_amount").get<double>(),
                                  r.at("count").get<std::int64_t>()});
  }
  return report;
}

}  // namespace

ExperimentReport read_report_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto root = detail::parse_or_throw(buffer.str(), file.string());
  try {
    return report_from_json(root);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
}

}  // namespace fraudbench
