#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fraudbench/bench.hpp"
#include "fraudbench/error.hpp"
#include "fraudbench/graph.hpp"
#include "fraudbench/metrics.hpp"
#include "fraudbench/models.hpp"
#include "fraudbench/sim.hpp"
#include "fraudbench/splits.hpp"

namespace py = pybind11;
using namespace fraudbench;

namespace {

std::vector<std::int8_t> to_labels(const std::vector<int>& values) {
  std::vector<std::int8_t> labels;
  labels.reserve(values.size());
  for (int v : values) labels.push_back(static_cast<std::int8_t>(v));
  return labels;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synthetic transaction-graph benchmarks for fraud detection models";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "FraudbenchError");

  py::class_<Transaction>(m, "Transaction")
      .def_readonly("tx_id", &Transaction::tx_id)
      .def_readonly("src", &Transaction::src)
      .def_readonly("dst", &Transaction::dst)
      .def_readonly("amount", &Transaction::amount)
      .def_readonly("month", &Transaction::month)
      .def_readonly("relation", &Transaction::relation)
      .def_readonly("illicit", &Transaction::illicit)
      .def("__repr__", [](const Transaction& t) {
        return "Transaction(tx_id=" + std::to_string(t.tx_id) + ", src=" +
               std::to_string(t.src) + ", dst=" + std::to_string(t.dst) + ")";
      });

  py::class_<AccountTable>(m, "AccountTable")
      .def("__len__", &AccountTable::size)
      .def("labels",
           [](const AccountTable& a) {
             return std::vector<int>(a.labels.begin(), a.labels.end());
           })
      .def("count_label", &AccountTable::count_label);

  py::class_<WindowSpec>(m, "WindowSpec")
      .def(py::init<int, int>(), py::arg("first_month"), py::arg("last_month"))
      .def_readonly("first_month", &WindowSpec::first_month)
      .def_readonly("last_month", &WindowSpec::last_month);

  py::class_<MultiGraph>(m, "MultiGraph")
      .def_readonly("node_count", &MultiGraph::node_count)
      .def("relation_count", &MultiGraph::relation_count)
      .def("total_edge_weight", &MultiGraph::total_edge_weight)
      .def("edges", [](const MultiGraph& g, int relation) {
        std::vector<std::tuple<int, int, std::int64_t>> out;
        for (const auto& e : g.relations.at(relation))
          out.emplace_back(e.src, e.dst, e.weight);
        return out;
      });

  py::class_<NodeTable>(m, "NodeTable")
      .def_property_readonly("features",
                             [](const NodeTable& t) { return t.features; })
      .def("labels",
           [](const NodeTable& t) {
             return std::vector<int>(t.labels.begin(), t.labels.end());
           })
      .def("active", [](const NodeTable& t) {
        std::vector<bool> out(t.active.begin(), t.active.end());
        return out;
      });

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_property_readonly("kind",
                             [](const TrainedModel& m_) { return to_string(m_.spec.kind); })
      .def_readonly("epochs_run", &TrainedModel::epochs_run)
      .def_readonly("final_loss", &TrainedModel::final_loss);

  m.def("generate", [](const std::string& config_json) {
    return generate(sim_config_from_json(config_json));
  });
  m.def("generate_dataset", [](const std::string& config_path, const std::string& out_dir) {
    const auto [log, accounts] = generate(sim_config_from_file(config_path));
    export_dataset(out_dir, log, accounts);
    return log.size();
  });
  m.def("default_crossing_schedule", [](int months) {
    const auto schedule = default_crossing_schedule(months);
    return std::make_pair(schedule.legit_means, schedule.illicit_means);
  });
  m.def("mean_at", [](const std::vector<double>& legit, const std::vector<double>& illicit,
                      int label_class, int month) {
    return mean_at(DriftSchedule{legit, illicit}, label_class, month);
  });
  m.def("monthly_means", [](const TransactionLog& log) {
    std::vector<std::tuple<int, int, double, std::int64_t>> rows;
    for (const auto& r : monthly_means(log))
      rows.emplace_back(r.month, r.label_class, r.mean_amount, r.count);
    return rows;
  });

  m.def("build_graph", &build_graph, py::arg("log"), py::arg("accounts"), py::arg("window"));
  m.def("extract_features", &extract_features, py::arg("log"), py::arg("accounts"),
        py::arg("window"));
  m.def("imbalance_ratio",
        [](const std::vector<int>& labels) { return imbalance_ratio(to_labels(labels)); });
  m.def("export_dataset",
        [](const std::string& dir, const TransactionLog& log, const AccountTable& accounts) {
          export_dataset(dir, log, accounts);
        });
  m.def("load_dataset", [](const std::string& dir) {
    auto dataset = load_dataset(dir);
    return std::make_tuple(dataset.log, dataset.accounts, dataset.months);
  });

  m.def("stratified_split",
        [](const std::vector<int>& labels, const std::array<double, 3>& ratios,
           std::uint64_t seed) {
          const auto split = stratified_split(to_labels(labels), ratios, seed);
          std::vector<std::string> tags;
          tags.reserve(split.tags.size());
          for (auto t : split.tags) tags.emplace_back(to_string(t));
          return tags;
        },
        py::arg("labels"), py::arg("ratios") = std::array<double, 3>{0.6, 0.2, 0.2},
        py::arg("seed") = 0);

  m.def("classification_metrics",
        [](const std::vector<int>& labels, const std::vector<int>& predicted) {
          const auto r = classification_metrics(to_labels(labels), to_labels(predicted));
          py::dict d;
          d["f1_class0"] = r.f1_class0;
          d["f1_class1"] = r.f1_class1;
          d["f1_macro"] = r.f1_macro;
          d["f1_fraud"] = r.f1_fraud;
          d["tp"] = r.tp;
          d["fp"] = r.fp;
          d["tn"] = r.tn;
          d["fn"] = r.fn;
          return d;
        });
  m.def("auc", [](const std::vector<int>& labels, const std::vector<double>& scores) {
    return auc(to_labels(labels), scores);
  });

  m.def("train_model",
        [](const std::string& kind, const MultiGraph& graph, const NodeTable& nodes,
           const std::vector<std::string>& tags, std::uint64_t seed, int epochs) {
          ModelSpec spec;
          spec.kind = model_kind_from_string(kind);
          SplitAssignment split;
          for (const auto& tag : tags) {
            if (tag == "train")
              split.tags.push_back(SplitTag::train);
            else if (tag == "validation")
              split.tags.push_back(SplitTag::validation);
            else if (tag == "test")
              split.tags.push_back(SplitTag::test);
            else
              split.tags.push_back(SplitTag::excluded);
          }
          TrainConfig cfg;
          cfg.seed = seed;
          cfg.epochs = epochs;
          return train_model(spec, graph, nodes, split, cfg);
        },
        py::arg("kind"), py::arg("graph"), py::arg("nodes"), py::arg("tags"),
        py::arg("seed") = 0, py::arg("epochs") = 300);
  m.def("predict_scores", [](const TrainedModel& model, const MultiGraph& graph,
                             const NodeTable& nodes) {
    const Eigen::VectorXd scores = predict_scores(model, graph, nodes);
    return std::vector<double>(scores.data(), scores.data() + scores.size());
  });
  m.def("save_model", [](const std::string& file, const TrainedModel& model) {
    save_model(file, model);
  });
  m.def("load_model", [](const std::string& file) { return load_model(file); });

  m.def("run_experiment", [](const std::string& config_json, const std::string& out_dir) {
    const auto report = run_experiment(experiment_config_from_json(config_json), out_dir);
    py::dict d;
    d["dataset"] = report.dataset_name;
    d["config_hash"] = report.config_hash;
    py::dict cells;
    for (const auto& cell : report.cells) {
      py::dict c;
      c["f1_macro"] = cell.summary.f1_macro.mean;
      c["f1_fraud"] = cell.summary.f1_fraud.mean;
      if (cell.summary.auc) c["auc"] = cell.summary.auc->mean;
      cells[py::str(cell.model + "/" + cell.window)] = c;
    }
    d["cells"] = cells;
    return d;
  });
  m.def("run_experiment_file", [](const std::string& config_path, const std::string& out_dir) {
    run_experiment(experiment_config_from_file(config_path), out_dir);
  });
}
