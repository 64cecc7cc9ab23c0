#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fraudbench/graph.hpp"
#include "fraudbench/splits.hpp"

namespace fraudbench {

enum class ModelKind { majority, logistic, gcn, sage_mean, pcgnn };

ModelKind model_kind_from_string(const std::string& name);
const char* to_string(ModelKind kind);

struct PcgnnParams {
  int pick_size = 200;            // balanced node draws per epoch
  int oversample_k = 5;           // nearest same-class neighbours added per minority pick
  double undersample_keep = 0.5;  // fraction of a majority pick's neighbours kept
};

struct ModelSpec {
  ModelKind kind = ModelKind::logistic;
  int hidden_dim = 16;
  int layers = 2;  // 1 or 2
  PcgnnParams pcgnn;
};

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  enum class ClassWeighting { none, inverse_frequency };
  ClassWeighting class_weighting = ClassWeighting::none;
  int patience = 30;  // early-stopping patience on validation AUC; 0 disables
  std::uint64_t seed = 0;
};

/// Per-feature training-split standardization. A feature with zero spread
/// is marked constant (std 0) and maps to 0.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

struct TrainedModel {
  ModelSpec spec;
  int feature_dim = 0;
  Standardizer standardizer;
  Eigen::VectorXd params;  // flat parameter vector, layout fixed per kind
  std::int8_t majority_label = 0;
  int epochs_run = 0;
  double final_loss = 0.0;
};

/// Symmetric normalized operator D^(-1/2) (A + I) D^(-1/2) for one
/// relation, where A is the binary symmetrized adjacency (weights and
/// directions are ignored).
Eigen::SparseMatrix<double> normalized_adjacency(const MultiGraph& graph, int relation);

/// Validation data for early stopping when it lives on a different window
/// than the training graph. eval_mask selects the scored nodes.
struct ValContext {
  const MultiGraph* graph = nullptr;
  const NodeTable* nodes = nullptr;
  std::vector<char> eval_mask;
};

/// Full-batch deterministic training: binary cross-entropy (optionally
/// class-weighted) minimized with the adaptive-moment update (beta1 0.9,
/// beta2 0.999, eps 1e-8) at a fixed learning rate. When val is null the
/// validation part of the split, on the training graph, drives early
/// stopping. pcgnn retrains on a freshly rebalanced subgraph every epoch
/// and is scored on the untouched graph.
TrainedModel train_model(const ModelSpec& spec, const MultiGraph& graph,
                         const NodeTable& nodes, const SplitAssignment& split,
                         const TrainConfig& cfg, const ValContext* val = nullptr);

/// Rebalanced training subgraph, single relation, original graph untouched.
/// node_ids maps subgraph-local ids to original ids; picked holds original
/// ids with multiplicity.
struct RebalanceResult {
  MultiGraph subgraph;
  std::vector<std::int32_t> node_ids;
  std::vector<std::int32_t> picked;
};

/// Pick: pick_size draws over train nodes with probability proportional to
/// inverse class frequency (with replacement). Choose: each picked minority
/// node keeps all neighbours and gains edges to its oversample_k nearest
/// minority train nodes by cosine distance on standardized features; each
/// picked majority node keeps only the ceil(keep * degree) nearest.
RebalanceResult pcgnn_rebalance(const MultiGraph& graph, const NodeTable& nodes,
                                const std::vector<char>& train_mask,
                                const PcgnnParams& params, std::uint64_t seed);

/// Per-node fraud probability in [0, 1]; hard label is score >= 0.5.
Eigen::VectorXd predict_scores(const TrainedModel& model, const MultiGraph& graph,
                               const NodeTable& nodes);

/// Max relative error between analytic gradients and central finite
/// differences (step 1e-5, evaluated in long double) over every parameter
/// coordinate at a seeded random point.
double gradient_check(const ModelSpec& spec, const MultiGraph& graph,
                      const NodeTable& nodes, const SplitAssignment& split,
                      std::uint64_t seed);

/// model.json round-trip; numbers carry 17 significant digits so 64-bit
/// values survive exactly.
void save_model(const std::filesystem::path& file, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& file);

}  // namespace fraudbench
