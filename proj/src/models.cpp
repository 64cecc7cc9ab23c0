#include "fraudbench/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "fraudbench/error.hpp"
#include "fraudbench/metrics.hpp"
#include "fraudbench/rng.hpp"
#include "json_util.hpp"

namespace fraudbench {

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "majority") return ModelKind::majority;
  if (name == "logistic") return ModelKind::logistic;
  if (name == "gcn") return ModelKind::gcn;
  if (name == "sage_mean") return ModelKind::sage_mean;
  if (name == "pcgnn") return ModelKind::pcgnn;
  throw ConfigError("models", "unknown model kind '" + name + "'");
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::majority: return "majority";
    case ModelKind::logistic: return "logistic";
    case ModelKind::gcn: return "gcn";
    case ModelKind::sage_mean: return "sage_mean";
    case ModelKind::pcgnn: return "pcgnn";
  }
  return "logistic";
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    if (std[c] > 0.0)
      out.col(c) = (features.col(c).array() - mean[c]) / std[c];
    else
      out.col(c).setZero();
  }
  return out;
}

namespace {

Standardizer fit_standardizer(const Eigen::MatrixXd& features,
                              const std::vector<std::int32_t>& train_ids) {
  const Eigen::Index d = features.cols();
  Standardizer st;
  st.mean = Eigen::VectorXd::Zero(d);
  st.std = Eigen::VectorXd::Zero(d);
  if (train_ids.empty()) return st;
  const double n = static_cast<double>(train_ids.size());
  for (auto i : train_ids) st.mean += features.row(i).transpose();
  st.mean /= n;
  for (auto i : train_ids) {
    const Eigen::VectorXd diff = features.row(i).transpose() - st.mean;
    st.std += diff.cwiseProduct(diff);
  }
  st.std = (st.std / n).cwiseSqrt();
  for (Eigen::Index c = 0; c < d; ++c)
    if (st.std[c] < 1e-12) st.std[c] = 0.0;  // constant feature
  return st;
}

// Undirected neighbour sets per relation; weights and edge directions are
// ignored, self loops excluded.
std::vector<std::set<std::int32_t>> neighbour_sets(const MultiGraph& graph, int relation) {
  std::vector<std::set<std::int32_t>> nbr(graph.node_count);
  for (const auto& e : graph.relations[relation]) {
    nbr[e.src].insert(e.dst);
    nbr[e.dst].insert(e.src);
  }
  return nbr;
}

}  // namespace

Eigen::SparseMatrix<double> normalized_adjacency(const MultiGraph& graph, int relation) {
  if (relation < 0 || relation >= graph.relation_count())
    throw RelationError("relation " + std::to_string(relation) + " does not exist (graph has " +
                        std::to_string(graph.relation_count()) + ")");
  const auto n = graph.node_count;
  const auto nbr = neighbour_sets(graph, relation);

  Eigen::VectorXd inv_sqrt_degree(n);
  for (std::int64_t i = 0; i < n; ++i)
    inv_sqrt_degree[i] = 1.0 / std::sqrt(static_cast<double>(nbr[i].size() + 1));

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::int64_t i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, inv_sqrt_degree[i] * inv_sqrt_degree[i]);
    for (auto j : nbr[i])
      triplets.emplace_back(i, j, inv_sqrt_degree[i] * inv_sqrt_degree[j]);
  }
  Eigen::SparseMatrix<double> s(n, n);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Mean propagation over relations: element-wise average of the
// per-relation operators.
SpMat averaged_normalized_adjacency(const MultiGraph& graph) {
  SpMat sum = normalized_adjacency(graph, 0);
  for (int r = 1; r < graph.relation_count(); ++r) sum = sum + normalized_adjacency(graph, r);
  return sum * (1.0 / static_cast<double>(graph.relation_count()));
}

// Row-normalized neighbour mean (no self loop); isolated rows stay zero.
SpMat averaged_neighbour_mean(const MultiGraph& graph) {
  const auto n = graph.node_count;
  SpMat sum(n, n);
  for (int r = 0; r < graph.relation_count(); ++r) {
    const auto nbr = neighbour_sets(graph, r);
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::int64_t i = 0; i < n; ++i) {
      if (nbr[i].empty()) continue;
      const double w = 1.0 / static_cast<double>(nbr[i].size());
      for (auto j : nbr[i]) triplets.emplace_back(i, j, w);
    }
    SpMat m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    sum = r == 0 ? m : SpMat(sum + m);
  }
  return sum * (1.0 / static_cast<double>(graph.relation_count()));
}

struct ParamBlock {
  int offset = 0;
  int rows = 0;
  int cols = 0;
  bool decay = false;  // weight matrices decay, biases do not
};

struct Layout {
  ModelKind kind = ModelKind::logistic;
  int feature_dim = 0;
  int hidden_dim = 0;
  int layers = 1;
  std::vector<ParamBlock> blocks;
  int total = 0;
};

Layout make_layout(ModelKind kind, int feature_dim, int hidden_dim, int layers) {
  Layout layout{kind, feature_dim, hidden_dim, layers, {}, 0};
  auto add = [&](int rows, int cols, bool decay) {
    layout.blocks.push_back({layout.total, rows, cols, decay});
    layout.total += rows * cols;
  };
  if (kind == ModelKind::majority) return layout;
  const bool concat = kind == ModelKind::sage_mean;
  const int in1 = concat ? 2 * feature_dim : feature_dim;
  if (kind == ModelKind::logistic || layers == 1) {
    const int in = kind == ModelKind::logistic ? feature_dim : in1;
    add(in, 1, true);
    add(1, 1, false);
  } else {
    add(in1, hidden_dim, true);
    add(1, hidden_dim, false);
    add(concat ? 2 * hidden_dim : hidden_dim, 1, true);
    add(1, 1, false);
  }
  return layout;
}

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Eigen::Map<const Mat<Scalar>> block_matrix(const Vec<Scalar>& params, const ParamBlock& b) {
  // Blocks are stored row-major; map as (cols x rows) column-major and use
  // the transpose where a (rows x cols) matrix is needed.
  return Eigen::Map<const Mat<Scalar>>(params.data() + b.offset, b.cols, b.rows);
}

template <typename Scalar>
Scalar softplus(Scalar z) {
  const Scalar zero = Scalar(0);
  const Scalar m = z > zero ? z : zero;
  return m + std::log1p(std::exp(-(z < zero ? -z : z)));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// Propagated layer input: gcn-style smoothing S*H, sage-style concat of the
// node and its neighbour mean, or H unchanged for feature-only models.
template <typename Scalar>
Mat<Scalar> layer_input(ModelKind kind, const Eigen::SparseMatrix<Scalar>& s,
                        const Eigen::SparseMatrix<Scalar>& m, const Mat<Scalar>& h) {
  switch (kind) {
    case ModelKind::gcn:
    case ModelKind::pcgnn:
      return s * h;
    case ModelKind::sage_mean: {
      Mat<Scalar> c(h.rows(), 2 * h.cols());
      c.leftCols(h.cols()) = h;
      c.rightCols(h.cols()) = m * h;
      return c;
    }
    default:
      return h;
  }
}

template <typename Scalar>
Vec<Scalar> forward_logits(const Layout& layout, const Vec<Scalar>& params,
                           const Eigen::SparseMatrix<Scalar>& s,
                           const Eigen::SparseMatrix<Scalar>& m, const Mat<Scalar>& xs) {
  const Mat<Scalar> c0 = layer_input(layout.kind, s, m, xs);
  if (layout.blocks.size() == 2) {
    const auto w = block_matrix(params, layout.blocks[0]);  // 1 x in
    const Scalar b = params[layout.blocks[1].offset];
    return ((c0 * w.transpose()).array() + b).matrix();
  }
  const auto w1 = block_matrix(params, layout.blocks[0]);  // hidden x in
  const auto b1 = block_matrix(params, layout.blocks[1]);  // hidden x 1
  const auto w2 = block_matrix(params, layout.blocks[2]);  // 1 x in2
  const Scalar b2 = params[layout.blocks[3].offset];
  Mat<Scalar> h1 = (c0 * w1.transpose()).rowwise() + b1.col(0).transpose();
  h1 = h1.cwiseMax(Scalar(0));
  const Mat<Scalar> c1 = layer_input(layout.kind, s, m, h1);
  return ((c1 * w2.transpose()).array() + b2).matrix();
}

// Weighted binary cross-entropy over loss nodes plus L2 decay on weight
// blocks. loss_weights must sum to a positive value.
template <typename Scalar>
Scalar loss_value(const Layout& layout, const Vec<Scalar>& params,
                  const Eigen::SparseMatrix<Scalar>& s, const Eigen::SparseMatrix<Scalar>& m,
                  const Mat<Scalar>& xs, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& loss_weights, double weight_decay) {
  const Vec<Scalar> z = forward_logits(layout, params, s, m, xs);
  Scalar total = Scalar(0);
  Scalar weight_sum = Scalar(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (loss_weights[i] == 0.0) continue;
    const Scalar w = Scalar(loss_weights[i]);
    total += w * (softplus(z[i]) - Scalar(y[i]) * z[i]);
    weight_sum += w;
  }
  Scalar loss = total / weight_sum;
  for (const auto& b : layout.blocks) {
    if (!b.decay) continue;
    const auto w = block_matrix(params, b);
    loss += Scalar(0.5 * weight_decay) * w.squaredNorm();
  }
  return loss;
}

// Analytic gradient alongside the loss, mirroring loss_value exactly.
double loss_and_gradient(const Layout& layout, const Eigen::VectorXd& params,
                         const SpMat& s, const SpMat& m, const Eigen::MatrixXd& xs,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& loss_weights,
                         double weight_decay, Eigen::VectorXd& grad) {
  grad.setZero(layout.total);
  const Eigen::MatrixXd c0 = layer_input<double>(layout.kind, s, m, xs);

  Eigen::VectorXd z;
  Eigen::MatrixXd pre1, h1, c1;
  const bool two_layer = layout.blocks.size() == 4;
  if (!two_layer) {
    const auto w = block_matrix(params, layout.blocks[0]);
    z = ((c0 * w.transpose()).array() + params[layout.blocks[1].offset]).matrix();
  } else {
    const auto w1 = block_matrix(params, layout.blocks[0]);
    const auto b1 = block_matrix(params, layout.blocks[1]);
    pre1 = (c0 * w1.transpose()).rowwise() + b1.col(0).transpose();
    h1 = pre1.cwiseMax(0.0);
    c1 = layer_input<double>(layout.kind, s, m, h1);
    const auto w2 = block_matrix(params, layout.blocks[2]);
    z = ((c1 * w2.transpose()).array() + params[layout.blocks[3].offset]).matrix();
  }

  double total = 0.0, weight_sum = 0.0;
  Eigen::VectorXd gz = Eigen::VectorXd::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (loss_weights[i] == 0.0) continue;
    total += loss_weights[i] * (softplus(z[i]) - y[i] * z[i]);
    weight_sum += loss_weights[i];
    gz[i] = loss_weights[i] * (sigmoid(z[i]) - y[i]);
  }
  gz /= weight_sum;
  double loss = total / weight_sum;

  // Gradient blocks share the row-major storage convention of block_matrix:
  // the (cols x rows) map holds the transpose of the natural gradient.
  auto grad_block = [&](const ParamBlock& b) {
    return Eigen::Map<Mat<double>>(grad.data() + b.offset, b.cols, b.rows);
  };

  if (!two_layer) {
    grad_block(layout.blocks[0]) = (c0.transpose() * gz).transpose();
    grad[layout.blocks[1].offset] = gz.sum();
  } else {
    const auto w2 = block_matrix(params, layout.blocks[2]);
    grad_block(layout.blocks[2]) = (c1.transpose() * gz).transpose();
    grad[layout.blocks[3].offset] = gz.sum();

    // d loss / d h1 through the second layer's propagation
    Eigen::MatrixXd gc1 = gz * w2;  // n x in2
    Eigen::MatrixXd gh1;
    if (layout.kind == ModelKind::sage_mean) {
      const Eigen::Index h = h1.cols();
      gh1 = gc1.leftCols(h) + m.transpose() * gc1.rightCols(h);
    } else if (layout.kind == ModelKind::gcn || layout.kind == ModelKind::pcgnn) {
      gh1 = s.transpose() * gc1;
    } else {
      gh1 = gc1;
    }
    const Eigen::MatrixXd gpre1 =
        ((pre1.array() > 0.0).cast<double>() * gh1.array()).matrix();
    grad_block(layout.blocks[0]) = (c0.transpose() * gpre1).transpose();
    Eigen::Map<Mat<double>> gb1(grad.data() + layout.blocks[1].offset, 1,
                                layout.blocks[1].cols);
    gb1 = gpre1.colwise().sum();
  }

  for (const auto& b : layout.blocks) {
    if (!b.decay) continue;
    const auto w = block_matrix(params, b);
    loss += 0.5 * weight_decay * w.squaredNorm();
    Eigen::Map<Mat<double>>(grad.data() + b.offset, b.cols, b.rows) += weight_decay * w;
  }
  return loss;
}

Eigen::VectorXd glorot_init(const Layout& layout, Rng& rng) {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(layout.total);
  for (const auto& b : layout.blocks) {
    if (!b.decay) continue;  // biases start at zero
    const double limit = std::sqrt(6.0 / static_cast<double>(b.rows + b.cols));
    for (int i = 0; i < b.rows * b.cols; ++i)
      params[b.offset + i] = (2.0 * rng.next_double() - 1.0) * limit;
  }
  return params;
}

struct AdamState {
  Eigen::VectorXd m, v;
  int step = 0;

  explicit AdamState(int size) : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}

  void update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++step;
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad).eval();
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    params -= (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + kEps).matrix());
  }
};

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - a.dot(b) / (na * nb);
}

// Static context for the pick/choose sampler: neighbour lists sorted by
// feature distance and same-class nearest lists for minority train nodes.
struct RebalanceContext {
  std::int8_t minority = 1;
  std::array<std::vector<std::int32_t>, 2> train_by_class;
  std::vector<std::vector<std::int32_t>> sorted_neighbours;
  std::vector<std::vector<std::int32_t>> minority_knn;  // indexed by node id
};

RebalanceContext build_rebalance_context(const MultiGraph& graph, const Eigen::MatrixXd& xs,
                                         const std::vector<std::int8_t>& labels,
                                         const std::vector<char>& train_mask,
                                         int oversample_k) {
  RebalanceContext ctx;
  for (std::size_t i = 0; i < train_mask.size(); ++i)
    if (train_mask[i]) ctx.train_by_class[labels[i]].push_back(static_cast<std::int32_t>(i));
  if (ctx.train_by_class[0].empty() || ctx.train_by_class[1].empty())
    throw DegenerateSplitError("rebalancing needs both classes in the train part");
  ctx.minority = ctx.train_by_class[1].size() <= ctx.train_by_class[0].size() ? 1 : 0;

  const auto n = graph.node_count;
  std::vector<std::set<std::int32_t>> united(n);
  for (int r = 0; r < graph.relation_count(); ++r) {
    for (const auto& e : graph.relations[r]) {
      united[e.src].insert(e.dst);
      united[e.dst].insert(e.src);
    }
  }
  auto by_distance = [&](std::int32_t from, std::vector<std::int32_t> ids) {
    std::vector<std::pair<double, std::int32_t>> keyed;
    keyed.reserve(ids.size());
    const Eigen::VectorXd fi = xs.row(from).transpose();
    for (auto id : ids)
      keyed.emplace_back(cosine_distance(fi, xs.row(id).transpose()), id);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < keyed.size(); ++k) ids[k] = keyed[k].second;
    return ids;
  };

  ctx.sorted_neighbours.resize(n);
  for (std::int64_t i = 0; i < n; ++i)
    ctx.sorted_neighbours[i] =
        by_distance(static_cast<std::int32_t>(i),
                    std::vector<std::int32_t>(united[i].begin(), united[i].end()));

  ctx.minority_knn.resize(n);
  const auto& minority_train = ctx.train_by_class[ctx.minority];
  for (auto v : minority_train) {
    std::vector<std::int32_t> candidates;
    candidates.reserve(minority_train.size());
    for (auto u : minority_train)
      if (u != v) candidates.push_back(u);
    auto sorted = by_distance(v, std::move(candidates));
    if (static_cast<int>(sorted.size()) > oversample_k) sorted.resize(oversample_k);
    ctx.minority_knn[v] = std::move(sorted);
  }
  return ctx;
}

RebalanceResult sample_rebalanced_subgraph(const RebalanceContext& ctx,
                                           const std::vector<std::int8_t>& labels,
                                           const PcgnnParams& params, Rng& rng) {
  RebalanceResult result;
  // Inverse-class-frequency sampling: a fair class coin, then a uniform
  // member of that class.
  for (int t = 0; t < params.pick_size; ++t) {
    const auto cls = rng.next_double() < 0.5 ? ctx.minority : static_cast<std::int8_t>(1 - ctx.minority);
    const auto& pool = ctx.train_by_class[cls];
    result.picked.push_back(pool[rng.uniform_int(pool.size())]);
  }

  std::vector<std::int32_t> distinct_picked = result.picked;
  std::sort(distinct_picked.begin(), distinct_picked.end());
  distinct_picked.erase(std::unique(distinct_picked.begin(), distinct_picked.end()),
                        distinct_picked.end());

  std::set<std::pair<std::int32_t, std::int32_t>> edges;
  std::set<std::int32_t> nodes(distinct_picked.begin(), distinct_picked.end());
  auto connect = [&](std::int32_t a, std::int32_t b) {
    edges.insert({std::min(a, b), std::max(a, b)});
    nodes.insert(a);
    nodes.insert(b);
  };
  for (auto v : distinct_picked) {
    const auto& sorted = ctx.sorted_neighbours[v];
    if (labels[v] == ctx.minority) {
      for (auto u : sorted) connect(v, u);
      for (auto u : ctx.minority_knn[v]) connect(v, u);
    } else {
      const auto keep = static_cast<std::size_t>(
          std::ceil(params.undersample_keep * static_cast<double>(sorted.size())));
      for (std::size_t k = 0; k < keep && k < sorted.size(); ++k) connect(v, sorted[k]);
    }
  }

  result.node_ids.assign(nodes.begin(), nodes.end());
  std::vector<std::int32_t> local(ctx.sorted_neighbours.size(), -1);
  for (std::size_t i = 0; i < result.node_ids.size(); ++i)
    local[result.node_ids[i]] = static_cast<std::int32_t>(i);

  result.subgraph.node_count = static_cast<std::int64_t>(result.node_ids.size());
  result.subgraph.relations.resize(1);
  for (const auto& [a, b] : edges)
    result.subgraph.relations[0].push_back({local[a], local[b], 1});
  std::sort(result.subgraph.relations[0].begin(), result.subgraph.relations[0].end(),
            [](const Edge& x, const Edge& y) {
              return std::pair(x.src, x.dst) < std::pair(y.src, y.dst);
            });
  return result;
}

void check_table(const NodeTable& nodes) {
  if (!nodes.features.allFinite()) throw ValueError("node features must be finite");
}

std::vector<std::int32_t> ids_of(const std::vector<char>& mask) {
  std::vector<std::int32_t> ids;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) ids.push_back(static_cast<std::int32_t>(i));
  return ids;
}

bool needs_graph(ModelKind kind) {
  return kind == ModelKind::gcn || kind == ModelKind::sage_mean || kind == ModelKind::pcgnn;
}

}  // namespace

RebalanceResult pcgnn_rebalance(const MultiGraph& graph, const NodeTable& nodes,
                                const std::vector<char>& train_mask,
                                const PcgnnParams& params, std::uint64_t seed) {
  check_table(nodes);
  const auto train_ids = ids_of(train_mask);
  const auto st = fit_standardizer(nodes.features, train_ids);
  const Eigen::MatrixXd xs = st.apply(nodes.features);
  const auto ctx =
      build_rebalance_context(graph, xs, nodes.labels, train_mask, params.oversample_k);
  Rng rng(seed, streams::kPick);
  return sample_rebalanced_subgraph(ctx, nodes.labels, params, rng);
}

TrainedModel train_model(const ModelSpec& spec, const MultiGraph& graph,
                         const NodeTable& nodes, const SplitAssignment& split,
                         const TrainConfig& cfg, const ValContext* val) {
  const auto n = nodes.features.rows();
  if (static_cast<Eigen::Index>(split.tags.size()) != n ||
      static_cast<Eigen::Index>(nodes.labels.size()) != n)
    throw ShapeError("split, labels and features must cover the same nodes");
  if (needs_graph(spec.kind) && graph.node_count != n)
    throw ShapeError("graph and feature table disagree on node count");
  if (cfg.epochs < 1) throw ConfigError("epochs", "must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
  if (cfg.weight_decay < 0.0) throw ConfigError("weight_decay", "must be >= 0");
  if (spec.hidden_dim < 1) throw ConfigError("hidden_dim", "must be >= 1");
  if (spec.layers != 1 && spec.layers != 2) throw ConfigError("layers", "must be 1 or 2");
  if (spec.kind == ModelKind::pcgnn) {
    if (spec.pcgnn.pick_size < 1) throw ConfigError("pcgnn.pick_size", "must be >= 1");
    if (spec.pcgnn.oversample_k < 0) throw ConfigError("pcgnn.oversample_k", "must be >= 0");
    if (!(spec.pcgnn.undersample_keep > 0.0 && spec.pcgnn.undersample_keep <= 1.0))
      throw ConfigError("pcgnn.undersample_keep", "must be in (0, 1]");
  }
  check_table(nodes);

  const auto train_mask = split.mask(SplitTag::train);
  const auto train_ids = ids_of(train_mask);

  TrainedModel model;
  model.spec = spec;
  model.feature_dim = static_cast<int>(nodes.features.cols());

  std::array<std::int64_t, 2> train_counts{0, 0};
  for (auto i : train_ids) ++train_counts[nodes.labels[i]];

  if (spec.kind == ModelKind::majority) {
    if (train_ids.empty()) throw DegenerateSplitError("train part is empty");
    model.majority_label = train_counts[1] > train_counts[0] ? 1 : 0;
    model.standardizer = fit_standardizer(nodes.features, train_ids);
    model.epochs_run = 0;
    return model;
  }

  if (train_ids.empty() || train_counts[0] == 0 || train_counts[1] == 0)
    throw DegenerateSplitError("train part must contain both classes");

  model.standardizer = fit_standardizer(nodes.features, train_ids);
  const Eigen::MatrixXd xs = model.standardizer.apply(nodes.features);

  const Layout layout =
      make_layout(spec.kind, model.feature_dim, spec.hidden_dim, spec.layers);
  Rng init_rng(cfg.seed, streams::kModelInit);
  Eigen::VectorXd params = glorot_init(layout, init_rng);

  SpMat s(n, n), m(n, n);
  if (spec.kind == ModelKind::gcn || spec.kind == ModelKind::pcgnn)
    s = averaged_normalized_adjacency(graph);
  if (spec.kind == ModelKind::sage_mean) m = averaged_neighbour_mean(graph);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = nodes.labels[i];

  Eigen::VectorXd loss_weights = Eigen::VectorXd::Zero(n);
  {
    std::array<double, 2> class_weight{1.0, 1.0};
    if (cfg.class_weighting == TrainConfig::ClassWeighting::inverse_frequency) {
      const double total = static_cast<double>(train_counts[0] + train_counts[1]);
      class_weight = {total / (2.0 * static_cast<double>(train_counts[0])),
                      total / (2.0 * static_cast<double>(train_counts[1]))};
    }
    for (auto i : train_ids) loss_weights[i] = class_weight[nodes.labels[i]];
  }

  // Validation context for early stopping: explicit window, or the
  // validation part of the split on the training graph.
  ValContext inline_val;
  if (!val && cfg.patience > 0) {
    inline_val.graph = &graph;
    inline_val.nodes = &nodes;
    inline_val.eval_mask = split.mask(SplitTag::validation);
    val = &inline_val;
  }
  bool early_stopping = cfg.patience > 0 && val && val->graph && val->nodes;
  SpMat val_s, val_m;
  Eigen::MatrixXd val_xs;
  std::vector<std::int32_t> val_ids;
  std::vector<std::int8_t> val_labels;
  if (early_stopping) {
    val_ids = ids_of(val->eval_mask);
    std::array<std::int64_t, 2> counts{0, 0};
    for (auto i : val_ids) ++counts[val->nodes->labels[i]];
    if (counts[0] == 0 || counts[1] == 0) {
      early_stopping = false;  // AUC undefined on a one-class validation part
    } else {
      val_xs = model.standardizer.apply(val->nodes->features);
      if (spec.kind == ModelKind::gcn || spec.kind == ModelKind::pcgnn)
        val_s = averaged_normalized_adjacency(*val->graph);
      if (spec.kind == ModelKind::sage_mean) val_m = averaged_neighbour_mean(*val->graph);
      for (auto i : val_ids) val_labels.push_back(val->nodes->labels[i]);
    }
  }

  // pcgnn: static context reused across per-epoch subgraph draws.
  std::unique_ptr<RebalanceContext> rebalance_ctx;
  Rng pick_rng(cfg.seed, streams::kPick);
  if (spec.kind == ModelKind::pcgnn) {
    rebalance_ctx = std::make_unique<RebalanceContext>(build_rebalance_context(
        graph, xs, nodes.labels, train_mask, spec.pcgnn.oversample_k));
  }

  AdamState adam(layout.total);
  Eigen::VectorXd grad(layout.total);
  Eigen::VectorXd best_params = params;
  double best_val_auc = -1.0;
  int epochs_without_improvement = 0;
  double last_loss = 0.0;
  int epochs_run = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (spec.kind == ModelKind::pcgnn) {
      const auto rb =
          sample_rebalanced_subgraph(*rebalance_ctx, nodes.labels, spec.pcgnn, pick_rng);
      const auto sub_n = static_cast<Eigen::Index>(rb.node_ids.size());
      Eigen::MatrixXd sub_xs(sub_n, xs.cols());
      Eigen::VectorXd sub_y(sub_n);
      for (Eigen::Index i = 0; i < sub_n; ++i) {
        sub_xs.row(i) = xs.row(rb.node_ids[i]);
        sub_y[i] = nodes.labels[rb.node_ids[i]];
      }
      Eigen::VectorXd sub_weights = Eigen::VectorXd::Zero(sub_n);
      std::vector<std::int32_t> local(n, -1);
      for (Eigen::Index i = 0; i < sub_n; ++i) local[rb.node_ids[i]] = static_cast<std::int32_t>(i);
      for (auto p : rb.picked) sub_weights[local[p]] += 1.0;
      const SpMat sub_s = averaged_normalized_adjacency(rb.subgraph);
      last_loss = loss_and_gradient(layout, params, sub_s, m, sub_xs, sub_y, sub_weights,
                                    cfg.weight_decay, grad);
    } else {
      last_loss = loss_and_gradient(layout, params, s, m, xs, y, loss_weights,
                                    cfg.weight_decay, grad);
    }
    if (!std::isfinite(last_loss)) throw NonConvergenceError("training loss became non-finite");
    adam.update(params, grad, cfg.learning_rate);
    epochs_run = epoch + 1;

    if (early_stopping) {
      const Eigen::VectorXd logits =
          forward_logits<double>(layout, params, val_s, val_m, val_xs);
      std::vector<double> scores;
      scores.reserve(val_ids.size());
      for (auto i : val_ids) scores.push_back(sigmoid(logits[i]));
      const double val_auc = auc(val_labels, scores);
      if (val_auc > best_val_auc) {
        best_val_auc = val_auc;
        best_params = params;
        epochs_without_improvement = 0;
      } else if (++epochs_without_improvement >= cfg.patience) {
        break;
      }
    }
  }

  model.params = early_stopping ? best_params : params;
  model.epochs_run = epochs_run;
  model.final_loss = last_loss;
  return model;
}

Eigen::VectorXd predict_scores(const TrainedModel& model, const MultiGraph& graph,
                               const NodeTable& nodes) {
  check_table(nodes);
  const auto n = nodes.features.rows();
  if (static_cast<int>(nodes.features.cols()) != model.feature_dim)
    throw ShapeError("feature dimension " + std::to_string(nodes.features.cols()) +
                     " does not match model dimension " + std::to_string(model.feature_dim));
  if (model.spec.kind == ModelKind::majority)
    return Eigen::VectorXd::Constant(n, static_cast<double>(model.majority_label));
  if (needs_graph(model.spec.kind) && graph.node_count != n)
    throw ShapeError("graph and feature table disagree on node count");

  const Eigen::MatrixXd xs = model.standardizer.apply(nodes.features);
  SpMat s(n, n), m(n, n);
  if (model.spec.kind == ModelKind::gcn || model.spec.kind == ModelKind::pcgnn)
    s = averaged_normalized_adjacency(graph);
  if (model.spec.kind == ModelKind::sage_mean) m = averaged_neighbour_mean(graph);

  const Layout layout =
      make_layout(model.spec.kind, model.feature_dim, model.spec.hidden_dim, model.spec.layers);
  if (model.params.size() != layout.total)
    throw ShapeError("parameter vector does not match the model layout");
  const Eigen::VectorXd logits = forward_logits<double>(layout, model.params, s, m, xs);
  Eigen::VectorXd scores(n);
  for (Eigen::Index i = 0; i < n; ++i) scores[i] = sigmoid(logits[i]);
  return scores;
}

double gradient_check(const ModelSpec& spec, const MultiGraph& graph, const NodeTable& nodes,
                      const SplitAssignment& split, std::uint64_t seed) {
  check_table(nodes);
  const auto train_mask = split.mask(SplitTag::train);
  const auto train_ids = ids_of(train_mask);
  const auto st = fit_standardizer(nodes.features, train_ids);
  const Eigen::MatrixXd xs_full = st.apply(nodes.features);
  const auto n = nodes.features.rows();

  const Layout layout = make_layout(spec.kind, static_cast<int>(nodes.features.cols()),
                                    spec.hidden_dim, spec.layers);
  Rng rng(seed, streams::kModelInit);
  Eigen::VectorXd params(layout.total);
  for (int i = 0; i < layout.total; ++i) params[i] = 2.0 * rng.next_double() - 1.0;

  SpMat s(n, n), m(n, n);
  Eigen::MatrixXd xs = xs_full;
  Eigen::VectorXd y, loss_weights;
  if (spec.kind == ModelKind::pcgnn) {
    const auto rb = pcgnn_rebalance(graph, nodes, train_mask, spec.pcgnn, seed);
    const auto sub_n = static_cast<Eigen::Index>(rb.node_ids.size());
    xs.resize(sub_n, xs_full.cols());
    y = Eigen::VectorXd::Zero(sub_n);
    loss_weights = Eigen::VectorXd::Zero(sub_n);
    std::vector<std::int32_t> local(n, -1);
    for (Eigen::Index i = 0; i < sub_n; ++i) {
      xs.row(i) = xs_full.row(rb.node_ids[i]);
      y[i] = nodes.labels[rb.node_ids[i]];
      local[rb.node_ids[i]] = static_cast<std::int32_t>(i);
    }
    for (auto p : rb.picked) loss_weights[local[p]] += 1.0;
    s = averaged_normalized_adjacency(rb.subgraph);
  } else {
    y = Eigen::VectorXd::Zero(n);
    loss_weights = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = nodes.labels[i];
    for (auto i : train_ids) loss_weights[i] = 1.0;
    if (spec.kind == ModelKind::gcn) s = averaged_normalized_adjacency(graph);
    if (spec.kind == ModelKind::sage_mean) m = averaged_neighbour_mean(graph);
  }

  const double weight_decay = TrainConfig{}.weight_decay;
  Eigen::VectorXd analytic(layout.total);
  loss_and_gradient(layout, params, s, m, xs, y, loss_weights, weight_decay, analytic);

  // Central differences in extended precision.
  using Long = long double;
  const Eigen::SparseMatrix<Long> s_l = s.cast<Long>();
  const Eigen::SparseMatrix<Long> m_l = m.cast<Long>();
  const Mat<Long> xs_l = xs.cast<Long>();
  Vec<Long> params_l = params.cast<Long>();
  const Long h = 1e-5L;

  double max_rel_error = 0.0;
  for (int i = 0; i < layout.total; ++i) {
    const Long saved = params_l[i];
    params_l[i] = saved + h;
    const Long up = loss_value<Long>(layout, params_l, s_l, m_l, xs_l, y, loss_weights,
                                     weight_decay);
    params_l[i] = saved - h;
    const Long down = loss_value<Long>(layout, params_l, s_l, m_l, xs_l, y, loss_weights,
                                       weight_decay);
    params_l[i] = saved;
    const double numeric = static_cast<double>((up - down) / (2.0L * h));
    const double denom = std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    max_rel_error = std::max(max_rel_error, std::abs(analytic[i] - numeric) / denom);
  }
  return max_rel_error;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_array(std::string& out, const Eigen::VectorXd& values) {
  out += "[";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "]";
}

}  // namespace

void save_model(const std::filesystem::path& file, const TrainedModel& model) {
  std::string out = "{\n";
  out += "  \"kind\": \"" + std::string(to_string(model.spec.kind)) + "\",\n";
  out += "  \"hidden_dim\": " + std::to_string(model.spec.hidden_dim) + ",\n";
  out += "  \"layers\": " + std::to_string(model.spec.layers) + ",\n";
  out += "  \"pcgnn\": {\"pick_size\": " + std::to_string(model.spec.pcgnn.pick_size) +
         ", \"oversample_k\": " + std::to_string(model.spec.pcgnn.oversample_k) +
         ", \"undersample_keep\": " + format_double(model.spec.pcgnn.undersample_keep) +
         "},\n";
  out += "  \"feature_dim\": " + std::to_string(model.feature_dim) + ",\n";
  out += "  \"majority_label\": " + std::to_string(model.majority_label) + ",\n";
  out += "  \"standardization\": {\n    \"mean\": ";
  append_array(out, model.standardizer.mean);
  out += ",\n    \"std\": ";
  append_array(out, model.standardizer.std);
  out += "\n  },\n  \"params\": ";
  append_array(out, model.params);
  out += ",\n  \"training\": {\"epochs_run\": " + std::to_string(model.epochs_run) +
         ", \"final_loss\": " + format_double(model.final_loss) + "}\n}\n";

  std::FILE* f = std::fopen(file.string().c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + file.string());
  const bool ok = std::fwrite(out.data(), 1, out.size(), f) == out.size();
  std::fclose(f);
  if (!ok) throw IoError("write failed: " + file.string());
}

TrainedModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto root = detail::parse_or_throw(buffer.str(), file.string());

  TrainedModel model;
  try {
    model.spec.kind = model_kind_from_string(root.at("kind").get<std::string>());
    model.spec.hidden_dim = root.at("hidden_dim").get<int>();
    model.spec.layers = root.at("layers").get<int>();
    model.spec.pcgnn.pick_size = root.at("pcgnn").at("pick_size").get<int>();
    model.spec.pcgnn.oversample_k = root.at("pcgnn").at("oversample_k").get<int>();
    model.spec.pcgnn.undersample_keep =
        root.at("pcgnn").at("undersample_keep").get<double>();
    model.feature_dim = root.at("feature_dim").get<int>();
    model.majority_label = root.at("majority_label").get<std::int8_t>();

    auto read_vector = [](const detail::json& arr) {
      Eigen::VectorXd v(arr.size());
      for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
      return v;
    };
    model.standardizer.mean = read_vector(root.at("standardization").at("mean"));
    model.standardizer.std = read_vector(root.at("standardization").at("std"));
    model.params = read_vector(root.at("params"));
    model.epochs_run = root.at("training").at("epochs_run").get<int>();
    model.final_loss = root.at("training").at("final_loss").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }

  if (model.spec.kind != ModelKind::majority) {
    const Layout layout = make_layout(model.spec.kind, model.feature_dim,
                                      model.spec.hidden_dim, model.spec.layers);
    if (model.params.size() != layout.total)
      throw SchemaError(file.string() + ": parameter count " +
                        std::to_string(model.params.size()) + " does not match layout " +
                        std::to_string(layout.total));
  }
  return model;
}

}  // namespace fraudbench
