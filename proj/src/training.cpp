#include "riskrel/training.hpp"

#include "riskrel/error.hpp"
#include "riskrel/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace riskrel {
namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "config key " + key + " needs a non-negative integer, got '" +
                                              value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "config key " + key + " needs a number, got '" + value + "'");
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (batch_size < 2) fail("batch_size must be at least 2 (in-batch negatives need B >= 2)");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) fail("temperature must be positive");
  if (patience < 1) fail("patience must be at least 1");
  if (max_epochs < 1) fail("max_epochs must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (!(l2_coeff >= 0.0) || !std::isfinite(l2_coeff)) fail("l2_coeff must be >= 0");
  if (max_len < 1) fail("max_len must be at least 1");
  if (embed_dim < 2) fail("embed_dim must be at least 2");
  if (min_freq < 1) fail("min_freq must be at least 1");
}

void TrainConfig::apply(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "batch_size") batch_size = parse_size(key, value);
    else if (key == "learning_rate") learning_rate = parse_double(key, value);
    else if (key == "warmup_steps") warmup_steps = parse_size(key, value);
    else if (key == "max_epochs") max_epochs = parse_size(key, value);
    else if (key == "patience") patience = parse_size(key, value);
    else if (key == "temperature") temperature = parse_double(key, value);
    else if (key == "l2_coeff") l2_coeff = parse_double(key, value);
    else if (key == "seed") seed = parse_size(key, value);
    else if (key == "max_len") max_len = parse_size(key, value);
    else if (key == "embed_dim") embed_dim = static_cast<int>(parse_size(key, value));
    else if (key == "min_freq") min_freq = static_cast<int>(parse_size(key, value));
    else throw Error(ErrorCode::InvalidConfig, "unknown training config key: " + key);
  }
}

std::vector<double> info_nce_row_losses(const RowMatrix& sim, double temperature) {
  if (sim.rows() != sim.cols() || sim.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "similarity matrix must be square and non-empty");
  }
  if (!sim.allFinite()) throw Error(ErrorCode::NonFiniteSimilarity, "similarity matrix has non-finite entries");
  std::vector<double> losses(static_cast<std::size_t>(sim.rows()));
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    const double row_max = sim.row(i).maxCoeff() / temperature;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < sim.cols(); ++j) sum += std::exp(sim(i, j) / temperature - row_max);
    // The positive term is part of `sum`, so the difference is >= 0 up to rounding.
    const double loss = std::log(sum) - (sim(i, i) / temperature - row_max);
    losses[static_cast<std::size_t>(i)] = std::max(loss, 0.0);
  }
  return losses;
}

double info_nce_loss(const RowMatrix& sim, double temperature) {
  const auto losses = info_nce_row_losses(sim, temperature);
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

namespace {

struct EncodedSide {
  std::vector<Activation> acts;
  std::vector<Eigen::VectorXd> units;
  std::vector<double> norms;
};

EncodedSide encode_side(const EncoderParams& params, const std::vector<std::vector<int>>& texts,
                        std::size_t max_len) {
  EncodedSide side;
  side.acts.reserve(texts.size());
  for (const auto& ids : texts) {
    side.acts.push_back(forward(params, ids, max_len));
    const double norm = side.acts.back().output.norm();
    if (norm < kNormEpsilon) throw Error(ErrorCode::ZeroVector, "encoder produced a zero vector");
    side.norms.push_back(norm);
    side.units.push_back(side.acts.back().output / norm);
  }
  return side;
}

RowMatrix cosine_matrix(const EncodedSide& a, const EncodedSide& p) {
  const auto b = static_cast<Eigen::Index>(a.acts.size());
  RowMatrix sim(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      sim(i, j) = a.units[static_cast<std::size_t>(i)].dot(p.units[static_cast<std::size_t>(j)]);
    }
  }
  return sim;
}

void check_batch(const EncoderParams& params, const TrainingBatch& batch) {
  if (batch.anchors.size() != batch.positives.size()) {
    throw Error(ErrorCode::DimensionMismatch, "anchors and positives are not aligned");
  }
  if (batch.size() < 2) throw Error(ErrorCode::InvalidArgument, "a batch needs at least two pairs");
  if (!params.all_finite()) throw Error(ErrorCode::NonFiniteGradient, "parameters are not finite");
}

std::vector<int> touched_rows(const TrainingBatch& batch, std::size_t max_len) {
  std::set<int> rows;
  for (const auto* side : {&batch.anchors, &batch.positives}) {
    for (const auto& ids : *side) {
      const std::size_t n = std::min(ids.size(), max_len);
      for (std::size_t k = 0; k < n; ++k) {
        if (ids[k] != Vocabulary::kPad) rows.insert(ids[k]);
      }
    }
  }
  return {rows.begin(), rows.end()};
}

double l2_penalty(const EncoderParams& params, const std::vector<int>& rows) {
  double sq = params.proj_w.squaredNorm() + params.proj_b.squaredNorm();
  for (int r : rows) sq += params.embed.row(r).squaredNorm();
  return sq;
}

// Backpropagates dL/dy for one encoded text into the parameter gradients.
void backprop_text(const EncoderParams& params, const Activation& act, const Eigen::VectorXd& dy,
                   Gradients& g) {
  const Eigen::VectorXd dz = dy.array() * (1.0 - act.output.array().square());
  g.proj_w.noalias() += dz * act.pooled.transpose();
  g.proj_b += dz;
  const Eigen::VectorXd dh = params.proj_w.transpose() * dz / static_cast<double>(act.ids.size());
  for (int id : act.ids) g.embed.row(id) += dh.transpose();
}

}  // namespace

RowMatrix similarity_matrix(const EncoderParams& params, const TrainingBatch& batch,
                            std::size_t max_len) {
  check_batch(params, batch);
  return cosine_matrix(encode_side(params, batch.anchors, max_len),
                       encode_side(params, batch.positives, max_len));
}

double batch_objective(const EncoderParams& params, const TrainingBatch& batch,
                       const TrainConfig& config) {
  const RowMatrix sim = similarity_matrix(params, batch, config.max_len);
  return info_nce_loss(sim, config.temperature) +
         config.l2_coeff * l2_penalty(params, touched_rows(batch, config.max_len));
}

BatchResult compute_gradients(const EncoderParams& params, const TrainingBatch& batch,
                              const TrainConfig& config) {
  check_batch(params, batch);
  const EncodedSide anchors = encode_side(params, batch.anchors, config.max_len);
  const EncodedSide positives = encode_side(params, batch.positives, config.max_len);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const double tau = config.temperature;

  BatchResult result;
  result.sim = cosine_matrix(anchors, positives);
  result.loss = info_nce_loss(result.sim, tau);

  // dL/dS = (softmax - I) / (tau * B)
  RowMatrix ds(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double row_max = result.sim.row(i).maxCoeff() / tau;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
      ds(i, j) = std::exp(result.sim(i, j) / tau - row_max);
      sum += ds(i, j);
    }
    for (Eigen::Index j = 0; j < b; ++j) {
      ds(i, j) = (ds(i, j) / sum - (i == j ? 1.0 : 0.0)) / (tau * static_cast<double>(b));
    }
  }

  const int d = params.dim();
  Gradients& g = result.grads;
  g.embed = RowMatrix::Zero(params.embed.rows(), d);
  g.proj_w = RowMatrix::Zero(d, d);
  g.proj_b = Eigen::VectorXd::Zero(d);

  // d cos(u, v) / du = (v_hat - cos * u_hat) / |u|
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto si = static_cast<std::size_t>(i);
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < b; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      dy += ds(i, j) * (positives.units[sj] - result.sim(i, j) * anchors.units[si]);
    }
    dy /= anchors.norms[si];
    backprop_text(params, anchors.acts[si], dy, g);
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < b; ++i) {
      const auto si = static_cast<std::size_t>(i);
      dy += ds(i, j) * (anchors.units[si] - result.sim(i, j) * positives.units[sj]);
    }
    dy /= positives.norms[sj];
    backprop_text(params, positives.acts[sj], dy, g);
  }

  g.touched_rows = touched_rows(batch, config.max_len);
  if (config.l2_coeff > 0.0) {
    const double c = 2.0 * config.l2_coeff;
    g.proj_w += c * params.proj_w;
    g.proj_b += c * params.proj_b;
    for (int r : g.touched_rows) g.embed.row(r) += c * params.embed.row(r);
  }
  g.embed.row(Vocabulary::kPad).setZero();
  result.objective = result.loss + config.l2_coeff * l2_penalty(params, g.touched_rows);

  if (!g.embed.allFinite() || !g.proj_w.allFinite() || !g.proj_b.allFinite()) {
    throw Error(ErrorCode::NonFiniteGradient, "gradient has non-finite entries");
  }
  return result;
}

AdamState AdamState::zeros_like(const EncoderParams& params) {
  AdamState s;
  s.m_embed = RowMatrix::Zero(params.embed.rows(), params.embed.cols());
  s.v_embed = s.m_embed;
  s.m_w = RowMatrix::Zero(params.proj_w.rows(), params.proj_w.cols());
  s.v_w = s.m_w;
  s.m_b = Eigen::VectorXd::Zero(params.proj_b.size());
  s.v_b = s.m_b;
  return s;
}

double warmup_rate(double learning_rate, std::size_t step, std::size_t warmup_steps) {
  if (warmup_steps == 0 || step >= warmup_steps) return learning_rate;
  return learning_rate * static_cast<double>(step) / static_cast<double>(warmup_steps);
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::size_t step, double rate) {
  const double t = static_cast<double>(std::max<std::size_t>(step, 1));
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    m[k] = kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * grad[k];
    v[k] = kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * grad[k] * grad[k];
    const double m_hat = m[k] / c1;
    const double v_hat = v[k] / c2;
    theta[k] -= rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
  }
}

void adam_step(EncoderParams& params, const Gradients& grads, AdamState& state, std::size_t step,
               const TrainConfig& config) {
  const double rate = warmup_rate(config.learning_rate, step, config.warmup_steps);
  auto span_of = [](auto& mat) { return std::span<double>(mat.data(), static_cast<std::size_t>(mat.size())); };
  auto cspan_of = [](const auto& mat) {
    return std::span<const double>(mat.data(), static_cast<std::size_t>(mat.size()));
  };

  // Row-major embed: skip row 0 (PAD) by offsetting every block by d.
  const auto d = static_cast<std::size_t>(params.embed.cols());
  adam_update(span_of(params.embed).subspan(d), cspan_of(grads.embed).subspan(d),
              span_of(state.m_embed).subspan(d), span_of(state.v_embed).subspan(d), step, rate);
  adam_update(span_of(params.proj_w), cspan_of(grads.proj_w), span_of(state.m_w), span_of(state.v_w),
              step, rate);
  adam_update(span_of(params.proj_b), cspan_of(grads.proj_b), span_of(state.m_b), span_of(state.v_b),
              step, rate);
}

bool EarlyStopper::observe(std::size_t epoch, double loss) {
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
    epochs_without_improvement_ = 0;
    return true;
  }
  ++epochs_without_improvement_;
  return false;
}

std::string TrainReport::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::json rec = {{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"val_loss", e.val_loss},
                          {"margin", e.margin}};
    out += rec.dump() + "\n";
  }
  nlohmann::json summary = {{"summary", true},
                            {"initial_val_loss", initial_val_loss},
                            {"epochs_run", epochs_run()},
                            {"best_epoch", best_epoch},
                            {"best_val_loss", epochs.empty() ? 0.0 : best().val_loss},
                            {"stop_reason", stop_reason}};
  out += summary.dump() + "\n";
  return out;
}

std::vector<TrainingBatch> chunk_pairs(const Vocabulary& vocab, const std::vector<PositivePair>& pairs,
                                       std::size_t batch_size) {
  std::vector<TrainingBatch> chunks;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    const std::size_t end = std::min(pairs.size(), start + batch_size);
    if (end - start < 2) break;
    TrainingBatch batch;
    for (std::size_t k = start; k < end; ++k) {
      batch.anchors.push_back(vocab.lookup(pairs[k].left_tokens));
      batch.positives.push_back(vocab.lookup(pairs[k].right_tokens));
    }
    chunks.push_back(std::move(batch));
  }
  return chunks;
}

ValidationStats evaluate_pairs(const EncoderParams& params, const std::vector<TrainingBatch>& chunks,
                               const TrainConfig& config) {
  double loss_sum = 0.0;
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  std::size_t anchors = 0;
  std::size_t negatives = 0;
  for (const auto& batch : chunks) {
    const RowMatrix sim = similarity_matrix(params, batch, config.max_len);
    for (double l : info_nce_row_losses(sim, config.temperature)) loss_sum += l;
    const auto b = sim.rows();
    for (Eigen::Index i = 0; i < b; ++i) {
      for (Eigen::Index j = 0; j < b; ++j) {
        if (i == j) {
          pos_sum += sim(i, j);
        } else {
          neg_sum += sim(i, j);
          ++negatives;
        }
      }
    }
    anchors += static_cast<std::size_t>(b);
  }
  if (anchors == 0) throw Error(ErrorCode::InsufficientPairs, "validation needs at least two pairs");
  return {loss_sum / static_cast<double>(anchors),
          pos_sum / static_cast<double>(anchors) - neg_sum / static_cast<double>(negatives)};
}

TrainResult train(const std::vector<PositivePair>& train_pairs, const std::vector<PositivePair>& val_pairs,
                  const TrainConfig& config) {
  config.validate();
  if (train_pairs.size() < config.batch_size) {
    throw Error(ErrorCode::InsufficientPairs, "need at least " + std::to_string(config.batch_size) +
                                                  " training pairs, got " + std::to_string(train_pairs.size()));
  }
  std::vector<std::vector<std::string>> texts;
  texts.reserve(2 * train_pairs.size());
  for (const auto& p : train_pairs) {
    texts.push_back(p.left_tokens);
    texts.push_back(p.right_tokens);
  }

  TrainResult result;
  Model& model = result.model;
  model.vocab = build_vocab(texts, config.min_freq);
  model.max_len = config.max_len;
  model.params = init_params(model.vocab.size(), config.embed_dim, config.seed);

  std::vector<std::vector<int>> left_ids, right_ids;
  for (const auto& p : train_pairs) {
    left_ids.push_back(model.vocab.lookup(p.left_tokens));
    right_ids.push_back(model.vocab.lookup(p.right_tokens));
  }
  // Validation pairs arrive grouped by view and source; one fixed shuffle
  // mixes the chunks the same way the training stream is mixed.
  std::vector<PositivePair> val_mixed = val_pairs;
  Rng(config.seed ^ 0xC2B2AE3D27D4EB4FULL).shuffle(val_mixed);
  const std::vector<TrainingBatch> val_chunks = chunk_pairs(model.vocab, val_mixed, config.batch_size);

  TrainReport& report = result.report;
  report.initial_val_loss = evaluate_pairs(model.params, val_chunks, config).loss;

  AdamState state = AdamState::zeros_like(model.params);
  EarlyStopper stopper(config.patience);
  EncoderParams best = model.params;
  Rng shuffler(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train_pairs.size());
  std::size_t step = 0;
  report.stop_reason = "max_epochs";

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffler.shuffle(order);
    double train_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start + config.batch_size <= order.size(); start += config.batch_size) {
      TrainingBatch batch;
      for (std::size_t k = start; k < start + config.batch_size; ++k) {
        batch.anchors.push_back(left_ids[order[k]]);
        batch.positives.push_back(right_ids[order[k]]);
      }
      const BatchResult br = compute_gradients(model.params, batch, config);
      adam_step(model.params, br.grads, state, ++step, config);
      train_loss += br.loss;
      ++batches;
    }
    const ValidationStats val = evaluate_pairs(model.params, val_chunks, config);
    report.epochs.push_back({epoch, train_loss / static_cast<double>(batches), val.loss, val.margin});
    if (stopper.observe(epoch, val.loss)) best = model.params;
    if (stopper.should_stop()) {
      report.stop_reason = "patience";
      break;
    }
  }
  report.best_epoch = stopper.best_epoch();
  model.params = std::move(best);
  return result;
}

SimilarityGap similarity_gap(const Model& model, const std::vector<PositivePair>& pairs,
                             std::uint64_t seed) {
  if (pairs.size() < 2) throw Error(ErrorCode::InsufficientPairs, "need at least two pairs");
  std::vector<EmbeddingVector> left, right;
  for (const auto& p : pairs) {
    left.push_back(model.encode(p.left_tokens));
    right.push_back(model.encode(p.right_tokens));
  }
  auto shares_source = [&](std::size_t a, std::size_t b) {
    for (const auto& id : pairs[a].provenance) {
      if (std::find(pairs[b].provenance.begin(), pairs[b].provenance.end(), id) !=
          pairs[b].provenance.end()) {
        return true;
      }
    }
    return false;
  };
  Rng rng(seed);
  SimilarityGap gap;
  std::size_t random_count = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    gap.positive_mean += similarity(left[k], right[k]);
    for (int attempt = 0; attempt < 32; ++attempt) {
      const auto other = static_cast<std::size_t>(rng.uniform_int(0, pairs.size() - 1));
      if (other == k || shares_source(k, other)) continue;
      gap.random_mean += similarity(left[k], right[other]);
      ++random_count;
      break;
    }
  }
  gap.positive_mean /= static_cast<double>(pairs.size());
  if (random_count > 0) gap.random_mean /= static_cast<double>(random_count);
  return gap;
}

}  // namespace riskrel
