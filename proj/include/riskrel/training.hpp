#pragma once

#include "riskrel/encoder.hpp"
#include "riskrel/pairgen.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace riskrel {

struct TrainConfig {
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::size_t warmup_steps = 50;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  double temperature = 0.05;
  double l2_coeff = 1e-4;
  std::uint64_t seed = 0;
  std::size_t max_len = kDefaultMaxLen;
  int embed_dim = kDefaultEmbedDim;
  int min_freq = 2;

  /// Throws InvalidConfig on B < 2, tau <= 0, patience < 1 and similar.
  void validate() const;

  /// Applies "key = value" entries; unknown keys are an error.
  void apply(const std::map<std::string, std::string>& values);
};

/// Anchors and positives aligned by index, already mapped to vocabulary ids.
struct TrainingBatch {
  std::vector<std::vector<int>> anchors;
  std::vector<std::vector<int>> positives;

  std::size_t size() const { return anchors.size(); }
};

/// Mean over anchors of -log softmax_i(S_i. / tau)[i], computed with the row
/// maximum subtracted. Every row sums over all B columns: the positive plus
/// B - 1 in-batch negatives.
double info_nce_loss(const RowMatrix& sim, double temperature);
std::vector<double> info_nce_row_losses(const RowMatrix& sim, double temperature);

struct Gradients {
  RowMatrix embed;        // dense |V| x d; rows not in `touched_rows` are zero
  RowMatrix proj_w;
  Eigen::VectorXd proj_b;
  std::vector<int> touched_rows;  // sorted, PAD excluded
};

struct BatchResult {
  double loss = 0.0;       // InfoNCE only
  double objective = 0.0;  // InfoNCE + L2 penalty
  RowMatrix sim;
  Gradients grads;
};

/// Cosine similarity matrix S[i][j] = cos(f(anchor_i), f(positive_j)).
RowMatrix similarity_matrix(const EncoderParams& params, const TrainingBatch& batch,
                            std::size_t max_len);

/// Objective = InfoNCE + l2 * (|W|^2 + |b|^2 + sum of squared embedding rows
/// touched by the batch). Forward only.
double batch_objective(const EncoderParams& params, const TrainingBatch& batch,
                       const TrainConfig& config);

/// Exact analytic gradient of `batch_objective` by backpropagation through
/// InfoNCE, cosine, tanh, the projection and mean pooling.
BatchResult compute_gradients(const EncoderParams& params, const TrainingBatch& batch,
                              const TrainConfig& config);

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct AdamState {
  RowMatrix m_embed, v_embed, m_w, v_w;
  Eigen::VectorXd m_b, v_b;

  static AdamState zeros_like(const EncoderParams& params);
};

/// learning_rate * min(1, step / warmup_steps).
double warmup_rate(double learning_rate, std::size_t step, std::size_t warmup_steps);

/// One Adam update on a flat parameter block, bias corrected for `step`
/// (steps are 1-based; step 0 is treated as 1 for the correction).
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::size_t step, double rate);

/// Adam step over all parameter blocks with the warmup schedule. The PAD
/// embedding row is never written.
void adam_step(EncoderParams& params, const Gradients& grads, AdamState& state, std::size_t step,
               const TrainConfig& config);

/// Patience-based stopping on validation loss. Ties keep the earlier epoch.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  /// Returns true when `loss` is a new best.
  bool observe(std::size_t epoch, double loss);
  bool should_stop() const { return epochs_without_improvement_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::size_t epochs_without_improvement_ = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double margin = 0.0;  // mean positive minus mean in-batch negative similarity
};

struct TrainReport {
  double initial_val_loss = 0.0;
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  std::string stop_reason;

  std::size_t epochs_run() const { return epochs.size(); }
  const EpochStats& best() const { return epochs.at(best_epoch - 1); }
  /// One JSON record per epoch followed by a summary record.
  std::string to_jsonl() const;
};

struct ValidationStats {
  double loss = 0.0;
  double margin = 0.0;
};

/// Loss over consecutive chunks of batch_size pairs; a final chunk of at
/// least two pairs is included.
ValidationStats evaluate_pairs(const EncoderParams& params, const std::vector<TrainingBatch>& chunks,
                               const TrainConfig& config);

std::vector<TrainingBatch> chunk_pairs(const Vocabulary& vocab, const std::vector<PositivePair>& pairs,
                                       std::size_t batch_size);

struct TrainResult {
  Model model;
  TrainReport report;
};

/// Trains on the merged pair stream. The vocabulary comes from the training
/// pairs only; the returned model is the best-validation snapshot.
TrainResult train(const std::vector<PositivePair>& train_pairs,
                  const std::vector<PositivePair>& val_pairs, const TrainConfig& config);

struct SimilarityGap {
  double positive_mean = 0.0;
  double random_mean = 0.0;
  double gap() const { return positive_mean - random_mean; }
};

/// Mean cosine of held-out positive pairs against the mean cosine of each
/// left side with the right side of a randomly chosen pair from different
/// source paragraphs.
SimilarityGap similarity_gap(const Model& model, const std::vector<PositivePair>& pairs,
                             std::uint64_t seed);

}  // namespace riskrel
