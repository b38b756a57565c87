#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace riskrel {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultMaxLen = 256;
inline constexpr int kDefaultEmbedDim = 64;
inline constexpr double kNormEpsilon = 1e-12;

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  /// Entries after the two specials, in index order.
  explicit Vocabulary(const std::vector<std::string>& entries);

  int lookup(const std::string& token) const;
  std::vector<int> lookup(const std::vector<std::string>& tokens) const;
  const std::string& token(int index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Tokens with frequency >= min_freq, ordered by (frequency desc, token asc).
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& texts, int min_freq = 2);

/// Bag-of-embeddings encoder: masked mean pool, then tanh(W h + b).
struct EncoderParams {
  RowMatrix embed;        // |V| x d, row kPad fixed at zero
  RowMatrix proj_w;       // d x d
  Eigen::VectorXd proj_b; // d

  int dim() const { return static_cast<int>(proj_b.size()); }
  std::size_t vocab_size() const { return static_cast<std::size_t>(embed.rows()); }
  bool all_finite() const;
};

EncoderParams init_params(std::size_t vocab_size, int dim, std::uint64_t seed);

struct EmbeddingVector {
  std::vector<double> values;
  double norm = 0.0;

  static EmbeddingVector from(std::vector<double> values);
  std::size_t dim() const { return values.size(); }
};

/// Intermediate values of one forward pass, kept for backpropagation.
struct Activation {
  std::vector<int> ids;      // non-PAD ids after truncation
  Eigen::VectorXd pooled;    // h
  Eigen::VectorXd output;    // tanh(W h + b)
};

/// Truncates to `max_len` positions, drops PAD positions, and runs the
/// forward pass. Throws EmptyParagraph when nothing is left.
Activation forward(const EncoderParams& params, std::span<const int> ids,
                   std::size_t max_len = kDefaultMaxLen);

EmbeddingVector encode(const EncoderParams& params, std::span<const int> ids,
                       std::size_t max_len = kDefaultMaxLen);

/// Cosine similarity, clamped to [-1, 1]. Throws ZeroVector when either norm
/// is below kNormEpsilon.
double similarity(const EmbeddingVector& u, const EmbeddingVector& v);

/// A trained encoder together with the vocabulary it was trained on.
struct Model {
  Vocabulary vocab;
  EncoderParams params;
  std::size_t max_len = kDefaultMaxLen;

  EmbeddingVector encode(const std::vector<std::string>& tokens) const;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Model file, all integers and floats little-endian:
///   "RRSMODEL" | u32 version | u32 d | u32 |V| | u32 max_len
///   |V| x (u32 byte length, UTF-8 bytes)
///   embed (|V| x d f64, row-major) | proj_w (d x d f64, row-major) | proj_b (d f64)
std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// FNV-1a 64 of the serialized model, as 16 hex digits.
std::string model_fingerprint(const std::string& serialized);

}  // namespace riskrel
