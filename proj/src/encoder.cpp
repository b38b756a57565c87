#include "riskrel/encoder.hpp"

#include "riskrel/error.hpp"
#include "riskrel/io.hpp"
#include "riskrel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace riskrel {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& entries) {
  tokens_.reserve(entries.size() + 2);
  tokens_.emplace_back(kPadToken);
  tokens_.emplace_back(kUnkToken);
  for (const auto& e : entries) tokens_.push_back(e);
  for (std::size_t k = 0; k < tokens_.size(); ++k) {
    if (!index_.emplace(tokens_[k], static_cast<int>(k)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate vocabulary entry: " + tokens_[k]);
    }
  }
}

int Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::lookup(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(lookup(t));
  return ids;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& texts, int min_freq) {
  std::map<std::string, long> counts;
  for (const auto& text : texts) {
    for (const auto& token : text) ++counts[token];
  }
  if (counts.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from no tokens");

  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_freq && token != Vocabulary::kPadToken && token != Vocabulary::kUnkToken) {
      kept.emplace_back(token, count);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> entries;
  entries.reserve(kept.size());
  for (auto& [token, count] : kept) entries.push_back(std::move(token));
  return Vocabulary(entries);
}

bool EncoderParams::all_finite() const {
  return embed.allFinite() && proj_w.allFinite() && proj_b.allFinite();
}

EncoderParams init_params(std::size_t vocab_size, int dim, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "embedding width must be at least 2");
  if (vocab_size < 2) throw Error(ErrorCode::InvalidArgument, "vocabulary must hold PAD and UNK");
  Rng rng(seed);
  EncoderParams p;
  p.embed.resize(static_cast<Eigen::Index>(vocab_size), dim);
  for (Eigen::Index r = 0; r < p.embed.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) p.embed(r, c) = rng.uniform(-0.5, 0.5);
  }
  p.embed.row(Vocabulary::kPad).setZero();
  const double limit = std::sqrt(3.0 / dim);
  p.proj_w.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) p.proj_w(r, c) = rng.uniform(-limit, limit);
  }
  p.proj_b = Eigen::VectorXd::Zero(dim);
  return p;
}

EmbeddingVector EmbeddingVector::from(std::vector<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  EmbeddingVector e;
  e.values = std::move(values);
  e.norm = std::sqrt(sq);
  return e;
}

Activation forward(const EncoderParams& params, std::span<const int> ids, std::size_t max_len) {
  Activation a;
  const std::size_t n = std::min(ids.size(), max_len);
  for (std::size_t k = 0; k < n; ++k) {
    const int id = ids[k];
    if (id == Vocabulary::kPad) continue;
    if (id < 0 || static_cast<std::size_t>(id) >= params.vocab_size()) {
      throw Error(ErrorCode::InvalidArgument, "token id " + std::to_string(id) + " outside vocabulary");
    }
    a.ids.push_back(id);
  }
  if (a.ids.empty()) throw Error(ErrorCode::EmptyParagraph, "no tokens to encode");
  a.pooled = Eigen::VectorXd::Zero(params.dim());
  for (int id : a.ids) a.pooled += params.embed.row(id).transpose();
  a.pooled /= static_cast<double>(a.ids.size());
  a.output = (params.proj_w * a.pooled + params.proj_b).array().tanh().matrix();
  return a;
}

EmbeddingVector encode(const EncoderParams& params, std::span<const int> ids, std::size_t max_len) {
  const Activation a = forward(params, ids, max_len);
  return EmbeddingVector::from(std::vector<double>(a.output.data(), a.output.data() + a.output.size()));
}

double similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding widths differ: " + std::to_string(u.dim()) +
                                                  " vs " + std::to_string(v.dim()));
  }
  if (u.norm < kNormEpsilon || v.norm < kNormEpsilon) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector");
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) dot += u.values[k] * v.values[k];
  return std::clamp(dot / (u.norm * v.norm), -1.0, 1.0);
}

EmbeddingVector Model::encode(const std::vector<std::string>& tokens) const {
  const std::vector<int> ids = vocab.lookup(tokens);
  return riskrel::encode(params, ids, max_len);
}

namespace {
constexpr std::string_view kModelMagic = "RRSMODEL";
}

std::string serialize_model(const Model& model) {
  const auto& p = model.params;
  if (p.vocab_size() != model.vocab.size()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding rows do not match vocabulary size");
  }
  io::BinaryWriter w;
  w.bytes(kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(p.dim()));
  w.u32(static_cast<std::uint32_t>(model.vocab.size()));
  w.u32(static_cast<std::uint32_t>(model.max_len));
  for (const auto& t : model.vocab.tokens()) w.str(t);
  for (Eigen::Index r = 0; r < p.embed.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.embed.cols(); ++c) w.f64(p.embed(r, c));
  }
  for (Eigen::Index r = 0; r < p.proj_w.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.proj_w.cols(); ++c) w.f64(p.proj_w(r, c));
  }
  for (Eigen::Index k = 0; k < p.proj_b.size(); ++k) w.f64(p.proj_b(k));
  return w.data();
}

Model deserialize_model(const std::string& bytes) {
  io::BinaryReader r(bytes);
  if (r.bytes(kModelMagic.size()) != kModelMagic) {
    throw Error(ErrorCode::ParseError, "not a model file");
  }
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::ParseError, "unsupported model format version " + std::to_string(version));
  }
  const auto d = static_cast<int>(r.u32());
  const std::uint32_t vocab_size = r.u32();
  Model model;
  model.max_len = r.u32();
  if (d < 2 || vocab_size < 2) throw Error(ErrorCode::ParseError, "model header is inconsistent");
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (std::uint32_t k = 0; k < vocab_size; ++k) tokens.push_back(r.str());
  if (tokens[0] != Vocabulary::kPadToken || tokens[1] != Vocabulary::kUnkToken) {
    throw Error(ErrorCode::ParseError, "model vocabulary lacks PAD/UNK entries");
  }
  model.vocab = Vocabulary(std::vector<std::string>(tokens.begin() + 2, tokens.end()));
  auto& p = model.params;
  p.embed.resize(vocab_size, d);
  for (Eigen::Index i = 0; i < p.embed.rows(); ++i) {
    for (Eigen::Index c = 0; c < d; ++c) p.embed(i, c) = r.f64();
  }
  p.proj_w.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) p.proj_w(i, c) = r.f64();
  }
  p.proj_b.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) p.proj_b(k) = r.f64();
  if (!r.done()) throw Error(ErrorCode::ParseError, "trailing bytes after model data");
  if (!p.all_finite()) throw Error(ErrorCode::ParseError, "model contains non-finite values");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  io::write_file(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::MissingFile, "model file not found: " + path.string());
  }
  return deserialize_model(io::read_file(path));
}

std::string model_fingerprint(const std::string& serialized) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialized) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace riskrel
