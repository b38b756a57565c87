#pragma once

#include "riskrel/corpus.hpp"
#include "riskrel/encoder.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace riskrel {

inline constexpr double kDefaultThreshold = 0.75;

struct IndexedParagraph {
  std::string id;
  EmbeddingVector vector;
};

struct FirmEmbeddings {
  std::string firm_id;
  std::vector<IndexedParagraph> paragraphs;
};

/// Paragraph embeddings grouped by firm (firms ascending, paragraph order
/// kept), tagged with the fingerprint of the model that produced them.
struct EmbeddingIndex {
  std::vector<FirmEmbeddings> firms;
  std::string model_fingerprint;
  std::size_t max_len = kDefaultMaxLen;

  const FirmEmbeddings& firm(const std::string& firm_id) const;
  std::vector<std::string> firm_ids() const;
  std::size_t dim() const;
};

/// Throws EmptyParagraph naming the paragraph when a paragraph cannot be
/// encoded.
EmbeddingIndex embed_corpus(const Model& model, const std::vector<FirmCorpus>& corpora,
                            const std::string& fingerprint = {});

struct Evidence {
  std::string id_a;
  std::string id_b;
  double similarity = 0.0;
};

struct MrpResult {
  std::string firm_a;
  std::string firm_b;
  double threshold = kDefaultThreshold;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::set<std::string> mrps_a;
  std::set<std::string> mrps_b;
  std::vector<Evidence> evidence;  // similarity desc, then (id_a, id_b) asc
  double rrs = 0.0;

  std::size_t mrp_count() const { return mrps_a.size() + mrps_b.size(); }
};

/// (|MRPs_A| + |MRPs_B|) / (N_A + N_B). Throws EmptyFirm when N_A + N_B = 0.
double rrs(std::size_t mrp_count, std::size_t n_a, std::size_t n_b);

/// Exact all-pairs search for mutual risk paragraphs at threshold `xi`.
MrpResult find_mrps(const EmbeddingIndex& index, const std::string& firm_a,
                    const std::string& firm_b, double xi = kDefaultThreshold);

struct RrsMatrix {
  std::vector<std::string> firms;
  std::vector<std::vector<double>> values;  // symmetric, diagonal 1.0

  double at(const std::string& a, const std::string& b) const;
  /// Header row of firm ids, then one row per firm, 6 decimals.
  std::string to_csv() const;
  static RrsMatrix from_csv(std::string_view text);
};

struct ScoredMatrix {
  RrsMatrix matrix;
  std::vector<MrpResult> pairs;  // upper triangle, (a, b) with a < b
};

ScoredMatrix score_all(const EmbeddingIndex& index, const std::vector<std::string>& firms,
                       double xi = kDefaultThreshold);

RrsMatrix rrs_matrix(const EmbeddingIndex& index, const std::vector<std::string>& firms,
                     double xi = kDefaultThreshold);

/// JSON document listing every evidence pair with both paragraph texts,
/// firms, years and section labels. Throws UnknownParagraphId.
std::string evidence_report(const MrpResult& result,
                            const std::map<std::string, const Paragraph*>& paragraphs);

std::string evidence_file_name(const std::string& firm_a, const std::string& firm_b);

/// Binary embedding file, little-endian:
///   "RRSEMBED" | u32 version | 16-byte model fingerprint | u32 max_len
///   u32 d | u32 firm count | per firm: str firm, u32 n, n x (str id, d f64)
std::string serialize_index(const EmbeddingIndex& index);
EmbeddingIndex deserialize_index(const std::string& bytes);

}  // namespace riskrel
