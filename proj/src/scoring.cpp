#include "riskrel/scoring.hpp"

#include "riskrel/error.hpp"
#include "riskrel/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>

namespace riskrel {

const FirmEmbeddings& EmbeddingIndex::firm(const std::string& firm_id) const {
  for (const auto& f : firms) {
    if (f.firm_id == firm_id) return f;
  }
  throw Error(ErrorCode::UnknownFirm, "firm not in index: " + firm_id);
}

std::vector<std::string> EmbeddingIndex::firm_ids() const {
  std::vector<std::string> ids;
  for (const auto& f : firms) ids.push_back(f.firm_id);
  return ids;
}

std::size_t EmbeddingIndex::dim() const {
  for (const auto& f : firms) {
    if (!f.paragraphs.empty()) return f.paragraphs.front().vector.dim();
  }
  return 0;
}

EmbeddingIndex embed_corpus(const Model& model, const std::vector<FirmCorpus>& corpora,
                            const std::string& fingerprint) {
  EmbeddingIndex index;
  index.model_fingerprint = fingerprint;
  index.max_len = model.max_len;
  std::set<std::string> seen;
  for (const auto& corpus : corpora) {
    FirmEmbeddings firm{corpus.firm_id, {}};
    for (const auto& p : corpus.paragraphs) {
      if (!seen.insert(p.id).second) {
        throw Error(ErrorCode::InvalidArgument, "duplicate paragraph id: " + p.id);
      }
      try {
        firm.paragraphs.push_back({p.id, model.encode(p.tokens)});
      } catch (const Error& e) {
        throw Error(e.code(), "paragraph " + p.id + ": " + e.what());
      }
    }
    index.firms.push_back(std::move(firm));
  }
  std::sort(index.firms.begin(), index.firms.end(),
            [](const auto& a, const auto& b) { return a.firm_id < b.firm_id; });
  return index;
}

double rrs(std::size_t mrp_count, std::size_t n_a, std::size_t n_b) {
  if (n_a + n_b == 0) throw Error(ErrorCode::EmptyFirm, "risk relation score of two empty firms");
  if (mrp_count > n_a + n_b) {
    throw Error(ErrorCode::InvalidArgument, "more mutual risk paragraphs than paragraphs");
  }
  return static_cast<double>(mrp_count) / static_cast<double>(n_a + n_b);
}

MrpResult find_mrps(const EmbeddingIndex& index, const std::string& firm_a,
                    const std::string& firm_b, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
  }
  const FirmEmbeddings& a = index.firm(firm_a);
  const FirmEmbeddings& b = index.firm(firm_b);
  if (a.paragraphs.empty()) throw Error(ErrorCode::EmptyFirm, "firm has no paragraphs: " + firm_a);
  if (b.paragraphs.empty()) throw Error(ErrorCode::EmptyFirm, "firm has no paragraphs: " + firm_b);

  MrpResult result;
  result.firm_a = firm_a;
  result.firm_b = firm_b;
  result.threshold = xi;
  result.n_a = a.paragraphs.size();
  result.n_b = b.paragraphs.size();
  for (const auto& pa : a.paragraphs) {
    for (const auto& pb : b.paragraphs) {
      const double s = similarity(pa.vector, pb.vector);
      if (s >= xi) {
        result.mrps_a.insert(pa.id);
        result.mrps_b.insert(pb.id);
        result.evidence.push_back({pa.id, pb.id, s});
      }
    }
  }
  std::sort(result.evidence.begin(), result.evidence.end(), [](const Evidence& x, const Evidence& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    if (x.id_a != y.id_a) return x.id_a < y.id_a;
    return x.id_b < y.id_b;
  });
  result.rrs = rrs(result.mrp_count(), result.n_a, result.n_b);
  return result;
}

double RrsMatrix::at(const std::string& a, const std::string& b) const {
  const auto ia = std::find(firms.begin(), firms.end(), a);
  const auto ib = std::find(firms.begin(), firms.end(), b);
  if (ia == firms.end()) throw Error(ErrorCode::UnknownFirm, "firm not in matrix: " + a);
  if (ib == firms.end()) throw Error(ErrorCode::UnknownFirm, "firm not in matrix: " + b);
  return values[static_cast<std::size_t>(ia - firms.begin())][static_cast<std::size_t>(ib - firms.begin())];
}

std::string RrsMatrix::to_csv() const {
  std::string out = "firm";
  for (const auto& f : firms) out += "," + f;
  out += "\n";
  for (std::size_t i = 0; i < firms.size(); ++i) {
    out += firms[i];
    for (double v : values[i]) out += "," + io::fixed(v, 6);
    out += "\n";
  }
  return out;
}

RrsMatrix RrsMatrix::from_csv(std::string_view text) {
  const auto rows = io::parse_csv(text);
  if (rows.empty() || rows[0].size() < 2) throw Error(ErrorCode::ParseError, "RRS matrix has no header");
  RrsMatrix m;
  m.firms.assign(rows[0].begin() + 1, rows[0].end());
  if (rows.size() != m.firms.size() + 1) {
    throw Error(ErrorCode::ParseError, "RRS matrix row count does not match header");
  }
  for (std::size_t i = 0; i < m.firms.size(); ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != m.firms.size() + 1 || row[0] != m.firms[i]) {
      throw Error(ErrorCode::ParseError, "malformed RRS matrix row " + std::to_string(i + 1));
    }
    std::vector<double> values;
    for (std::size_t j = 1; j < row.size(); ++j) {
      char* end = nullptr;
      const double v = std::strtod(row[j].c_str(), &end);
      if (end == row[j].c_str() || *end != '\0') {
        throw Error(ErrorCode::ParseError, "non-numeric RRS value: " + row[j]);
      }
      values.push_back(v);
    }
    m.values.push_back(std::move(values));
  }
  return m;
}

ScoredMatrix score_all(const EmbeddingIndex& index, const std::vector<std::string>& firms, double xi) {
  if (firms.size() < 2) throw Error(ErrorCode::InvalidArgument, "scoring needs at least two firms");
  std::vector<std::string> sorted = firms;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate firm in scoring list");
  }
  ScoredMatrix out;
  const std::size_t n = sorted.size();
  out.matrix.firms = sorted;
  out.matrix.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    out.matrix.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      MrpResult r = find_mrps(index, sorted[i], sorted[j], xi);
      out.matrix.values[i][j] = r.rrs;
      out.matrix.values[j][i] = r.rrs;
      out.pairs.push_back(std::move(r));
    }
  }
  return out;
}

RrsMatrix rrs_matrix(const EmbeddingIndex& index, const std::vector<std::string>& firms, double xi) {
  return score_all(index, firms, xi).matrix;
}

std::string evidence_file_name(const std::string& firm_a, const std::string& firm_b) {
  return firm_a < firm_b ? firm_a + "__" + firm_b + ".json" : firm_b + "__" + firm_a + ".json";
}

std::string evidence_report(const MrpResult& result,
                            const std::map<std::string, const Paragraph*>& paragraphs) {
  using nlohmann::ordered_json;
  auto describe = [&](const std::string& id) {
    const auto it = paragraphs.find(id);
    if (it == paragraphs.end() || it->second == nullptr) {
      throw Error(ErrorCode::UnknownParagraphId, "no paragraph text for id " + id);
    }
    const Paragraph& p = *it->second;
    return ordered_json{{"id", p.id}, {"firm", p.firm_id}, {"year", p.year},
                        {"section", p.section}, {"text", p.text}};
  };
  ordered_json doc;
  doc["firm_a"] = result.firm_a;
  doc["firm_b"] = result.firm_b;
  doc["threshold"] = result.threshold;
  doc["paragraphs_a"] = result.n_a;
  doc["paragraphs_b"] = result.n_b;
  doc["mrps_a"] = result.mrps_a;
  doc["mrps_b"] = result.mrps_b;
  doc["mrp_count"] = result.mrp_count();
  doc["rrs"] = result.rrs;
  doc["summary"] = result.evidence.empty()
                       ? std::string("zero mutual risk paragraphs: no shared risk at this threshold")
                       : std::to_string(result.evidence.size()) + " evidence pair(s), " +
                             std::to_string(result.mrp_count()) + " mutual risk paragraph(s)";
  ordered_json evidence = ordered_json::array();
  std::size_t rank = 0;
  for (const auto& e : result.evidence) {
    evidence.push_back({{"rank", ++rank},
                        {"similarity", e.similarity},
                        {"a", describe(e.id_a)},
                        {"b", describe(e.id_b)}});
  }
  doc["evidence"] = std::move(evidence);
  return doc.dump(2) + "\n";
}

namespace {
constexpr std::string_view kIndexMagic = "RRSEMBED";
constexpr std::uint32_t kIndexVersion = 1;
}  // namespace

std::string serialize_index(const EmbeddingIndex& index) {
  io::BinaryWriter w;
  w.bytes(kIndexMagic);
  w.u32(kIndexVersion);
  std::string fp = index.model_fingerprint;
  fp.resize(16, '0');
  w.bytes(fp);
  w.u32(static_cast<std::uint32_t>(index.max_len));
  const std::size_t d = index.dim();
  w.u32(static_cast<std::uint32_t>(d));
  w.u32(static_cast<std::uint32_t>(index.firms.size()));
  for (const auto& f : index.firms) {
    w.str(f.firm_id);
    w.u32(static_cast<std::uint32_t>(f.paragraphs.size()));
    for (const auto& p : f.paragraphs) {
      if (p.vector.dim() != d) throw Error(ErrorCode::DimensionMismatch, "mixed widths in index");
      w.str(p.id);
      for (double v : p.vector.values) w.f64(v);
    }
  }
  return w.data();
}

EmbeddingIndex deserialize_index(const std::string& bytes) {
  io::BinaryReader r(bytes);
  if (r.bytes(kIndexMagic.size()) != kIndexMagic) throw Error(ErrorCode::ParseError, "not an embedding file");
  if (r.u32() != kIndexVersion) throw Error(ErrorCode::ParseError, "unsupported embedding file version");
  EmbeddingIndex index;
  index.model_fingerprint = std::string(r.bytes(16));
  index.max_len = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint32_t firms = r.u32();
  for (std::uint32_t f = 0; f < firms; ++f) {
    FirmEmbeddings firm;
    firm.firm_id = r.str();
    const std::uint32_t n = r.u32();
    for (std::uint32_t k = 0; k < n; ++k) {
      IndexedParagraph p;
      p.id = r.str();
      std::vector<double> values(d);
      for (auto& v : values) v = r.f64();
      p.vector = EmbeddingVector::from(std::move(values));
      firm.paragraphs.push_back(std::move(p));
    }
    index.firms.push_back(std::move(firm));
  }
  if (!r.done()) throw Error(ErrorCode::ParseError, "trailing bytes after embeddings");
  return index;
}

}  // namespace riskrel
