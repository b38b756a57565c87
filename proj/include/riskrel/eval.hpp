#pragma once

#include "riskrel/scoring.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riskrel {

struct PricePoint {
  std::string date;  // ISO YYYY-MM-DD
  double close = 0.0;
};

struct ReturnSeries {
  std::string firm_id;
  std::vector<std::string> dates;
  std::vector<double> returns;
};

/// Simple returns r_t = p_t / p_{t-1} - 1, dated at t.
ReturnSeries daily_returns(const std::string& firm_id, const std::vector<PricePoint>& prices);

/// "date,close" rows with a header line.
std::vector<PricePoint> parse_prices(std::string_view csv);

/// Reads every `<dir>/<ticker>.csv`, keyed by ticker.
std::map<std::string, ReturnSeries> read_return_dir(const std::filesystem::path& dir);

enum class Correlation { Pearson, Spearman };

/// Throws ZeroVariance when either side is constant and DegenerateInput when
/// fewer than two observations are given.
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr std::size_t kMinOverlap = 30;

/// Pearson correlation of |r_a| and |r_b| over the dates both series share.
double cavdsr(const ReturnSeries& a, const ReturnSeries& b, std::size_t min_overlap = kMinOverlap);

struct PairRecord {
  std::string firm_a;
  std::string firm_b;
  double rrs = 0.0;
  double cavdsr = 0.0;
};

/// Correlation of RRS with CAVDSR across firm pairs. Self pairs are ignored.
double alignment_rho(const std::vector<PairRecord>& records, Correlation method = Correlation::Pearson);

struct PairRecordSet {
  std::vector<PairRecord> records;
  std::vector<std::pair<std::string, std::string>> excluded;  // missing or short return data
};

PairRecordSet build_pair_records(const RrsMatrix& matrix, const std::map<std::string, ReturnSeries>& returns,
                                 std::size_t min_overlap = kMinOverlap);

struct GicsEntry {
  std::string sector;
  std::string industry;
};

using GicsMap = std::map<std::string, GicsEntry>;
enum class GicsLevel { Sector, Industry };

/// "ticker,sector,industry" rows with a header line.
GicsMap parse_gics(std::string_view csv);

/// 1 when both firms share the group at `level`, else 0.
int gics_binary_rrs(const GicsMap& mapping, const std::string& a, const std::string& b, GicsLevel level);

struct RankedList {
  std::string query_id;
  std::vector<std::string> ranked;
  std::set<std::string> relevant;
};

struct RetrievalRow {
  std::size_t k = 0;
  double ndcg = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Binary-relevance NDCG@k (gain 1 / log2(rank + 1)), P@k and R@k averaged
/// over queries.
std::vector<RetrievalRow> retrieval_metrics(const std::vector<RankedList>& lists,
                                            const std::vector<std::size_t>& ks);

/// Parses "lo:hi:step" into an ascending grid; values are rounded to 1e-12
/// so that e.g. 0.6 + 3 * 0.05 is exactly 0.75.
std::vector<double> parse_grid(std::string_view text);

struct SweepRow {
  double threshold = 0.0;
  double mean_rrs = 0.0;
  std::size_t total_mrps = 0;
  std::optional<double> rho;
};

/// One scoring pass per threshold. With `cavdsr_by_pair` (keyed by (a, b),
/// a < b) each row also carries rho.
std::vector<SweepRow> threshold_sweep(
    const EmbeddingIndex& index, const std::vector<std::string>& firms, const std::vector<double>& grid,
    const std::map<std::pair<std::string, std::string>, double>* cavdsr_by_pair = nullptr);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace riskrel
