#include "riskrel/eval.hpp"

#include "riskrel/error.hpp"
#include "riskrel/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <tuple>

namespace riskrel {
namespace {

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorCode::ParseError, what + " is not a number: '" + s + "'");
  }
  return v;
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k;
    while (end + 1 < order.size() && x[order[end + 1]] == x[order[k]]) ++end;
    const double average = (static_cast<double>(k) + static_cast<double>(end)) / 2.0 + 1.0;
    for (std::size_t t = k; t <= end; ++t) r[order[t]] = average;
    k = end + 1;
  }
  return r;
}

}  // namespace

ReturnSeries daily_returns(const std::string& firm_id, const std::vector<PricePoint>& prices) {
  if (prices.size() < 2) {
    throw Error(ErrorCode::TooShort, "need at least two prices for " + firm_id);
  }
  ReturnSeries series;
  series.firm_id = firm_id;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t].close > 0.0) || !std::isfinite(prices[t].close)) {
      throw Error(ErrorCode::NonPositivePrice,
                  firm_id + " has a non-positive close on " + prices[t].date);
    }
    if (t == 0) continue;
    if (!(prices[t - 1].date < prices[t].date)) {
      throw Error(ErrorCode::UnsortedDates, firm_id + " prices are not strictly increasing at " + prices[t].date);
    }
    series.dates.push_back(prices[t].date);
    series.returns.push_back(prices[t].close / prices[t - 1].close - 1.0);
  }
  return series;
}

std::vector<PricePoint> parse_prices(std::string_view csv) {
  const auto rows = io::parse_csv(csv);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "date" || rows[0][1] != "close") {
    throw Error(ErrorCode::ParseError, "price file needs a 'date,close' header");
  }
  std::vector<PricePoint> prices;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].size() < 2) throw Error(ErrorCode::ParseError, "price row " + std::to_string(k) + " is short");
    prices.push_back({rows[k][0], parse_number(rows[k][1], "close")});
  }
  return prices;
}

std::map<std::string, ReturnSeries> read_return_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingFile, "price directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, ReturnSeries> out;
  for (const auto& f : files) {
    const std::string firm = f.stem().string();
    out.emplace(firm, daily_returns(firm, parse_prices(io::read_file(f))));
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "correlation inputs differ in length");
  if (x.size() < 2) throw Error(ErrorCode::DegenerateInput, "correlation needs at least two observations");
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) throw Error(ErrorCode::ZeroVariance, "correlation of a constant series");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "correlation of a constant series");
  // sqrt(fl(s * s)) == s under correctly rounded arithmetic, so identical
  // inputs give exactly 1.
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "correlation inputs differ in length");
  return pearson(ranks(x), ranks(y));
}

double cavdsr(const ReturnSeries& a, const ReturnSeries& b, std::size_t min_overlap) {
  std::vector<double> xa, xb;
  std::size_t i = 0, j = 0;
  while (i < a.dates.size() && j < b.dates.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++j;
    } else {
      xa.push_back(std::fabs(a.returns[i++]));
      xb.push_back(std::fabs(b.returns[j++]));
    }
  }
  if (xa.size() < min_overlap || xa.size() < 2) {
    throw Error(ErrorCode::InsufficientOverlap, a.firm_id + " and " + b.firm_id + " share only " +
                                                    std::to_string(xa.size()) + " trading days");
  }
  return pearson(xa, xb);
}

double alignment_rho(const std::vector<PairRecord>& records, Correlation method) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.firm_a == r.firm_b) continue;
    x.push_back(r.rrs);
    y.push_back(r.cavdsr);
  }
  if (x.size() < 2) throw Error(ErrorCode::DegenerateInput, "alignment needs at least two firm pairs");
  try {
    return method == Correlation::Pearson ? pearson(x, y) : spearman(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance) {
      throw Error(ErrorCode::DegenerateInput, "RRS or CAVDSR values are all equal");
    }
    throw;
  }
}

PairRecordSet build_pair_records(const RrsMatrix& matrix, const std::map<std::string, ReturnSeries>& returns,
                                 std::size_t min_overlap) {
  PairRecordSet out;
  for (std::size_t i = 0; i < matrix.firms.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.firms.size(); ++j) {
      std::string a = matrix.firms[i];
      std::string b = matrix.firms[j];
      if (b < a) std::swap(a, b);
      const auto ra = returns.find(a);
      const auto rb = returns.find(b);
      if (ra == returns.end() || rb == returns.end()) {
        out.excluded.emplace_back(a, b);
        continue;
      }
      try {
        out.records.push_back({a, b, matrix.values[i][j], cavdsr(ra->second, rb->second, min_overlap)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientOverlap && e.code() != ErrorCode::ZeroVariance) throw;
        out.excluded.emplace_back(a, b);
      }
    }
  }
  std::sort(out.records.begin(), out.records.end(), [](const PairRecord& x, const PairRecord& y) {
    return std::tie(x.firm_a, x.firm_b) < std::tie(y.firm_a, y.firm_b);
  });
  std::sort(out.excluded.begin(), out.excluded.end());
  return out;
}

GicsMap parse_gics(std::string_view csv) {
  const auto rows = io::parse_csv(csv);
  if (rows.empty() || rows[0].size() < 3 || rows[0][0] != "ticker") {
    throw Error(ErrorCode::ParseError, "GICS file needs a 'ticker,sector,industry' header");
  }
  GicsMap mapping;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].size() < 3) throw Error(ErrorCode::ParseError, "GICS row " + std::to_string(k) + " is short");
    mapping[rows[k][0]] = {rows[k][1], rows[k][2]};
  }
  return mapping;
}

int gics_binary_rrs(const GicsMap& mapping, const std::string& a, const std::string& b, GicsLevel level) {
  const auto ia = mapping.find(a);
  const auto ib = mapping.find(b);
  if (ia == mapping.end()) throw Error(ErrorCode::UnknownFirm, "no GICS entry for " + a);
  if (ib == mapping.end()) throw Error(ErrorCode::UnknownFirm, "no GICS entry for " + b);
  const auto& ga = ia->second;
  const auto& gb = ib->second;
  return level == GicsLevel::Sector ? (ga.sector == gb.sector ? 1 : 0)
                                    : (ga.industry == gb.industry ? 1 : 0);
}

std::vector<RetrievalRow> retrieval_metrics(const std::vector<RankedList>& lists,
                                            const std::vector<std::size_t>& ks) {
  if (lists.empty()) throw Error(ErrorCode::InvalidArgument, "no ranked lists to evaluate");
  for (const auto& list : lists) {
    if (list.relevant.empty()) {
      throw Error(ErrorCode::EmptyRelevanceSet, "query " + list.query_id + " has no relevant documents");
    }
    std::set<std::string> seen(list.ranked.begin(), list.ranked.end());
    if (seen.size() != list.ranked.size()) {
      throw Error(ErrorCode::InvalidArgument, "query " + list.query_id + " ranks a document twice");
    }
  }
  std::vector<RetrievalRow> rows;
  for (std::size_t k : ks) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "cutoff k must be at least 1");
    RetrievalRow row;
    row.k = k;
    for (const auto& list : lists) {
      double dcg = 0.0;
      std::size_t hits = 0;
      for (std::size_t rank = 1; rank <= std::min(k, list.ranked.size()); ++rank) {
        if (list.relevant.count(list.ranked[rank - 1])) {
          dcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
          ++hits;
        }
      }
      double idcg = 0.0;
      for (std::size_t rank = 1; rank <= std::min(k, list.relevant.size()); ++rank) {
        idcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
      }
      row.ndcg += dcg / idcg;
      row.precision += static_cast<double>(hits) / static_cast<double>(k);
      row.recall += static_cast<double>(hits) / static_cast<double>(list.relevant.size());
    }
    const auto q = static_cast<double>(lists.size());
    row.ndcg /= q;
    row.precision /= q;
    row.recall /= q;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = io::split(text, ':');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid must look like lo:hi:step");
  const double lo = parse_number(parts[0], "grid start");
  const double hi = parse_number(parts[1], "grid end");
  const double step = parse_number(parts[2], "grid step");
  if (!(step > 0.0) || lo > hi || lo < 0.0 || hi > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "grid needs 0 <= lo <= hi <= 1 and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return grid;
}

std::vector<SweepRow> threshold_sweep(const EmbeddingIndex& index, const std::vector<std::string>& firms,
                                      const std::vector<double>& grid,
                                      const std::map<std::pair<std::string, std::string>, double>* cavdsr_by_pair) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "grid values must lie in [0, 1]");
    if (k > 0 && !(grid[k - 1] < grid[k])) throw Error(ErrorCode::InvalidArgument, "grid must be ascending");
  }
  std::vector<SweepRow> rows;
  for (double xi : grid) {
    const ScoredMatrix scored = score_all(index, firms, xi);
    SweepRow row;
    row.threshold = xi;
    std::vector<PairRecord> records;
    for (const auto& pair : scored.pairs) {
      row.mean_rrs += pair.rrs;
      row.total_mrps += pair.mrp_count();
      if (cavdsr_by_pair) {
        const auto it = cavdsr_by_pair->find({pair.firm_a, pair.firm_b});
        if (it != cavdsr_by_pair->end()) records.push_back({pair.firm_a, pair.firm_b, pair.rrs, it->second});
      }
    }
    row.mean_rrs /= static_cast<double>(scored.pairs.size());
    if (cavdsr_by_pair) {
      try {
        row.rho = alignment_rho(records);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "threshold,mean_rrs,total_mrps,rho\n";
  for (const auto& r : rows) {
    out += io::fixed(r.threshold, 4) + "," + io::fixed(r.mean_rrs, 6) + "," + std::to_string(r.total_mrps) +
           "," + (r.rho ? io::fixed(*r.rho, 6) : std::string("NA")) + "\n";
  }
  return out;
}

}  // namespace riskrel
