#include "riskrel/error.hpp"
#include "riskrel/eval.hpp"
#include "riskrel/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace riskrel;
using riskrel::testing::error_code_of;

namespace {

std::string day(int k) {
  // Distinct, lexically increasing ISO dates.
  const int month = 1 + k / 28;
  const int dom = 1 + k % 28;
  char buf[32];
  std::snprintf(buf, sizeof buf, "2024-%02d-%02d", month, dom);
  return buf;
}

ReturnSeries series(const std::string& firm, const std::vector<double>& returns, int offset = 0) {
  ReturnSeries s;
  s.firm_id = firm;
  for (std::size_t k = 0; k < returns.size(); ++k) s.dates.push_back(day(static_cast<int>(k) + offset));
  s.returns = returns;
  return s;
}

std::vector<double> random_returns(Rng& rng, std::size_t n) {
  std::vector<double> r(n);
  for (auto& x : r) x = 0.02 * rng.normal();
  return r;
}

std::vector<double> negated(std::vector<double> v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace

TEST_SUITE("returns") {
  TEST_CASE("simple returns from closes") {
    const auto r = daily_returns("A", {{"2024-01-02", 100}, {"2024-01-03", 110}});
    REQUIRE(r.returns.size() == 1);
    CHECK(r.returns[0] == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(r.dates == std::vector<std::string>{"2024-01-03"});

    const auto flat = daily_returns("A", {{"2024-01-02", 100}, {"2024-01-03", 100}, {"2024-01-04", 100}});
    CHECK(flat.returns == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("bad price series") {
    CHECK(error_code_of([] { daily_returns("A", {{"2024-01-02", 100}, {"2024-01-03", 0}}); }) ==
          ErrorCode::NonPositivePrice);
    CHECK(error_code_of([] { daily_returns("A", {{"2024-01-02", -1}, {"2024-01-03", 5}}); }) ==
          ErrorCode::NonPositivePrice);
    CHECK(error_code_of([] { daily_returns("A", {{"2024-01-02", 100}}); }) == ErrorCode::TooShort);
    CHECK(error_code_of([] { daily_returns("A", {{"2024-01-03", 100}, {"2024-01-02", 101}}); }) ==
          ErrorCode::UnsortedDates);
  }

  TEST_CASE("price files") {
    const auto prices = parse_prices("date,close\n2024-01-02,40.0000\n\n2024-01-03,39.5\n");
    REQUIRE(prices.size() == 2);
    CHECK(prices[1].date == "2024-01-03");
    CHECK(prices[1].close == 39.5);
    CHECK(error_code_of([] { parse_prices("2024-01-02,40\n"); }) == ErrorCode::ParseError);
    CHECK(error_code_of([] { parse_prices("date,close\n2024-01-02,abc\n"); }) == ErrorCode::ParseError);
    CHECK(error_code_of([] { read_return_dir("/nonexistent/riskrel/prices"); }) == ErrorCode::MissingFile);
  }

  TEST_CASE("bundled price directory") {
    const auto returns = read_return_dir(RISKREL_FIXTURE_DIR "/prices");
    CHECK(returns.size() == 8);
    for (const auto& [ticker, s] : returns) {
      CHECK(s.firm_id == ticker);
      CHECK(s.dates.size() == s.returns.size());
      CHECK(s.returns.size() > 200);
      CHECK(std::is_sorted(s.dates.begin(), s.dates.end()));
    }
  }
}

TEST_SUITE("correlation") {
  TEST_CASE("pearson properties on random vectors") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(2, 40));
      const auto x = random_returns(rng, n);
      const auto y = random_returns(rng, n);
      const double r = pearson(x, y);
      CHECK(r >= -1.0);
      CHECK(r <= 1.0);
      CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(pearson(x, negated(x)) == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));
    }
  }

  TEST_CASE("degenerate inputs") {
    CHECK(error_code_of([] { pearson({1, 1, 1}, {1, 2, 3}); }) == ErrorCode::ZeroVariance);
    CHECK(error_code_of([] { pearson({1}, {2}); }) == ErrorCode::DegenerateInput);
    CHECK(error_code_of([] { pearson({1, 2}, {1, 2, 3}); }) == ErrorCode::DimensionMismatch);
  }

  TEST_CASE("spearman uses average ranks") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 1000}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 1, 2}, {1, 1, 2}) == doctest::Approx(1.0));
  }
}

TEST_SUITE("cavdsr") {
  TEST_CASE("named cases") {
    Rng rng(1);
    const auto a = series("A", random_returns(rng, 60));
    CHECK(cavdsr(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cavdsr(a, series("B", negated(a.returns))) == 1.0);
    const auto flat_a = series("A", std::vector<double>(40, 0.01));
    const auto flat_b = series("B", std::vector<double>(40, 0.03));
    CHECK(error_code_of([&] { cavdsr(flat_a, flat_b); }) == ErrorCode::ZeroVariance);
  }

  TEST_CASE("only shared dates count") {
    Rng rng(2);
    const auto a = series("A", random_returns(rng, 50));
    const auto b = series("B", random_returns(rng, 50), 25);  // 25 shared days
    CHECK(error_code_of([&] { cavdsr(a, b); }) == ErrorCode::InsufficientOverlap);
    const double r = cavdsr(a, b, 20);
    std::vector<double> x, y;
    for (int k = 0; k < 25; ++k) {
      x.push_back(std::fabs(a.returns[static_cast<std::size_t>(25 + k)]));
      y.push_back(std::fabs(b.returns[static_cast<std::size_t>(k)]));
    }
    CHECK(r == doctest::Approx(pearson(x, y)).epsilon(1e-12));
  }

  TEST_CASE("symmetric and blind to sign flips") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = series("A", random_returns(rng, 40));
      auto b = series("B", random_returns(rng, 40));
      const double r = cavdsr(a, b);
      CHECK(cavdsr(b, a) == r);
      for (std::size_t k = 0; k < b.returns.size(); ++k) {
        if (rng.uniform() < 0.5) b.returns[k] = -b.returns[k];
      }
      CHECK(cavdsr(a, b) == r);
    }
  }
}

TEST_SUITE("alignment") {
  TEST_CASE("named cases") {
    CHECK(std::abs(alignment_rho({{"A", "B", 0.1, 0.2}, {"A", "C", 0.2, 0.4}, {"B", "C", 0.3, 0.6}}) - 1.0) <=
          1e-12);
    CHECK(alignment_rho({{"A", "B", 0.5, 0.5}, {"A", "C", 0.1, 0.1}}) == doctest::Approx(1.0));
    CHECK(error_code_of([] { alignment_rho({{"A", "B", 0.1, 0.2}}); }) == ErrorCode::DegenerateInput);
    CHECK(error_code_of([] { alignment_rho({{"A", "B", 0.1, 0.2}, {"A", "C", 0.1, 0.4}}); }) ==
          ErrorCode::DegenerateInput);
  }

  TEST_CASE("self pairs are ignored") {
    const std::vector<PairRecord> with_self = {
        {"A", "A", 1.0, -0.9}, {"A", "B", 0.1, 0.2}, {"A", "C", 0.2, 0.3}, {"B", "C", 0.4, 0.35}};
    const std::vector<PairRecord> without(with_self.begin() + 1, with_self.end());
    CHECK(alignment_rho(with_self) == alignment_rho(without));
  }

  TEST_CASE("invariant under positive affine rescaling of scores") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<PairRecord> records;
      for (int k = 0; k < 10; ++k) {
        records.push_back({"A", "F" + std::to_string(k), rng.uniform(), rng.uniform(-1.0, 1.0)});
      }
      const double rho = alignment_rho(records);
      const double scale = 0.01 + 10.0 * rng.uniform();
      const double shift = rng.uniform(-5.0, 5.0);
      for (auto& r : records) r.rrs = scale * r.rrs + shift;
      CHECK(alignment_rho(records) == doctest::Approx(rho).epsilon(1e-10));
    }
  }

  TEST_CASE("pair records skip firms without usable returns") {
    RrsMatrix m;
    m.firms = {"A", "B", "C"};
    m.values = {{1, 0.5, 0.2}, {0.5, 1, 0.1}, {0.2, 0.1, 1}};
    Rng rng(4);
    std::map<std::string, ReturnSeries> returns = {{"A", series("A", random_returns(rng, 40))},
                                                   {"B", series("B", random_returns(rng, 40))}};
    const auto set = build_pair_records(m, returns);
    REQUIRE(set.records.size() == 1);
    CHECK(set.records[0].firm_a == "A");
    CHECK(set.records[0].firm_b == "B");
    CHECK(set.records[0].rrs == 0.5);
    CHECK(set.excluded == std::vector<std::pair<std::string, std::string>>{{"A", "C"}, {"B", "C"}});
  }
}

TEST_SUITE("gics baseline") {
  const char* kTenFirms =
      "ticker,sector,industry\n"
      "AAPL,Information Technology,Technology Hardware\n"
      "MSFT,Information Technology,Software\n"
      "ORCL,Information Technology,Software\n"
      "JPM,Financials,Banks\n"
      "BAC,Financials,Banks\n"
      "AIG,Financials,Insurance\n"
      "XOM,Energy,\"Oil, Gas and Consumable Fuels\"\n"
      "CVX,Energy,\"Oil, Gas and Consumable Fuels\"\n"
      "PFE,Health Care,Pharmaceuticals\n"
      "UNH,Health Care,Health Care Providers\n";

  TEST_CASE("same group scores one, otherwise zero") {
    const GicsMap m = parse_gics(kTenFirms);
    REQUIRE(m.size() == 10);
    CHECK(m.at("XOM").industry == "Oil, Gas and Consumable Fuels");
    CHECK(gics_binary_rrs(m, "AAPL", "MSFT", GicsLevel::Sector) == 1);
    CHECK(gics_binary_rrs(m, "AAPL", "MSFT", GicsLevel::Industry) == 0);
    CHECK(gics_binary_rrs(m, "MSFT", "ORCL", GicsLevel::Industry) == 1);
    CHECK(gics_binary_rrs(m, "AAPL", "JPM", GicsLevel::Sector) == 0);
    CHECK(gics_binary_rrs(m, "XOM", "CVX", GicsLevel::Industry) == 1);
    CHECK(error_code_of([&] { gics_binary_rrs(m, "AAPL", "TSLA", GicsLevel::Sector); }) == ErrorCode::UnknownFirm);
  }

  TEST_CASE("rule holds over every pair of the ten firms") {
    const GicsMap m = parse_gics(kTenFirms);
    for (const auto& [a, ga] : m) {
      for (const auto& [b, gb] : m) {
        CHECK(gics_binary_rrs(m, a, b, GicsLevel::Sector) == (ga.sector == gb.sector ? 1 : 0));
        CHECK(gics_binary_rrs(m, a, b, GicsLevel::Industry) == (ga.industry == gb.industry ? 1 : 0));
        CHECK(gics_binary_rrs(m, a, b, GicsLevel::Sector) == gics_binary_rrs(m, b, a, GicsLevel::Sector));
        CHECK(gics_binary_rrs(m, a, b, GicsLevel::Industry) <= gics_binary_rrs(m, a, b, GicsLevel::Sector));
      }
    }
  }

  TEST_CASE("bundled mapping parses cleanly") {
    const GicsMap m = parse_gics(io::read_file(RISKREL_FIXTURE_DIR "/gics.csv"));
    CHECK(m.size() == 8);
    CHECK(m.at("PETR").industry == "Oil, Gas and Consumable Fuels");
    CHECK(gics_binary_rrs(m, "BNKA", "INSU", GicsLevel::Sector) == 1);
    CHECK(gics_binary_rrs(m, "BNKA", "INSU", GicsLevel::Industry) == 0);
  }
}

TEST_SUITE("retrieval") {
  TEST_CASE("perfect, empty and partial rankings") {
    const auto perfect = retrieval_metrics({{"q", {"d1", "d2"}, {"d1"}}}, {1});
    CHECK(perfect[0].ndcg == 1.0);
    CHECK(perfect[0].precision == 1.0);
    CHECK(perfect[0].recall == 1.0);

    const auto miss = retrieval_metrics({{"q", {"x", "y", "z"}, {"d1"}}}, {3});
    CHECK(miss[0].ndcg == 0.0);
    CHECK(miss[0].precision == 0.0);
    CHECK(miss[0].recall == 0.0);

    const auto partial = retrieval_metrics({{"q", {"x", "d1", "d2"}, {"d1", "d2"}}}, {3});
    const double expected = (1 / std::log2(3.0) + 0.5) / (1 + 1 / std::log2(3.0));
    CHECK(std::abs(partial[0].ndcg - 0.6934) <= 1e-4);
    CHECK(std::abs(partial[0].ndcg - expected) <= 1e-12);
    CHECK(partial[0].precision == doctest::Approx(2.0 / 3.0));
    CHECK(partial[0].recall == 1.0);
  }

  TEST_CASE("errors") {
    CHECK(error_code_of([] { retrieval_metrics({{"q", {"a"}, {}}}, {1}); }) == ErrorCode::EmptyRelevanceSet);
    CHECK(error_code_of([] { retrieval_metrics({{"q", {"a", "a"}, {"a"}}}, {1}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { retrieval_metrics({{"q", {"a"}, {"a"}}}, {0}); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("bounds and hit counts on random rankings") {
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
      RankedList list;
      list.query_id = "q";
      const auto n = static_cast<std::size_t>(rng.uniform_int(1, 15));
      for (std::size_t k = 0; k < n; ++k) {
        list.ranked.push_back("d" + std::to_string(k));
        if (rng.uniform() < 0.3) list.relevant.insert("d" + std::to_string(k));
      }
      list.relevant.insert("extra");
      rng.shuffle(list.ranked);
      for (std::size_t k : {1, 3, 5, 10}) {
        const auto row = retrieval_metrics({list}, {k})[0];
        CHECK(row.ndcg >= 0.0);
        CHECK(row.ndcg <= 1.0 + 1e-12);
        const double hits_p = row.precision * static_cast<double>(k);
        const double hits_r = row.recall * static_cast<double>(list.relevant.size());
        CHECK(hits_p == doctest::Approx(std::round(hits_p)));
        CHECK(std::round(hits_p) == std::round(hits_r));
        const std::size_t top = std::min(k, list.relevant.size());
        bool ideal = top <= list.ranked.size();
        for (std::size_t r = 0; ideal && r < top; ++r) ideal = list.relevant.count(list.ranked[r]) > 0;
        CHECK((std::abs(row.ndcg - 1.0) < 1e-12) == ideal);
      }
    }
  }

  TEST_CASE("averaged over queries") {
    const auto rows = retrieval_metrics({{"a", {"x"}, {"x"}}, {"b", {"y"}, {"z"}}}, {1});
    CHECK(rows[0].ndcg == 0.5);
    CHECK(rows[0].precision == 0.5);
    CHECK(rows[0].recall == 0.5);
  }
}

TEST_SUITE("threshold sweep") {
  TEST_CASE("grid parsing") {
    const auto grid = parse_grid("0.6:0.9:0.05");
    REQUIRE(grid.size() == 7);
    CHECK(grid.front() == 0.6);
    CHECK(grid[3] == 0.75);
    CHECK(grid.back() == 0.9);
    CHECK(parse_grid("0.5:0.9:0.05").size() == 9);
    CHECK(error_code_of([] { parse_grid("0.6:0.9"); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { parse_grid("0.9:0.6:0.05"); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { parse_grid("0.6:0.9:0"); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("a single 0.72 similarity drops out at 0.75") {
    EmbeddingIndex index;
    index.firms.push_back({"A", {{"A:0", EmbeddingVector::from({1, 0})}}});
    index.firms.push_back({"B", {{"B:0", EmbeddingVector::from({0.72, std::sqrt(1 - 0.72 * 0.72)})}}});
    const auto rows = threshold_sweep(index, {"A", "B"}, parse_grid("0.6:0.9:0.05"));
    REQUIRE(rows.size() == 7);
    for (const auto& row : rows) {
      const bool counted = row.threshold < 0.72;
      CHECK_MESSAGE(row.total_mrps == (counted ? 2u : 0u), row.threshold);
      CHECK(row.mean_rrs == (counted ? 1.0 : 0.0));
      CHECK_FALSE(row.rho.has_value());
    }
  }

  TEST_CASE("counts never rise along the grid") {
    Rng rng(44);
    for (int trial = 0; trial < 40; ++trial) {
      const auto index = testing::random_index(rng, 4, 10);
      const auto rows = threshold_sweep(index, index.firm_ids(), parse_grid("0.6:0.9:0.05"));
      REQUIRE(rows.size() == 7);
      for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].total_mrps <= rows[k - 1].total_mrps);
        CHECK(rows[k].mean_rrs <= rows[k - 1].mean_rrs);
      }
    }
  }

  TEST_CASE("rho per threshold when returns are supplied") {
    Rng rng(45);
    const auto index = testing::random_index(rng, 5, 12);
    std::map<std::pair<std::string, std::string>, double> cav;
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) cav[{index.firms[i].firm_id, index.firms[j].firm_id}] = rng.uniform();
    }
    const auto rows = threshold_sweep(index, index.firm_ids(), {0.5, 0.99}, &cav);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rho.has_value());
    const std::string csv = sweep_to_csv(rows);
    CHECK(csv.rfind("threshold,mean_rrs,total_mrps,rho\n0.5000,", 0) == 0);
    CHECK(error_code_of([&] { threshold_sweep(index, index.firm_ids(), {0.8, 0.7}); }) ==
          ErrorCode::InvalidArgument);
  }
}
