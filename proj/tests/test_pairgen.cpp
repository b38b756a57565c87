#include "riskrel/dates.hpp"
#include "riskrel/error.hpp"
#include "riskrel/io.hpp"
#include "riskrel/pairgen.hpp"
#include "riskrel/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace riskrel;

namespace {

Paragraph para(const std::string& firm, int year, int ordinal, const std::string& text) {
  Paragraph p;
  p.firm_id = firm;
  p.year = year;
  p.section = "1A";
  p.ordinal = ordinal;
  p.id = paragraph_id(firm, year, "1A", ordinal);
  p.text = text;
  p.tokens = tokenize(text);
  return p;
}

const std::string kFiller =
    "our supply chain could be disrupted by shortages of components and the loss of key vendors which would "
    "harm results of operations and financial condition in future periods";

bool contains_subsequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_SUITE("chronological view") {
  TEST_CASE("shared event date yields one pair with dates removed") {
    FirmCorpus corpus{"ACME",
                      {para("ACME", 2023, 0, "On July 8, 2024, a fire hit our plant. " + kFiller),
                       para("ACME", 2024, 0, "The July 8, 2024 fire still weighs on output. " + kFiller)}};
    const auto pairs = build_chronological_pairs(corpus);
    REQUIRE(pairs.size() == 1);
    const auto& pair = pairs[0];
    CHECK(pair.view == View::Chronological);
    CHECK(pair.provenance == std::vector<std::string>{"ACME:2023:1A:0", "ACME:2024:1A:0"});
    for (const auto* side : {&pair.left_tokens, &pair.right_tokens}) {
      CHECK(detect_date_tokens(*side).empty());
      CHECK_FALSE(contains_subsequence(*side, {"july", "8", ",", "2024"}));
      CHECK(std::find(side->begin(), side->end(), "fire") != side->end());
    }
  }

  TEST_CASE("different firms never pair") {
    const Paragraph a = para("AAA", 2024, 0, "On July 8, 2024, a fire hit. " + kFiller);
    const Paragraph b = para("BBB", 2024, 0, "On July 8, 2024, a fire hit. " + kFiller);
    CHECK(build_chronological_pairs(FirmCorpus{"AAA", {a, b}}).empty());
  }

  TEST_CASE("accounting dates alone never pair") {
    FirmCorpus corpus{"ACME",
                      {para("ACME", 2023, 0, "As of December 31, 2023, debt was high. " + kFiller),
                       para("ACME", 2023, 1, "For the year ended December 31, 2023, sales fell. " + kFiller),
                       para("ACME", 2023, 2, "At 12/31/2023 liquidity was adequate. " + kFiller)}};
    CHECK(build_chronological_pairs(corpus).empty());
  }

  TEST_CASE("formats normalize before matching and duplicates collapse") {
    FirmCorpus corpus{"ACME",
                      {para("ACME", 2023, 0, "On 07/08/2024 and March 3, 2023 events hit. " + kFiller),
                       para("ACME", 2023, 1, "Since 2024-07-08 and 03/03/2023 costs rose. " + kFiller),
                       para("ACME", 2023, 2, "Nothing dated here. " + kFiller)}};
    const auto pairs = build_chronological_pairs(corpus);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].provenance == std::vector<std::string>{"ACME:2023:1A:0", "ACME:2023:1A:1"});
  }

  TEST_CASE("sides too short after removal are dropped") {
    FirmCorpus corpus{"ACME", {para("ACME", 2023, 0, "On July 8, 2024 fire."),
                               para("ACME", 2023, 1, "On July 8, 2024 a fire hit. " + kFiller)}};
    CHECK(build_chronological_pairs(corpus).empty());
    CHECK(build_chronological_pairs(corpus, 1).size() == 1);
  }

  TEST_CASE("fixture pairs contain no date tokens and never reflexive") {
    const auto fx = synthetic::generate_fixture();
    testing::TempDir dir("chrono");
    synthetic::write_fixture(fx, dir.path());
    std::size_t total = 0;
    for (const auto& corpus : group_by_firm(ingest_directory(dir / "filings", IngestOptions{}))) {
      for (const auto& pair : build_chronological_pairs(corpus)) {
        ++total;
        CHECK(detect_date_tokens(pair.left_tokens).empty());
        CHECK(detect_date_tokens(pair.right_tokens).empty());
        REQUIRE(pair.provenance.size() == 2);
        CHECK(pair.provenance[0] < pair.provenance[1]);
      }
    }
    CHECK(total >= 200);
  }
}

TEST_SUITE("lexical view") {
  TEST_CASE("span formula") {
    const Paragraph p = para("ACME", 2024, 0, testing::join_words(testing::numbered_words(10)));
    const PositivePair pair = make_lexical_pair(p, 3, 7);
    CHECK(pair.left_tokens == std::vector<std::string>{"w1", "w2", "w3", "w4", "w5", "w6", "w7"});
    CHECK(pair.right_tokens == std::vector<std::string>{"w3", "w4", "w5", "w6", "w7", "w8", "w9", "w10"});
    CHECK_THROWS_AS(make_lexical_pair(p, 0, 4), Error);
    CHECK_THROWS_AS(make_lexical_pair(p, 5, 5), Error);
    CHECK_THROWS_AS(make_lexical_pair(p, 5, 11), Error);
  }

  TEST_CASE("short paragraphs are skipped and counted") {
    const Paragraph p = para("ACME", 2024, 0, testing::join_words(testing::numbered_words(5)));
    LexicalOptions options;
    options.min_span = 10;
    const auto result = build_lexical_pairs({p}, options);
    CHECK(result.pairs.empty());
    CHECK(result.skipped == 1);
  }

  TEST_CASE("prefix, suffix and overlap hold for every draw") {
    std::vector<Paragraph> paragraphs;
    for (int k = 0; k < 60; ++k) {
      paragraphs.push_back(para("ACME", 2024, k, testing::join_words(testing::numbered_words(20 + 7 * k))));
    }
    LexicalOptions options;
    options.seed = 99;
    options.min_span = 8;
    options.overlap_cap = 30;
    options.max_pairs_per_paragraph = 3;
    const auto result = build_lexical_pairs(paragraphs, options);
    REQUIRE(result.pairs.size() == 180);
    for (const auto& pair : result.pairs) {
      REQUIRE(pair.draw.has_value());
      const auto& d = *pair.draw;
      const auto source = std::find_if(paragraphs.begin(), paragraphs.end(),
                                       [&](const Paragraph& q) { return q.id == pair.provenance.at(0); });
      REQUIRE(source != paragraphs.end());
      const auto& w = source->tokens;
      const std::size_t n = w.size();
      CHECK(d.seed == 99);
      CHECK(d.i >= options.min_span);
      CHECK(d.i <= n - options.min_span);
      CHECK(d.j > d.i);
      CHECK(d.j <= std::min(d.i + options.overlap_cap, n - 1));
      CHECK(std::equal(pair.left_tokens.begin(), pair.left_tokens.end(), w.begin()));
      CHECK(pair.left_tokens.size() == d.j);
      CHECK(std::equal(pair.right_tokens.rbegin(), pair.right_tokens.rend(), w.rbegin()));
      CHECK(pair.right_tokens.size() == n - d.i + 1);
      CHECK(pair.left_tokens.size() + pair.right_tokens.size() > n);  // index ranges intersect
    }
  }

  TEST_CASE("same seed regenerates byte-identical output") {
    std::vector<Paragraph> paragraphs;
    for (int k = 0; k < 20; ++k) {
      paragraphs.push_back(para("ACME", 2024, k, testing::join_words(testing::numbered_words(80 + k))));
    }
    LexicalOptions options;
    options.seed = 5;
    const auto a = io::pairs_to_jsonl(build_lexical_pairs(paragraphs, options).pairs);
    const auto b = io::pairs_to_jsonl(build_lexical_pairs(paragraphs, options).pairs);
    CHECK(a == b);
    options.seed = 6;
    CHECK(io::pairs_to_jsonl(build_lexical_pairs(paragraphs, options).pairs) != a);
  }
}

TEST_SUITE("split_train_val") {
  std::vector<PositivePair> lexical_pairs(std::size_t n) {
    std::vector<PositivePair> out;
    for (std::size_t k = 0; k < n; ++k) {
      PositivePair p;
      p.left_tokens = {"a" + std::to_string(k)};
      p.right_tokens = {"b" + std::to_string(k)};
      p.provenance = {"P:2024:1A:" + std::to_string(k)};
      out.push_back(p);
    }
    return out;
  }

  TEST_CASE("disjoint split of the requested sizes") {
    const auto split = split_train_val(lexical_pairs(100), 80, 20, 1);
    CHECK(split.train.size() == 80);
    CHECK(split.val.size() == 20);
    std::set<std::string> train_ids;
    for (const auto& p : split.train) train_ids.insert(p.provenance[0]);
    for (const auto& p : split.val) CHECK(train_ids.count(p.provenance[0]) == 0);
  }

  TEST_CASE("too few pairs") {
    CHECK_THROWS_AS(split_train_val(lexical_pairs(50), 80, 20, 1), Error);
    try {
      split_train_val(lexical_pairs(50), 80, 20, 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientPairs);
    }
  }

  TEST_CASE("shared paragraphs never straddle the split") {
    // Cliques of four paragraphs, all six pairs each, as multi-mention
    // events produce.
    std::vector<PositivePair> pairs;
    for (int c = 0; c < 12; ++c) {
      for (int x = 0; x < 4; ++x) {
        for (int y = x + 1; y < 4; ++y) {
          PositivePair p;
          p.view = View::Chronological;
          p.left_tokens = {"l"};
          p.right_tokens = {"r"};
          p.provenance = {"F:2024:1A:" + std::to_string(c * 4 + x), "F:2024:1A:" + std::to_string(c * 4 + y)};
          pairs.push_back(p);
        }
      }
    }
    const auto split = split_train_val(pairs, 50, 12, 3);
    std::set<std::string> val_ids;
    for (const auto& p : split.val) val_ids.insert(p.provenance.begin(), p.provenance.end());
    for (const auto& p : split.train) {
      for (const auto& id : p.provenance) CHECK(val_ids.count(id) == 0);
    }
    CHECK(split.val.size() == 12);
    CHECK(split.train.size() == 50);
  }
}
