#include "riskrel/corpus.hpp"
#include "riskrel/error.hpp"
#include "riskrel/io.hpp"
#include "riskrel/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <regex>

using namespace riskrel;
using Tokens = std::vector<std::string>;

TEST_SUITE("tokenize") {
  TEST_CASE("splits punctuation and lowercases") {
    CHECK(tokenize("Net loss, 2023.") == Tokens{"net", "loss", ",", "2023", "."});
    CHECK(tokenize("COVID-19") == Tokens{"covid", "-", "19"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \n\t ").empty());
  }

  TEST_CASE("unicode punctuation stands alone and non-breaking spaces separate") {
    CHECK(tokenize("Management’s view") == Tokens{"management", "’", "s", "view"});
    CHECK(tokenize("risk factors") == Tokens{"risk", "factors"});
    CHECK(tokenize("A \u2014 B") == Tokens{"a", "\u2014", "b"});
  }

  TEST_CASE("idempotent on its own joined output") {
    Rng rng(11);
    const std::string alphabet = "abcXYZ019 ,.;:-()$%&'\"/\n";
    for (int trial = 0; trial < 300; ++trial) {
      std::string text;
      const auto len = rng.uniform_int(0, 60);
      for (std::uint64_t k = 0; k < len; ++k) text += alphabet[rng.uniform_int(0, alphabet.size() - 1)];
      const Tokens once = tokenize(text);
      CHECK(tokenize(testing::join_words(once)) == once);
    }
  }
}

TEST_SUITE("strip_markup") {
  TEST_CASE("named examples") {
    CHECK(strip_markup("<p>Risk factors</p>") == "Risk factors");
    CHECK(strip_markup("plain text") == "plain text");
    CHECK(strip_markup("a<table><tr><td>1</td></tr></table>b") == "a b");
  }

  TEST_CASE("blocks become paragraph breaks and inline tags vanish") {
    CHECK(strip_markup("<p>one <b>bold</b> word</p><p>two</p>") == "one bold word\n\ntwo");
    CHECK(strip_markup("line<br/>next") == "line next");
    CHECK(strip_markup("<div>a</div>\n\n\n<div>b</div>") == "a\n\nb");
  }

  TEST_CASE("entities, comments, scripts and inline XBRL headers") {
    CHECK(strip_markup("AT&amp;T &#8217; &#x2019; &nbsp;x") == "AT&T ’ ’ x");
    CHECK(strip_markup("a<!-- hidden <p>b</p> -->c") == "a c");
    CHECK(strip_markup("a<script>var x = '<p>';</script>b") == "a b");
    CHECK(strip_markup("x<ix:header><ix:hidden>dei</ix:hidden></ix:header>y") == "x y");
    CHECK(strip_markup("<ix:nonNumeric name=\"us-gaap:Risk\">kept</ix:nonNumeric>") == "kept");
  }

  TEST_CASE("nested tables are removed whole") {
    CHECK(strip_markup("a<table><tr><td><table><tr><td>x</td></tr></table>y</td></tr></table>b") == "a b");
  }

  TEST_CASE("output never has '<' followed by a letter") {
    const std::regex tag_like("<[A-Za-z]");
    for (const std::string raw : {"&lt;p&gt;escaped", "a <b", "1 &lt; 2 &lt;x", "<p>ok</p><unterminated"}) {
      CHECK_FALSE(std::regex_search(strip_markup(raw), tag_like));
    }
    Rng rng(3);
    const std::vector<std::string> pieces = {"<p>", "</p>", "<b>", "text", "&lt;", "a", "<table>", "</table>",
                                             "&amp;", " ", "<br>", "<!--", "-->", "x<y", "&lt;q"};
    for (int trial = 0; trial < 300; ++trial) {
      std::string raw;
      for (int k = 0; k < 12; ++k) raw += pieces[rng.uniform_int(0, pieces.size() - 1)];
      CHECK_FALSE(std::regex_search(strip_markup(raw), tag_like));
    }
  }
}

TEST_SUITE("extract_sections") {
  TEST_CASE("named examples") {
    const auto one = extract_sections("Item 1A. Risk Factors X Y Z Item 1B. Other");
    REQUIRE(one.size() == 1);
    CHECK(one.at("1A") == "Risk Factors X Y Z");
    CHECK(extract_sections("no headings at all here").empty());
    const auto seven = extract_sections("ITEM 7A \u2014 Market Risk body Item 8");
    REQUIRE(seven.count("7A") == 1);
    CHECK(seven.at("7A") == "Market Risk body");
  }

  TEST_CASE("table of contents entries lose to the real section") {
    const std::string text =
        "Item 1A. Risk Factors 12\n\nItem 7A. Market Risk 40\n\nItem 1A. Risk Factors\n\nReal body text "
        "goes here.\n\nItem 1B. None\n\nItem 7A: Market Risk\n\nRates move.\n\nItem 8. Statements";
    const auto s = extract_sections(text);
    CHECK(s.at("1A") == "Risk Factors\n\nReal body text goes here.");
    CHECK(s.at("7A") == "Market Risk\n\nRates move.");
  }

  TEST_CASE("words that merely start with item are not headings") {
    const auto s = extract_sections("Item 1A. Risk itemized 12 lists Item 10 x Item 2");
    CHECK(s.at("1A") == "Risk itemized 12 lists");
  }

  TEST_CASE("bodies never contain a later heading") {
    const auto fx = synthetic::generate_fixture();
    const std::regex heading(R"((^|[^A-Za-z])[Ii][Tt][Ee][Mm]\s+\d{1,2}[A-Za-z]?([^A-Za-z0-9]|$))");
    for (const auto& [rel, content] : fx.files) {
      if (rel.rfind("filings/", 0) != 0) continue;
      for (const auto& [label, body] : extract_sections(strip_markup(content))) {
        CHECK_MESSAGE(!std::regex_search(body, heading), rel << " " << label);
      }
    }
  }
}

TEST_SUITE("segment_paragraphs") {
  const std::string block25 = testing::join_words(testing::numbered_words(25));

  TEST_CASE("named examples") {
    const auto two = segment_paragraphs(block25 + "\n\n" + block25, "ACME", 2024, "1A");
    REQUIRE(two.size() == 2);
    CHECK(two[0].ordinal == 0);
    CHECK(two[1].ordinal == 1);
    CHECK(two[0].id == "ACME:2024:1A:0");
    CHECK(two[1].id == "ACME:2024:1A:1");

    CHECK(segment_paragraphs("one two three four five", "ACME", 2024, "1A", 20).empty());

    const std::string block40 = testing::join_words(testing::numbered_words(40));
    const auto single = segment_paragraphs(block40, "ACME", 2024, "7A");
    REQUIRE(single.size() == 1);
    CHECK(single[0].tokens == tokenize(block40));
    CHECK(single[0].section == "7A");
  }

  TEST_CASE("short fragments do not consume ordinals and output is deterministic") {
    const std::string text = "Heading\n\n" + block25 + "\n\nshort\n\n" + block25;
    const auto first = segment_paragraphs(text, "X", 2023, "1A");
    const auto second = segment_paragraphs(text, "X", 2023, "1A");
    REQUIRE(first.size() == 2);
    CHECK(first[1].id == "X:2023:1A:1");
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(first[i].id == second[i].id);
      CHECK(first[i].tokens == second[i].tokens);
    }
  }
}

TEST_CASE("make_filing validates firm and year") {
  CHECK_THROWS_AS(make_filing("", 2024, "x", {"1A"}), Error);
  CHECK_THROWS_AS(make_filing("ACME", 1800, "x", {"1A"}), Error);
  const Filing f = make_filing("ACME", 2024, "<p>Item 1A. Risk</p><p>body</p>", {"1A"});
  CHECK(f.sections.at("1A") == "Risk\n\nbody");
}

TEST_CASE("ingesting the bundled fixture") {
  testing::TempDir dir("ingest");
  const auto fx = synthetic::generate_fixture();
  synthetic::write_fixture(fx, dir.path());
  const auto paragraphs = ingest_directory(dir / "filings", IngestOptions{});
  REQUIRE_FALSE(paragraphs.empty());

  std::set<std::string> ids;
  for (const auto& p : paragraphs) {
    CHECK(p.tokens == tokenize(p.text));
    CHECK(p.tokens.size() >= kDefaultMinTokens);
    CHECK((p.section == "1A" || p.section == "7A"));
    CHECK(ids.insert(p.id).second);
    CHECK(p.text.find("Revenue for fiscal") == std::string::npos);  // Item 7 text stays out
    CHECK(p.text.find("Operating income") == std::string::npos);    // tables are dropped
  }
  for (const auto& id : fx.planted_ids_a) CHECK(ids.count(id) == 1);
  for (const auto& id : fx.planted_ids_b) CHECK(ids.count(id) == 1);

  const auto corpora = group_by_firm(paragraphs);
  CHECK(corpora.size() == fx.tickers.size());
  CHECK(std::is_sorted(corpora.begin(), corpora.end(),
                       [](const FirmCorpus& a, const FirmCorpus& b) { return a.firm_id < b.firm_id; }));

  CHECK_THROWS_AS(ingest_directory(dir / "missing", IngestOptions{}), Error);
}
