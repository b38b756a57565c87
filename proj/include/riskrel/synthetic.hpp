#pragma once

#include "riskrel/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace riskrel::synthetic {

/// Generated 10-K style corpus with planted structure:
///   - every firm writes mostly about its own risk theme;
///   - the first two firms additionally carry near-identical supply-chain
///     paragraphs (the planted shared risk);
///   - each firm mentions four dated events, each in four paragraphs spread
///     over both filing years, plus recurring quarter-end dates;
///   - daily prices share volatility shocks where firms share risk.
struct FixtureOptions {
  std::uint64_t seed = 20240708;
  std::vector<int> years = {2023, 2024};
};

struct Fixture {
  /// Relative path -> file contents. Layout:
  ///   filings/<ticker>/<year>.txt, prices/<ticker>.csv, gics.csv,
  ///   planted.json, train.conf
  std::map<std::string, std::string> files;
  std::vector<std::string> tickers;
  std::string planted_a;
  std::string planted_b;
  std::vector<std::string> planted_ids_a;
  std::vector<std::string> planted_ids_b;
};

Fixture generate_fixture(const FixtureOptions& options = {});
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

/// Tokenized paragraphs on `topics` distinct themes (at most 10), `per_topic`
/// each, one firm per topic. Used for training tests without disk I/O.
std::vector<Paragraph> topic_paragraphs(std::size_t topics, std::size_t per_topic, std::uint64_t seed);

}  // namespace riskrel::synthetic
