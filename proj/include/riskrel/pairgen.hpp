#pragma once

#include "riskrel/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskrel {

enum class View { Chronological, Lexical };

std::string_view to_string(View view);
View view_from_string(std::string_view name);

/// The random draw behind a lexical pair; indices are 1-based as in
/// left = w[1..j], right = w[i..n].
struct LexicalDraw {
  std::uint64_t seed = 0;
  std::size_t i = 0;
  std::size_t j = 0;
};

struct PositivePair {
  View view = View::Lexical;
  std::vector<std::string> left_tokens;
  std::vector<std::string> right_tokens;
  std::vector<std::string> provenance;
  std::optional<LexicalDraw> draw;
};

/// Pairs same-firm paragraphs that share at least one identical
/// non-accounting date. Every date mention is removed from both sides before
/// the pair is emitted; pairs with a side shorter than `min_tokens` after
/// removal are dropped. Left is always the earlier paragraph in corpus order.
std::vector<PositivePair> build_chronological_pairs(const FirmCorpus& corpus,
                                                    std::size_t min_tokens = kDefaultMinTokens);

struct LexicalOptions {
  std::uint64_t seed = 0;
  std::size_t min_span = 32;
  std::size_t overlap_cap = 128;
  std::size_t max_pairs_per_paragraph = 1;
};

struct LexicalResult {
  std::vector<PositivePair> pairs;
  std::size_t skipped = 0;  // paragraphs too short to draw from
};

/// Builds the overlapping-span pair for 1-based indices i < j.
PositivePair make_lexical_pair(const Paragraph& paragraph, std::size_t i, std::size_t j);

/// Per paragraph: i ~ U[min_span, n - min_span], j ~ U[i + 1, min(i + cap, n - 1)].
LexicalResult build_lexical_pairs(const std::vector<Paragraph>& paragraphs,
                                  const LexicalOptions& options);

struct SplitResult {
  std::vector<PositivePair> train;
  std::vector<PositivePair> val;
};

/// Seeded split of one view's pairs. Validation pairs are drawn first; any
/// pair that shares a paragraph with the validation split is withheld from
/// training, so no paragraph id crosses the split.
SplitResult split_train_val(std::vector<PositivePair> pairs, std::size_t train_count,
                            std::size_t val_count, std::uint64_t seed);

}  // namespace riskrel
