#include "riskrel/pairgen.hpp"

#include "riskrel/dates.hpp"
#include "riskrel/error.hpp"
#include "riskrel/rng.hpp"

#include <algorithm>
#include <set>

namespace riskrel {

std::string_view to_string(View view) {
  return view == View::Chronological ? "chronological" : "lexical";
}

View view_from_string(std::string_view name) {
  if (name == "chronological" || name == "chrono") return View::Chronological;
  if (name == "lexical") return View::Lexical;
  throw Error(ErrorCode::InvalidArgument, "unknown view: " + std::string(name));
}

std::vector<PositivePair> build_chronological_pairs(const FirmCorpus& corpus,
                                                    std::size_t min_tokens) {
  const auto& paragraphs = corpus.paragraphs;
  std::vector<std::set<std::string>> event_dates(paragraphs.size());
  std::vector<std::vector<std::string>> stripped(paragraphs.size());
  for (std::size_t k = 0; k < paragraphs.size(); ++k) {
    for (const auto& m : detect_date_tokens(paragraphs[k].tokens, paragraphs[k].id)) {
      if (!m.is_accounting) event_dates[k].insert(m.normalized);
    }
    if (!event_dates[k].empty()) stripped[k] = remove_date_tokens(paragraphs[k].tokens);
  }

  std::vector<PositivePair> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t a = 0; a < paragraphs.size(); ++a) {
    if (event_dates[a].empty() || stripped[a].size() < min_tokens) continue;
    for (std::size_t b = a + 1; b < paragraphs.size(); ++b) {
      if (paragraphs[a].firm_id != paragraphs[b].firm_id) continue;
      if (event_dates[b].empty() || stripped[b].size() < min_tokens) continue;
      const bool shared = std::any_of(event_dates[a].begin(), event_dates[a].end(),
                                      [&](const std::string& d) { return event_dates[b].count(d); });
      if (!shared) continue;
      if (!seen.emplace(paragraphs[a].id, paragraphs[b].id).second) continue;
      PositivePair pair;
      pair.view = View::Chronological;
      pair.left_tokens = stripped[a];
      pair.right_tokens = stripped[b];
      pair.provenance = {paragraphs[a].id, paragraphs[b].id};
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

PositivePair make_lexical_pair(const Paragraph& paragraph, std::size_t i, std::size_t j) {
  const std::size_t n = paragraph.tokens.size();
  if (i < 1 || i >= j || j > n) {
    throw Error(ErrorCode::InvalidArgument, "lexical span indices out of range for " + paragraph.id);
  }
  PositivePair pair;
  pair.view = View::Lexical;
  pair.left_tokens.assign(paragraph.tokens.begin(), paragraph.tokens.begin() + j);
  pair.right_tokens.assign(paragraph.tokens.begin() + (i - 1), paragraph.tokens.end());
  pair.provenance = {paragraph.id};
  pair.draw = LexicalDraw{0, i, j};
  return pair;
}

LexicalResult build_lexical_pairs(const std::vector<Paragraph>& paragraphs,
                                  const LexicalOptions& options) {
  if (options.min_span < 1 || options.overlap_cap < 1) {
    throw Error(ErrorCode::InvalidArgument, "min_span and overlap_cap must be positive");
  }
  LexicalResult result;
  Rng rng(options.seed);
  const std::size_t m = options.min_span;
  for (const auto& p : paragraphs) {
    const std::size_t n = p.tokens.size();
    // j needs room in [i + 1, n - 1] for i = m, so n >= m + 2 as well.
    if (n < 2 * m || n < m + 2) {
      ++result.skipped;
      continue;
    }
    std::set<std::pair<std::size_t, std::size_t>> drawn;
    for (std::size_t draw = 0; draw < options.max_pairs_per_paragraph; ++draw) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(m, n - m));
      const std::size_t j_hi = std::min(i + options.overlap_cap, n - 1);
      if (j_hi < i + 1) continue;
      const auto j = static_cast<std::size_t>(rng.uniform_int(i + 1, j_hi));
      if (!drawn.emplace(i, j).second) continue;
      PositivePair pair = make_lexical_pair(p, i, j);
      pair.draw->seed = options.seed;
      result.pairs.push_back(std::move(pair));
    }
  }
  return result;
}

SplitResult split_train_val(std::vector<PositivePair> pairs, std::size_t train_count,
                            std::size_t val_count, std::uint64_t seed) {
  if (train_count + val_count > pairs.size()) {
    throw Error(ErrorCode::InsufficientPairs,
                "requested " + std::to_string(train_count) + "+" + std::to_string(val_count) +
                    " pairs but only " + std::to_string(pairs.size()) + " are available");
  }
  Rng rng(seed);
  rng.shuffle(pairs);

  std::set<std::string> val_ids;
  std::vector<bool> used(pairs.size(), false);
  auto touches = [&](const PositivePair& p) {
    return static_cast<int>(std::count_if(p.provenance.begin(), p.provenance.end(),
                                          [&](const std::string& id) { return val_ids.count(id); }));
  };

  SplitResult split;
  // Prefer pairs whose paragraphs are already in the validation split: those
  // pairs are lost to training either way.
  while (split.val.size() < val_count) {
    std::size_t best = pairs.size();
    int best_score = -1;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (used[k]) continue;
      const int score = touches(pairs[k]);
      if (score > best_score) {
        best = k;
        best_score = score;
        if (score == static_cast<int>(pairs[k].provenance.size())) break;
      }
    }
    used[best] = true;
    for (const auto& id : pairs[best].provenance) val_ids.insert(id);
    split.val.push_back(pairs[best]);
  }

  for (std::size_t k = 0; k < pairs.size() && split.train.size() < train_count; ++k) {
    if (used[k] || touches(pairs[k]) > 0) continue;
    split.train.push_back(std::move(pairs[k]));
  }
  if (split.train.size() < train_count) {
    throw Error(ErrorCode::InsufficientPairs,
                "only " + std::to_string(split.train.size()) +
                    " training pairs remain disjoint from validation; requested " +
                    std::to_string(train_count));
  }
  return split;
}

}  // namespace riskrel
