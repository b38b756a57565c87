#include "riskrel/dates.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string_view>

namespace riskrel {
namespace {

struct MonthName {
  std::string_view name;
  int month;
  bool abbreviation;
};

constexpr std::array<MonthName, 24> kMonths = {{
    {"january", 1, false},   {"february", 2, false}, {"march", 3, false},
    {"april", 4, false},     {"may", 5, false},      {"june", 6, false},
    {"july", 7, false},      {"august", 8, false},   {"september", 9, false},
    {"october", 10, false},  {"november", 11, false}, {"december", 12, false},
    {"jan", 1, true},        {"feb", 2, true},       {"mar", 3, true},
    {"apr", 4, true},        {"jun", 6, true},       {"jul", 7, true},
    {"aug", 8, true},        {"sep", 9, true},       {"sept", 9, true},
    {"oct", 10, true},       {"nov", 11, true},      {"dec", 12, true},
}};

std::optional<MonthName> month_of(std::string_view token) {
  for (const auto& m : kMonths) {
    if (m.name == token) return m;
  }
  return std::nullopt;
}

// Parses an all-digit token of exactly `min_len..max_len` characters.
std::optional<int> digits(const std::vector<std::string>& tokens, std::size_t k,
                          std::size_t min_len, std::size_t max_len) {
  if (k >= tokens.size()) return std::nullopt;
  const std::string& t = tokens[k];
  if (t.size() < min_len || t.size() > max_len) return std::nullopt;
  int value = 0;
  for (char c : t) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

bool is_token(const std::vector<std::string>& tokens, std::size_t k, std::string_view s) {
  return k < tokens.size() && tokens[k] == s;
}

bool valid_date(int year, int month, int day) {
  if (year < 1900 || year > 2100) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  return ymd.ok();
}

std::string iso(int year, int month, int day) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

struct Match {
  std::size_t end;
  int year;
  int month;
  int day;
};

std::optional<Match> match_month_name(const std::vector<std::string>& tokens, std::size_t k) {
  const auto month = month_of(tokens[k]);
  if (!month) return std::nullopt;
  std::size_t next = k + 1;
  if (month->abbreviation && is_token(tokens, next, ".")) ++next;

  if (const auto day = digits(tokens, next, 1, 2)) {
    std::size_t year_at = next + 1;
    if (is_token(tokens, year_at, ",")) ++year_at;
    if (const auto year = digits(tokens, year_at, 4, 4);
        year && valid_date(*year, month->month, *day)) {
      return Match{year_at + 1, *year, month->month, *day};
    }
  }
  if (const auto year = digits(tokens, next, 4, 4); year && valid_date(*year, month->month, 1)) {
    return Match{next + 1, *year, month->month, 1};
  }
  return std::nullopt;
}

std::optional<Match> match_slashed(const std::vector<std::string>& tokens, std::size_t k) {
  const auto month = digits(tokens, k, 1, 2);
  if (!month || !is_token(tokens, k + 1, "/")) return std::nullopt;
  const auto day = digits(tokens, k + 2, 1, 2);
  if (!day || !is_token(tokens, k + 3, "/")) return std::nullopt;
  const auto year = digits(tokens, k + 4, 4, 4);
  if (!year || *month < 1 || *month > 12 || !valid_date(*year, *month, *day)) return std::nullopt;
  return Match{k + 5, *year, *month, *day};
}

std::optional<Match> match_iso(const std::vector<std::string>& tokens, std::size_t k) {
  const auto year = digits(tokens, k, 4, 4);
  if (!year || !is_token(tokens, k + 1, "-")) return std::nullopt;
  const auto month = digits(tokens, k + 2, 2, 2);
  if (!month || !is_token(tokens, k + 3, "-")) return std::nullopt;
  const auto day = digits(tokens, k + 4, 2, 2);
  if (!day || *month < 1 || *month > 12 || !valid_date(*year, *month, *day)) return std::nullopt;
  return Match{k + 5, *year, *month, *day};
}

}  // namespace

bool is_accounting_date(int month, int day) {
  return (month == 3 && day == 31) || (month == 6 && day == 30) ||
         (month == 9 && day == 30) || (month == 12 && day == 31);
}

std::vector<DateMention> detect_date_tokens(const std::vector<std::string>& tokens,
                                            const std::string& paragraph_id) {
  std::vector<DateMention> mentions;
  std::size_t k = 0;
  while (k < tokens.size()) {
    std::optional<Match> m = match_month_name(tokens, k);
    if (!m) m = match_slashed(tokens, k);
    if (!m) m = match_iso(tokens, k);
    if (!m) {
      ++k;
      continue;
    }
    mentions.push_back({paragraph_id, k, m->end, iso(m->year, m->month, m->day),
                        is_accounting_date(m->month, m->day)});
    k = m->end;
  }
  return mentions;
}

std::vector<std::string> remove_date_tokens(std::vector<std::string> tokens) {
  for (;;) {
    const auto mentions = detect_date_tokens(tokens);
    if (mentions.empty()) return tokens;
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    std::size_t next = 0;
    for (const auto& m : mentions) {
      for (std::size_t k = next; k < m.begin; ++k) kept.push_back(std::move(tokens[k]));
      next = m.end;
    }
    for (std::size_t k = next; k < tokens.size(); ++k) kept.push_back(std::move(tokens[k]));
    tokens = std::move(kept);
  }
}

}  // namespace riskrel
