#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace riskrel {

/// A date expression found in a token sequence. `begin`/`end` are a
/// half-open token range covering the whole mention (month, day, comma,
/// year).
struct DateMention {
  std::string paragraph_id;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string normalized;  // YYYY-MM-DD
  bool is_accounting = false;
};

/// Recognised forms, over tokens produced by `tokenize`:
///   July 8, 2024 / Jul. 8 2024   (month name, day, optional comma, year)
///   July 2024                    (day defaults to 01)
///   07/08/2024                   (MM/DD/YYYY)
///   2024-07-08                   (YYYY-MM-DD)
/// Bare years are not dates. Quarter ends (03-31, 06-30, 09-30, 12-31) are
/// flagged as accounting dates.
std::vector<DateMention> detect_date_tokens(const std::vector<std::string>& tokens,
                                            const std::string& paragraph_id = {});

bool is_accounting_date(int month, int day);

/// Removes every date mention, re-scanning until none remain (removing one
/// span can splice neighbours into a new date).
std::vector<std::string> remove_date_tokens(std::vector<std::string> tokens);

}  // namespace riskrel
