#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace riskrel {

/// A single annual filing after markup removal.
struct Filing {
  std::string firm_id;
  int fiscal_year = 0;
  std::string raw_text;
  std::string cleaned_text;
  std::map<std::string, std::string> sections;
};

struct Paragraph {
  std::string id;
  std::string firm_id;
  int year = 0;
  std::string section;
  int ordinal = 0;
  std::string text;
  std::vector<std::string> tokens;
};

struct FirmCorpus {
  std::string firm_id;
  std::vector<Paragraph> paragraphs;

  std::size_t count() const { return paragraphs.size(); }
};

inline constexpr int kMinFiscalYear = 1990;
inline constexpr int kMaxFiscalYear = 2100;
inline constexpr std::size_t kDefaultMinTokens = 20;

/// Lowercases, splits on whitespace, and breaks punctuation into standalone
/// tokens. Runs of letters and digits stay together, so "2023" is one token
/// and "covid-19" becomes {"covid", "-", "19"}.
std::vector<std::string> tokenize(std::string_view text);

/// Removes HTML/XBRL markup. Table, script, style and inline-XBRL header
/// content is dropped entirely; block-level tags become paragraph breaks;
/// entity references are decoded. Whitespace is collapsed so that the only
/// newlines left are "\n\n" paragraph breaks.
std::string strip_markup(std::string_view raw);

/// Finds "Item <n><letter?>" headings (case-insensitive, optional ".", ":",
/// "-" or dash separator) and returns the text between each wanted heading
/// and the next heading. When a label occurs more than once (tables of
/// contents, cross references), the longest body wins.
std::map<std::string, std::string> extract_sections(
    std::string_view cleaned,
    const std::vector<std::string>& wanted = {"1A", "7A"});

/// Splits on blank-line breaks and keeps blocks with at least `min_tokens`
/// tokens. Ordinals count kept paragraphs in document order.
std::vector<Paragraph> segment_paragraphs(std::string_view section,
                                          const std::string& firm_id, int year,
                                          const std::string& label,
                                          std::size_t min_tokens = kDefaultMinTokens);

std::string paragraph_id(const std::string& firm_id, int year,
                         const std::string& section, int ordinal);

/// Reads a filing and validates firm/year.
Filing make_filing(std::string firm_id, int fiscal_year, std::string_view raw,
                   const std::vector<std::string>& sections);

struct IngestOptions {
  std::size_t min_tokens = kDefaultMinTokens;
  std::vector<std::string> sections = {"1A", "7A"};
};

/// Walks `<root>/<ticker>/<year>.txt` in sorted order and returns all
/// paragraphs from the requested sections.
std::vector<Paragraph> ingest_directory(const std::filesystem::path& root,
                                        const IngestOptions& options);

/// Groups paragraphs by firm, firms sorted ascending, paragraph order kept.
std::vector<FirmCorpus> group_by_firm(const std::vector<Paragraph>& paragraphs);

}  // namespace riskrel
