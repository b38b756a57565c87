#include "riskrel/corpus.hpp"

#include "riskrel/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

namespace riskrel {
namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alpha(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_ascii_alnum(unsigned char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }

bool is_ascii_punct(unsigned char c) {
  return c < 0x80 && !is_ascii_alnum(c) && !is_ascii_space(c) && c > 0x20 && c != 0x7f;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Length of the UTF-8 sequence starting with lead byte `c` (1 for invalid
// bytes, which are then passed through as word characters).
std::size_t utf8_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

char32_t utf8_decode(std::string_view s) {
  const auto b0 = static_cast<unsigned char>(s[0]);
  switch (s.size()) {
    case 2:
      return (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[1]) & 0x3F);
    case 3:
      return (char32_t(b0 & 0x0F) << 12) |
             (char32_t(static_cast<unsigned char>(s[1]) & 0x3F) << 6) |
             (static_cast<unsigned char>(s[2]) & 0x3F);
    case 4:
      return (char32_t(b0 & 0x07) << 18) |
             (char32_t(static_cast<unsigned char>(s[1]) & 0x3F) << 12) |
             (char32_t(static_cast<unsigned char>(s[2]) & 0x3F) << 6) |
             (static_cast<unsigned char>(s[3]) & 0x3F);
    default:
      return b0;
  }
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

bool is_unicode_space(char32_t cp) {
  return cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

bool is_unicode_punct(char32_t cp) {
  return (cp >= 0x2010 && cp <= 0x2027) || cp == 0x00A7 || cp == 0x00AE ||
         cp == 0x00A9 || cp == 0x2122 || cp == 0x00B7 || cp == 0x00AB || cp == 0x00BB;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// ---- markup -----------------------------------------------------------------

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (ascii_lower(s[pos + k]) != prefix[k]) return false;
  }
  return true;
}

bool is_tag_name_char(unsigned char c) {
  return is_ascii_alnum(c) || c == ':' || c == '-' || c == '_' || c == '.';
}

struct TagInfo {
  std::string name;
  bool closing = false;
  bool self_closing = false;
  std::size_t end = 0;  // one past '>'
};

// `pos` points at '<'. Returns false when the tag is unterminated.
bool parse_tag(std::string_view s, std::size_t pos, TagInfo& tag) {
  const std::size_t close = s.find('>', pos);
  if (close == std::string_view::npos) return false;
  std::size_t k = pos + 1;
  if (k < s.size() && s[k] == '/') {
    tag.closing = true;
    ++k;
  }
  tag.name.clear();
  while (k < close && is_tag_name_char(static_cast<unsigned char>(s[k]))) {
    tag.name.push_back(ascii_lower(s[k]));
    ++k;
  }
  tag.self_closing = close > pos && s[close - 1] == '/';
  tag.end = close + 1;
  return true;
}

bool drops_content(const std::string& name) {
  static const std::array<std::string_view, 6> names = {"table", "script", "style",
                                                        "head",  "ix:header", "title"};
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_block(const std::string& name) {
  static const std::array<std::string_view, 26> names = {
      "p",    "div",   "tr",      "li",     "ul",      "ol",         "h1",
      "h2",   "h3",    "h4",      "h5",     "h6",      "section",    "article",
      "hr",   "body",  "html",    "center", "dl",      "dt",         "dd",
      "pre",  "blockquote", "footer", "header", "document"};
  return std::find(names.begin(), names.end(), name) != names.end();
}

// Skips to the end of the element opened at `from` (already past the opening
// tag), honouring nesting of the same element name.
std::size_t skip_element(std::string_view s, std::size_t from, const std::string& name) {
  int depth = 1;
  std::size_t pos = from;
  while (pos < s.size()) {
    const std::size_t lt = s.find('<', pos);
    if (lt == std::string_view::npos) return s.size();
    TagInfo tag;
    if (!parse_tag(s, lt, tag)) return s.size();
    if (tag.name == name && !tag.self_closing) {
      depth += tag.closing ? -1 : 1;
      if (depth == 0) return tag.end;
    }
    pos = tag.end;
  }
  return s.size();
}

std::string remove_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const char c = s[pos];
    if (c != '<') {
      out.push_back(c);
      ++pos;
      continue;
    }
    if (s.compare(pos, 4, "<!--") == 0) {
      const std::size_t end = s.find("-->", pos + 4);
      pos = end == std::string_view::npos ? s.size() : end + 3;
      out.push_back(' ');
      continue;
    }
    const auto next = pos + 1 < s.size() ? static_cast<unsigned char>(s[pos + 1]) : 0;
    if (!(is_ascii_alpha(next) || next == '/' || next == '!' || next == '?')) {
      out.push_back(c);
      ++pos;
      continue;
    }
    TagInfo tag;
    if (!parse_tag(s, pos, tag)) break;  // unterminated: drop the rest
    if (!tag.closing && !tag.self_closing && drops_content(tag.name)) {
      pos = skip_element(s, tag.end, tag.name);
      out.push_back(' ');
      continue;
    }
    if (tag.name == "br") {
      out.push_back('\n');
    } else if (is_block(tag.name)) {
      out.append("\n\n");
    }
    pos = tag.end;
  }
  return out;
}

std::string decode_entities(std::string_view s) {
  static const std::array<std::pair<std::string_view, char32_t>, 20> named = {{
      {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},
      {"apos", U'\''},   {"nbsp", U' '},     {"mdash", 0x2014},  {"ndash", 0x2013},
      {"rsquo", 0x2019}, {"lsquo", 0x2018},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
      {"hellip", 0x2026}, {"sect", 0x00A7},  {"reg", 0x00AE},    {"copy", 0x00A9},
      {"trade", 0x2122}, {"bull", 0x2022},   {"middot", 0x00B7}, {"shy", 0x00AD},
  }};
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '&') {
      out.push_back(s[pos++]);
      continue;
    }
    const std::size_t semi = s.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 12) {
      out.push_back(s[pos++]);
      continue;
    }
    const std::string_view body = s.substr(pos + 1, semi - pos - 1);
    bool decoded = false;
    char32_t cp = 0;
    if (!body.empty() && body[0] == '#') {
      const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      const std::string_view digits = body.substr(hex ? 2 : 1);
      std::uint32_t value = 0;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() &&
          value > 0 && value < 0x110000) {
        cp = value;
        decoded = true;
      }
    } else {
      for (const auto& [name, value] : named) {
        if (body == name) {
          cp = value;
          decoded = true;
          break;
        }
      }
    }
    if (!decoded) {
      out.push_back(s[pos++]);
      continue;
    }
    if (cp == 0x00A0) cp = U' ';
    if (cp != 0x00AD) out += utf8_encode(cp);
    pos = semi + 1;
  }
  return out;
}

// A decoded "&lt;" must not form something that looks like a tag again.
void separate_angle_brackets(std::string& s) {
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    if (s[k] == '<' && is_ascii_alpha(static_cast<unsigned char>(s[k + 1]))) {
      s.insert(k + 1, 1, ' ');
    }
  }
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto c = static_cast<unsigned char>(s[pos]);
    const std::size_t len = utf8_length(c);
    const bool nbsp = len == 2 && pos + 1 < s.size() && c == 0xC2 &&
                      static_cast<unsigned char>(s[pos + 1]) == 0xA0;
    if (!is_ascii_space(c) && !nbsp) {
      const std::size_t take = std::min(len, s.size() - pos);
      out.append(s.substr(pos, take));
      pos += take;
      continue;
    }
    int newlines = 0;
    while (pos < s.size()) {
      const auto d = static_cast<unsigned char>(s[pos]);
      if (d == '\r') {
        ++newlines;
        pos += (pos + 1 < s.size() && s[pos + 1] == '\n') ? 2 : 1;
      } else if (d == '\n') {
        ++newlines;
        ++pos;
      } else if (is_ascii_space(d)) {
        ++pos;
      } else if (d == 0xC2 && pos + 1 < s.size() &&
                 static_cast<unsigned char>(s[pos + 1]) == 0xA0) {
        pos += 2;
      } else {
        break;
      }
    }
    out.append(newlines >= 2 ? "\n\n" : " ");
  }
  return std::string(trim(out));
}

// ---- sections ---------------------------------------------------------------

struct Heading {
  std::string label;
  std::size_t start = 0;
  std::size_t body_start = 0;
};

std::size_t skip_spaces(std::string_view s, std::size_t pos) {
  while (pos < s.size()) {
    const auto c = static_cast<unsigned char>(s[pos]);
    if (is_ascii_space(c)) {
      ++pos;
    } else if (c == 0xC2 && pos + 1 < s.size() &&
               static_cast<unsigned char>(s[pos + 1]) == 0xA0) {
      pos += 2;
    } else {
      break;
    }
  }
  return pos;
}

std::size_t skip_separator(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return pos;
  if (s[pos] == '.' || s[pos] == ':' || s[pos] == '-') return pos + 1;
  // em dash / en dash
  if (s.compare(pos, 3, "\xE2\x80\x94") == 0 || s.compare(pos, 3, "\xE2\x80\x93") == 0) {
    return pos + 3;
  }
  return pos;
}

std::vector<Heading> find_headings(std::string_view s) {
  std::vector<Heading> headings;
  std::size_t pos = 0;
  while (pos + 4 <= s.size()) {
    if (!starts_with_ci(s, pos, "item") ||
        (pos > 0 && is_ascii_alnum(static_cast<unsigned char>(s[pos - 1])))) {
      ++pos;
      continue;
    }
    std::size_t k = skip_spaces(s, pos + 4);
    if (k == pos + 4) {
      ++pos;
      continue;
    }
    const std::size_t digits_start = k;
    while (k < s.size() && is_ascii_digit(static_cast<unsigned char>(s[k])) &&
           k - digits_start < 2) {
      ++k;
    }
    if (k == digits_start) {
      ++pos;
      continue;
    }
    std::string label(s.substr(digits_start, k - digits_start));
    if (k < s.size() && is_ascii_alpha(static_cast<unsigned char>(s[k]))) {
      label.push_back(static_cast<char>(s[k] >= 'a' ? s[k] - 'a' + 'A' : s[k]));
      ++k;
    }
    if (k < s.size() && is_ascii_alnum(static_cast<unsigned char>(s[k]))) {
      ++pos;
      continue;
    }
    std::size_t body = skip_spaces(s, k);
    body = skip_spaces(s, skip_separator(s, body));
    headings.push_back({std::move(label), pos, body});
    pos = body > pos ? body : pos + 1;
  }
  return headings;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      tokens.push_back(std::move(word));
      word.clear();
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) {
      if (is_ascii_space(c) || c < 0x20 || c == 0x7f) {
        flush();
      } else if (is_ascii_punct(c)) {
        flush();
        tokens.emplace_back(1, static_cast<char>(c));
      } else {
        word.push_back(ascii_lower(static_cast<char>(c)));
      }
      ++pos;
      continue;
    }
    const std::size_t len = std::min(utf8_length(c), text.size() - pos);
    const std::string_view seq = text.substr(pos, len);
    const char32_t cp = utf8_decode(seq);
    if (is_unicode_space(cp)) {
      flush();
    } else if (is_unicode_punct(cp)) {
      flush();
      tokens.emplace_back(seq);
    } else {
      word.append(seq);
    }
    pos += len;
  }
  flush();
  return tokens;
}

std::string strip_markup(std::string_view raw) {
  std::string text = decode_entities(remove_tags(raw));
  separate_angle_brackets(text);
  return normalize_whitespace(text);
}

std::map<std::string, std::string> extract_sections(std::string_view cleaned,
                                                    const std::vector<std::string>& wanted) {
  const std::vector<Heading> headings = find_headings(cleaned);
  std::map<std::string, std::string> sections;
  for (std::size_t h = 0; h < headings.size(); ++h) {
    const Heading& heading = headings[h];
    if (std::find(wanted.begin(), wanted.end(), heading.label) == wanted.end()) continue;
    const std::size_t end = h + 1 < headings.size() ? headings[h + 1].start : cleaned.size();
    if (end <= heading.body_start) continue;
    const std::string_view body = trim(cleaned.substr(heading.body_start, end - heading.body_start));
    if (body.empty()) continue;
    auto it = sections.find(heading.label);
    if (it == sections.end() || body.size() > it->second.size()) {
      sections[heading.label] = std::string(body);
    }
  }
  return sections;
}

std::string paragraph_id(const std::string& firm_id, int year, const std::string& section,
                         int ordinal) {
  return firm_id + ":" + std::to_string(year) + ":" + section + ":" + std::to_string(ordinal);
}

std::vector<Paragraph> segment_paragraphs(std::string_view section, const std::string& firm_id,
                                          int year, const std::string& label,
                                          std::size_t min_tokens) {
  std::vector<Paragraph> paragraphs;
  auto emit = [&](std::string_view block) {
    block = trim(block);
    if (block.empty()) return;
    std::vector<std::string> tokens = tokenize(block);
    if (tokens.size() < min_tokens || tokens.empty()) return;
    Paragraph p;
    p.ordinal = static_cast<int>(paragraphs.size());
    p.id = paragraph_id(firm_id, year, label, p.ordinal);
    p.firm_id = firm_id;
    p.year = year;
    p.section = label;
    p.text = std::string(block);
    p.tokens = std::move(tokens);
    paragraphs.push_back(std::move(p));
  };

  // A block ends at a line that holds only whitespace.
  std::size_t block_start = 0;
  std::size_t line_start = 0;
  while (line_start <= section.size()) {
    std::size_t line_end = section.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = section.size();
    const std::string_view line = section.substr(line_start, line_end - line_start);
    if (trim(line).empty()) {
      emit(section.substr(block_start, line_start - block_start));
      block_start = line_end + 1;
    }
    if (line_end == section.size()) break;
    line_start = line_end + 1;
  }
  if (block_start < section.size()) emit(section.substr(block_start));
  return paragraphs;
}

Filing make_filing(std::string firm_id, int fiscal_year, std::string_view raw,
                   const std::vector<std::string>& sections) {
  if (firm_id.empty()) throw Error(ErrorCode::InvalidArgument, "firm id must be non-empty");
  if (fiscal_year < kMinFiscalYear || fiscal_year > kMaxFiscalYear) {
    throw Error(ErrorCode::InvalidArgument,
                "fiscal year " + std::to_string(fiscal_year) + " out of range for " + firm_id);
  }
  Filing filing;
  filing.firm_id = std::move(firm_id);
  filing.fiscal_year = fiscal_year;
  filing.raw_text = std::string(raw);
  filing.cleaned_text = strip_markup(raw);
  filing.sections = extract_sections(filing.cleaned_text, sections);
  return filing;
}

std::vector<Paragraph> ingest_directory(const std::filesystem::path& root,
                                        const IngestOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::MissingFile, "filing root not found: " + root.string());
  }
  std::vector<fs::path> firm_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) firm_dirs.push_back(entry.path());
  }
  std::sort(firm_dirs.begin(), firm_dirs.end());

  std::vector<Paragraph> out;
  for (const auto& dir : firm_dirs) {
    const std::string firm = dir.filename().string();
    std::vector<std::pair<int, fs::path>> years;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (!entry.is_regular_file() || name.size() != 8 || name.substr(4) != ".txt") continue;
      int year = 0;
      const auto [ptr, ec] = std::from_chars(name.data(), name.data() + 4, year);
      if (ec != std::errc() || ptr != name.data() + 4) continue;
      years.emplace_back(year, entry.path());
    }
    std::sort(years.begin(), years.end());
    for (const auto& [year, path] : years) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
      std::ostringstream buffer;
      buffer << in.rdbuf();
      const Filing filing = make_filing(firm, year, buffer.str(), options.sections);
      for (const auto& label : options.sections) {
        auto it = filing.sections.find(label);
        if (it == filing.sections.end()) continue;
        auto paragraphs = segment_paragraphs(it->second, firm, year, label, options.min_tokens);
        for (auto& p : paragraphs) out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::vector<FirmCorpus> group_by_firm(const std::vector<Paragraph>& paragraphs) {
  std::map<std::string, FirmCorpus> by_firm;
  for (const auto& p : paragraphs) {
    auto& corpus = by_firm[p.firm_id];
    corpus.firm_id = p.firm_id;
    corpus.paragraphs.push_back(p);
  }
  std::vector<FirmCorpus> out;
  out.reserve(by_firm.size());
  for (auto& [firm, corpus] : by_firm) out.push_back(std::move(corpus));
  return out;
}

}  // namespace riskrel
