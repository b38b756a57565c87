#include "riskrel/io.hpp"

#include "riskrel/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace riskrel::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void BinaryWriter::u32(std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out_.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out_.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::bytes(std::string_view s) { out_.append(s); }

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.append(s);
}

std::string_view BinaryReader::bytes(std::size_t n) {
  if (n > data_.size() - pos_) throw Error(ErrorCode::ParseError, "truncated binary data");
  const std::string_view s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::uint32_t BinaryReader::u32() {
  const std::string_view b = bytes(4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= std::uint32_t(static_cast<unsigned char>(b[k])) << (8 * k);
  return v;
}

std::uint64_t BinaryReader::u64() {
  const std::string_view b = bytes(8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t(static_cast<unsigned char>(b[k])) << (8 * k);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() { return std::string(bytes(u32())); }

namespace {

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) f(line, line_no);
    pos = end + 1;
  }
}

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": " + std::string(e.what()));
  }
}

}  // namespace

std::string paragraphs_to_jsonl(const std::vector<Paragraph>& paragraphs) {
  std::string out;
  for (const auto& p : paragraphs) {
    json record = {{"id", p.id},     {"firm", p.firm_id}, {"year", p.year},
                   {"section", p.section}, {"text", p.text}, {"tokens", p.tokens}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<Paragraph> paragraphs_from_jsonl(std::string_view text) {
  std::vector<Paragraph> paragraphs;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json record = parse_json_line(line, line_no);
    try {
      Paragraph p;
      p.id = record.at("id").get<std::string>();
      p.firm_id = record.at("firm").get<std::string>();
      p.year = record.at("year").get<int>();
      p.section = record.at("section").get<std::string>();
      p.text = record.at("text").get<std::string>();
      p.tokens = record.at("tokens").get<std::vector<std::string>>();
      const auto colon = p.id.rfind(':');
      p.ordinal = colon == std::string::npos ? 0 : std::stoi(p.id.substr(colon + 1));
      paragraphs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "paragraph record on line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError,
                  "paragraph id on line " + std::to_string(line_no) + " has no ordinal");
    }
  });
  return paragraphs;
}

std::vector<Paragraph> read_paragraphs(const std::filesystem::path& path) {
  return paragraphs_from_jsonl(read_file(path));
}

std::string pairs_to_jsonl(const std::vector<PositivePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json record = {{"view", std::string(to_string(p.view))},
                   {"left_tokens", p.left_tokens},
                   {"right_tokens", p.right_tokens},
                   {"provenance", p.provenance}};
    if (p.draw) {
      record["seed_info"] = {{"seed", p.draw->seed}, {"i", p.draw->i}, {"j", p.draw->j}};
    }
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<PositivePair> pairs_from_jsonl(std::string_view text) {
  std::vector<PositivePair> pairs;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json record = parse_json_line(line, line_no);
    try {
      PositivePair p;
      p.view = view_from_string(record.at("view").get<std::string>());
      p.left_tokens = record.at("left_tokens").get<std::vector<std::string>>();
      p.right_tokens = record.at("right_tokens").get<std::vector<std::string>>();
      p.provenance = record.at("provenance").get<std::vector<std::string>>();
      if (record.contains("seed_info")) {
        const auto& s = record["seed_info"];
        p.draw = LexicalDraw{s.at("seed").get<std::uint64_t>(), s.at("i").get<std::size_t>(),
                             s.at("j").get<std::size_t>()};
      }
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "pair record on line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return pairs;
}

std::vector<PositivePair> read_pairs(const std::filesystem::path& path) {
  return pairs_from_jsonl(read_file(path));
}

namespace {

std::string_view trim_view(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim_view(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::InvalidConfig,
                    "config line " + std::to_string(line_no) + " is not key = value");
      }
      const std::string key(trim_view(line.substr(0, eq)));
      const std::string value(trim_view(line.substr(eq + 1)));
      if (key.empty()) {
        throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has no key");
      }
      values[key] = value;
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return values;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    parts.emplace_back(trim_view(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

namespace {

// Cells may be wrapped in double quotes to carry commas; "" inside quotes is a
// literal quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  auto finish = [&] {
    cells.push_back(was_quoted ? cell : std::string(trim_view(cell)));
    cell.clear();
    was_quoted = false;
  };
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c != '"') {
        cell += c;
      } else if (k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else {
        quoted = false;
      }
    } else if (c == '"' && trim_view(cell).empty()) {
      cell.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      finish();
    } else if (!was_quoted) {
      cell += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in CSV line: " + std::string(line));
  finish();
  return cells;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim_view(text.substr(pos, end - pos));
    if (!line.empty()) rows.push_back(split_csv_line(line));
    pos = end + 1;
  }
  return rows;
}

std::string fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

}  // namespace riskrel::io
