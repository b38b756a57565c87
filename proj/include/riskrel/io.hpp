#pragma once

#include "riskrel/corpus.hpp"
#include "riskrel/pairgen.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace riskrel::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Little-endian fixed-width encoding for the binary formats.
class BinaryWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void bytes(std::string_view s);
  void str(std::string_view s);  // u32 length + bytes
  const std::string& data() const { return out_; }

 private:
  std::string out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view data) : data_(data) {}
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string_view bytes(std::size_t n);
  std::string str();
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

// Paragraph records: {"id","firm","year","section","text","tokens"} per line.
std::string paragraphs_to_jsonl(const std::vector<Paragraph>& paragraphs);
std::vector<Paragraph> paragraphs_from_jsonl(std::string_view text);
std::vector<Paragraph> read_paragraphs(const std::filesystem::path& path);

// Pair records: {"view","left_tokens","right_tokens","provenance"[,"seed_info"]}.
std::string pairs_to_jsonl(const std::vector<PositivePair>& pairs);
std::vector<PositivePair> pairs_from_jsonl(std::string_view text);
std::vector<PositivePair> read_pairs(const std::filesystem::path& path);

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Comma-separated reader: double-quoted cells may hold commas, unquoted
/// cells are trimmed, blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::vector<std::string> split(std::string_view s, char sep);

/// Fixed-point formatting used in every numeric table.
std::string fixed(double value, int decimals = 6);

}  // namespace riskrel::io
