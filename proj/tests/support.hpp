#pragma once

#include "riskrel/error.hpp"
#include "riskrel/rng.hpp"
#include "riskrel/scoring.hpp"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace riskrel::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("riskrel_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Code of the riskrel::Error thrown by `f`, or nullopt when nothing is thrown.
template <typename F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline EmbeddingVector random_vector(Rng& rng, std::size_t d) {
  std::vector<double> v(d);
  for (auto& x : v) x = rng.normal();
  return EmbeddingVector::from(std::move(v));
}

/// Random index: `firms` firms named F0.., each with 1..max_paragraphs random
/// vectors. Low dimension keeps cosines spread over the threshold range.
inline EmbeddingIndex random_index(Rng& rng, std::size_t firms, std::size_t max_paragraphs, std::size_t d = 3) {
  EmbeddingIndex index;
  for (std::size_t f = 0; f < firms; ++f) {
    FirmEmbeddings firm{"F" + std::to_string(f), {}};
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, max_paragraphs));
    for (std::size_t k = 0; k < n; ++k) {
      firm.paragraphs.push_back({firm.firm_id + ":2024:1A:" + std::to_string(k), random_vector(rng, d)});
    }
    index.firms.push_back(std::move(firm));
  }
  return index;
}

/// Straightforward reference: cosine from scratch, then a double loop.
struct OracleMrps {
  std::set<std::string> a;
  std::set<std::string> b;
  std::set<std::pair<std::string, std::string>> evidence;
};

inline double reference_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u[i]) * v[i];
    nu += static_cast<long double>(u[i]) * u[i];
    nv += static_cast<long double>(v[i]) * v[i];
  }
  return static_cast<double>(dot / (std::sqrt(nu) * std::sqrt(nv)));
}

inline OracleMrps oracle_mrps(const FirmEmbeddings& fa, const FirmEmbeddings& fb, double xi) {
  OracleMrps out;
  for (const auto& pa : fa.paragraphs) {
    for (const auto& pb : fb.paragraphs) {
      if (reference_cosine(pa.vector.values, pb.vector.values) >= xi) {
        out.a.insert(pa.id);
        out.b.insert(pb.id);
        out.evidence.insert({pa.id, pb.id});
      }
    }
  }
  return out;
}

/// Tokens of `n` distinct words w1..wn.
inline std::vector<std::string> numbered_words(std::size_t n, const std::string& stem = "w") {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

inline std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace riskrel::testing
