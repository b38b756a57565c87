#include "riskrel/encoder.hpp"
#include "riskrel/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace riskrel;
using riskrel::testing::error_code_of;

namespace {

EncoderParams identity_params(std::size_t vocab_size, int dim) {
  EncoderParams p;
  p.embed = RowMatrix::Zero(static_cast<Eigen::Index>(vocab_size), dim);
  p.proj_w = RowMatrix::Identity(dim, dim);
  p.proj_b = Eigen::VectorXd::Zero(dim);
  return p;
}

EmbeddingVector vec(std::vector<double> v) { return EmbeddingVector::from(std::move(v)); }

}  // namespace

TEST_CASE("vocabulary keeps frequent tokens plus the two specials") {
  const Vocabulary v = build_vocab({{"a", "a", "b"}}, 2);
  CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<unk>", "a"});
  CHECK(v.lookup("a") == 2);
  CHECK(v.lookup("b") == Vocabulary::kUnk);
  CHECK(v.lookup("never") == Vocabulary::kUnk);
}

TEST_CASE("vocabulary ordering is frequency then token") {
  const Vocabulary v = build_vocab({{"z", "z", "z", "b", "b", "a", "a"}, {"c"}}, 1);
  CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<unk>", "z", "a", "b", "c"});
  CHECK(build_vocab({{"q", "r"}, {"r", "q"}}).tokens() == build_vocab({{"r", "q"}, {"q", "r"}}).tokens());
}

TEST_CASE("empty corpus cannot build a vocabulary") {
  CHECK(error_code_of([] { build_vocab({}); }) == ErrorCode::EmptyCorpus);
  CHECK(error_code_of([] { build_vocab({{}, {}}); }) == ErrorCode::EmptyCorpus);
}

TEST_CASE("initialisation is seeded and leaves PAD at zero") {
  const auto a = init_params(50, 8, 4);
  const auto b = init_params(50, 8, 4);
  const auto c = init_params(50, 8, 5);
  CHECK(a.embed == b.embed);
  CHECK(a.proj_w == b.proj_w);
  CHECK(a.embed != c.embed);
  CHECK(a.embed.row(Vocabulary::kPad).isZero(0.0));
  CHECK(a.proj_b.isZero(0.0));
}

TEST_CASE("hand-computed forward pass") {
  auto p = identity_params(4, 2);
  p.embed.row(2) << 1.0, 0.0;
  p.embed.row(3) << 0.0, 2.0;
  const std::vector<int> one = {2};
  const auto e = encode(p, one);
  CHECK(e.values[0] == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
  CHECK(e.values[1] == 0.0);

  const std::vector<int> repeated = {2, 2, 2};
  CHECK(encode(p, repeated).values == e.values);

  const std::vector<int> mixed = {2, 3};
  const auto m = encode(p, mixed);
  CHECK(m.values[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(m.values[1] == doctest::Approx(std::tanh(1.0)));

  p.proj_b << 0.25, -0.25;
  const auto shifted = encode(p, one);
  CHECK(shifted.values[0] == doctest::Approx(std::tanh(1.25)));
  CHECK(shifted.values[1] == doctest::Approx(std::tanh(-0.25)));
}

TEST_CASE("nothing left to encode") {
  const auto p = init_params(10, 4, 1);
  CHECK(error_code_of([&] { encode(p, std::vector<int>{}); }) == ErrorCode::EmptyParagraph);
  CHECK(error_code_of([&] { encode(p, std::vector<int>{0, 0, 0}); }) == ErrorCode::EmptyParagraph);
  CHECK(error_code_of([&] { encode(p, std::vector<int>{10}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("padding positions do not change the output") {
  const auto p = init_params(30, 6, 2);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> ids;
    const auto n = rng.uniform_int(1, 20);
    for (std::uint64_t k = 0; k < n; ++k) ids.push_back(static_cast<int>(rng.uniform_int(1, 29)));
    std::vector<int> padded;
    for (int id : ids) {
      padded.push_back(id);
      if (rng.uniform() < 0.4) padded.push_back(Vocabulary::kPad);
    }
    padded.insert(padded.end(), 5, Vocabulary::kPad);
    const auto x = encode(p, ids).values;
    const auto y = encode(p, padded).values;
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(y[k]).epsilon(1e-12));
  }
}

TEST_CASE("positions past max_len are ignored") {
  const auto p = init_params(30, 6, 3);
  std::vector<int> ids = {5, 6, 7, 8};
  std::vector<int> longer = ids;
  longer.insert(longer.end(), {20, 21, 22});
  CHECK(encode(p, longer, 4).values == encode(p, ids, 4).values);
  CHECK(encode(p, longer, 4).values != encode(p, longer, 7).values);
}

TEST_CASE("outputs stay inside the tanh range") {
  auto p = init_params(20, 5, 9);
  p.proj_w *= 1000.0;
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ids = {static_cast<int>(rng.uniform_int(1, 19)), static_cast<int>(rng.uniform_int(1, 19))};
    for (double x : encode(p, ids).values) {
      CHECK(x >= -1.0);
      CHECK(x <= 1.0);
    }
  }
}

TEST_SUITE("similarity") {
  TEST_CASE("named values") {
    CHECK(similarity(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity(vec({1, 0}), vec({-1, 0})) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(similarity(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
  }

  TEST_CASE("zero vectors and mismatched widths are rejected") {
    CHECK(error_code_of([] { similarity(vec({0, 0}), vec({1, 0})); }) == ErrorCode::ZeroVector);
    CHECK(error_code_of([] { similarity(vec({1, 0}), vec({1, 0, 0})); }) == ErrorCode::DimensionMismatch);
  }

  TEST_CASE("symmetric, bounded and scale invariant") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const auto u = testing::random_vector(rng, 7);
      const auto v = testing::random_vector(rng, 7);
      const double s = similarity(u, v);
      CHECK(s == similarity(v, u));
      CHECK(s >= -1.0);
      CHECK(s <= 1.0);
      CHECK(s == doctest::Approx(testing::reference_cosine(u.values, v.values)).epsilon(1e-12));
      const double c = 0.001 + 50.0 * rng.uniform();
      std::vector<double> scaled = u.values;
      for (auto& x : scaled) x *= c;
      CHECK(similarity(vec(scaled), v) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_SUITE("model file") {
  Model small_model() {
    Model m;
    m.vocab = Vocabulary({"risk", "supply", "é"});
    m.params = init_params(m.vocab.size(), 4, 12);
    m.max_len = 99;
    return m;
  }

  TEST_CASE("round trip preserves every parameter bit") {
    const Model m = small_model();
    const std::string bytes = serialize_model(m);
    CHECK(bytes.substr(0, 8) == "RRSMODEL");
    const Model back = deserialize_model(bytes);
    CHECK(back.vocab.tokens() == m.vocab.tokens());
    CHECK(back.max_len == 99);
    CHECK(back.params.embed == m.params.embed);
    CHECK(back.params.proj_w == m.params.proj_w);
    CHECK(back.params.proj_b == m.params.proj_b);
    CHECK(serialize_model(back) == bytes);

    testing::TempDir dir("model");
    save_model(m, dir / "m.bin");
    CHECK(serialize_model(load_model(dir / "m.bin")) == bytes);
    CHECK(error_code_of([&] { load_model(dir / "absent.bin"); }) == ErrorCode::MissingFile);
  }

  TEST_CASE("corrupt files are parse errors") {
    const std::string bytes = serialize_model(small_model());
    CHECK(error_code_of([&] { deserialize_model("RRSMODEX" + bytes.substr(8)); }) == ErrorCode::ParseError);
    CHECK(error_code_of([&] { deserialize_model(bytes.substr(0, bytes.size() - 3)); }) == ErrorCode::ParseError);
    CHECK(error_code_of([&] { deserialize_model(bytes + "x"); }) == ErrorCode::ParseError);
  }

  TEST_CASE("fingerprint tracks content") {
    const std::string bytes = serialize_model(small_model());
    const std::string fp = model_fingerprint(bytes);
    CHECK(fp.size() == 16);
    CHECK(fp.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(model_fingerprint(bytes) == fp);
    std::string flipped = bytes;
    flipped.back() ^= 1;
    CHECK(model_fingerprint(flipped) != fp);
    CHECK(model_fingerprint("") == "cbf29ce484222325");
  }

  TEST_CASE("model encode maps unknown tokens to UNK") {
    const Model m = small_model();
    CHECK(m.encode({"risk", "zzz"}).values == encode(m.params, std::vector<int>{2, Vocabulary::kUnk}, 99).values);
  }
}
