#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ggc/fielddata.hpp"

using namespace ggc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data_path(const std::string& name) { return std::string(GGC_DATA_DIR) + "/" + name; }

ErrorCode code_of(const std::string& text) {
  try {
    load_record(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::InvalidArgument;
}

std::string detail_of(const std::string& text) {
  try {
    load_record(text);
  } catch (const Error& e) {
    return e.detail();
  }
  return "";
}

}  // namespace

TEST(LoadRecord, Bundled971) {
  const FieldRecord r = load_record_file(data_path("971.json"));
  EXPECT_EQ(r.p, 3);
  ASSERT_TRUE(r.char_T);
  EXPECT_EQ(r.char_T->prec_exp, 11);
  EXPECT_EQ(r.char_T->coeffs, (std::vector<std::int64_t>{0, 64638, 1}));
  EXPECT_EQ(r.hilbert_aux->real_quad_class_number, 7);
  EXPECT_EQ(*r.class_group_k, std::vector<int>{1});
}

TEST(LoadRecord, Bundled2239) {
  const FieldRecord r = load_record_file(data_path("2239.json"));
  EXPECT_EQ(r.p, 5);
  EXPECT_EQ(r.char_T->coeffs, (std::vector<std::int64_t>{0, 3100, 1}));
  EXPECT_EQ(r.char_T->prec_exp, 5);
  EXPECT_EQ(r.hilbert_aux->k_zetap_class_number, 560);
}

TEST(LoadRecord, Bundled5069) {
  const FieldRecord r = load_record_file(data_path("5069.json"));
  EXPECT_EQ(*r.class_group_k, (std::vector<int>{1, 1}));
  EXPECT_EQ(r.s_exp, 2);
  ASSERT_EQ(r.layers->size(), 1u);
  EXPECT_EQ((*r.layers)[0].tower, "N");
  EXPECT_EQ((*r.layers)[0].c, 1);
  EXPECT_EQ((*r.layers)[0].ords[2], 3);
  EXPECT_EQ(r.capitulation->size(), 2u);
  EXPECT_EQ(r.defining_polynomials->at("N1"), "x^6 - 2*x^5 - 33*x^4 - 70*x^3 + 5462*x^2 - 38784*x + 83808");
}

TEST(LoadRecord, SplitConditionViolation) {
  EXPECT_EQ(code_of(R"({"p": 3, "d": 1, "provenance": {}})"), ErrorCode::SplitCondition);
  EXPECT_EQ(code_of(R"({"p": 3, "d": 3, "provenance": {}})"), ErrorCode::SplitCondition);  // ramified
  EXPECT_NO_THROW(load_record(R"({"p": 3, "d": 2, "provenance": {}})"));
}

TEST(LoadRecord, ConstantTermViolation) {
  const std::string text =
      R"({"p": 3, "d": 971, "char_T": {"prec_exp": 11, "coeffs": [3, 64638, 1]},
          "provenance": {"char_T": {"source": "manual"}}})";
  EXPECT_EQ(code_of(text), ErrorCode::ConstantTerm);
}

TEST(LoadRecord, SchemaPointers) {
  EXPECT_EQ(code_of(R"({"p": 3, "d": 971, "provenance": {}, "extra": 1})"), ErrorCode::Schema);
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "provenance": {}, "extra": 1})"), "/extra: unknown key");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "char_T": {"prec_exp": 11, "coeffs": [0, "x", 1]},
                         "provenance": {"char_T": {"source": "manual"}}})"),
            "/char_T/coeffs/1: expected integer");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "s_exp": 1, "provenance": {}})"),
            "/provenance: missing entry for 's_exp'");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "layers": [{"tower": "Q", "c": 0, "ords": []}],
                         "provenance": {"layers": {"source": "manual"}}})"),
            "/layers/0/tower: unknown tower 'Q'");
  EXPECT_EQ(detail_of(R"({"p": 4, "d": 971, "provenance": {}})"), "/p: expected a prime");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 18, "provenance": {}})"), "/d: expected a square-free positive integer");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971})"), "/provenance: missing");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "provenance": {"n0_exp": {"source": "manual"}}})"),
            "/provenance/n0_exp: entry for absent field");
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "class_group_k": [1], "s_exp": 2,
                         "provenance": {"class_group_k": {"source": "manual"}, "s_exp": {"source": "manual"}}})"),
            "/s_exp: does not match the order of class_group_k");
  EXPECT_EQ(code_of("{ not json"), ErrorCode::Schema);
}

TEST(LoadRecord, NotDistinguished) {
  EXPECT_EQ(detail_of(R"({"p": 3, "d": 971, "char_T": {"prec_exp": 4, "coeffs": [0, 5, 1]},
                         "provenance": {"char_T": {"source": "manual"}}})"),
            "/char_T/coeffs/1: not distinguished: coefficient not divisible by p");
}

TEST(Serialize, BundledFilesAreCanonical) {
  for (const char* name : {"971.json", "17291.json", "2239.json", "5069.json"}) {
    const std::string text = read_file(data_path(name));
    EXPECT_EQ(serialize_record(load_record(text)), text) << name;
  }
}

TEST(Property, SerializeRoundTrip) {
  std::mt19937_64 rng(0x5eed30);
  const std::int64_t ds[] = {971, 17291, 5069, 2, 5, 11, 14};
  for (int trial = 0; trial < 200; ++trial) {
    FieldRecord r;
    r.p = 3;
    r.d = ds[rng() % 7];
    if (rng() % 2) {
      const int rank = static_cast<int>(rng() % 3);
      std::vector<int> cg;
      for (int i = 0; i < rank; ++i) cg.push_back(1 + static_cast<int>(rng() % 3));
      r.class_group_k = cg;
      int s = 0;
      for (int e : cg) s += e;
      r.s_exp = s;
      r.provenance["class_group_k"] = {"bundled", std::nullopt, std::nullopt};
      r.provenance["s_exp"] = {"cas", std::string("2.15.4"), std::string("print(1)\nquit;")};
    }
    if (rng() % 2) {
      const int N = 1 + static_cast<int>(rng() % 12);
      std::vector<std::int64_t> c = {0};
      const int deg = 1 + static_cast<int>(rng() % 4);
      for (int i = 1; i < deg; ++i) c.push_back(3 * static_cast<std::int64_t>(rng() % 1000));
      c.push_back(1);
      r.char_T = CharT{N, c};
      r.provenance["char_T"] = {"manual", std::nullopt, std::nullopt};
    }
    if (rng() % 2) {
      Layer l{"N", static_cast<int>(rng() % 3), {}};
      l.ords = {std::nullopt, 3, static_cast<int>(rng() % 9)};
      r.layers = std::vector<Layer>{l};
      r.provenance["layers"] = {"bundled", std::nullopt, std::nullopt};
    }
    if (rng() % 2) {
      r.normality = rng() % 2 == 0;
      r.provenance["normality"] = {"manual", std::nullopt, std::nullopt};
    }
    if (rng() % 2) {
      r.defining_polynomials = std::map<std::string, std::string>{{"N1", "x^3 - \"odd\" / ~"}};
      r.provenance["defining_polynomials"] = {"manual", std::nullopt, std::nullopt};
    }
    const std::string text = serialize_record(r);
    const FieldRecord back = load_record(text);
    ASSERT_EQ(back, r) << text;
    ASSERT_EQ(serialize_record(back), text);
  }
}

TEST(WithoutField, DropsProvenanceToo) {
  const FieldRecord r = load_record_file(data_path("5069.json"));
  for (const auto& f : present_fields(r)) {
    const FieldRecord smaller = without_field(r, f);
    EXPECT_EQ(smaller.provenance.count(f), 0u);
    EXPECT_NO_THROW(validate_record(smaller)) << f;
  }
}

TEST(IwasawaFit, WorkedSequences) {
  EXPECT_EQ(iwasawa_fit({2, 2, 2, 2}, 3), (FitResult{0, 0, 2, 0}));
  EXPECT_EQ(iwasawa_fit({0, 1, 2, 3}, 3), (FitResult{0, 1, 0, 0}));
  EXPECT_EQ(iwasawa_fit({1, 3, 9, 27}, 3), (FitResult{1, 0, 0, 0}));
  // irregular start, exact fit from n = 2 on
  EXPECT_EQ(iwasawa_fit({5, 0, 2, 3, 4, 5}, 3), (FitResult{0, 1, 0, 2}));
  EXPECT_EQ(iwasawa_fit({3, 3, 3}, 3, 1), (FitResult{0, 0, 3, 1}));
  EXPECT_EQ(iwasawa_fit({0, 5, 1}, 3), std::nullopt);
  EXPECT_THROW(iwasawa_fit({1, 2}, 3), Error);
}

// Planted (mu, lambda, nu) over the full grid mu <= 2, lambda <= 4, nu <= 9.
TEST(Property, IwasawaFitRecoversPlanted) {
  int count = 0;
  for (std::int64_t p : {3, 5}) {
    for (std::int64_t mu = 0; mu <= 2; ++mu) {
      for (std::int64_t lambda = 0; lambda <= 4; ++lambda) {
        for (std::int64_t nu = 0; nu <= 9; ++nu) {
          std::vector<std::int64_t> seq;
          std::int64_t pn = 1;
          for (int n = 0; n < 6; ++n, pn *= p) seq.push_back(mu * pn + lambda * n + nu);
          const auto fit = iwasawa_fit(seq, p);
          ASSERT_TRUE(fit);
          ASSERT_EQ(*fit, (FitResult{mu, lambda, nu, 0}));
          ++count;
        }
      }
    }
  }
  EXPECT_EQ(count, 300);
}

TEST(RecordDiff, Cases) {
  const FieldRecord a = load_record_file(data_path("971.json"));
  EXPECT_TRUE(record_diff(a, a).empty());
  FieldRecord b = a;
  b.hilbert_aux->real_quad_class_number = 3;
  b.provenance["hilbert_aux"].source = "cas";
  const RecordDiff diff = record_diff(a, b);
  ASSERT_EQ(diff.lines.size(), 1u);
  EXPECT_EQ(diff.lines[0], R"(hilbert_aux: {"real_quad_class_number":7} vs {"real_quad_class_number":3})");
  try {
    record_diff(a, load_record_file(data_path("2239.json")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedKey);
  }
}

TEST(Bundled, LookupByKey) {
  EXPECT_EQ(load_bundled(3, 17291).char_T->prec_exp, 7);
  try {
    load_bundled(3, 2239);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DataMissing);
  }
  EXPECT_THROW(load_bundled(3, 7), Error);
}

TEST(Split, LegendreAgreesWithBruteForce) {
  for (std::int64_t p : {3, 5, 7, 11, 13}) {
    for (std::int64_t d = 1; d < 200; ++d) {
      const std::int64_t a = ((-d) % p + p) % p;
      bool square = false;
      for (std::int64_t x = 1; x < p; ++x) square |= (x * x) % p == a;
      ASSERT_EQ(p_splits(p, d), a != 0 && square) << p << " " << d;
    }
  }
  EXPECT_TRUE(p_splits(2, 7));
  EXPECT_FALSE(p_splits(2, 1));
}
