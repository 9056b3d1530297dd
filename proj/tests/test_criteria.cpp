#include <gtest/gtest.h>

#include <random>

#include "ggc/criteria.hpp"

using namespace ggc;

namespace {

FieldRecord bundled(std::int64_t p, std::int64_t d) { return load_bundled(p, d); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InvalidArgument;
}

std::string missing_field(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DataMissing);
    return e.detail();
  }
  ADD_FAILURE() << "no error";
  return "";
}

void set(FieldRecord& r, const std::string& field) { r.provenance[field] = {"manual", std::nullopt, std::nullopt}; }

const TraceEntry* find(const Verdict& v, const std::string& criterion) {
  for (const auto& e : v.trace)
    if (e.criterion == criterion) return &e;
  return nullptr;
}

// A p = 3 record with the given characteristic polynomial and s = 1.
FieldRecord synthetic(const std::vector<std::int64_t>& coeffs, int prec) {
  FieldRecord r = bundled(3, 971);
  r.char_T = CharT{prec, coeffs};
  return r;
}

}  // namespace

TEST(CharAnalysis, WorkedExamples) {
  const CharData a = char_analysis(PowerSeries::from_integers(3, 11, {0, 64638, 1}));
  EXPECT_EQ(a.lambda_cyc, 2);
  EXPECT_EQ(a.mu, Valuation::known(0));
  EXPECT_EQ(a.squarefree.decision, SquareFreeness::SquareFree);
  EXPECT_EQ(a.squarefree.disc_valuation, Valuation::known(10));
  EXPECT_EQ(a.g0_val, Valuation::known(5));
  ASSERT_TRUE(a.alpha);
  EXPECT_EQ(a.alpha->str(), "486 mod 3^6");

  const CharData b = char_analysis(PowerSeries::from_integers(3, 7, {0, 522, 72, 405, 1}));
  EXPECT_EQ(b.lambda_cyc, 4);
  // disc valuation 10 is beyond 3^7: square-free only via the irreducible cofactor
  EXPECT_EQ(b.squarefree.decision, SquareFreeness::Inconclusive);
  EXPECT_EQ(b.g0_val, Valuation::known(2));
  EXPECT_FALSE(b.alpha);

  const CharData c = char_analysis(PowerSeries::from_integers(5, 5, {0, 3100, 1}));
  EXPECT_EQ(c.lambda_cyc, 2);
  EXPECT_EQ(c.g0_val, Valuation::known(2));
  EXPECT_EQ(c.alpha->str(), "100 mod 5^3");

  const CharData d = char_analysis(PowerSeries::from_integers(3, 7, {0, 1989, 1}));
  EXPECT_EQ(d.squarefree.disc_valuation, Valuation::known(4));
  EXPECT_EQ(d.alpha->str(), "45 mod 3^5");
}

TEST(CharAnalysis, ConstantTermMustBeExactlyZero) {
  EXPECT_EQ(code_of([] { char_analysis(PowerSeries::from_integers(3, 5, {3, 1, 1})); }), ErrorCode::InvalidChar);
  // zero only at the available precision is not enough
  const PowerSeries h(3, 5, {PadicInt(3, 5, 0), PadicInt(3, 5, 3), PadicInt(3, 5, 1)}, true);
  EXPECT_EQ(code_of([&] { char_analysis(h); }), ErrorCode::InvalidChar);
  EXPECT_EQ(missing_field([] {
              FieldRecord r;
              r.p = 3;
              r.d = 971;
              char_analysis(r);
            }),
            "char_T");
}

TEST(Hilbert, WorkedExamples) {
  EXPECT_EQ(hilbert_in_ztilde(bundled(3, 971)).value, Tri::True);
  EXPECT_EQ(hilbert_in_ztilde(bundled(3, 17291)).value, Tri::True);
  const Finding<Tri> f = hilbert_in_ztilde(bundled(5, 2239));
  EXPECT_EQ(f.value, Tri::True);
  EXPECT_EQ(f.entry.inputs["k_zetap_p_exponent"], 1);
  EXPECT_EQ(hilbert_in_ztilde(bundled(3, 5069)).value, Tri::False);
}

TEST(Hilbert, Rules) {
  FieldRecord r = bundled(3, 971);
  r.hilbert_aux->real_quad_class_number = 21;
  EXPECT_EQ(hilbert_in_ztilde(r).value, Tri::False);

  FieldRecord q = bundled(5, 2239);
  q.hilbert_aux->k_zetap_class_number = 2800;  // 5-part 25 != #A_k: the rule is silent
  EXPECT_EQ(hilbert_in_ztilde(q).value, Tri::Unknown);

  FieldRecord m = without_field(bundled(3, 971), "hilbert_aux");
  EXPECT_EQ(missing_field([&] { hilbert_in_ztilde(m); }), "hilbert_aux.real_quad_class_number");

  FieldRecord t = m;
  t.class_group_k = std::vector<int>{};
  t.s_exp = 0;
  EXPECT_EQ(hilbert_in_ztilde(t).value, Tri::True);  // L_k = k

  FieldRecord c = bundled(3, 971);
  c.class_group_k = std::vector<int>{1, 1};
  c.s_exp = 2;
  const Finding<Tri> conflict = hilbert_in_ztilde(c);
  EXPECT_EQ(conflict.value, Tri::Unknown);
  EXPECT_EQ(conflict.entry.inputs["rule"], "conflicting sources");
}

TEST(IndexBounds, WorkedExamples) {
  const IndexReport a = index_bounds_validate(std::nullopt, 1, Valuation::known(5), std::nullopt);
  EXPECT_TRUE(a.consistent);
  EXPECT_EQ(a.notes, (std::vector<std::string>{"n0 <= 5", "normal => n0 <= 1", "non-normal => 1 < n0 <= 5"}));
  const IndexReport b = index_bounds_validate(std::nullopt, 1, Valuation::known(2), false);
  EXPECT_TRUE(b.consistent);
  EXPECT_EQ(b.notes.back(), "non-normal => 1 < n0 <= 2");
  const IndexReport c = index_bounds_validate(std::nullopt, 0, Valuation::known(0), std::nullopt);
  EXPECT_TRUE(c.consistent);
  EXPECT_EQ(c.notes.front(), "degenerate: all indices 1");
}

TEST(IndexBounds, Contradictions) {
  EXPECT_FALSE(index_bounds_validate(6, 1, Valuation::known(5), std::nullopt).consistent);
  EXPECT_FALSE(index_bounds_validate(3, 1, Valuation::known(5), true).consistent);
  EXPECT_FALSE(index_bounds_validate(std::nullopt, 2, Valuation::known(2), false).consistent);
  const IndexReport forced = index_bounds_validate(3, 1, Valuation::known(5), std::nullopt);
  EXPECT_TRUE(forced.consistent);
  EXPECT_TRUE(forced.forced_non_normal);
}

TEST(PSplitPRational, WorkedExamples) {
  EXPECT_EQ(p_split_p_rational(bundled(3, 971)).value, Tri::False);
  EXPECT_EQ(p_split_p_rational(bundled(3, 17291)).value, Tri::False);
  EXPECT_EQ(p_split_p_rational(bundled(3, 5069)).value, Tri::False);  // L_k not in k~
  EXPECT_EQ(p_split_p_rational(bundled(3, 971)).entry.inputs["refuted_by"], "g0_val > s: D_p not normal");
}

TEST(PSplitPRational, PositiveAndOpenCases) {
  FieldRecord r = synthetic({0, 3, 1}, 6);  // g0_val = 1 = s
  EXPECT_EQ(missing_field([&] { p_split_p_rational(r); }), "normality");
  r.normality = true;
  set(r, "normality");
  r.n0_exp = 1;
  set(r, "n0_exp");
  EXPECT_EQ(p_split_p_rational(r).value, Tri::True);
  r.n0_exp = 0;
  EXPECT_EQ(p_split_p_rational(r).value, Tri::False);
}

// Randomized records: g0_val > s always refutes p-split p-rationality.
TEST(Property, GapRefutesPRationality) {
  std::mt19937_64 rng(0x5eed40);
  int with_gap = 0;
  for (int trial = 0; trial < 300; ++trial) {
    FieldRecord r;
    r.p = 3;
    r.d = 971;
    const int s = static_cast<int>(rng() % 3);
    r.class_group_k = std::vector<int>(static_cast<std::size_t>(s > 0), s);
    r.s_exp = s;
    set(r, "class_group_k");
    set(r, "s_exp");
    if (rng() % 2) {
      r.hilbert_aux = HilbertAux{static_cast<std::int64_t>(1 + rng() % 30), std::nullopt, std::nullopt};
      set(r, "hilbert_aux");
    }
    if (rng() % 2) {
      r.normality = rng() % 2 == 0;
      set(r, "normality");
    }
    const int g0 = 1 + static_cast<int>(rng() % 4);
    std::int64_t c = 1;
    for (int i = 0; i < g0; ++i) c *= 3;
    c *= (rng() % 2) ? 1 : 2;
    r.char_T = CharT{8, {0, c, 1}};
    set(r, "char_T");
    validate_record(r);
    if (g0 > s) {
      ++with_gap;
      ASSERT_EQ(p_split_p_rational(r).value, Tri::False);
    }
  }
  EXPECT_GT(with_gap, 50);
}

TEST(ValuationGap, WorkedExamples) {
  for (auto [p, d] : {std::pair{3, 971}, {3, 17291}, {5, 2239}}) {
    const TraceEntry e = weak_ggc_valuation_gap(bundled(p, d));
    EXPECT_EQ(e.outcome, "weak-ggc") << d;
    EXPECT_EQ(e.inputs["reading"], "exponent");
  }
  EXPECT_EQ(weak_ggc_valuation_gap(bundled(3, 17291)).inputs["squarefree"], "irreducible-cofactor");
  const TraceEntry no = weak_ggc_valuation_gap(bundled(3, 5069));
  EXPECT_EQ(no.outcome, "inconclusive");
  EXPECT_EQ(no.inputs["failed"], "hilbert-in-ztilde is false");
  const TraceEntry small = weak_ggc_valuation_gap(synthetic({0, 3, 1}, 6));
  EXPECT_EQ(small.inputs["failed"], "g0_val <= s");
}

TEST(Upgrade, WorkedExamples) {
  for (auto [p, d] : {std::pair{3, 971}, {3, 17291}, {5, 2239}}) {
    Verdict weak;
    weak.level = VerdictLevel::WeakGGCHolds;
    weak.trace.push_back(weak_ggc_valuation_gap(bundled(p, d)));
    EXPECT_EQ(ggc_upgrade(bundled(p, d), weak).level, VerdictLevel::GGCHolds) << d;
  }
  const Verdict v = verdict_pipeline(bundled(3, 17291));
  const TraceEntry* up = find(v, "prime-coinvariant-upgrade");
  ASSERT_TRUE(up);
  EXPECT_EQ(up->inputs["certificate"], "newton-single-segment");
  EXPECT_EQ(up->inputs["slope"], "-2/3");
}

TEST(Upgrade, RefusedWithoutCertificate) {
  // lambda = 3: g = T^2 + 3T + 27 has a two-segment polygon
  const FieldRecord r = synthetic({0, 27, 3, 1}, 10);
  const Verdict v = verdict_pipeline(r);
  EXPECT_EQ(v.level, VerdictLevel::WeakGGCHolds);
  EXPECT_EQ(find(v, "prime-coinvariant-upgrade")->inputs["failed"], "Newton polygon inconclusive");
  Verdict none;
  EXPECT_EQ(ggc_upgrade(r, none), none);
}

TEST(Fukuda, Cases) {
  EXPECT_EQ(fukuda_check({std::nullopt, 3, 3}, 1), LambdaDecision::LambdaMuZero);
  EXPECT_EQ(fukuda_check({0, 0}, 0), LambdaDecision::LambdaMuZero);
  EXPECT_EQ(fukuda_check({1, 2, 3, 4}, 0), LambdaDecision::Unknown);
  EXPECT_EQ(fukuda_check({2, 2, 3}, 1), LambdaDecision::Unknown);  // the equality sits below c
  EXPECT_EQ(code_of([] { fukuda_check({2, 3}, 1); }), ErrorCode::DataMissing);
}

// A stabilized tail is exactly the mu = lambda = 0 fit.
TEST(Property, FukudaAgreesWithFit) {
  std::mt19937_64 rng(0x5eed41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t p = (rng() % 2) ? 3 : 5;
    const std::int64_t mu = static_cast<std::int64_t>(rng() % 3), lambda = static_cast<std::int64_t>(rng() % 5);
    const std::int64_t nu = static_cast<std::int64_t>(rng() % 10);
    std::vector<std::int64_t> seq;
    std::vector<std::optional<int>> ords;
    std::int64_t pn = 1;
    for (int n = 0; n < 5; ++n, pn *= p) {
      seq.push_back(mu * pn + lambda * n + nu);
      ords.push_back(static_cast<int>(seq.back()));
    }
    const auto fit = iwasawa_fit(seq, p);
    ASSERT_TRUE(fit);
    const bool stable = fukuda_check(ords, 0) == LambdaDecision::LambdaMuZero;
    ASSERT_EQ(stable, fit->mu == 0 && fit->lambda == 0);
  }
}

TEST(Capitulation, Cases) {
  EXPECT_EQ(capitulation_check(bundled(3, 5069)).value, LambdaDecision::LambdaZero);
  FieldRecord trivial = bundled(3, 971);
  trivial.class_group_k = std::vector<int>{};
  trivial.s_exp = 0;
  EXPECT_EQ(capitulation_check(trivial).value, LambdaDecision::LambdaZero);
  FieldRecord one = bundled(3, 5069);
  (*one.capitulation)[1].principal = false;
  EXPECT_EQ(capitulation_check(one).value, LambdaDecision::Unknown);
  FieldRecord few = bundled(3, 5069);
  few.capitulation->pop_back();
  EXPECT_EQ(capitulation_check(few).value, LambdaDecision::Unknown);
  EXPECT_EQ(missing_field([] { capitulation_check(bundled(3, 971)); }), "capitulation");
}

TEST(Pipeline, BundledRecords) {
  for (auto [p, d] : {std::pair{3, 971}, {3, 17291}, {5, 2239}, {3, 5069}}) {
    const Verdict v = verdict_pipeline(bundled(p, d));
    EXPECT_EQ(v.level, VerdictLevel::GGCHolds) << d;
    EXPECT_TRUE(v.reason.empty());
  }
  const Verdict a = verdict_pipeline(bundled(3, 971));
  EXPECT_EQ(find(a, "valuation-gap")->outcome, "weak-ggc");
  EXPECT_EQ(find(a, "char-analysis")->inputs["alpha"], "486 mod 3^6");
  EXPECT_EQ(find(a, "p-split-p-rational")->outcome, "false");

  const Verdict b = verdict_pipeline(bundled(3, 5069));
  EXPECT_EQ(find(b, "valuation-gap")->outcome, "inconclusive");
  EXPECT_EQ(find(b, "n-tower-lambda-zero")->outcome, "weak-ggc");
  EXPECT_EQ(find(b, "capitulation")->outcome, "lambda-zero");
  EXPECT_EQ(find(b, "fukuda")->outcome, "lambda-mu-zero");
}

TEST(Pipeline, EmptyRecord) {
  FieldRecord r;
  r.p = 3;
  r.d = 971;
  const Verdict v = verdict_pipeline(r);
  EXPECT_EQ(v.level, VerdictLevel::Inconclusive);
  EXPECT_EQ(v.reason, "valuation-gap: data-missing: hilbert_aux.real_quad_class_number");
  EXPECT_EQ(find(v, "char-analysis")->outcome, "data-missing");
}

TEST(Pipeline, PRationalBranch) {
  FieldRecord r = synthetic({0, 3, 1}, 6);
  r.normality = true;
  set(r, "normality");
  r.n0_exp = 1;
  set(r, "n0_exp");
  EXPECT_EQ(verdict_pipeline(r).level, VerdictLevel::Inconclusive);
  r.h_infinity_lambda_zero = true;
  set(r, "h_infinity_lambda_zero");
  const Verdict v = verdict_pipeline(r);
  EXPECT_EQ(v.level, VerdictLevel::GGCHolds);
  EXPECT_EQ(find(v, "p-rational-branch")->outcome, "weak-ggc");
}

// Deleting optional fields (one or two at a time) never raises the verdict.
TEST(Property, Monotonicity) {
  for (auto [p, d] : {std::pair{3, 971}, {3, 17291}, {5, 2239}, {3, 5069}}) {
    const FieldRecord full = bundled(p, d);
    const VerdictLevel top = verdict_pipeline(full).level;
    const auto fields = present_fields(full);
    for (const auto& f : fields) {
      const FieldRecord one = without_field(full, f);
      const VerdictLevel l1 = verdict_pipeline(one).level;
      ASSERT_LE(static_cast<int>(l1), static_cast<int>(top)) << d << " -" << f;
      for (const auto& g : present_fields(one))
        ASSERT_LE(static_cast<int>(verdict_pipeline(without_field(one, g)).level), static_cast<int>(l1))
            << d << " -" << f << " -" << g;
    }
  }
}

// Replay: the trace alone gives the level, survives JSON, and every
// weak-GGC line re-derives from its own criterion.
TEST(Property, TraceSoundness) {
  std::mt19937_64 rng(0x5eed42);
  std::vector<FieldRecord> records;
  for (auto [p, d] : {std::pair{3, 971}, {3, 17291}, {5, 2239}, {3, 5069}}) {
    const FieldRecord full = bundled(p, d);
    records.push_back(full);
    for (const auto& f : present_fields(full)) records.push_back(without_field(full, f));
  }
  for (int trial = 0; trial < 100; ++trial) {
    FieldRecord r = records[rng() % records.size()];
    for (const auto& f : present_fields(r))
      if (rng() % 3 == 0) r = without_field(r, f);
    records.push_back(r);
  }
  for (const auto& r : records) {
    const Verdict v = verdict_pipeline(r);
    ASSERT_EQ(level_from_trace(v.trace), v.level);
    ASSERT_EQ(verdict_from_json(verdict_to_json(v)), v);
    if (v.level == VerdictLevel::Inconclusive) ASSERT_FALSE(v.reason.empty());
    for (const auto& e : v.trace) {
      if (e.outcome == "weak-ggc") {
        if (e.criterion == "valuation-gap") ASSERT_EQ(weak_ggc_valuation_gap(r), e);
        if (e.criterion == "n-tower-lambda-zero") ASSERT_EQ(weak_ggc_n_tower(r), e);
        if (e.criterion == "p-rational-branch") ASSERT_EQ(weak_ggc_p_rational_branch(r), e);
      }
      if (e.outcome == "ggc") ASSERT_TRUE(e.inputs.contains("certificate"));
    }
  }
}

TEST(VerdictJson, RejectsTampering) {
  nlohmann::json j = verdict_to_json(verdict_pipeline(bundled(3, 971)));
  j["level"] = "inconclusive";
  EXPECT_EQ(code_of([&] { verdict_from_json(j); }), ErrorCode::Schema);
  j["level"] = "ggc";
  j["extra"] = 1;
  EXPECT_EQ(code_of([&] { verdict_from_json(j); }), ErrorCode::Schema);
}
