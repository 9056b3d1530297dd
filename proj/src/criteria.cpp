#include "ggc/criteria.hpp"

#include <algorithm>
#include <set>

namespace ggc {

using nlohmann::json;

namespace {

constexpr const char* kWeakPaths[] = {"valuation-gap", "n-tower-lambda-zero", "p-rational-branch"};

[[noreturn]] void missing(const std::string& field) { throw Error(ErrorCode::DataMissing, field); }

std::optional<int> s_of(const FieldRecord& r) {
  if (r.s_exp) return r.s_exp;
  if (r.class_group_k) {
    int s = 0;
    for (int e : *r.class_group_k) s += e;
    return s;
  }
  return std::nullopt;
}

json valuation_json(const Valuation& v) {
  if (v.is_known()) return v.value();
  return v.str();
}

TraceEntry entry(const std::string& criterion, json inputs, const std::string& outcome, const std::string& anchor) {
  return TraceEntry{criterion, std::move(inputs), outcome, anchor};
}

// A path entry that could not run for want of data.
TraceEntry data_missing(const std::string& criterion, const std::string& anchor, const Error& e) {
  return entry(criterion, {{"failed", std::string("data-missing: ") + e.detail()}}, "data-missing", anchor);
}

TraceEntry inconclusive(const std::string& criterion, json inputs, const std::string& failed,
                        const std::string& anchor) {
  inputs["failed"] = failed;
  return entry(criterion, std::move(inputs), "inconclusive", anchor);
}

bool is_weak_path(const std::string& criterion) {
  return std::find(std::begin(kWeakPaths), std::end(kWeakPaths), criterion) != std::end(kWeakPaths);
}

// N-tower layers from the record, if any.
const Layer* n_tower(const FieldRecord& r) {
  if (!r.layers) return nullptr;
  for (const auto& l : *r.layers)
    if (l.tower == "N") return &l;
  return nullptr;
}

// Square-free h = T g: a unit-free discriminant, or g irreducible with g(0) != 0.
std::optional<std::string> squarefree_basis(const CharData& ch) {
  if (ch.squarefree.decision == SquareFreeness::SquareFree) return "discriminant";
  if (ch.squarefree.decision == SquareFreeness::NotSquareFree) return std::nullopt;
  const PowerSeries& g = ch.t_factor.cofactor;
  if (ch.t_factor.multiplicity != 1 || !g.is_polynomial() || !ch.g0_val.is_known()) return std::nullopt;
  try {
    if (irreducible_by_newton(g) == Irreducibility::Irreducible) return "irreducible-cofactor";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Ambiguous) throw;
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Tri t) {
  switch (t) {
    case Tri::True:
      return "true";
    case Tri::False:
      return "false";
    case Tri::Unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(LambdaDecision d) {
  switch (d) {
    case LambdaDecision::LambdaZero:
      return "lambda-zero";
    case LambdaDecision::LambdaMuZero:
      return "lambda-mu-zero";
    case LambdaDecision::Unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::GGCHolds:
      return "GGC holds";
    case VerdictLevel::WeakGGCHolds:
      return "weak GGC holds";
    case VerdictLevel::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

const char* level_token(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::GGCHolds:
      return "ggc";
    case VerdictLevel::WeakGGCHolds:
      return "weak-ggc";
    case VerdictLevel::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::optional<VerdictLevel> parse_level(const std::string& token) {
  for (VerdictLevel l : {VerdictLevel::Inconclusive, VerdictLevel::WeakGGCHolds, VerdictLevel::GGCHolds})
    if (token == level_token(l)) return l;
  return std::nullopt;
}

CharData char_analysis(const PowerSeries& h) {
  if (!h.coeff(0).is_exact_zero())
    throw Error(ErrorCode::InvalidChar, "h(0) must be exactly 0, got " + h.coeff(0).str());
  const LambdaInvariant lambda = lambda_invariant(h);
  if (!lambda.determined())
    throw Error(ErrorCode::InvalidChar, "no unit coefficient below X^" + std::to_string(lambda.cutoff));
  TFactor t = extract_T_factor(h);
  const Valuation g0 = t.cofactor.coeff(0).valuation();
  std::optional<PadicInt> alpha;
  const PowerSeries& g = t.cofactor;
  if (t.multiplicity == 1 && g.is_polynomial() && g.degree() == 1 && g.coeff(1).valuation() == Valuation::known(0)) {
    try {
      const PadicInt c = g.coeff(0) * inverse(g.coeff(1));
      const HenselRoot r = hensel_lift_root(h, -c);
      alpha = (-r.root).reduce(r.certified_prec);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HenselCondition && e.code() != ErrorCode::PrecisionUnderflow) throw;
    }
  }
  return CharData{h, *lambda.value, mu_invariant(h), squarefree_check(h), std::move(t), g0, alpha};
}

CharData char_analysis(const FieldRecord& rec) {
  if (!rec.char_T) missing("char_T");
  return char_analysis(PowerSeries::from_integers(rec.p, rec.char_T->prec_exp, rec.char_T->coeffs));
}

Finding<Tri> hilbert_in_ztilde(const FieldRecord& rec) {
  const std::string anchor = "class-number criteria for the Hilbert p-class field in k~";
  json inputs = {{"p", rec.p}, {"d", rec.d}};
  const std::optional<int> s = s_of(rec);
  std::vector<std::pair<Tri, std::string>> decided;  // (value, rule)
  std::vector<std::string> wanted;

  const HilbertAux aux = rec.hilbert_aux.value_or(HilbertAux{});
  if (rec.p == 3) {
    if (rec.d % 9 == 3) {
      inputs["real_quadratic_rule"] = "not applicable (d = 3 mod 9)";
    } else if (aux.real_quad_class_number) {
      const std::int64_t h = *aux.real_quad_class_number;
      inputs["real_quad_class_number"] = h;
      decided.push_back({h % 3 != 0 ? Tri::True : Tri::False, "real-quadratic class number"});
    } else {
      wanted.push_back("hilbert_aux.real_quad_class_number");
    }
  } else if (rec.p >= 5) {
    if (aux.k_zetap_class_number && s) {
      const int e = vp(*aux.k_zetap_class_number, rec.p).value();
      inputs["k_zetap_class_number"] = *aux.k_zetap_class_number;
      inputs["k_zetap_p_exponent"] = e;
      inputs["s_exp"] = *s;
      // one-directional: equal p-class numbers give containment
      if (e == *s) decided.push_back({Tri::True, "cyclotomic class number"});
    } else {
      if (!aux.k_zetap_class_number) wanted.push_back("hilbert_aux.k_zetap_class_number");
      if (!s) wanted.push_back("class_group_k");
    }
  }
  if (aux.lk_cap_ktilde_exp && s) {
    inputs["lk_cap_ktilde_exp"] = *aux.lk_cap_ktilde_exp;
    inputs["s_exp"] = *s;
    if (*aux.lk_cap_ktilde_exp <= *s)
      decided.push_back({*aux.lk_cap_ktilde_exp == *s ? Tri::True : Tri::False, "ingested index of L_k cap k~"});
  }
  if (rec.class_group_k) {
    inputs["class_group_k"] = *rec.class_group_k;
    if (rec.class_group_k->empty())
      decided.push_back({Tri::True, "trivial class group"});
    else if (rec.class_group_k->size() >= 2)
      decided.push_back({Tri::False, "non-cyclic class group"});
  }

  if (decided.empty()) {
    if (!wanted.empty()) missing(wanted.front());
    if (!rec.class_group_k) missing("class_group_k");
    inputs["rule"] = "none applicable";
    return {Tri::Unknown, entry("hilbert-in-ztilde", inputs, "unknown", anchor)};
  }
  for (const auto& [v, rule] : decided) {
    if (v != decided.front().first) {
      inputs["rule"] = "conflicting sources";
      return {Tri::Unknown, entry("hilbert-in-ztilde", inputs, "unknown", anchor)};
    }
  }
  inputs["rule"] = decided.front().second;
  return {decided.front().first, entry("hilbert-in-ztilde", inputs, to_string(decided.front().first), anchor)};
}

IndexReport index_bounds_validate(std::optional<int> n0, int s, const Valuation& g0, std::optional<bool> normal) {
  IndexReport r{true, false, {}};
  if (!g0.is_known()) {
    r.notes.push_back("g0_val " + g0.str() + ": no upper bound on n0");
    if (normal == true) r.notes.push_back("normal => n0 <= " + std::to_string(s));
    if (n0 && normal == true && *n0 > s) {
      r.consistent = false;
      r.notes.push_back("contradiction: normal but n0 > s");
    }
    return r;
  }
  const int g = g0.value();
  if (s == 0 && g == 0) r.notes.push_back("degenerate: all indices 1");
  r.notes.push_back("n0 <= " + std::to_string(g));
  r.notes.push_back("normal => n0 <= " + std::to_string(std::min(s, g)));
  if (g > s)
    r.notes.push_back("non-normal => " + std::to_string(s) + " < n0 <= " + std::to_string(g));
  else
    r.notes.push_back("non-normal impossible (g0_val <= s)");
  auto contradiction = [&](const std::string& why) {
    r.consistent = false;
    r.notes.push_back("contradiction: " + why);
  };
  if (n0 && *n0 > g) contradiction("n0 > g0_val");
  if (n0 && normal == true && *n0 > s) contradiction("normal but n0 > s");
  if (normal == false && g <= s) contradiction("non-normal but g0_val <= s");
  if (normal == false && n0 && *n0 <= s) contradiction("non-normal but n0 <= s");
  if (n0 && *n0 > s) r.forced_non_normal = true;
  return r;
}

Finding<Tri> p_split_p_rational(const FieldRecord& rec) {
  const std::string anchor = "equivalent conditions for p-split p-rationality";
  json inputs = json::object();
  std::vector<std::string> wanted;
  auto refuted = [&](const std::string& why) {
    inputs["refuted_by"] = why;
    return Finding<Tri>{Tri::False, entry("p-split-p-rational", inputs, "false", anchor)};
  };

  std::optional<Tri> hilbert;
  try {
    hilbert = hilbert_in_ztilde(rec).value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    wanted.push_back(e.detail());
  }
  inputs["hilbert_in_ztilde"] = hilbert ? to_string(*hilbert) : "missing";
  if (hilbert == Tri::False) return refuted("L_k not inside k~");

  std::optional<CharData> ch;
  try {
    ch = char_analysis(rec);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    wanted.push_back(e.detail());
  }
  const std::optional<int> s = s_of(rec);
  if (!s) wanted.push_back("s_exp");
  if (ch) {
    inputs["lambda_cyc"] = ch->lambda_cyc;
    inputs["g0_val"] = valuation_json(ch->g0_val);
    if (ch->lambda_cyc < 2) return refuted("lambda_cyc < 2");
  }
  if (s) inputs["s_exp"] = *s;
  if (ch && s && ch->g0_val.is_known() && ch->g0_val.value() > *s) {
    inputs["reading"] = "exponent";
    return refuted("g0_val > s: D_p not normal");
  }
  if (rec.normality) inputs["normality"] = *rec.normality;
  if (rec.normality == false) return refuted("D_p not normal");
  if (rec.n0_exp) {
    inputs["n0_exp"] = *rec.n0_exp;
    if (*rec.n0_exp == 0) return refuted("decomposition field equals k");
    if (ch && ch->g0_val.is_known() && *rec.n0_exp != ch->g0_val.value()) return refuted("index differs from p^g0_val");
  }
  if (hilbert == Tri::True && ch && ch->g0_val.is_known() && rec.normality == true && rec.n0_exp)
    return {Tri::True, entry("p-split-p-rational", inputs, "true", anchor)};

  if (!rec.normality) wanted.push_back("normality");
  if (!rec.n0_exp) wanted.push_back("n0_exp");
  if (!wanted.empty()) missing(wanted.front());
  return {Tri::Unknown, entry("p-split-p-rational", inputs, "unknown", anchor)};
}

LambdaDecision fukuda_check(const std::vector<std::optional<int>>& seq, int c) {
  if (c < 0) throw Error(ErrorCode::InvalidArgument, "c must be >= 0");
  if (seq.size() < static_cast<std::size_t>(c) + 2)
    missing("layers: window ends before layer " + std::to_string(c + 1));
  for (std::size_t n = static_cast<std::size_t>(c); n + 1 < seq.size(); ++n)
    if (seq[n] && seq[n + 1] && *seq[n] == *seq[n + 1]) return LambdaDecision::LambdaMuZero;
  return LambdaDecision::Unknown;
}

Finding<LambdaDecision> capitulation_check(const FieldRecord& rec) {
  const std::string anchor = "capitulation criterion for lambda of N";
  if (!rec.class_group_k) missing("class_group_k");
  json inputs = {{"class_group_k", *rec.class_group_k}};
  if (rec.class_group_k->empty()) {
    inputs["basis"] = "trivial class group";
    return {LambdaDecision::LambdaZero, entry("capitulation", inputs, "lambda-zero", anchor)};
  }
  if (!rec.capitulation) missing("capitulation");
  std::set<std::string> listed, principal;
  for (const auto& c : *rec.capitulation) {
    listed.insert(c.generator);
    if (c.principal) principal.insert(c.generator);
  }
  inputs["generators"] = std::vector<std::string>(listed.begin(), listed.end());
  inputs["principal"] = std::vector<std::string>(principal.begin(), principal.end());
  if (listed.size() < rec.class_group_k->size()) {
    inputs["basis"] = "fewer generators than the rank of A_k";
    return {LambdaDecision::Unknown, entry("capitulation", inputs, "unknown", anchor)};
  }
  if (principal.size() == listed.size())
    return {LambdaDecision::LambdaZero, entry("capitulation", inputs, "lambda-zero", anchor)};
  return {LambdaDecision::Unknown, entry("capitulation", inputs, "unknown", anchor)};
}

TraceEntry weak_ggc_valuation_gap(const FieldRecord& rec) {
  const std::string id = "valuation-gap", anchor = "valuation-gap criterion";
  try {
    json in = {{"reading", "exponent"}};
    const Finding<Tri> h = hilbert_in_ztilde(rec);
    in["hilbert_in_ztilde"] = to_string(h.value);
    if (h.value != Tri::True) return inconclusive(id, in, "hilbert-in-ztilde is " + std::string(to_string(h.value)), anchor);
    const CharData ch = char_analysis(rec);
    in["lambda_cyc"] = ch.lambda_cyc;
    const std::optional<std::string> sq = squarefree_basis(ch);
    in["squarefree"] = sq ? json(*sq) : json(to_string(ch.squarefree.decision));
    in["g0_val"] = valuation_json(ch.g0_val);
    if (ch.lambda_cyc < 2) return inconclusive(id, in, "lambda_cyc < 2", anchor);
    if (!sq)
      return inconclusive(id, in, "characteristic polynomial not certified square-free", anchor);
    if (!ch.g0_val.is_known()) return inconclusive(id, in, "g0_val not determined", anchor);
    const std::optional<int> s = s_of(rec);
    if (!s) missing("s_exp");
    in["s_exp"] = *s;
    if (ch.g0_val.value() <= *s) return inconclusive(id, in, "g0_val <= s", anchor);
    return entry(id, in, "weak-ggc", anchor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    return data_missing(id, anchor, e);
  }
}

TraceEntry weak_ggc_n_tower(const FieldRecord& rec) {
  const std::string id = "n-tower-lambda-zero",
                    anchor = "lambda of N zero with square-free characteristic ideal";
  try {
    json in = json::object();
    if (rec.p == 2) return inconclusive(id, in, "p = 2", anchor);
    const Finding<Tri> rational = p_split_p_rational(rec);
    in["p_split_p_rational"] = to_string(rational.value);
    if (rational.value != Tri::False)
      return inconclusive(id, in, "p-split-p-rational is " + std::string(to_string(rational.value)), anchor);

    std::optional<std::string> lambda_basis;
    try {
      if (capitulation_check(rec).value == LambdaDecision::LambdaZero) lambda_basis = "capitulation";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DataMissing) throw;
    }
    if (const Layer* n = n_tower(rec); n && !lambda_basis) {
      try {
        if (fukuda_check(n->ords, n->c) == LambdaDecision::LambdaMuZero) lambda_basis = "fukuda";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DataMissing) throw;
      }
    }
    in["lambda_N_zero"] = lambda_basis ? json(*lambda_basis) : json("unknown");
    if (!lambda_basis) return inconclusive(id, in, "lambda(N/k) = 0 not established", anchor);
    const CharData ch = char_analysis(rec);
    const std::optional<std::string> sq = squarefree_basis(ch);
    in["squarefree"] = sq ? json(*sq) : json(to_string(ch.squarefree.decision));
    if (!sq)
      return inconclusive(id, in, "characteristic polynomial not certified square-free", anchor);
    return entry(id, in, "weak-ggc", anchor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    return data_missing(id, anchor, e);
  }
}

TraceEntry weak_ggc_p_rational_branch(const FieldRecord& rec) {
  const std::string id = "p-rational-branch", anchor = "p-split p-rational case with lambda of H zero";
  try {
    json in = json::object();
    if (rec.p == 2) return inconclusive(id, in, "p = 2", anchor);
    const Finding<Tri> rational = p_split_p_rational(rec);
    in["p_split_p_rational"] = to_string(rational.value);
    if (rational.value != Tri::True)
      return inconclusive(id, in, "p-split-p-rational is " + std::string(to_string(rational.value)), anchor);
    if (!rec.h_infinity_lambda_zero) missing("h_infinity_lambda_zero");
    in["h_infinity_lambda_zero"] = *rec.h_infinity_lambda_zero;
    if (!*rec.h_infinity_lambda_zero) return inconclusive(id, in, "lambda(H_inf/H) = 0 not recorded", anchor);
    return entry(id, in, "weak-ggc", anchor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    return data_missing(id, anchor, e);
  }
}

Verdict ggc_upgrade(const FieldRecord& rec, Verdict weak) {
  if (weak.level != VerdictLevel::WeakGGCHolds) return weak;
  const std::string id = "prime-coinvariant-upgrade", anchor = "prime coinvariant characteristic ideal";
  json in = json::object();
  std::string failed;
  try {
    const CharData ch = char_analysis(rec);
    const PowerSeries& g = ch.t_factor.cofactor;
    in["t_multiplicity"] = ch.t_factor.multiplicity;
    if (ch.t_factor.multiplicity != 1 || !g.is_polynomial()) {
      failed = "cofactor of T not isolated";
    } else if (g.degree() == 1) {
      in["certificate"] = "degree-one";
    } else {
      in["cofactor"] = g.str();
      try {
        const NewtonPolygon np = newton_polygon(g);
        if (irreducible_by_newton(g) == Irreducibility::Irreducible) {
          in["certificate"] = "newton-single-segment";
          in["slope"] = np.segments.front().slope.str();
        } else {
          failed = "Newton polygon inconclusive";
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Ambiguous) throw;
        failed = "Newton polygon ambiguous at this precision";
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    failed = std::string("data-missing: ") + e.detail();
  }
  if (failed.empty()) {
    weak.trace.push_back(entry(id, in, "ggc", anchor));
    weak.level = VerdictLevel::GGCHolds;
  } else {
    weak.trace.push_back(inconclusive(id, in, failed, anchor));
  }
  return weak;
}

VerdictLevel level_from_trace(const std::vector<TraceEntry>& trace) {
  bool weak = false, upgraded = false;
  for (const auto& e : trace) {
    if (is_weak_path(e.criterion) && e.outcome == "weak-ggc") weak = true;
    if (e.criterion == "prime-coinvariant-upgrade" && e.outcome == "ggc") upgraded = true;
  }
  if (!weak) return VerdictLevel::Inconclusive;
  return upgraded ? VerdictLevel::GGCHolds : VerdictLevel::WeakGGCHolds;
}

Verdict verdict_pipeline(const FieldRecord& rec) {
  Verdict v;
  const std::string char_anchor = "characteristic ideal of the cyclotomic Iwasawa module";
  std::optional<CharData> ch;
  try {
    ch = char_analysis(rec);
    json in = {{"coeffs", rec.char_T->coeffs},
               {"prec", rec.char_T->prec_exp},
               {"lambda_cyc", ch->lambda_cyc},
               {"lambda_at_least_two", ch->lambda_at_least_two()},
               {"mu", valuation_json(ch->mu)},
               {"squarefree", to_string(ch->squarefree.decision)},
               {"disc_valuation", valuation_json(ch->squarefree.disc_valuation)},
               {"g0_val", valuation_json(ch->g0_val)}};
    if (ch->alpha) in["alpha"] = ch->alpha->str();
    v.trace.push_back(entry("char-analysis", in, "ok", char_anchor));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing && e.code() != ErrorCode::InvalidChar) throw;
    v.trace.push_back(entry("char-analysis", {{"failed", e.what()}},
                            e.code() == ErrorCode::DataMissing ? "data-missing" : "invalid-char", char_anchor));
  }
  const bool char_ok = ch.has_value();

  try {
    v.trace.push_back(hilbert_in_ztilde(rec).entry);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    v.trace.push_back(data_missing("hilbert-in-ztilde", "class-number criteria for the Hilbert p-class field in k~", e));
  }
  try {
    v.trace.push_back(p_split_p_rational(rec).entry);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    v.trace.push_back(data_missing("p-split-p-rational", "equivalent conditions for p-split p-rationality", e));
  }
  if (const std::optional<int> s = s_of(rec); char_ok && s && ch->lambda_at_least_two()) {
    const IndexReport r = index_bounds_validate(rec.n0_exp, *s, ch->g0_val, rec.normality);
    v.trace.push_back(entry("index-bounds", {{"s_exp", *s}, {"g0_val", valuation_json(ch->g0_val)}, {"notes", r.notes}},
                            r.consistent ? "consistent" : "contradiction", "index bounds for the decomposition group"));
  }

  // Only paths that need char data can fail on invalid char data.
  auto guarded = [&](TraceEntry (*path)(const FieldRecord&), const std::string& id, const std::string& anchor) {
    try {
      return path(rec);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidChar) throw;
      return inconclusive(id, json::object(), "invalid characteristic data", anchor);
    }
  };
  v.trace.push_back(guarded(weak_ggc_valuation_gap, "valuation-gap", "valuation-gap criterion"));
  try {
    v.trace.push_back(capitulation_check(rec).entry);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    v.trace.push_back(data_missing("capitulation", "capitulation criterion for lambda of N", e));
  }
  {
    const std::string anchor = "stabilization criterion for lambda and mu of N";
    if (const Layer* n = n_tower(rec)) {
      json in = {{"c", n->c}, {"ords", json::array()}};
      for (const auto& o : n->ords) in["ords"].push_back(o ? json(*o) : json(nullptr));
      try {
        v.trace.push_back(entry("fukuda", in, to_string(fukuda_check(n->ords, n->c)), anchor));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DataMissing) throw;
        v.trace.push_back(data_missing("fukuda", anchor, e));
      }
    } else {
      v.trace.push_back(entry("fukuda", {{"failed", "data-missing: layers (tower N)"}}, "data-missing", anchor));
    }
  }
  v.trace.push_back(guarded(weak_ggc_n_tower, "n-tower-lambda-zero",
                            "lambda of N zero with square-free characteristic ideal"));
  v.trace.push_back(
      guarded(weak_ggc_p_rational_branch, "p-rational-branch", "p-split p-rational case with lambda of H zero"));

  v.level = level_from_trace(v.trace);
  if (v.level == VerdictLevel::Inconclusive) {
    for (const auto& e : v.trace) {
      if (!is_weak_path(e.criterion)) continue;
      v.reason = e.criterion + ": " + (e.inputs.contains("failed") ? e.inputs["failed"].get<std::string>() : e.outcome);
      break;
    }
    return v;
  }
  return ggc_upgrade(rec, std::move(v));
}

json verdict_to_json(const Verdict& v) {
  json trace = json::array();
  for (const auto& e : v.trace)
    trace.push_back({{"criterion", e.criterion}, {"inputs", e.inputs}, {"outcome", e.outcome}, {"anchor", e.anchor}});
  return {{"level", level_token(v.level)}, {"reason", v.reason}, {"trace", trace}};
}

Verdict verdict_from_json(const json& j) {
  auto fail = [](const std::string& ptr, const std::string& what) {
    throw Error(ErrorCode::Schema, ptr + ": " + what);
  };
  if (!j.is_object()) fail("/", "expected object");
  for (const auto& [k, _] : j.items())
    if (k != "level" && k != "reason" && k != "trace") fail("/" + k, "unknown key");
  Verdict v;
  if (!j.contains("level") || !j["level"].is_string()) fail("/level", "expected string");
  const auto level = parse_level(j["level"].get<std::string>());
  if (!level) fail("/level", "unknown level '" + j["level"].get<std::string>() + "'");
  v.level = *level;
  if (!j.contains("reason") || !j["reason"].is_string()) fail("/reason", "expected string");
  v.reason = j["reason"].get<std::string>();
  if (!j.contains("trace") || !j["trace"].is_array()) fail("/trace", "expected array");
  std::size_t i = 0;
  for (const auto& e : j["trace"]) {
    const std::string ptr = "/trace/" + std::to_string(i++);
    if (!e.is_object()) fail(ptr, "expected object");
    for (const auto& [k, _] : e.items())
      if (k != "criterion" && k != "inputs" && k != "outcome" && k != "anchor") fail(ptr + "/" + k, "unknown key");
    TraceEntry t;
    for (const char* key : {"criterion", "outcome", "anchor"})
      if (!e.contains(key) || !e[key].is_string()) fail(ptr + "/" + key, "expected string");
    if (!e.contains("inputs") || !e["inputs"].is_object()) fail(ptr + "/inputs", "expected object");
    t.criterion = e["criterion"].get<std::string>();
    t.outcome = e["outcome"].get<std::string>();
    t.anchor = e["anchor"].get<std::string>();
    t.inputs = e["inputs"];
    v.trace.push_back(std::move(t));
  }
  if (level_from_trace(v.trace) != v.level) fail("/level", "does not follow from the trace");
  return v;
}

}  // namespace ggc
