#include "ggc/fielddata.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ggc/padics.hpp"

#ifndef GGC_DEFAULT_DATA_DIR
#define GGC_DEFAULT_DATA_DIR "data"
#endif

namespace ggc {

using nlohmann::json;

namespace {

const std::set<std::string> kTowers = {"cyclotomic", "anticyclotomic", "N", "Nstar", "H"};
const std::set<std::string> kSources = {"bundled", "cas", "manual"};

[[noreturn]] void schema(const std::string& ptr, const std::string& what) {
  throw Error(ErrorCode::Schema, (ptr.empty() ? "/" : ptr) + ": " + what);
}

// RFC 6901 escaping for object keys inside a pointer.
std::string esc(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

std::int64_t get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) schema(ptr, "expected integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    schema(ptr, "integer out of range");
  return j.get<std::int64_t>();
}

int get_small(const json& j, const std::string& ptr, std::int64_t lo) {
  const std::int64_t v = get_int(j, ptr);
  if (v < lo || v > 100000) schema(ptr, "expected integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

bool get_bool(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) schema(ptr, "expected boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) schema(ptr, "expected string");
  return j.get<std::string>();
}

const json& expect_object(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
  if (!j.is_object()) schema(ptr, "expected object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) schema(ptr + "/" + esc(k), "unknown key");
  return j;
}

const json& expect_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) schema(ptr, "expected array");
  return j;
}

const json& require(const json& obj, const std::string& key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(ptr + "/" + key, "missing");
  return *it;
}

bool squarefree(std::int64_t d) {
  for (std::int64_t q = 2; q * q <= d; ++q)
    if (d % (q * q) == 0) return false;
  return true;
}

json to_json(const FieldRecord& r) {
  json j = json::object();
  j["p"] = r.p;
  j["d"] = r.d;
  if (r.class_group_k) j["class_group_k"] = *r.class_group_k;
  if (r.s_exp) j["s_exp"] = *r.s_exp;
  if (r.hilbert_aux) {
    json h = json::object();
    if (r.hilbert_aux->real_quad_class_number) h["real_quad_class_number"] = *r.hilbert_aux->real_quad_class_number;
    if (r.hilbert_aux->k_zetap_class_number) h["k_zetap_class_number"] = *r.hilbert_aux->k_zetap_class_number;
    if (r.hilbert_aux->lk_cap_ktilde_exp) h["lk_cap_ktilde_exp"] = *r.hilbert_aux->lk_cap_ktilde_exp;
    j["hilbert_aux"] = h;
  }
  if (r.char_T) j["char_T"] = {{"prec_exp", r.char_T->prec_exp}, {"coeffs", r.char_T->coeffs}};
  if (r.layers) {
    json arr = json::array();
    for (const auto& l : *r.layers) {
      json ords = json::array();
      for (const auto& o : l.ords) ords.push_back(o ? json(*o) : json(nullptr));
      arr.push_back({{"tower", l.tower}, {"c", l.c}, {"ords", ords}});
    }
    j["layers"] = arr;
  }
  if (r.capitulation) {
    json arr = json::array();
    for (const auto& c : *r.capitulation)
      arr.push_back({{"generator", c.generator}, {"layer", c.layer}, {"principal", c.principal}});
    j["capitulation"] = arr;
  }
  if (r.n0_exp) j["n0_exp"] = *r.n0_exp;
  if (r.normality) j["normality"] = *r.normality;
  if (r.h_infinity_lambda_zero) j["h_infinity_lambda_zero"] = *r.h_infinity_lambda_zero;
  if (r.defining_polynomials) j["defining_polynomials"] = *r.defining_polynomials;
  json prov = json::object();
  for (const auto& [field, pr] : r.provenance) {
    json e = {{"source", pr.source}};
    if (pr.engine) e["engine"] = *pr.engine;
    if (pr.script) e["script"] = *pr.script;
    prov[field] = e;
  }
  j["provenance"] = prov;
  return j;
}

FieldRecord from_json(const json& j) {
  std::set<std::string> top(optional_field_names().begin(), optional_field_names().end());
  top.insert({"p", "d", "provenance"});
  expect_object(j, "", top);

  FieldRecord r;
  r.p = get_int(require(j, "p", ""), "/p");
  if (r.p < 2 || !is_prime(r.p)) schema("/p", "expected a prime");
  r.d = get_int(require(j, "d", ""), "/d");
  if (r.d < 1 || !squarefree(r.d)) schema("/d", "expected a square-free positive integer");

  if (auto it = j.find("class_group_k"); it != j.end()) {
    std::vector<int> cg;
    std::size_t i = 0;
    for (const auto& e : expect_array(*it, "/class_group_k"))
      cg.push_back(get_small(e, "/class_group_k/" + std::to_string(i++), 1));
    r.class_group_k = cg;
  }
  if (auto it = j.find("s_exp"); it != j.end()) r.s_exp = get_small(*it, "/s_exp", 0);
  if (auto it = j.find("hilbert_aux"); it != j.end()) {
    expect_object(*it, "/hilbert_aux", {"real_quad_class_number", "k_zetap_class_number", "lk_cap_ktilde_exp"});
    if (it->empty()) schema("/hilbert_aux", "expected at least one entry");
    HilbertAux h;
    if (auto k = it->find("real_quad_class_number"); k != it->end()) {
      h.real_quad_class_number = get_int(*k, "/hilbert_aux/real_quad_class_number");
      if (*h.real_quad_class_number < 1) schema("/hilbert_aux/real_quad_class_number", "expected positive integer");
    }
    if (auto k = it->find("k_zetap_class_number"); k != it->end()) {
      h.k_zetap_class_number = get_int(*k, "/hilbert_aux/k_zetap_class_number");
      if (*h.k_zetap_class_number < 1) schema("/hilbert_aux/k_zetap_class_number", "expected positive integer");
    }
    if (auto k = it->find("lk_cap_ktilde_exp"); k != it->end())
      h.lk_cap_ktilde_exp = get_small(*k, "/hilbert_aux/lk_cap_ktilde_exp", 0);
    r.hilbert_aux = h;
  }
  if (auto it = j.find("char_T"); it != j.end()) {
    expect_object(*it, "/char_T", {"prec_exp", "coeffs"});
    CharT c;
    c.prec_exp = get_small(require(*it, "prec_exp", "/char_T"), "/char_T/prec_exp", 1);
    std::size_t i = 0;
    for (const auto& e : expect_array(require(*it, "coeffs", "/char_T"), "/char_T/coeffs"))
      c.coeffs.push_back(get_int(e, "/char_T/coeffs/" + std::to_string(i++)));
    r.char_T = c;
  }
  if (auto it = j.find("layers"); it != j.end()) {
    std::vector<Layer> layers;
    std::size_t i = 0;
    for (const auto& e : expect_array(*it, "/layers")) {
      const std::string ptr = "/layers/" + std::to_string(i++);
      expect_object(e, ptr, {"tower", "c", "ords"});
      Layer l;
      l.tower = get_string(require(e, "tower", ptr), ptr + "/tower");
      if (!kTowers.count(l.tower)) schema(ptr + "/tower", "unknown tower '" + l.tower + "'");
      l.c = get_small(require(e, "c", ptr), ptr + "/c", 0);
      std::size_t k = 0;
      for (const auto& o : expect_array(require(e, "ords", ptr), ptr + "/ords")) {
        const std::string optr = ptr + "/ords/" + std::to_string(k++);
        l.ords.push_back(o.is_null() ? std::nullopt : std::optional<int>(get_small(o, optr, 0)));
      }
      layers.push_back(std::move(l));
    }
    r.layers = layers;
  }
  if (auto it = j.find("capitulation"); it != j.end()) {
    std::vector<Capitulation> caps;
    std::size_t i = 0;
    for (const auto& e : expect_array(*it, "/capitulation")) {
      const std::string ptr = "/capitulation/" + std::to_string(i++);
      expect_object(e, ptr, {"generator", "layer", "principal"});
      Capitulation c;
      c.generator = get_string(require(e, "generator", ptr), ptr + "/generator");
      if (c.generator.empty()) schema(ptr + "/generator", "expected non-empty label");
      c.layer = get_small(require(e, "layer", ptr), ptr + "/layer", 0);
      c.principal = get_bool(require(e, "principal", ptr), ptr + "/principal");
      caps.push_back(std::move(c));
    }
    r.capitulation = caps;
  }
  if (auto it = j.find("n0_exp"); it != j.end()) r.n0_exp = get_small(*it, "/n0_exp", 0);
  if (auto it = j.find("normality"); it != j.end()) r.normality = get_bool(*it, "/normality");
  if (auto it = j.find("h_infinity_lambda_zero"); it != j.end())
    r.h_infinity_lambda_zero = get_bool(*it, "/h_infinity_lambda_zero");
  if (auto it = j.find("defining_polynomials"); it != j.end()) {
    if (!it->is_object()) schema("/defining_polynomials", "expected object");
    std::map<std::string, std::string> polys;
    for (const auto& [k, v] : it->items()) polys[k] = get_string(v, "/defining_polynomials/" + esc(k));
    r.defining_polynomials = polys;
  }
  const json& prov = require(j, "provenance", "");
  if (!prov.is_object()) schema("/provenance", "expected object");
  for (const auto& [field, e] : prov.items()) {
    const std::string ptr = "/provenance/" + esc(field);
    expect_object(e, ptr, {"source", "engine", "script"});
    Provenance pr;
    pr.source = get_string(require(e, "source", ptr), ptr + "/source");
    if (auto k = e.find("engine"); k != e.end()) pr.engine = get_string(*k, ptr + "/engine");
    if (auto k = e.find("script"); k != e.end()) pr.script = get_string(*k, ptr + "/script");
    r.provenance[field] = pr;
  }
  return r;
}

}  // namespace

const std::vector<std::string>& optional_field_names() {
  static const std::vector<std::string> names = {
      "class_group_k", "s_exp",     "hilbert_aux", "char_T",
      "layers",        "capitulation", "n0_exp",   "normality",
      "h_infinity_lambda_zero", "defining_polynomials"};
  return names;
}

std::vector<std::string> present_fields(const FieldRecord& r) {
  std::vector<std::string> out;
  const bool present[] = {r.class_group_k.has_value(), r.s_exp.has_value(),        r.hilbert_aux.has_value(),
                          r.char_T.has_value(),        r.layers.has_value(),       r.capitulation.has_value(),
                          r.n0_exp.has_value(),        r.normality.has_value(),    r.h_infinity_lambda_zero.has_value(),
                          r.defining_polynomials.has_value()};
  for (std::size_t i = 0; i < optional_field_names().size(); ++i)
    if (present[i]) out.push_back(optional_field_names()[i]);
  return out;
}

FieldRecord without_field(const FieldRecord& rec, const std::string& name) {
  FieldRecord r = rec;
  if (name == "class_group_k")
    r.class_group_k.reset();
  else if (name == "s_exp")
    r.s_exp.reset();
  else if (name == "hilbert_aux")
    r.hilbert_aux.reset();
  else if (name == "char_T")
    r.char_T.reset();
  else if (name == "layers")
    r.layers.reset();
  else if (name == "capitulation")
    r.capitulation.reset();
  else if (name == "n0_exp")
    r.n0_exp.reset();
  else if (name == "normality")
    r.normality.reset();
  else if (name == "h_infinity_lambda_zero")
    r.h_infinity_lambda_zero.reset();
  else if (name == "defining_polynomials")
    r.defining_polynomials.reset();
  else
    throw Error(ErrorCode::InvalidArgument, "no optional field named '" + name + "'");
  r.provenance.erase(name);
  return r;
}

bool p_splits(std::int64_t p, std::int64_t d) {
  if (p == 2) return ((-d) % 8 + 8) % 8 == 1;
  const std::int64_t a = ((-d) % p + p) % p;
  if (a == 0) return false;
  return PadicInt(p, 1, a).pow(static_cast<std::uint64_t>((p - 1) / 2)).residue() == 1;
}

void validate_record(const FieldRecord& r) {
  if (r.p < 2 || !is_prime(r.p)) schema("/p", "expected a prime");
  if (r.d < 1 || !squarefree(r.d)) schema("/d", "expected a square-free positive integer");
  if (!p_splits(r.p, r.d))
    throw Error(ErrorCode::SplitCondition,
                std::to_string(r.p) + " does not split in Q(sqrt(-" + std::to_string(r.d) + "))");

  std::optional<int> rank_sum;
  if (r.class_group_k) {
    int sum = 0;
    for (std::size_t i = 0; i < r.class_group_k->size(); ++i) {
      if ((*r.class_group_k)[i] < 1) schema("/class_group_k/" + std::to_string(i), "expected exponent >= 1");
      sum += (*r.class_group_k)[i];
    }
    rank_sum = sum;
  }
  if (r.s_exp && rank_sum && *r.s_exp != *rank_sum)
    schema("/s_exp", "does not match the order of class_group_k");
  if (r.char_T) {
    const auto& c = r.char_T->coeffs;
    try {
      (void)checked_pow(r.p, r.char_T->prec_exp);
    } catch (const Error& e) {
      schema("/char_T/prec_exp", e.detail());
    }
    if (c.size() < 2) schema("/char_T/coeffs", "expected degree >= 1");
    if (c.front() != 0)
      throw Error(ErrorCode::ConstantTerm, "/char_T/coeffs/0: h(0) must be exactly 0, got " + std::to_string(c.front()));
    if (c.back() != 1) schema("/char_T/coeffs/" + std::to_string(c.size() - 1), "leading coefficient must be 1");
    for (std::size_t i = 1; i + 1 < c.size(); ++i)
      if (c[i] % r.p != 0)
        schema("/char_T/coeffs/" + std::to_string(i), "not distinguished: coefficient not divisible by p");
  }
  if (r.layers) {
    for (std::size_t i = 0; i < r.layers->size(); ++i) {
      const Layer& l = (*r.layers)[i];
      const std::string ptr = "/layers/" + std::to_string(i);
      if (!kTowers.count(l.tower)) schema(ptr + "/tower", "unknown tower '" + l.tower + "'");
      if (l.c < 0) schema(ptr + "/c", "expected integer >= 0");
      if (!l.ords.empty() && l.ords[0] && rank_sum && *l.ords[0] != *rank_sum)
        schema(ptr + "/ords/0", "layer 0 is k itself; does not match class_group_k");
    }
  }
  if (r.capitulation) {
    for (std::size_t i = 0; i < r.capitulation->size(); ++i) {
      if ((*r.capitulation)[i].generator.empty())
        schema("/capitulation/" + std::to_string(i) + "/generator", "expected non-empty label");
      if ((*r.capitulation)[i].layer < 0)
        schema("/capitulation/" + std::to_string(i) + "/layer", "expected integer >= 0");
    }
  }
  if (r.defining_polynomials)
    for (const auto& [k, v] : *r.defining_polynomials)
      if (v.empty()) schema("/defining_polynomials/" + esc(k), "expected non-empty string");

  const std::vector<std::string> fields = present_fields(r);
  for (const auto& f : fields)
    if (!r.provenance.count(f)) schema("/provenance", "missing entry for '" + f + "'");
  for (const auto& [f, pr] : r.provenance) {
    if (std::find(fields.begin(), fields.end(), f) == fields.end())
      schema("/provenance/" + esc(f), "entry for absent field");
    if (!kSources.count(pr.source)) schema("/provenance/" + esc(f) + "/source", "unknown source '" + pr.source + "'");
  }
}

FieldRecord load_record(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    schema("", std::string("invalid JSON: ") + e.what());
  }
  FieldRecord r = from_json(j);
  validate_record(r);
  return r;
}

FieldRecord load_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_record(ss.str());
}

std::string serialize_record(const FieldRecord& rec) { return to_json(rec).dump(2) + "\n"; }

std::optional<FitResult> iwasawa_fit(const std::vector<std::int64_t>& seq, std::int64_t p, int first_n) {
  if (seq.size() < 3) throw Error(ErrorCode::InvalidArgument, "iwasawa_fit needs at least 3 entries");
  if (p < 2 || !is_prime(p)) throw Error(ErrorCode::InvalidArgument, "p must be prime");
  if (first_n < 0) throw Error(ErrorCode::InvalidArgument, "first index must be >= 0");
  using i128 = __int128;
  const i128 cap = static_cast<i128>(1) << 100;
  // p^n, or nullopt once it no longer matters (mu must then be 0).
  auto ppow = [&](int n) -> std::optional<i128> {
    i128 r = 1;
    for (int i = 0; i < n; ++i) {
      r *= p;
      if (r > cap) return std::nullopt;
    }
    return r;
  };
  for (std::size_t w = 0; w + 3 <= seq.size(); ++w) {
    const int n = first_n + static_cast<int>(w);
    const i128 e0 = seq[w], e1 = seq[w + 1], e2 = seq[w + 2];
    const i128 second = e2 - 2 * e1 + e0;
    const auto pn = ppow(n);
    i128 mu = 0;
    if (second != 0) {
      if (!pn) continue;
      const i128 scale = *pn * (p - 1) * (p - 1);
      if (second % scale != 0 || second < 0) continue;
      mu = second / scale;
    }
    const i128 lambda = (e1 - e0) - (mu == 0 ? 0 : mu * *pn * (p - 1));
    if (lambda < 0) continue;
    const i128 nu = e0 - (mu == 0 ? 0 : mu * *pn) - lambda * n;
    bool fits = true;
    for (std::size_t k = w; k < seq.size() && fits; ++k) {
      const int m = first_n + static_cast<int>(k);
      i128 model = lambda * m + nu;
      if (mu != 0) {
        const auto pm = ppow(m);
        if (!pm) {
          fits = false;
          break;
        }
        model += mu * *pm;
      }
      fits = model == seq[k];
    }
    if (fits)
      return FitResult{static_cast<std::int64_t>(mu), static_cast<std::int64_t>(lambda), static_cast<std::int64_t>(nu),
                       n};
  }
  return std::nullopt;
}

FieldRecord overlay_record(const FieldRecord& base, const FieldRecord& update) {
  if (base.p != update.p || base.d != update.d)
    throw Error(ErrorCode::MismatchedKey, "overlay for a different (p, d)");
  FieldRecord r = base;
  if (update.class_group_k) r.class_group_k = update.class_group_k;
  if (update.s_exp) r.s_exp = update.s_exp;
  if (update.hilbert_aux) r.hilbert_aux = update.hilbert_aux;
  if (update.char_T) r.char_T = update.char_T;
  if (update.layers) r.layers = update.layers;
  if (update.capitulation) r.capitulation = update.capitulation;
  if (update.n0_exp) r.n0_exp = update.n0_exp;
  if (update.normality) r.normality = update.normality;
  if (update.h_infinity_lambda_zero) r.h_infinity_lambda_zero = update.h_infinity_lambda_zero;
  if (update.defining_polynomials) r.defining_polynomials = update.defining_polynomials;
  for (const auto& [f, pr] : update.provenance) r.provenance[f] = pr;
  return r;
}

RecordDiff record_diff(const FieldRecord& a, const FieldRecord& b) {
  if (a.p != b.p || a.d != b.d)
    throw Error(ErrorCode::MismatchedKey, "(" + std::to_string(a.p) + ", " + std::to_string(a.d) + ") vs (" +
                                              std::to_string(b.p) + ", " + std::to_string(b.d) + ")");
  const json ja = to_json(a), jb = to_json(b);
  RecordDiff diff;
  for (const auto& f : optional_field_names()) {
    const auto ia = ja.find(f), ib = jb.find(f);
    const bool ha = ia != ja.end(), hb = ib != jb.end();
    if (!ha && !hb) continue;
    if (ha && hb && *ia == *ib) continue;
    diff.lines.push_back(f + ": " + (ha ? ia->dump() : "absent") + " vs " + (hb ? ib->dump() : "absent"));
  }
  return diff;
}

std::string bundled_data_dir() {
  if (const char* env = std::getenv("GGC_DATA_DIR"); env && *env) return env;
  return GGC_DEFAULT_DATA_DIR;
}

FieldRecord load_bundled(std::int64_t p, std::int64_t d) {
  const std::filesystem::path path = std::filesystem::path(bundled_data_dir()) / (std::to_string(d) + ".json");
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::DataMissing, "no bundled record for d=" + std::to_string(d));
  FieldRecord r = load_record_file(path.string());
  if (r.p != p)
    throw Error(ErrorCode::DataMissing,
                "bundled record for d=" + std::to_string(d) + " is for p=" + std::to_string(r.p));
  return r;
}

}  // namespace ggc
