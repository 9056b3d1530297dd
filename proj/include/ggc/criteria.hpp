#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ggc/fielddata.hpp"
#include "ggc/series.hpp"

namespace ggc {

enum class Tri { True, False, Unknown };
const char* to_string(Tri t);

// Derived data of the cyclotomic characteristic polynomial h(T) = T * g(T).
struct CharData {
  PowerSeries h;
  int lambda_cyc;
  Valuation mu;
  SquareFreeReport squarefree;
  TFactor t_factor;
  Valuation g0_val;  // vp(g(0))
  // alpha with h = T (T + alpha) when g is linear, to its certified precision.
  std::optional<PadicInt> alpha;
  bool lambda_at_least_two() const noexcept { return lambda_cyc >= 2; }
};

// InvalidChar unless h(0) is exactly 0.
CharData char_analysis(const PowerSeries& h);
// From the record's char_T; DataMissing if absent.
CharData char_analysis(const FieldRecord& rec);

struct TraceEntry {
  std::string criterion;
  nlohmann::json inputs;
  std::string outcome;
  std::string anchor;  // descriptive name of the justifying statement
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

template <class T>
struct Finding {
  T value;
  TraceEntry entry;
};

// Is the Hilbert p-class field inside the Z_p^2-extension? Class-number
// criteria for p = 3 (d != 3 mod 9) and p >= 5, an ingested index exponent,
// or non-cyclicity of A_k. DataMissing when nothing applies.
Finding<Tri> hilbert_in_ztilde(const FieldRecord& rec);

struct IndexReport {
  bool consistent;
  bool forced_non_normal;  // nothing but the non-normal case fits
  std::vector<std::string> notes;
};
// Inequalities between p^n0 = [Gal(k~/k) : D_p], p^s = [L_k : k] and
// p^g0_val = #(Z_p / g_0(0)).
IndexReport index_bounds_validate(std::optional<int> n0_exp, int s_exp, const Valuation& g0_val,
                                  std::optional<bool> normal);

Finding<Tri> p_split_p_rational(const FieldRecord& rec);

enum class LambdaDecision { LambdaZero, LambdaMuZero, Unknown };
const char* to_string(LambdaDecision d);

// Stabilization: some n >= c with seq[n] == seq[n+1]. seq is indexed from
// n = 0; null entries are unknown. DataMissing if the window ends before c+1.
LambdaDecision fukuda_check(const std::vector<std::optional<int>>& seq, int c);
// Every listed generator of A_k principal at some recorded layer of N.
Finding<LambdaDecision> capitulation_check(const FieldRecord& rec);

enum class VerdictLevel { Inconclusive, WeakGGCHolds, GGCHolds };
const char* to_string(VerdictLevel level);  // "GGC holds", ...
const char* level_token(VerdictLevel level);  // "ggc", "weak-ggc", "inconclusive"
std::optional<VerdictLevel> parse_level(const std::string& token);

struct Verdict {
  VerdictLevel level = VerdictLevel::Inconclusive;
  std::vector<TraceEntry> trace;
  std::string reason;  // first failed precondition when Inconclusive
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

// Weak-GGC paths. Outcome "weak-ggc" or "inconclusive"; the entry names the
// failed clause.
TraceEntry weak_ggc_valuation_gap(const FieldRecord& rec);
TraceEntry weak_ggc_n_tower(const FieldRecord& rec);
TraceEntry weak_ggc_p_rational_branch(const FieldRecord& rec);

// Adds the primality certificate for g = h/T when it exists; otherwise the
// verdict is returned unchanged.
Verdict ggc_upgrade(const FieldRecord& rec, Verdict weak);

// Runs every criterion in order and keeps the strongest justified level.
// Missing data becomes trace lines, never exceptions.
Verdict verdict_pipeline(const FieldRecord& rec);

// The level implied by the outcomes in a trace.
VerdictLevel level_from_trace(const std::vector<TraceEntry>& trace);

nlohmann::json verdict_to_json(const Verdict& v);
// Schema errors with JSON pointers, as for records.
Verdict verdict_from_json(const nlohmann::json& j);

}  // namespace ggc
