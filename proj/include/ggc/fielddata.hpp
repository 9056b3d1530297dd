#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ggc/error.hpp"

namespace ggc {

// Auxiliary class numbers used to decide whether the Hilbert p-class field
// lies in the Z_p^2-extension.
struct HilbertAux {
  std::optional<std::int64_t> real_quad_class_number;  // h(Q(sqrt(3d))), p = 3
  std::optional<std::int64_t> k_zetap_class_number;    // h(k(zeta_p)), p >= 5
  // Exponent e with [L_k cap k~ : k] = p^e, when known from an outside source.
  std::optional<int> lk_cap_ktilde_exp;
  friend bool operator==(const HilbertAux&, const HilbertAux&) = default;
};

// h(T) mod p^prec_exp, ascending coefficients.
struct CharT {
  int prec_exp = 0;
  std::vector<std::int64_t> coeffs;
  friend bool operator==(const CharT&, const CharT&) = default;
};

// ord_p #A of the layers n = 0, 1, ... of one Z_p-extension; null entries
// are unknown. c: every ramified prime is totally ramified above layer c.
struct Layer {
  std::string tower;  // cyclotomic | anticyclotomic | N | Nstar | H
  int c = 0;
  std::vector<std::optional<int>> ords;
  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Capitulation {
  std::string generator;  // e.g. "p5": the class of a prime above 5
  int layer = 0;
  bool principal = false;
  friend bool operator==(const Capitulation&, const Capitulation&) = default;
};

struct Provenance {
  std::string source;  // bundled | cas | manual
  std::optional<std::string> engine;
  std::optional<std::string> script;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FieldRecord {
  std::int64_t p = 0;
  std::int64_t d = 0;
  // Elementary-divisor exponents: [1, 1] is Z/p + Z/p, [] the trivial group.
  std::optional<std::vector<int>> class_group_k;
  std::optional<int> s_exp;
  std::optional<HilbertAux> hilbert_aux;
  std::optional<CharT> char_T;
  std::optional<std::vector<Layer>> layers;
  std::optional<std::vector<Capitulation>> capitulation;
  std::optional<int> n0_exp;
  std::optional<bool> normality;
  std::optional<bool> h_infinity_lambda_zero;
  std::optional<std::map<std::string, std::string>> defining_polynomials;
  std::map<std::string, Provenance> provenance;  // keyed by field name
  friend bool operator==(const FieldRecord&, const FieldRecord&) = default;
};

// Names of the optional fields, in schema order.
const std::vector<std::string>& optional_field_names();
// Optional fields present in the record.
std::vector<std::string> present_fields(const FieldRecord& rec);
// Copy with one optional field (and its provenance entry) removed.
FieldRecord without_field(const FieldRecord& rec, const std::string& name);

// Parse and validate. Schema errors name the offending JSON pointer.
FieldRecord load_record(std::string_view json_text);
FieldRecord load_record_file(const std::string& path);
// Checks the invariants of an in-memory record (load_record calls this).
void validate_record(const FieldRecord& rec);

// Canonical text: sorted keys, two-space indent, absent fields omitted,
// trailing newline.
std::string serialize_record(const FieldRecord& rec);

// true when -d is a nonzero square mod p (p odd), or -d = 1 mod 8 (p = 2).
bool p_splits(std::int64_t p, std::int64_t d);

struct FitResult {
  std::int64_t mu;
  std::int64_t lambda;
  std::int64_t nu;
  int window_start;  // index n (not offset) where the exact fit begins
  friend bool operator==(const FitResult&, const FitResult&) = default;
};

// Fit e_n = mu p^n + lambda n + nu on the longest exact tail (at least three
// entries). seq[0] is e_{first_n}. nullopt when no tail fits.
std::optional<FitResult> iwasawa_fit(const std::vector<std::int64_t>& seq, std::int64_t p, int first_n = 0);

struct RecordDiff {
  std::vector<std::string> lines;  // one per differing field
  bool empty() const noexcept { return lines.empty(); }
};
// `base` with every field present in `update` replaced, provenance included.
FieldRecord overlay_record(const FieldRecord& base, const FieldRecord& update);

// Field-by-field comparison of the data fields; provenance is ignored.
RecordDiff record_diff(const FieldRecord& a, const FieldRecord& b);

// Bundled record for d, from GGC_DATA_DIR in the environment or the build's
// data directory. DataMissing when there is none.
std::string bundled_data_dir();
FieldRecord load_bundled(std::int64_t p, std::int64_t d);

}  // namespace ggc
