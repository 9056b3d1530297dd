#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggc/padics.hpp"

namespace ggc {

inline constexpr int kDefaultCutoff = 32;

// Truncated element of Z_p[[X]]: coefficients b_0 .. b_{D-1} modulo p^N.
//
// A series flagged as a polynomial has every coefficient at index >= D
// exactly zero; otherwise it is only known modulo X^D. Arithmetic is exact
// modulo (p^N, X^D) where D is the smallest cutoff among non-polynomial
// operands; products of polynomials stay polynomials.
class PowerSeries {
 public:
  PowerSeries(std::int64_t p, int prec, std::vector<PadicInt> coeffs, bool polynomial);

  // Exact integer polynomial, ascending coefficients; integer zeros become
  // exact zeros. A cutoff larger than the list pads with exact zeros.
  static PowerSeries from_integers(std::int64_t p, int prec, const std::vector<std::int64_t>& coeffs,
                                   int cutoff = 0);
  // Same coefficients, but only known modulo X^cutoff.
  static PowerSeries truncated(std::int64_t p, int prec, const std::vector<std::int64_t>& coeffs, int cutoff);
  static PowerSeries zero(std::int64_t p, int prec) { return from_integers(p, prec, {0}); }
  static PowerSeries one(std::int64_t p, int prec) { return from_integers(p, prec, {1}); }
  static PowerSeries variable(std::int64_t p, int prec) { return from_integers(p, prec, {0, 1}); }
  static PowerSeries constant(const PadicInt& c);

  std::int64_t p() const noexcept { return p_; }
  int prec() const noexcept { return prec_; }
  int cutoff() const noexcept { return static_cast<int>(coeffs_.size()); }
  bool is_polynomial() const noexcept { return polynomial_; }
  const std::vector<PadicInt>& coeffs() const noexcept { return coeffs_; }

  // Coefficient of X^i; exact zero past the cutoff of a polynomial,
  // InvalidArgument past the cutoff of a truncated series.
  PadicInt coeff(int i) const;

  // Index of the highest coefficient that is not an exact zero (-1 for the
  // zero polynomial). Polynomials only.
  int degree() const;

  PowerSeries truncate(int cutoff) const;
  PowerSeries with_prec(int prec) const;
  PowerSeries compact() const;
  // Divide by X^a; the first a coefficients are discarded.
  PowerSeries shifted_down(int a) const;
  PowerSeries shifted_up(int a) const;
  PowerSeries derivative() const;
  PowerSeries pow(std::uint64_t e) const;

  PowerSeries operator-() const;
  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const PadicInt& c, const PowerSeries& a);

  // Descending-degree text, e.g. "T^2 + 64638*T (mod 3^11)". Truncated
  // series end with "+ O(T^D)".
  std::string str(const std::string& var = "T", bool with_modulus = true) const;

 private:
  std::int64_t p_;
  int prec_;
  std::vector<PadicInt> coeffs_;
  bool polynomial_;
};

// a == b modulo (p^prec, X^cutoff).
bool congruent(const PowerSeries& a, const PowerSeries& b, int prec, int cutoff);

// Inverse of a series with unit constant term, at the same cutoff.
PowerSeries series_inverse(const PowerSeries& v);

// Iwasawa invariants of a single series.
Valuation mu_invariant(const PowerSeries& v);

struct LambdaInvariant {
  std::optional<int> value;  // nullopt: no unit coefficient below the cutoff
  int cutoff = 0;
  bool determined() const noexcept { return value.has_value(); }
};
LambdaInvariant lambda_invariant(const PowerSeries& v);

// ((1+X)^{p^m} - 1)/X. Truncated when cutoff <= p^m - 1.
PowerSeries nu_polynomial(int m, std::int64_t p, int prec, int cutoff = kDefaultCutoff);

// Sum_j C(u, j) X^{j*stride} = (1 + X^stride)^u, truncated at cutoff.
//
// Only u mod p^N is known, so the coefficients are known modulo
// p^{N - max_j vp(j)} over the indices in range; PrecisionUnderflow if that
// leaves nothing.
PowerSeries binom_series(const PadicInt& u, int stride, int cutoff = kDefaultCutoff);

// Monic polynomial of degree lambda with every lower coefficient divisible by p.
class DistinguishedPoly {
 public:
  explicit DistinguishedPoly(PowerSeries poly);
  int lambda() const noexcept { return lambda_; }
  const PowerSeries& poly() const noexcept { return poly_; }

 private:
  PowerSeries poly_;
  int lambda_;
};

// V = p^mu * P * U with P distinguished and U(0) a unit.
//
// P and U are returned at precision N - mu (the division by p^mu costs mu
// digits: that is the slack). The recombined product p^mu * P * U agrees
// with V modulo (p^N, X^D).
struct Preparation {
  int mu;
  DistinguishedPoly distinguished;
  PowerSeries unit;
  int slack;
};
Preparation weierstrass_prepare(const PowerSeries& v);
// p^mu * P * U at precision mu + (precision of the factors).
PowerSeries recombine(const Preparation& prep);

struct Slope {
  std::int64_t num;
  std::int64_t den;  // > 0, gcd(num, den) = 1
  friend bool operator==(const Slope&, const Slope&) = default;
  std::string str() const;
};

struct NewtonSegment {
  Slope slope;
  int length;
  friend bool operator==(const NewtonSegment&, const NewtonSegment&) = default;
};

struct NewtonPolygon {
  std::vector<std::pair<int, int>> vertices;
  std::vector<NewtonSegment> segments;
};

// Lower convex hull of {(i, vp(b_i))}. Exact zeros contribute no point;
// coefficients that vanish at precision must lie on or above the hull of the
// determined points, otherwise the polygon is Ambiguous.
NewtonPolygon newton_polygon(const PowerSeries& h);

enum class Irreducibility { Irreducible, Inconclusive };
const char* to_string(Irreducibility d);

// One-sided: Irreducible only for a single segment starting at the constant
// term whose reduced slope denominator equals the degree.
Irreducibility irreducible_by_newton(const PowerSeries& h);

enum class SquareFreeness { SquareFree, NotSquareFree, Inconclusive };
const char* to_string(SquareFreeness d);

struct SquareFreeReport {
  SquareFreeness decision;
  Valuation disc_valuation;  // Infinite when an exact repeated factor was exhibited
  int prec;
};

// Discriminant of a polynomial with unit leading coefficient, computed over
// Z from integer lifts and reduced mod p^N.
PadicInt discriminant(const PowerSeries& h);
SquareFreeReport squarefree_check(const PowerSeries& h);

struct HenselRoot {
  PadicInt root;       // h(root) = 0 mod p^N
  int certified_prec;  // the true root is congruent to `root` mod p^certified_prec
};
HenselRoot hensel_lift_root(const PowerSeries& h, const PadicInt& r0);

struct TFactor {
  int multiplicity;
  PowerSeries cofactor;
};
// h = X^a * g with a maximal and g(0) nonzero.
TFactor extract_T_factor(const PowerSeries& h);

PadicInt eval_series(const PowerSeries& v, const PadicInt& x);

}  // namespace ggc
