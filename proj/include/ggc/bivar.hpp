#pragma once

#include <string>
#include <vector>

#include "ggc/series.hpp"

namespace ggc {

// Truncated element of Z_p[[S, T]] stored as a dense ds x dt grid; c(i, j)
// multiplies S^i T^j. Each variable carries its own polynomial flag with the
// same meaning as for PowerSeries.
class BivarSeries {
 public:
  BivarSeries(std::int64_t p, int prec, int ds, int dt, std::vector<PadicInt> grid, bool s_polynomial,
              bool t_polynomial);

  static BivarSeries zero(std::int64_t p, int prec);
  // Integer grid rows[i][j] -> coefficient of S^i T^j, exact in both variables.
  static BivarSeries from_integers(std::int64_t p, int prec, const std::vector<std::vector<std::int64_t>>& rows);
  // Sum_j g_j(S) T^j, polynomial in T.
  static BivarSeries from_T_coefficients(const std::vector<PowerSeries>& g);
  // Sum_i r_i(T) S^i, polynomial in S.
  static BivarSeries from_S_coefficients(const std::vector<PowerSeries>& r);
  static BivarSeries in_S(const PowerSeries& g) { return from_T_coefficients({g}); }
  static BivarSeries in_T(const PowerSeries& r) { return from_S_coefficients({r}); }

  std::int64_t p() const noexcept { return p_; }
  int prec() const noexcept { return prec_; }
  int s_cutoff() const noexcept { return ds_; }
  int t_cutoff() const noexcept { return dt_; }
  bool is_s_polynomial() const noexcept { return s_poly_; }
  bool is_t_polynomial() const noexcept { return t_poly_; }

  PadicInt coeff(int i, int j) const;
  // Coefficient of T^j as a series in S, and of S^i as a series in T.
  PowerSeries t_coefficient(int j) const;
  PowerSeries s_coefficient(int i) const;
  // Highest T-power with a coefficient that is not exactly zero.
  int t_degree() const;

  BivarSeries compact() const;
  BivarSeries operator-() const;
  friend BivarSeries operator+(const BivarSeries& a, const BivarSeries& b);
  friend BivarSeries operator-(const BivarSeries& a, const BivarSeries& b);
  friend BivarSeries operator*(const BivarSeries& a, const BivarSeries& b);

  // Monomials "c * S^i * T^j" in graded-lex order (total degree first, then
  // S-degree), followed by O(.) terms and the modulus.
  std::string str(bool with_modulus = true) const;

 private:
  std::int64_t p_;
  int prec_;
  int ds_;
  int dt_;
  std::vector<PadicInt> grid_;
  bool s_poly_;
  bool t_poly_;
};

// a == b modulo (p^prec, S^ds, T^dt).
bool congruent(const BivarSeries& a, const BivarSeries& b, int prec, int ds, int dt);

// Square matrix of univariate series over one (p, N).
using SeriesMatrix = std::vector<std::vector<PowerSeries>>;

enum class Orientation { TDiagonal, SDiagonal };

// det(X*I - F) with X = T (TDiagonal, entries are series in S) or X = S
// (SDiagonal, entries are series in T). Monic of degree n in X.
BivarSeries char_det(const SeriesMatrix& F, Orientation orientation = Orientation::TDiagonal);

// The same determinant with the first Laplace step along a chosen row or
// column (the rest of the expansion runs along first rows).
struct Expansion {
  bool along_row;
  int index;
};
BivarSeries char_det(const SeriesMatrix& F, Orientation orientation, Expansion first_step);

SeriesMatrix matrix_multiply(const SeriesMatrix& a, const SeriesMatrix& b);

// Sum_j f_j(S) F^j for f polynomial in T with coefficients in S.
SeriesMatrix evaluate_at_matrix(const BivarSeries& f, const SeriesMatrix& F);

// f(S, phi(S)). Exact when f is polynomial in T; otherwise the omitted
// T-tail is controlled by v = vp(phi(0)) >= 1: the coefficient of S^k is
// known modulo p^{(D_T - k) v}, so the result is cut to the longest prefix
// that keeps full precision (or to the constant term at reduced precision).
PowerSeries substitute_T(const BivarSeries& f, const PowerSeries& phi);

// Substitute T -> c(S) + e(S) * T for f polynomial in T.
BivarSeries affine_T_substitution(const BivarSeries& f, const PowerSeries& c, const PowerSeries& e);

enum class TsDirection {
  Forward,   // T = (1+T_s)(1+S)^{-u p^s} - 1: input in (S, T), output in (S, T_s)
  Backward,  // T_s = (1+S)^{u p^s}(1+T) - 1: input in (S, T_s), output in (S, T)
};
BivarSeries ts_change(const BivarSeries& f, const PadicInt& u, int s, TsDirection direction,
                      int s_cutoff = kDefaultCutoff);

PowerSeries specialize_S0(const BivarSeries& f);  // f(0, T)
PowerSeries specialize_T0(const BivarSeries& f);  // f(S, 0)
PadicInt specialize_both(const BivarSeries& f);   // f(0, 0)

}  // namespace ggc
