#pragma once

#include <cstdint>
#include <string>

#include "ggc/error.hpp"

namespace ggc {

bool is_prime(std::int64_t n);

// p^n, throwing InvalidArgument if the result would not leave headroom for
// 128-bit products (p^n must stay below 2^62).
std::int64_t checked_pow(std::int64_t p, int n);

// p-adic valuation with three states: an exact value, a lower bound coming
// from finite precision, and the valuation of an exact zero.
class Valuation {
 public:
  enum class Kind { Known, AtLeast, Infinite };

  static Valuation known(int v) { return Valuation(Kind::Known, v); }
  static Valuation at_least(int n) { return Valuation(Kind::AtLeast, n); }
  static Valuation infinite() { return Valuation(Kind::Infinite, 0); }

  Kind kind() const noexcept { return kind_; }
  bool is_known() const noexcept { return kind_ == Kind::Known; }
  bool is_infinite() const noexcept { return kind_ == Kind::Infinite; }

  // Known: the valuation; AtLeast: the precision bound. Throws on Infinite.
  int value() const;
  // Largest integer the true valuation is guaranteed to reach.
  int lower_bound() const noexcept;

  // "5", ">=11" or "inf".
  std::string str() const;

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  Valuation(Kind kind, int value) : kind_(kind), value_(value) {}
  Kind kind_;
  int value_;
};

// Valuation of an exact integer. vp(0) is Infinite.
Valuation vp(std::int64_t n, std::int64_t p);

// ord_p(j!) by Legendre's formula.
int vp_factorial(std::int64_t j, std::int64_t p);

// Residue modulo p^N. Precision never increases through arithmetic: binary
// operations work at the smaller precision of their operands.
//
// An element may additionally be flagged as an exact zero (built from the
// integer 0). The flag survives the operations that preserve exact zeros
// (0 + 0, 0 * x, -0) and is dropped otherwise.
class PadicInt {
 public:
  PadicInt(std::int64_t p, int prec, std::int64_t value);

  static PadicInt exact(std::int64_t p, int prec, std::int64_t value);
  static PadicInt exact_zero(std::int64_t p, int prec) { return exact(p, prec, 0); }
  static PadicInt one(std::int64_t p, int prec) { return PadicInt(p, prec, 1); }

  std::int64_t p() const noexcept { return p_; }
  int prec() const noexcept { return prec_; }
  std::int64_t residue() const noexcept { return residue_; }
  std::int64_t modulus() const noexcept { return modulus_; }
  // Representative in (-p^N/2, p^N/2].
  std::int64_t signed_residue() const noexcept;

  bool is_exact_zero() const noexcept { return exact_zero_; }
  bool is_zero() const noexcept { return residue_ == 0; }
  bool is_unit() const noexcept { return residue_ % p_ != 0; }

  Valuation valuation() const;

  PadicInt reduce(int new_prec) const;
  PadicInt with_prec_at_most(int new_prec) const;

  PadicInt operator-() const;
  friend PadicInt operator+(const PadicInt& a, const PadicInt& b);
  friend PadicInt operator-(const PadicInt& a, const PadicInt& b);
  friend PadicInt operator*(const PadicInt& a, const PadicInt& b);
  PadicInt& operator+=(const PadicInt& b) { return *this = *this + b; }
  PadicInt& operator-=(const PadicInt& b) { return *this = *this - b; }
  PadicInt& operator*=(const PadicInt& b) { return *this = *this * b; }

  PadicInt pow(std::uint64_t e) const;

  // Value equality: same prime, precision and residue.
  friend bool operator==(const PadicInt& a, const PadicInt& b) {
    return a.p_ == b.p_ && a.prec_ == b.prec_ && a.residue_ == b.residue_;
  }

  // "<residue> mod <p>^<N>"
  std::string str() const;

 private:
  std::int64_t p_;
  int prec_;
  std::int64_t modulus_;
  std::int64_t residue_;
  bool exact_zero_ = false;
};

// Inverse of a unit at its own precision; NotInvertible otherwise.
PadicInt inverse(const PadicInt& a);

// C(u, j) as an element of Z_p. Dividing by j! costs vp(j!) digits of
// precision; PrecisionUnderflow when nothing would be left.
PadicInt binom_padic(const PadicInt& u, std::int64_t j);

namespace detail {
std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t mod(std::int64_t a, std::int64_t m);
std::int64_t invmod(std::int64_t a, std::int64_t m);
}  // namespace detail

}  // namespace ggc
