#include "ggc/padics.hpp"

#include <algorithm>
#include <climits>
#include <numeric>

namespace ggc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NotInvertible: return "not-invertible";
    case ErrorCode::PrecisionUnderflow: return "precision-underflow";
    case ErrorCode::CannotPrepare: return "cannot-prepare";
    case ErrorCode::Ambiguous: return "ambiguous";
    case ErrorCode::AmbiguousMultiplicity: return "ambiguous-multiplicity";
    case ErrorCode::HenselCondition: return "hensel-condition";
    case ErrorCode::UnboundedTail: return "unbounded-tail";
    case ErrorCode::InvalidChar: return "invalid-char";
    case ErrorCode::DataMissing: return "data-missing";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::SplitCondition: return "split-condition";
    case ErrorCode::ConstantTerm: return "constant-term";
    case ErrorCode::MismatchedKey: return "mismatched-key";
    case ErrorCode::EngineMissing: return "engine-missing";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::ParseFailure: return "parse-failure";
    case ErrorCode::TaskUnsupported: return "task-unsupported";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace detail {

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t invmod(std::int64_t a, std::int64_t m) {
  // extended Euclid on (a, m); caller guarantees gcd(a, m) = 1
  std::int64_t old_r = mod(a, m), r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw Error(ErrorCode::NotInvertible, "residue shares a factor with the modulus");
  return mod(old_s, m);
}

}  // namespace detail

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::int64_t checked_pow(std::int64_t p, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
  constexpr std::int64_t limit = std::int64_t{1} << 62;
  std::int64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > limit / p) {
      throw Error(ErrorCode::InvalidArgument,
                  std::to_string(p) + "^" + std::to_string(n) + " exceeds the 2^62 modulus limit");
    }
    r *= p;
  }
  return r;
}

int Valuation::value() const {
  if (kind_ == Kind::Infinite) throw Error(ErrorCode::InvalidArgument, "valuation of exact zero has no value");
  return value_;
}

int Valuation::lower_bound() const noexcept { return kind_ == Kind::Infinite ? INT_MAX : value_; }

std::string Valuation::str() const {
  switch (kind_) {
    case Kind::Known: return std::to_string(value_);
    case Kind::AtLeast: return ">=" + std::to_string(value_);
    case Kind::Infinite: return "inf";
  }
  return "?";
}

Valuation vp(std::int64_t n, std::int64_t p) {
  if (!is_prime(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (n == 0) return Valuation::infinite();
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return Valuation::known(v);
}

int vp_factorial(std::int64_t j, std::int64_t p) {
  int e = 0;
  for (std::int64_t q = j / p; q > 0; q /= p) e += static_cast<int>(q);
  return e;
}

PadicInt::PadicInt(std::int64_t p, int prec, std::int64_t value) : p_(p), prec_(prec) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "prime must be at least 2");
  if (prec < 1) throw Error(ErrorCode::InvalidArgument, "precision must be at least 1");
  modulus_ = checked_pow(p, prec);
  residue_ = detail::mod(value, modulus_);
}

PadicInt PadicInt::exact(std::int64_t p, int prec, std::int64_t value) {
  PadicInt r(p, prec, value);
  r.exact_zero_ = (value == 0);
  return r;
}

std::int64_t PadicInt::signed_residue() const noexcept {
  return residue_ > modulus_ / 2 ? residue_ - modulus_ : residue_;
}

Valuation PadicInt::valuation() const {
  if (exact_zero_) return Valuation::infinite();
  if (residue_ == 0) return Valuation::at_least(prec_);
  int v = 0;
  for (std::int64_t r = residue_; r % p_ == 0; r /= p_) ++v;
  return Valuation::known(v);
}

PadicInt PadicInt::reduce(int new_prec) const {
  if (new_prec > prec_) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot raise precision from " + std::to_string(prec_) + " to " + std::to_string(new_prec));
  }
  PadicInt r(p_, new_prec, residue_);
  r.exact_zero_ = exact_zero_;
  return r;
}

PadicInt PadicInt::with_prec_at_most(int new_prec) const { return new_prec >= prec_ ? *this : reduce(new_prec); }

namespace {

void require_same_prime(const PadicInt& a, const PadicInt& b) {
  if (a.p() != b.p()) {
    throw Error(ErrorCode::InvalidArgument,
                "mismatched primes " + std::to_string(a.p()) + " and " + std::to_string(b.p()));
  }
}

}  // namespace

PadicInt PadicInt::operator-() const {
  PadicInt r(p_, prec_, modulus_ - residue_);
  r.exact_zero_ = exact_zero_;
  return r;
}

PadicInt operator+(const PadicInt& a, const PadicInt& b) {
  require_same_prime(a, b);
  if (a.exact_zero_) return b.with_prec_at_most(a.prec_);
  if (b.exact_zero_) return a.with_prec_at_most(b.prec_);
  const int prec = std::min(a.prec_, b.prec_);
  PadicInt r(a.p_, prec, 0);
  r.residue_ = (a.residue_ % r.modulus_ + b.residue_ % r.modulus_) % r.modulus_;
  return r;
}

PadicInt operator-(const PadicInt& a, const PadicInt& b) { return a + (-b); }

PadicInt operator*(const PadicInt& a, const PadicInt& b) {
  require_same_prime(a, b);
  const int prec = std::min(a.prec_, b.prec_);
  PadicInt r(a.p_, prec, 0);
  if (a.exact_zero_ || b.exact_zero_) {
    r.exact_zero_ = true;
    return r;
  }
  r.residue_ = detail::mulmod(a.residue_ % r.modulus_, b.residue_ % r.modulus_, r.modulus_);
  return r;
}

PadicInt PadicInt::pow(std::uint64_t e) const {
  PadicInt result = one(p_, prec_);
  PadicInt base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    base *= base;
    e >>= 1u;
  }
  return result;
}

std::string PadicInt::str() const {
  return std::to_string(residue_) + " mod " + std::to_string(p_) + "^" + std::to_string(prec_);
}

PadicInt inverse(const PadicInt& a) {
  if (!a.is_unit()) {
    throw Error(ErrorCode::NotInvertible, a.str() + " has valuation " + a.valuation().str());
  }
  return PadicInt(a.p(), a.prec(), detail::invmod(a.residue(), a.modulus()));
}

PadicInt binom_padic(const PadicInt& u, std::int64_t j) {
  if (j < 0) throw Error(ErrorCode::InvalidArgument, "binomial index must be non-negative");
  const std::int64_t p = u.p();
  const int e = vp_factorial(j, p);
  if (e >= u.prec()) {
    throw Error(ErrorCode::PrecisionUnderflow, "vp(" + std::to_string(j) + "!) = " + std::to_string(e) +
                                                   " exhausts precision " + std::to_string(u.prec()));
  }
  const int out_prec = u.prec() - e;
  // The falling factorial u(u-1)...(u-j+1) of the integer representative is
  // divisible by j!, so its residue mod p^N is p^e times a residue mod p^{N-e}.
  const std::int64_t m = u.modulus();
  std::int64_t num = 1 % m;
  for (std::int64_t i = 0; i < j; ++i) num = detail::mulmod(num, detail::mod(u.residue() - i, m), m);
  const std::int64_t pe = checked_pow(p, e);
  const std::int64_t out_mod = m / pe;
  std::int64_t unit_part = 1 % out_mod;
  for (std::int64_t i = 2; i <= j; ++i) {
    std::int64_t f = i;
    while (f % p == 0) f /= p;
    unit_part = detail::mulmod(unit_part, f % out_mod, out_mod);
  }
  const std::int64_t quotient = (num / pe) % out_mod;
  return PadicInt(p, out_prec, detail::mulmod(quotient, detail::invmod(unit_part, out_mod), out_mod));
}

}  // namespace ggc
