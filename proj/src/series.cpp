#include "ggc/series.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <climits>
#include <numeric>
#include <sstream>

namespace ggc {

namespace {

using boost::multiprecision::cpp_int;

void require_same_ring(const PowerSeries& a, const PowerSeries& b) {
  if (a.p() != b.p()) {
    throw Error(ErrorCode::InvalidArgument,
                "mismatched primes " + std::to_string(a.p()) + " and " + std::to_string(b.p()));
  }
}

// Result length for a binary operation. Polynomials count as untruncated.
int combined_cutoff(const PowerSeries& a, const PowerSeries& b, int poly_len) {
  if (a.is_polynomial() && b.is_polynomial()) return poly_len;
  int d = INT_MAX;
  if (!a.is_polynomial()) d = std::min(d, a.cutoff());
  if (!b.is_polynomial()) d = std::min(d, b.cutoff());
  return d;
}

}  // namespace

PowerSeries::PowerSeries(std::int64_t p, int prec, std::vector<PadicInt> coeffs, bool polynomial)
    : p_(p), prec_(prec), coeffs_(std::move(coeffs)), polynomial_(polynomial) {
  if (!is_prime(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (prec < 1) throw Error(ErrorCode::InvalidArgument, "precision must be at least 1");
  if (coeffs_.empty()) {
    if (!polynomial) throw Error(ErrorCode::InvalidArgument, "truncated series needs a positive cutoff");
    coeffs_.push_back(PadicInt::exact_zero(p, prec));
  }
  for (auto& c : coeffs_) {
    if (c.p() != p) throw Error(ErrorCode::InvalidArgument, "coefficient over the wrong prime");
    if (c.prec() < prec) throw Error(ErrorCode::InvalidArgument, "coefficient below the series precision");
    c = c.with_prec_at_most(prec);
  }
}

PowerSeries PowerSeries::from_integers(std::int64_t p, int prec, const std::vector<std::int64_t>& coeffs,
                                       int cutoff) {
  std::vector<PadicInt> c;
  const std::size_t n = std::max(coeffs.size(), static_cast<std::size_t>(std::max(cutoff, 0)));
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.push_back(PadicInt::exact(p, prec, i < coeffs.size() ? coeffs[i] : 0));
  return PowerSeries(p, prec, std::move(c), true);
}

PowerSeries PowerSeries::truncated(std::int64_t p, int prec, const std::vector<std::int64_t>& coeffs,
                                   int cutoff) {
  std::vector<PadicInt> c;
  for (int i = 0; i < cutoff; ++i) {
    c.push_back(PadicInt::exact(p, prec, static_cast<std::size_t>(i) < coeffs.size() ? coeffs[i] : 0));
  }
  return PowerSeries(p, prec, std::move(c), false);
}

PowerSeries PowerSeries::constant(const PadicInt& c) { return PowerSeries(c.p(), c.prec(), {c}, true); }

PadicInt PowerSeries::coeff(int i) const {
  if (i < 0) throw Error(ErrorCode::InvalidArgument, "negative coefficient index");
  if (i < cutoff()) return coeffs_[static_cast<std::size_t>(i)];
  if (polynomial_) return PadicInt::exact_zero(p_, prec_);
  throw Error(ErrorCode::InvalidArgument,
              "coefficient " + std::to_string(i) + " lies past the cutoff " + std::to_string(cutoff()));
}

int PowerSeries::degree() const {
  if (!polynomial_) throw Error(ErrorCode::InvalidArgument, "degree of a truncated series");
  for (int i = cutoff() - 1; i >= 0; --i)
    if (!coeffs_[static_cast<std::size_t>(i)].is_exact_zero()) return i;
  return -1;
}

PowerSeries PowerSeries::truncate(int d) const {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  if (!polynomial_ && d > cutoff()) throw Error(ErrorCode::InvalidArgument, "cannot extend a truncated series");
  std::vector<PadicInt> c;
  for (int i = 0; i < d; ++i) c.push_back(coeff(i));
  const bool still_poly = polynomial_ && degree() < d;
  return PowerSeries(p_, prec_, std::move(c), still_poly);
}

PowerSeries PowerSeries::with_prec(int prec) const {
  std::vector<PadicInt> c;
  for (const auto& x : coeffs_) c.push_back(x.reduce(prec));
  return PowerSeries(p_, prec, std::move(c), polynomial_);
}

PowerSeries PowerSeries::compact() const {
  if (!polynomial_) return *this;
  const int n = std::max(degree() + 1, 1);
  return PowerSeries(p_, prec_, std::vector<PadicInt>(coeffs_.begin(), coeffs_.begin() + n), true);
}

PowerSeries PowerSeries::shifted_down(int a) const {
  if (a < 0) throw Error(ErrorCode::InvalidArgument, "negative shift");
  if (a == 0) return *this;
  if (!polynomial_ && a >= cutoff()) throw Error(ErrorCode::InvalidArgument, "shift consumes the whole cutoff");
  std::vector<PadicInt> c;
  for (int i = a; i < cutoff(); ++i) c.push_back(coeffs_[static_cast<std::size_t>(i)]);
  return PowerSeries(p_, prec_, std::move(c), polynomial_);
}

PowerSeries PowerSeries::shifted_up(int a) const {
  if (a < 0) throw Error(ErrorCode::InvalidArgument, "negative shift");
  std::vector<PadicInt> c(static_cast<std::size_t>(a), PadicInt::exact_zero(p_, prec_));
  c.insert(c.end(), coeffs_.begin(), coeffs_.end());
  return PowerSeries(p_, prec_, std::move(c), polynomial_);
}

PowerSeries PowerSeries::derivative() const {
  std::vector<PadicInt> c;
  for (int i = 1; i < cutoff(); ++i) {
    c.push_back(PadicInt::exact(p_, prec_, i) * coeffs_[static_cast<std::size_t>(i)]);
  }
  if (c.empty()) {
    if (!polynomial_) throw Error(ErrorCode::InvalidArgument, "derivative of a series known only mod X");
    c.push_back(PadicInt::exact_zero(p_, prec_));
  }
  return PowerSeries(p_, prec_, std::move(c), polynomial_);
}

PowerSeries PowerSeries::pow(std::uint64_t e) const {
  PowerSeries result = one(p_, prec_);
  PowerSeries base = compact();
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

PowerSeries PowerSeries::operator-() const {
  std::vector<PadicInt> c;
  for (const auto& x : coeffs_) c.push_back(-x);
  return PowerSeries(p_, prec_, std::move(c), polynomial_);
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  require_same_ring(a, b);
  const int prec = std::min(a.prec_, b.prec_);
  const int d = combined_cutoff(a, b, std::max(a.cutoff(), b.cutoff()));
  std::vector<PadicInt> c;
  c.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) c.push_back((a.coeff(i) + b.coeff(i)).with_prec_at_most(prec));
  return PowerSeries(a.p_, prec, std::move(c), a.polynomial_ && b.polynomial_).compact();
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return a + (-b); }

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  require_same_ring(a, b);
  const PowerSeries x = a.compact();
  const PowerSeries y = b.compact();
  const int prec = std::min(x.prec_, y.prec_);
  const int d = combined_cutoff(x, y, x.cutoff() + y.cutoff() - 1);
  const std::int64_t m = checked_pow(x.p_, prec);
  std::vector<PadicInt> c;
  c.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    std::int64_t acc = 0;
    bool exact_zero = true;
    const int lo = std::max(0, k - y.cutoff() + 1);
    const int hi = std::min(k, x.cutoff() - 1);
    for (int i = lo; i <= hi; ++i) {
      const auto& u = x.coeffs_[static_cast<std::size_t>(i)];
      const auto& v = y.coeffs_[static_cast<std::size_t>(k - i)];
      if (u.is_exact_zero() || v.is_exact_zero()) continue;
      exact_zero = false;
      acc = (acc + detail::mulmod(u.residue() % m, v.residue() % m, m)) % m;
    }
    c.push_back(exact_zero ? PadicInt::exact_zero(x.p_, prec) : PadicInt(x.p_, prec, acc));
  }
  return PowerSeries(x.p_, prec, std::move(c), x.polynomial_ && y.polynomial_).compact();
}

PowerSeries operator*(const PadicInt& s, const PowerSeries& a) {
  if (s.p() != a.p_) throw Error(ErrorCode::InvalidArgument, "scalar over the wrong prime");
  const int prec = std::min(s.prec(), a.prec_);
  std::vector<PadicInt> c;
  for (const auto& x : a.coeffs_) c.push_back((s * x).with_prec_at_most(prec));
  return PowerSeries(a.p_, prec, std::move(c), a.polynomial_).compact();
}

std::string PowerSeries::str(const std::string& var, bool with_modulus) const {
  std::ostringstream os;
  bool first = true;
  for (int i = cutoff() - 1; i >= 0; --i) {
    const std::int64_t r = coeffs_[static_cast<std::size_t>(i)].residue();
    if (r == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << r;
    } else {
      if (r != 1) os << r << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  if (first) os << "0";
  if (!polynomial_) os << " + O(" << var << "^" << cutoff() << ")";
  if (with_modulus) os << " (mod " << p_ << "^" << prec_ << ")";
  return os.str();
}

bool congruent(const PowerSeries& a, const PowerSeries& b, int prec, int cutoff) {
  if (a.p() != b.p()) return false;
  const std::int64_t m = checked_pow(a.p(), prec);
  for (int i = 0; i < cutoff; ++i) {
    if (a.coeff(i).prec() < prec || b.coeff(i).prec() < prec) {
      throw Error(ErrorCode::InvalidArgument, "comparison above the available precision");
    }
    if (a.coeff(i).residue() % m != b.coeff(i).residue() % m) return false;
  }
  return true;
}

PowerSeries series_inverse(const PowerSeries& v) {
  const PadicInt c0 = v.coeff(0);
  if (!c0.is_unit()) throw Error(ErrorCode::NotInvertible, "constant term " + c0.str() + " is not a unit");
  const int d = v.cutoff();
  const PadicInt inv0 = inverse(c0);
  std::vector<PadicInt> w{inv0};
  for (int k = 1; k < d; ++k) {
    PadicInt acc = PadicInt::exact_zero(v.p(), v.prec());
    for (int i = 1; i <= k; ++i) acc += v.coeff(i) * w[static_cast<std::size_t>(k - i)];
    w.push_back(-(inv0 * acc));
  }
  return PowerSeries(v.p(), v.prec(), std::move(w), false);
}

Valuation mu_invariant(const PowerSeries& v) {
  std::optional<int> best;
  bool all_exact = true;
  for (const auto& c : v.coeffs()) {
    if (!c.is_exact_zero()) all_exact = false;
    const Valuation cv = c.valuation();
    if (cv.is_known()) best = std::min(best.value_or(INT_MAX), cv.value());
  }
  if (best) return Valuation::known(*best);
  if (all_exact && v.is_polynomial()) return Valuation::infinite();
  return Valuation::at_least(v.prec());
}

LambdaInvariant lambda_invariant(const PowerSeries& v) {
  for (int i = 0; i < v.cutoff(); ++i) {
    if (v.coeffs()[static_cast<std::size_t>(i)].is_unit()) return {i, v.cutoff()};
  }
  return {std::nullopt, v.cutoff()};
}

PowerSeries nu_polynomial(int m, std::int64_t p, int prec, int cutoff) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "layer index must be non-negative");
  if (cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  const std::int64_t q = checked_pow(p, m);
  if (q > 1'000'000) throw Error(ErrorCode::InvalidArgument, "p^m too large for a dense polynomial");
  const std::int64_t mod = checked_pow(p, prec);
  // Pascal row of (1+X)^q, built only up to the indices we keep.
  const std::int64_t keep = std::min<std::int64_t>(q, cutoff);
  std::vector<std::int64_t> row(static_cast<std::size_t>(keep + 1), 0);
  row[0] = 1 % mod;
  for (std::int64_t n = 1; n <= q; ++n) {
    for (std::int64_t k = std::min(n, keep); k >= 1; --k) {
      row[static_cast<std::size_t>(k)] = (row[static_cast<std::size_t>(k)] + row[static_cast<std::size_t>(k - 1)]) % mod;
    }
  }
  std::vector<PadicInt> c;
  for (std::int64_t i = 0; i < keep; ++i) c.emplace_back(p, prec, row[static_cast<std::size_t>(i + 1)]);
  const bool poly = q <= cutoff;
  while (poly && static_cast<int>(c.size()) < cutoff) c.push_back(PadicInt::exact_zero(p, prec));
  return PowerSeries(p, prec, std::move(c), poly);
}

PowerSeries binom_series(const PadicInt& u, int stride, int cutoff) {
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
  if (cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  const std::int64_t p = u.p();
  const int terms = (cutoff - 1) / stride;  // highest j with j*stride < cutoff
  int loss = 0;
  for (std::int64_t q = p; q <= terms; q *= p) ++loss;
  if (loss >= u.prec()) {
    throw Error(ErrorCode::PrecisionUnderflow, "exponent known mod " + std::to_string(p) + "^" +
                                                   std::to_string(u.prec()) + " leaves no digits for " +
                                                   std::to_string(terms) + " terms");
  }
  const int out_prec = u.prec() - loss;
  const std::int64_t mod = u.modulus();
  // (1+Y)^r for the representative r, truncated at Y^{terms+1}.
  const std::size_t len = static_cast<std::size_t>(terms) + 1;
  auto mul = [&](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::vector<std::int64_t> r(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; i + j < len; ++j) r[i + j] = (r[i + j] + detail::mulmod(a[i], b[j], mod)) % mod;
    }
    return r;
  };
  std::vector<std::int64_t> result(len, 0), base(len, 0);
  result[0] = 1 % mod;
  base[0] = 1 % mod;
  if (len > 1) base[1] = 1 % mod;
  for (std::int64_t e = u.residue(); e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    if (e > 1) base = mul(base, base);
  }
  std::vector<PadicInt> c;
  for (int i = 0; i < cutoff; ++i) {
    if (i % stride == 0) {
      c.emplace_back(p, out_prec, result[static_cast<std::size_t>(i / stride)]);
    } else {
      c.push_back(PadicInt::exact_zero(p, out_prec));
    }
  }
  return PowerSeries(p, out_prec, std::move(c), false);
}

DistinguishedPoly::DistinguishedPoly(PowerSeries poly) : poly_(poly.compact()), lambda_(0) {
  if (!poly_.is_polynomial()) throw Error(ErrorCode::InvalidArgument, "distinguished polynomial must be a polynomial");
  lambda_ = poly_.degree();
  if (lambda_ < 0) throw Error(ErrorCode::InvalidArgument, "zero is not distinguished");
  if (poly_.coeff(lambda_).residue() != 1) {
    throw Error(ErrorCode::InvalidArgument, "leading coefficient " + poly_.coeff(lambda_).str() + " is not 1");
  }
  for (int i = 0; i < lambda_; ++i) {
    if (poly_.coeff(i).is_unit()) {
      throw Error(ErrorCode::InvalidArgument, "coefficient of X^" + std::to_string(i) + " is a unit");
    }
  }
}

Preparation weierstrass_prepare(const PowerSeries& v) {
  const std::int64_t p = v.p();
  const Valuation mu_v = mu_invariant(v);
  if (mu_v.is_infinite()) throw Error(ErrorCode::InvalidArgument, "cannot prepare the zero series");
  if (!mu_v.is_known()) {
    // Every stored coefficient vanishes mod p^N: neither mu nor lambda is visible.
    throw Error(ErrorCode::CannotPrepare, "all coefficients vanish at precision " + std::to_string(v.prec()));
  }
  const int mu = mu_v.value();
  const int M = v.prec() - mu;
  const std::int64_t pmu = checked_pow(p, mu);
  const std::int64_t mod = checked_pow(p, M);

  // F = V / p^mu, treated as the polynomial of its stored coefficients.
  const int D = v.cutoff();
  std::vector<std::int64_t> F(static_cast<std::size_t>(D));
  for (int i = 0; i < D; ++i) F[static_cast<std::size_t>(i)] = (v.coeffs()[static_cast<std::size_t>(i)].residue() / pmu) % mod;

  int lambda = -1;
  for (int i = 0; i < D; ++i) {
    if (F[static_cast<std::size_t>(i)] % p != 0) {
      lambda = i;
      break;
    }
  }
  if (lambda < 0) {
    throw Error(ErrorCode::CannotPrepare,
                "no unit coefficient below the cutoff " + std::to_string(D) + " after removing p^" + std::to_string(mu));
  }

  // Linear Hensel lifting of F = P * Q, one p-adic digit per step.
  const std::size_t lam = static_cast<std::size_t>(lambda);
  const std::size_t qlen = static_cast<std::size_t>(D - lambda);
  std::vector<std::int64_t> P(lam + 1, 0), Q(F.begin() + lambda, F.end());
  P[lam] = 1 % mod;

  auto residual = [&]() {
    std::vector<std::int64_t> E(F);
    for (std::size_t i = 0; i <= lam; ++i) {
      if (P[i] == 0) continue;
      for (std::size_t j = 0; j < qlen; ++j) {
        E[i + j] = detail::mod(E[i + j] - detail::mulmod(P[i], Q[j], mod), mod);
      }
    }
    return E;
  };

  std::vector<std::int64_t> qbar(qlen);
  for (std::size_t j = 0; j < qlen; ++j) qbar[j] = Q[j] % p;
  // qbar^{-1} mod (p, X^lambda)
  std::vector<std::int64_t> qinv(lam, 0);
  if (lam > 0) {
    const std::int64_t inv0 = detail::invmod(qbar[0], p);
    qinv[0] = inv0;
    for (std::size_t k = 1; k < lam; ++k) {
      std::int64_t acc = 0;
      for (std::size_t i = 1; i <= k && i < qlen; ++i) acc = (acc + qbar[i] * qinv[k - i]) % p;
      qinv[k] = detail::mod(-acc * inv0, p);
    }
  }

  std::int64_t pk = 1;
  for (int k = 1; k < M; ++k) {
    pk *= p;
    std::vector<std::int64_t> E = residual();
    std::vector<std::int64_t> e(static_cast<std::size_t>(D));
    for (int i = 0; i < D; ++i) {
      if (E[static_cast<std::size_t>(i)] % pk != 0) throw std::logic_error("Hensel residual lost divisibility");
      e[static_cast<std::size_t>(i)] = (E[static_cast<std::size_t>(i)] / pk) % p;
    }
    std::vector<std::int64_t> dP(lam, 0);
    for (std::size_t k2 = 0; k2 < lam; ++k2) {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i <= k2; ++i) acc = (acc + e[i] * qinv[k2 - i]) % p;
      dP[k2] = acc;
    }
    std::vector<std::int64_t> rest(e);
    for (std::size_t i = 0; i < lam; ++i) {
      if (dP[i] == 0) continue;
      for (std::size_t j = 0; j < qlen && i + j < rest.size(); ++j) rest[i + j] = detail::mod(rest[i + j] - dP[i] * qbar[j], p);
    }
    for (std::size_t i = 0; i < lam; ++i) {
      if (rest[i] != 0) throw std::logic_error("Hensel correction failed to cancel low terms");
    }
    for (std::size_t i = 0; i < lam; ++i) P[i] = (P[i] + detail::mulmod(pk, dP[i], mod)) % mod;
    for (std::size_t j = 0; j < qlen; ++j) Q[j] = (Q[j] + detail::mulmod(pk, rest[lam + j], mod)) % mod;
  }
  for (std::int64_t r : residual()) {
    if (r != 0) throw std::logic_error("Weierstrass factorisation did not close");
  }

  std::vector<PadicInt> pc, uc;
  for (std::size_t i = 0; i < lam; ++i) pc.emplace_back(p, M, P[i]);
  pc.push_back(PadicInt::exact(p, M, 1));
  for (std::size_t j = 0; j < qlen; ++j) uc.emplace_back(p, M, Q[j]);
  if (!v.is_polynomial()) {
    // U is only known modulo the original cutoff.
    while (static_cast<int>(uc.size()) < D) uc.emplace_back(p, M, 0);
  }
  PowerSeries unit(p, M, std::move(uc), v.is_polynomial());
  return Preparation{mu, DistinguishedPoly(PowerSeries(p, M, std::move(pc), true)), std::move(unit), mu};
}

PowerSeries recombine(const Preparation& prep) {
  const PowerSeries& P = prep.distinguished.poly();
  const std::int64_t p = P.p();
  const int M = P.prec();
  const int N = M + prep.mu;
  // Lift both factors to precision N before multiplying by p^mu: the product
  // is then well defined mod p^N.
  auto lift = [&](const PowerSeries& s) {
    std::vector<PadicInt> c;
    for (const auto& x : s.coeffs()) c.push_back(x.is_exact_zero() ? PadicInt::exact_zero(p, N) : PadicInt(p, N, x.residue()));
    return PowerSeries(p, N, std::move(c), s.is_polynomial());
  };
  return PadicInt(p, N, checked_pow(p, prep.mu)) * (lift(P) * lift(prep.unit));
}

std::string Slope::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

NewtonPolygon newton_polygon(const PowerSeries& h) {
  if (!h.is_polynomial()) throw Error(ErrorCode::InvalidArgument, "Newton polygon needs a polynomial");
  const int n = h.degree();
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Newton polygon of the zero polynomial");
  const Valuation lead = h.coeff(n).valuation();
  if (!lead.is_known()) {
    throw Error(ErrorCode::Ambiguous, "leading coefficient vanishes at precision " + std::to_string(h.prec()));
  }
  if (lead.value() != 0) {
    throw Error(ErrorCode::InvalidArgument, "leading coefficient " + h.coeff(n).str() + " is not a unit");
  }

  std::vector<std::pair<int, int>> pts;
  std::vector<std::pair<int, int>> bounds;
  for (int i = 0; i <= n; ++i) {
    const Valuation v = h.coeff(i).valuation();
    if (v.is_known()) {
      pts.emplace_back(i, v.value());
    } else if (!v.is_infinite()) {
      bounds.emplace_back(i, v.value());
    }
  }

  // Andrew's monotone chain, lower half, dropping collinear points.
  std::vector<std::pair<int, int>> hull;
  for (const auto& q : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const std::int64_t cross = static_cast<std::int64_t>(b.first - a.first) * (q.second - a.second) -
                                 static_cast<std::int64_t>(b.second - a.second) * (q.first - a.first);
      if (cross <= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(q);
  }

  for (const auto& [i, bound] : bounds) {
    // A coefficient known only to be divisible by p^bound: the hull is
    // determined only if such a point cannot fall below it.
    if (i < hull.front().first) {
      throw Error(ErrorCode::Ambiguous, "coefficient of X^" + std::to_string(i) + " has valuation >=" +
                                            std::to_string(bound) + " left of every determined point");
    }
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
      const auto& a = hull[s];
      const auto& b = hull[s + 1];
      if (i < a.first || i > b.first) continue;
      // bound >= line value at i  <=>  (bound - a.y)*(b.x - a.x) >= (b.y - a.y)*(i - a.x)
      const std::int64_t lhs = static_cast<std::int64_t>(bound - a.second) * (b.first - a.first);
      const std::int64_t rhs = static_cast<std::int64_t>(b.second - a.second) * (i - a.first);
      if (lhs < rhs) {
        throw Error(ErrorCode::Ambiguous, "coefficient of X^" + std::to_string(i) + " has valuation >=" +
                                              std::to_string(bound) + ", which may lie below the polygon");
      }
    }
  }

  NewtonPolygon poly;
  poly.vertices = hull;
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const std::int64_t dx = hull[s + 1].first - hull[s].first;
    const std::int64_t dy = hull[s + 1].second - hull[s].second;
    const std::int64_t g = std::gcd(dy < 0 ? -dy : dy, dx);
    poly.segments.push_back({Slope{dy / g, dx / g}, static_cast<int>(dx)});
  }
  return poly;
}

const char* to_string(Irreducibility d) {
  return d == Irreducibility::Irreducible ? "irreducible" : "inconclusive";
}

Irreducibility irreducible_by_newton(const PowerSeries& h) {
  const NewtonPolygon poly = newton_polygon(h);
  const int n = h.degree();
  if (n == 1) return Irreducibility::Irreducible;
  if (n < 1 || poly.segments.size() != 1 || poly.vertices.front().first != 0) return Irreducibility::Inconclusive;
  return poly.segments.front().slope.den == n ? Irreducibility::Irreducible : Irreducibility::Inconclusive;
}

const char* to_string(SquareFreeness d) {
  switch (d) {
    case SquareFreeness::SquareFree: return "square-free";
    case SquareFreeness::NotSquareFree: return "not-square-free";
    case SquareFreeness::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Fraction-free Gaussian elimination; exact over Z.
cpp_int bareiss_det(std::vector<std::vector<cpp_int>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  cpp_int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

}  // namespace

PadicInt discriminant(const PowerSeries& h) {
  if (!h.is_polynomial()) throw Error(ErrorCode::InvalidArgument, "discriminant needs a polynomial");
  const int n = h.degree();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "discriminant of a constant");
  const PadicInt lc = h.coeff(n);
  if (!lc.is_unit()) throw Error(ErrorCode::InvalidArgument, "leading coefficient " + lc.str() + " is not a unit");
  if (n == 1) return PadicInt(h.p(), h.prec(), 1);

  std::vector<cpp_int> f(static_cast<std::size_t>(n) + 1), g(static_cast<std::size_t>(n));
  for (int i = 0; i <= n; ++i) f[static_cast<std::size_t>(i)] = h.coeff(i).signed_residue();
  for (int i = 1; i <= n; ++i) g[static_cast<std::size_t>(i - 1)] = f[static_cast<std::size_t>(i)] * i;

  // Sylvester matrix of f (degree n) and f' (formal degree n-1), coefficients
  // written from the top degree down.
  const std::size_t size = 2 * static_cast<std::size_t>(n) - 1;
  std::vector<std::vector<cpp_int>> syl(size, std::vector<cpp_int>(size, 0));
  for (std::size_t r = 0; r + 1 < static_cast<std::size_t>(n); ++r) {
    for (int i = 0; i <= n; ++i) syl[r][r + static_cast<std::size_t>(n - i)] = f[static_cast<std::size_t>(i)];
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
    for (int i = 0; i < n; ++i) {
      syl[static_cast<std::size_t>(n) - 1 + r][r + static_cast<std::size_t>(n - 1 - i)] = g[static_cast<std::size_t>(i)];
    }
  }
  cpp_int res = bareiss_det(std::move(syl));
  const cpp_int lc_int = f[static_cast<std::size_t>(n)];
  if (res % lc_int != 0) throw std::logic_error("resultant not divisible by the leading coefficient");
  cpp_int disc = res / lc_int;
  if ((static_cast<long long>(n) * (n - 1) / 2) % 2 == 1) disc = -disc;
  const cpp_int m = checked_pow(h.p(), h.prec());
  cpp_int r = disc % m;
  if (r < 0) r += m;
  return PadicInt(h.p(), h.prec(), static_cast<std::int64_t>(r));
}

SquareFreeReport squarefree_check(const PowerSeries& h) {
  if (!h.is_polynomial()) throw Error(ErrorCode::InvalidArgument, "square-free check needs a polynomial");
  const int n = h.degree();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "square-free check of a constant");
  if (n >= 2 && h.coeff(0).is_exact_zero() && h.coeff(1).is_exact_zero()) {
    return {SquareFreeness::NotSquareFree, Valuation::infinite(), h.prec()};
  }
  const Valuation v = discriminant(h).valuation();
  if (v.is_known()) return {SquareFreeness::SquareFree, v, h.prec()};
  return {SquareFreeness::Inconclusive, v, h.prec()};
}

HenselRoot hensel_lift_root(const PowerSeries& h, const PadicInt& r0) {
  if (!h.is_polynomial()) throw Error(ErrorCode::InvalidArgument, "Hensel lifting needs a polynomial");
  if (r0.p() != h.p()) throw Error(ErrorCode::InvalidArgument, "root over the wrong prime");
  const std::int64_t p = h.p();
  const int N = std::min(h.prec(), r0.prec());
  const PowerSeries hn = h.with_prec(N);
  const PadicInt x0 = r0.with_prec_at_most(N);
  const Valuation v_val = eval_series(hn, x0).valuation();
  const Valuation v_der = eval_series(hn.derivative(), x0).valuation();
  if (!v_der.is_known()) {
    throw Error(ErrorCode::HenselCondition, "v(h'(r0)) = " + v_der.str() + " is not determined");
  }
  const int e = v_der.value();
  if (v_val.lower_bound() <= 2 * e) {
    throw Error(ErrorCode::HenselCondition,
                "v(h(r0)) = " + v_val.str() + " does not exceed 2*v(h'(r0)) = " + std::to_string(2 * e));
  }

  // Newton iteration with e guard digits: h(r) and h'(r) are computed mod
  // p^{N+e}, so h(r)/h'(r) is known mod p^N.
  const std::int64_t big = checked_pow(p, N + e);
  const std::int64_t pe = checked_pow(p, e);
  const std::int64_t modN = checked_pow(p, N);
  const int n = hn.degree();
  std::vector<std::int64_t> c(static_cast<std::size_t>(n) + 1), dc(static_cast<std::size_t>(n));
  for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = detail::mod(hn.coeff(i).signed_residue(), big);
  for (int i = 1; i <= n; ++i) dc[static_cast<std::size_t>(i - 1)] = detail::mulmod(c[static_cast<std::size_t>(i)], i, big);
  auto horner = [&](const std::vector<std::int64_t>& a, std::int64_t x) {
    std::int64_t acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = (detail::mulmod(acc, x, big) + a[i]) % big;
    return acc;
  };

  std::int64_t r = x0.residue();
  for (int iter = 0; iter < 128; ++iter) {
    const std::int64_t hv = horner(c, r);
    if (hv % modN == 0) break;
    const std::int64_t dv = horner(dc, r);
    if (hv % pe != 0 || dv % pe != 0 || (dv / pe) % p == 0) throw std::logic_error("Hensel invariant broken");
    const std::int64_t step = detail::mulmod((hv / pe) % modN, detail::invmod((dv / pe) % modN, modN), modN);
    r = detail::mod(r - step, modN);
  }
  const PadicInt root(p, N, r);
  if (!eval_series(hn, root).is_zero()) throw std::logic_error("Hensel iteration did not converge");
  return {root, N - e};
}

TFactor extract_T_factor(const PowerSeries& h) {
  int a = 0;
  while (a < h.cutoff() && h.coeffs()[static_cast<std::size_t>(a)].is_exact_zero()) ++a;
  if (a == h.cutoff()) {
    throw Error(ErrorCode::AmbiguousMultiplicity, "every stored coefficient is zero");
  }
  const PadicInt g0 = h.coeffs()[static_cast<std::size_t>(a)];
  if (g0.is_zero()) {
    throw Error(ErrorCode::AmbiguousMultiplicity, "coefficient of X^" + std::to_string(a) + " is " + g0.str() +
                                                      ": zero at precision but not exactly zero");
  }
  return {a, h.shifted_down(a)};
}

PadicInt eval_series(const PowerSeries& v, const PadicInt& x) {
  if (x.p() != v.p()) throw Error(ErrorCode::InvalidArgument, "argument over the wrong prime");
  int prec = std::min(v.prec(), x.prec());
  if (!v.is_polynomial()) {
    const int vx = x.valuation().lower_bound();
    if (vx < 1) throw Error(ErrorCode::UnboundedTail, "argument " + x.str() + " is a unit; the tail is unbounded");
    const long long tail = static_cast<long long>(vx) * v.cutoff();
    if (tail < prec) prec = static_cast<int>(tail);
  }
  if (x.is_exact_zero()) return v.coeff(0).with_prec_at_most(prec);
  const PadicInt xs = x.with_prec_at_most(prec);
  PadicInt acc = PadicInt::exact_zero(v.p(), prec);
  for (int i = v.cutoff() - 1; i >= 0; --i) acc = acc * xs + v.coeffs()[static_cast<std::size_t>(i)].with_prec_at_most(prec);
  return acc;
}

}  // namespace ggc
