#include "ggc/bivar.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <sstream>

namespace ggc {

namespace {

int meet_cutoff(bool poly_a, int da, bool poly_b, int db, int poly_len) {
  if (poly_a && poly_b) return poly_len;
  int d = INT_MAX;
  if (!poly_a) d = std::min(d, da);
  if (!poly_b) d = std::min(d, db);
  return d;
}

void require_same_prime(std::int64_t a, std::int64_t b) {
  if (a != b) throw Error(ErrorCode::InvalidArgument, "mismatched primes " + std::to_string(a) + " and " + std::to_string(b));
}

// Common (prec, cutoff, polynomial) of a family of univariate series.
struct Frame {
  std::int64_t p;
  int prec;
  int cutoff;
  bool polynomial;
};

Frame frame_of(const std::vector<PowerSeries>& xs) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  Frame f{xs[0].p(), INT_MAX, 0, true};
  int poly_len = 1, trunc = INT_MAX;
  for (const auto& x : xs) {
    require_same_prime(f.p, x.p());
    f.prec = std::min(f.prec, x.prec());
    if (x.is_polynomial()) {
      poly_len = std::max(poly_len, x.compact().cutoff());
    } else {
      f.polynomial = false;
      trunc = std::min(trunc, x.cutoff());
    }
  }
  f.cutoff = f.polynomial ? poly_len : trunc;
  return f;
}

}  // namespace

BivarSeries::BivarSeries(std::int64_t p, int prec, int ds, int dt, std::vector<PadicInt> grid, bool s_polynomial,
                         bool t_polynomial)
    : p_(p), prec_(prec), ds_(ds), dt_(dt), grid_(std::move(grid)), s_poly_(s_polynomial), t_poly_(t_polynomial) {
  if (!is_prime(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (prec < 1) throw Error(ErrorCode::InvalidArgument, "precision must be at least 1");
  if (ds < 1 || dt < 1) throw Error(ErrorCode::InvalidArgument, "cutoffs must be positive");
  if (grid_.size() != static_cast<std::size_t>(ds) * static_cast<std::size_t>(dt)) {
    throw Error(ErrorCode::InvalidArgument, "grid size does not match the cutoffs");
  }
  for (auto& c : grid_) {
    require_same_prime(p, c.p());
    if (c.prec() < prec) throw Error(ErrorCode::InvalidArgument, "coefficient below the series precision");
    c = c.with_prec_at_most(prec);
  }
}

BivarSeries BivarSeries::zero(std::int64_t p, int prec) {
  return BivarSeries(p, prec, 1, 1, {PadicInt::exact_zero(p, prec)}, true, true);
}

BivarSeries BivarSeries::from_integers(std::int64_t p, int prec, const std::vector<std::vector<std::int64_t>>& rows) {
  const int ds = std::max<int>(1, static_cast<int>(rows.size()));
  int dt = 1;
  for (const auto& r : rows) dt = std::max<int>(dt, static_cast<int>(r.size()));
  std::vector<PadicInt> g;
  for (int i = 0; i < ds; ++i) {
    for (int j = 0; j < dt; ++j) {
      const std::int64_t v = (static_cast<std::size_t>(i) < rows.size() && static_cast<std::size_t>(j) < rows[i].size())
                                 ? rows[i][j]
                                 : 0;
      g.push_back(PadicInt::exact(p, prec, v));
    }
  }
  return BivarSeries(p, prec, ds, dt, std::move(g), true, true).compact();
}

BivarSeries BivarSeries::from_T_coefficients(const std::vector<PowerSeries>& g) {
  const Frame f = frame_of(g);
  const int dt = static_cast<int>(g.size());
  std::vector<PadicInt> grid;
  grid.reserve(static_cast<std::size_t>(f.cutoff) * g.size());
  for (int i = 0; i < f.cutoff; ++i) {
    for (int j = 0; j < dt; ++j) grid.push_back(g[static_cast<std::size_t>(j)].coeff(i).with_prec_at_most(f.prec));
  }
  return BivarSeries(f.p, f.prec, f.cutoff, dt, std::move(grid), f.polynomial, true);
}

BivarSeries BivarSeries::from_S_coefficients(const std::vector<PowerSeries>& r) {
  const Frame f = frame_of(r);
  const int ds = static_cast<int>(r.size());
  std::vector<PadicInt> grid;
  grid.reserve(static_cast<std::size_t>(f.cutoff) * r.size());
  for (int i = 0; i < ds; ++i) {
    for (int j = 0; j < f.cutoff; ++j) grid.push_back(r[static_cast<std::size_t>(i)].coeff(j).with_prec_at_most(f.prec));
  }
  return BivarSeries(f.p, f.prec, ds, f.cutoff, std::move(grid), true, f.polynomial);
}

PadicInt BivarSeries::coeff(int i, int j) const {
  if (i < 0 || j < 0) throw Error(ErrorCode::InvalidArgument, "negative coefficient index");
  if (i < ds_ && j < dt_) return grid_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dt_) + static_cast<std::size_t>(j)];
  if ((i >= ds_ && !s_poly_) || (j >= dt_ && !t_poly_)) {
    throw Error(ErrorCode::InvalidArgument,
                "coefficient (" + std::to_string(i) + ", " + std::to_string(j) + ") lies past the truncation");
  }
  return PadicInt::exact_zero(p_, prec_);
}

PowerSeries BivarSeries::t_coefficient(int j) const {
  std::vector<PadicInt> c;
  for (int i = 0; i < ds_; ++i) c.push_back(coeff(i, j));
  return PowerSeries(p_, prec_, std::move(c), s_poly_);
}

PowerSeries BivarSeries::s_coefficient(int i) const {
  std::vector<PadicInt> c;
  for (int j = 0; j < dt_; ++j) c.push_back(coeff(i, j));
  return PowerSeries(p_, prec_, std::move(c), t_poly_);
}

int BivarSeries::t_degree() const {
  if (!t_poly_) throw Error(ErrorCode::InvalidArgument, "T-degree of a series truncated in T");
  for (int j = dt_ - 1; j >= 0; --j)
    for (int i = 0; i < ds_; ++i)
      if (!coeff(i, j).is_exact_zero()) return j;
  return -1;
}

BivarSeries BivarSeries::compact() const {
  int ds = ds_, dt = dt_;
  auto live = [&](int i, int j) { return !coeff(i, j).is_exact_zero(); };
  if (s_poly_) {
    ds = 1;
    for (int i = 0; i < ds_; ++i)
      for (int j = 0; j < dt_; ++j)
        if (live(i, j)) ds = std::max(ds, i + 1);
  }
  if (t_poly_) {
    dt = 1;
    for (int i = 0; i < ds_; ++i)
      for (int j = 0; j < dt_; ++j)
        if (live(i, j)) dt = std::max(dt, j + 1);
  }
  if (ds == ds_ && dt == dt_) return *this;
  std::vector<PadicInt> g;
  for (int i = 0; i < ds; ++i)
    for (int j = 0; j < dt; ++j) g.push_back(coeff(i, j));
  return BivarSeries(p_, prec_, ds, dt, std::move(g), s_poly_, t_poly_);
}

BivarSeries BivarSeries::operator-() const {
  std::vector<PadicInt> g;
  for (const auto& c : grid_) g.push_back(-c);
  return BivarSeries(p_, prec_, ds_, dt_, std::move(g), s_poly_, t_poly_);
}

BivarSeries operator+(const BivarSeries& a, const BivarSeries& b) {
  require_same_prime(a.p_, b.p_);
  const int prec = std::min(a.prec_, b.prec_);
  const int ds = meet_cutoff(a.s_poly_, a.ds_, b.s_poly_, b.ds_, std::max(a.ds_, b.ds_));
  const int dt = meet_cutoff(a.t_poly_, a.dt_, b.t_poly_, b.dt_, std::max(a.dt_, b.dt_));
  std::vector<PadicInt> g;
  g.reserve(static_cast<std::size_t>(ds) * static_cast<std::size_t>(dt));
  for (int i = 0; i < ds; ++i)
    for (int j = 0; j < dt; ++j) g.push_back((a.coeff(i, j) + b.coeff(i, j)).with_prec_at_most(prec));
  return BivarSeries(a.p_, prec, ds, dt, std::move(g), a.s_poly_ && b.s_poly_, a.t_poly_ && b.t_poly_).compact();
}

BivarSeries operator-(const BivarSeries& a, const BivarSeries& b) { return a + (-b); }

BivarSeries operator*(const BivarSeries& a0, const BivarSeries& b0) {
  require_same_prime(a0.p_, b0.p_);
  const BivarSeries a = a0.compact(), b = b0.compact();
  const int prec = std::min(a.prec_, b.prec_);
  const int ds = meet_cutoff(a.s_poly_, a.ds_, b.s_poly_, b.ds_, a.ds_ + b.ds_ - 1);
  const int dt = meet_cutoff(a.t_poly_, a.dt_, b.t_poly_, b.dt_, a.dt_ + b.dt_ - 1);
  const std::int64_t m = checked_pow(a.p_, prec);
  const std::size_t cells = static_cast<std::size_t>(ds) * static_cast<std::size_t>(dt);
  std::vector<std::int64_t> acc(cells, 0);
  std::vector<char> touched(cells, 0);
  for (int i1 = 0; i1 < a.ds_ && i1 < ds; ++i1) {
    for (int j1 = 0; j1 < a.dt_ && j1 < dt; ++j1) {
      const PadicInt& x = a.grid_[static_cast<std::size_t>(i1 * a.dt_ + j1)];
      if (x.is_exact_zero()) continue;
      const std::int64_t xr = x.residue() % m;
      for (int i2 = 0; i2 < b.ds_ && i1 + i2 < ds; ++i2) {
        for (int j2 = 0; j2 < b.dt_ && j1 + j2 < dt; ++j2) {
          const PadicInt& y = b.grid_[static_cast<std::size_t>(i2 * b.dt_ + j2)];
          if (y.is_exact_zero()) continue;
          const std::size_t k = static_cast<std::size_t>((i1 + i2) * dt + (j1 + j2));
          acc[k] = (acc[k] + detail::mulmod(xr, y.residue() % m, m)) % m;
          touched[k] = 1;
        }
      }
    }
  }
  std::vector<PadicInt> g;
  g.reserve(cells);
  for (std::size_t k = 0; k < cells; ++k) g.push_back(touched[k] ? PadicInt(a.p_, prec, acc[k]) : PadicInt::exact_zero(a.p_, prec));
  return BivarSeries(a.p_, prec, ds, dt, std::move(g), a.s_poly_ && b.s_poly_, a.t_poly_ && b.t_poly_).compact();
}

std::string BivarSeries::str(bool with_modulus) const {
  struct Term {
    int i, j;
    std::int64_t c;
  };
  std::vector<Term> terms;
  for (int i = 0; i < ds_; ++i)
    for (int j = 0; j < dt_; ++j)
      if (coeff(i, j).residue() != 0) terms.push_back({i, j, coeff(i, j).residue()});
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
    if (x.i + x.j != y.i + y.j) return x.i + x.j > y.i + y.j;
    return x.i > y.i;
  });
  std::ostringstream os;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Term& t = terms[k];
    if (k > 0) os << " + ";
    std::vector<std::string> parts;
    if (t.c != 1 || (t.i == 0 && t.j == 0)) parts.push_back(std::to_string(t.c));
    if (t.i == 1) parts.emplace_back("S");
    if (t.i > 1) parts.push_back("S^" + std::to_string(t.i));
    if (t.j == 1) parts.emplace_back("T");
    if (t.j > 1) parts.push_back("T^" + std::to_string(t.j));
    for (std::size_t q = 0; q < parts.size(); ++q) os << (q ? " * " : "") << parts[q];
  }
  if (terms.empty()) os << "0";
  if (!s_poly_) os << " + O(S^" << ds_ << ")";
  if (!t_poly_) os << " + O(T^" << dt_ << ")";
  if (with_modulus) os << " (mod " << p_ << "^" << prec_ << ")";
  return os.str();
}

bool congruent(const BivarSeries& a, const BivarSeries& b, int prec, int ds, int dt) {
  if (a.p() != b.p()) return false;
  const std::int64_t m = checked_pow(a.p(), prec);
  for (int i = 0; i < ds; ++i) {
    for (int j = 0; j < dt; ++j) {
      const PadicInt x = a.coeff(i, j), y = b.coeff(i, j);
      if (x.prec() < prec || y.prec() < prec) throw Error(ErrorCode::InvalidArgument, "comparison above the available precision");
      if (x.residue() % m != y.residue() % m) return false;
    }
  }
  return true;
}

namespace {

// Polynomial in the diagonal variable X with series coefficients.
using XPoly = std::vector<PowerSeries>;

XPoly xp_add(const XPoly& a, const XPoly& b) {
  XPoly r;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (k < a.size() && k < b.size()) {
      r.push_back(a[k] + b[k]);
    } else {
      r.push_back(k < a.size() ? a[k] : b[k]);
    }
  }
  return r;
}

XPoly xp_mul(const XPoly& a, const XPoly& b) {
  XPoly r(a.size() + b.size() - 1, PowerSeries::zero(a[0].p(), std::min(a[0].prec(), b[0].prec())));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  return r;
}

XPoly xp_neg(const XPoly& a) {
  XPoly r;
  for (const auto& x : a) r.push_back(-x);
  return r;
}

class CharDet {
 public:
  explicit CharDet(const SeriesMatrix& F) : n_(static_cast<int>(F.size())) {
    if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "empty matrix");
    if (n_ > 12) throw Error(ErrorCode::InvalidArgument, "cofactor expansion limited to size 12");
    for (const auto& row : F) {
      if (static_cast<int>(row.size()) != n_) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
    }
    const std::int64_t p = F[0][0].p();
    int prec = INT_MAX;
    for (const auto& row : F)
      for (const auto& x : row) {
        require_same_prime(p, x.p());
        prec = std::min(prec, x.prec());
      }
    for (int i = 0; i < n_; ++i) {
      std::vector<XPoly> row;
      for (int j = 0; j < n_; ++j) {
        XPoly e{-F[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].with_prec(prec)};
        if (i == j) e.push_back(PowerSeries::one(p, prec));
        row.push_back(std::move(e));
      }
      m_.push_back(std::move(row));
    }
    zero_ = XPoly{PowerSeries::zero(p, prec)};
  }

  XPoly full(Expansion first) {
    const unsigned all = (1u << n_) - 1u;
    if (first.index < 0 || first.index >= n_) throw Error(ErrorCode::InvalidArgument, "expansion index out of range");
    XPoly acc = zero_;
    for (int k = 0; k < n_; ++k) {
      const int i = first.along_row ? first.index : k;
      const int j = first.along_row ? k : first.index;
      XPoly term = xp_mul(m_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                          minor(all & ~(1u << i), all & ~(1u << j)));
      acc = xp_add(acc, (i + j) % 2 == 0 ? term : xp_neg(term));
    }
    return acc;
  }

 private:
  // Determinant of the submatrix on the given row and column sets, expanded
  // along its first row.
  XPoly minor(unsigned rows, unsigned cols) {
    if (rows == 0) return XPoly{PowerSeries::one(zero_[0].p(), zero_[0].prec())};
    const auto key = std::make_pair(rows, cols);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int r = 0;
    while (!(rows & (1u << r))) ++r;
    XPoly acc = zero_;
    int pos = 0;
    for (int c = 0; c < n_; ++c) {
      if (!(cols & (1u << c))) continue;
      XPoly term = xp_mul(m_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                          minor(rows & ~(1u << r), cols & ~(1u << c)));
      acc = xp_add(acc, pos % 2 == 0 ? term : xp_neg(term));
      ++pos;
    }
    memo_.emplace(key, acc);
    return acc;
  }

  int n_;
  std::vector<std::vector<XPoly>> m_;
  XPoly zero_;
  std::map<std::pair<unsigned, unsigned>, XPoly> memo_;
};

}  // namespace

BivarSeries char_det(const SeriesMatrix& F, Orientation orientation, Expansion first_step) {
  CharDet det(F);
  XPoly coeffs = det.full(first_step);
  const std::size_t n = F.size();
  coeffs.resize(n + 1, PowerSeries::zero(coeffs[0].p(), coeffs[0].prec()));
  const PowerSeries& lead = coeffs[n];
  if (!lead.is_polynomial() || lead.degree() != 0 || lead.coeff(0).residue() != 1) {
    throw std::logic_error("characteristic determinant is not monic");
  }
  coeffs[n] = PowerSeries::from_integers(lead.p(), lead.prec(), {1});
  return orientation == Orientation::TDiagonal ? BivarSeries::from_T_coefficients(coeffs)
                                               : BivarSeries::from_S_coefficients(coeffs);
}

BivarSeries char_det(const SeriesMatrix& F, Orientation orientation) {
  return char_det(F, orientation, Expansion{true, 0});
}

SeriesMatrix matrix_multiply(const SeriesMatrix& a, const SeriesMatrix& b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != a[0].size()) throw Error(ErrorCode::InvalidArgument, "incompatible matrix shapes");
  const std::size_t inner = b.size(), cols = b[0].size();
  SeriesMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      PowerSeries acc = a[i][0] * b[0][j];
      for (std::size_t k = 1; k < inner; ++k) acc = acc + a[i][k] * b[k][j];
      r[i].push_back(acc);
    }
  }
  return r;
}

SeriesMatrix evaluate_at_matrix(const BivarSeries& f, const SeriesMatrix& F) {
  const std::size_t n = F.size();
  const std::int64_t p = f.p();
  const int prec = f.prec();
  SeriesMatrix power(n), result(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      power[i].push_back(i == j ? PowerSeries::one(p, prec) : PowerSeries::zero(p, prec));
      result[i].push_back(PowerSeries::zero(p, prec));
    }
  }
  const int deg = f.t_degree();
  for (int k = 0; k <= deg; ++k) {
    const PowerSeries fk = f.t_coefficient(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) result[i][j] = result[i][j] + fk * power[i][j];
    if (k < deg) power = matrix_multiply(power, F);
  }
  return result;
}

PowerSeries substitute_T(const BivarSeries& f, const PowerSeries& phi) {
  require_same_prime(f.p(), phi.p());
  const int top = f.is_t_polynomial() ? f.t_degree() : f.t_cutoff() - 1;
  PowerSeries acc = PowerSeries::zero(f.p(), f.prec());
  for (int j = std::max(top, 0); j >= 0; --j) acc = acc * phi + f.t_coefficient(j);
  if (f.is_t_polynomial()) return acc;

  // phi^j for j >= D_T contributes to S^k with valuation >= (j - k) v.
  const Valuation v0 = phi.coeff(0).valuation();
  const int dt = f.t_cutoff();
  const int have = acc.is_polynomial() ? INT_MAX : acc.cutoff();
  if (v0.is_infinite()) return acc.truncate(std::min(have, dt));
  const int v = v0.lower_bound();
  if (v < 1) throw Error(ErrorCode::UnboundedTail, "phi(0) = " + phi.coeff(0).str() + " is a unit; the T-tail is unbounded");
  const int N = acc.prec();
  const int full = dt + 1 - (N + v - 1) / v;  // largest D with (dt - D + 1) v >= N
  if (full >= 1) return acc.truncate(std::min(have, full));
  return acc.truncate(1).with_prec(std::min(N, dt * v));
}

BivarSeries affine_T_substitution(const BivarSeries& f, const PowerSeries& c, const PowerSeries& e) {
  if (!f.is_t_polynomial()) throw Error(ErrorCode::InvalidArgument, "T-substitution needs f polynomial in T");
  const BivarSeries lin = BivarSeries::from_T_coefficients({c, e});
  const int deg = std::max(f.t_degree(), 0);
  BivarSeries acc = BivarSeries::in_S(f.t_coefficient(deg));
  for (int j = deg - 1; j >= 0; --j) acc = acc * lin + BivarSeries::in_S(f.t_coefficient(j));
  return acc;
}

BivarSeries ts_change(const BivarSeries& f, const PadicInt& u, int s, TsDirection direction, int s_cutoff) {
  if (!u.is_unit()) throw Error(ErrorCode::InvalidArgument, "u = " + u.str() + " is not a unit");
  if (s < 0) throw Error(ErrorCode::InvalidArgument, "s must be non-negative");
  const PadicInt scale(u.p(), u.prec(), checked_pow(u.p(), s));
  const PadicInt exponent = direction == TsDirection::Forward ? -(u * scale) : u * scale;
  const PowerSeries b = binom_series(exponent, 1, s_cutoff);
  const PowerSeries one = PowerSeries::one(u.p(), b.prec());
  return affine_T_substitution(f, b - one, b);
}

PowerSeries specialize_S0(const BivarSeries& f) { return f.s_coefficient(0); }
PowerSeries specialize_T0(const BivarSeries& f) { return f.t_coefficient(0); }
PadicInt specialize_both(const BivarSeries& f) { return f.coeff(0, 0); }

}  // namespace ggc
