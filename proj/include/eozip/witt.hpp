#pragma once

// Exact arithmetic in truncated Witt rings W_n(F_{p^f}) of unramified
// extensions, with the canonical Frobenius lift and precision-tracked
// division by p. W_n(F_{p^f}) is realized as (Z/p^n)[x]/(modulus) for a
// monic degree-f polynomial whose mod-p reduction is irreducible; the
// Frobenius image of the generator is Hensel-lifted from the root x^p.

#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "eozip/errors.hpp"
#include "eozip/random.hpp"

namespace eozip {

namespace detail {

inline bool is_prime_u64(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// --- polynomials over F_p, coefficient vectors with c[i] = coeff of x^i ---

using FpPoly = std::vector<std::uint64_t>;

inline void fp_trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  fp_trim(c);
  return c;
}

inline FpPoly fp_mod(FpPoly a, const FpPoly& m, std::uint64_t p) {
  fp_trim(a);
  const std::size_t dm = m.size() - 1;
  // m monic
  while (a.size() > dm) {
    const std::uint64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i < m.size(); ++i) {
      std::uint64_t sub = (lead * m[i]) % p;
      a[shift + i] = (a[shift + i] + p - sub) % p;
    }
    fp_trim(a);
    if (a.empty()) break;
  }
  return a;
}

inline FpPoly fp_powmod_x(std::uint64_t e_base, unsigned e_exp,
                          const FpPoly& m, std::uint64_t p) {
  // x^(e_base^e_exp) mod m, by repeated e_base-th powering
  FpPoly r = {0, 1};  // x
  r = fp_mod(r, m, p);
  for (unsigned k = 0; k < e_exp; ++k) {
    // r <- r^e_base mod m via square-and-multiply
    FpPoly acc = {1};
    FpPoly base = r;
    std::uint64_t e = e_base;
    while (e > 0) {
      if (e & 1) acc = fp_mod(fp_mul(acc, base, p), m, p);
      base = fp_mod(fp_mul(base, base, p), m, p);
      e >>= 1;
    }
    r = acc;
  }
  return r;
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
  fp_trim(a);
  fp_trim(b);
  while (!b.empty()) {
    // make b monic before dividing by it (Fermat inverse of the lead)
    const std::uint64_t lead = b.back();
    if (lead != 1) {
      std::uint64_t inv = 1, base = lead, e = p - 2;
      while (e > 0) {
        if (e & 1) inv = (inv * base) % p;
        base = (base * base) % p;
        e >>= 1;
      }
      for (auto& c : b) c = (c * inv) % p;
    }
    FpPoly r = fp_mod(a, b, p);
    a = b;
    b = r;
  }
  return a;
}

inline bool fp_irreducible(const FpPoly& m, std::uint64_t p) {
  const unsigned f = static_cast<unsigned>(m.size() - 1);
  if (f == 0) return false;
  if (f == 1) return true;
  // x^(p^f) == x mod m
  FpPoly xpf = fp_powmod_x(p, f, m, p);
  FpPoly x = fp_mod({0, 1}, m, p);
  if (xpf != x) return false;
  // gcd(x^(p^(f/l)) - x, m) constant for every prime l | f
  for (unsigned l = 2; l <= f; ++l) {
    if (f % l != 0) continue;
    bool lprime = true;
    for (unsigned d = 2; d * d <= l; ++d)
      if (l % d == 0) lprime = false;
    if (!lprime) continue;
    FpPoly xpd = fp_powmod_x(p, f / l, m, p);
    // xpd - x
    FpPoly diff = xpd;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] + p - 1) % p;
    fp_trim(diff);
    FpPoly g = fp_gcd(m, diff, p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace detail

// Descriptor of W_n(F_{p^f}): modulus and Frobenius data shared by all
// elements of the ring. Immutable after construction.
struct WittRing {
  std::uint64_t p = 2;
  unsigned f = 1;
  unsigned n = 2;
  // monic, length f+1, coefficients canonical in [0, p^n)
  std::vector<std::uint64_t> modulus;
  // image of the generator under the Frobenius lift, length f
  std::vector<std::uint64_t> frobenius_image;

  std::uint64_t pow_p(unsigned k) const {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < k; ++i) r *= p;
    return r;
  }
  std::uint64_t q() const { return pow_p(f); }

  bool same_as(const WittRing& o) const {
    return p == o.p && f == o.f && n == o.n && modulus == o.modulus;
  }

  // Same residue field: descriptors may differ in precision but must agree
  // on p, f and the modulus mod p.
  bool same_residue(const WittRing& o) const {
    if (p != o.p || f != o.f || modulus.size() != o.modulus.size()) return false;
    for (std::size_t i = 0; i < modulus.size(); ++i)
      if (modulus[i] % p != o.modulus[i] % p) return false;
    return true;
  }
};

using WittRingPtr = std::shared_ptr<const WittRing>;

class WittElem {
 public:
  WittElem(WittRingPtr ring, std::vector<std::uint64_t> coeffs, unsigned prec)
      : ring_(std::move(ring)), c_(std::move(coeffs)), prec_(prec) {
    if (prec_ < 1 || prec_ > ring_->n)
      throw PrecisionExhausted("element precision " + std::to_string(prec_) +
                               " outside [1, " + std::to_string(ring_->n) + "]");
    c_.resize(ring_->f, 0);
    normalize();
  }

  static WittElem zero(const WittRingPtr& r, unsigned prec) {
    return WittElem(r, std::vector<std::uint64_t>(r->f, 0), prec);
  }
  static WittElem one(const WittRingPtr& r, unsigned prec) {
    std::vector<std::uint64_t> c(r->f, 0);
    c[0] = 1;
    return WittElem(r, std::move(c), prec);
  }
  static WittElem generator(const WittRingPtr& r, unsigned prec) {
    std::vector<std::uint64_t> c(r->f, 0);
    if (r->f > 1) c[1] = 1;
    return WittElem(r, std::move(c), prec);
  }
  static WittElem from_int(const WittRingPtr& r, std::int64_t v, unsigned prec) {
    const std::uint64_t m = r->pow_p(prec);
    std::int64_t red = v % static_cast<std::int64_t>(m);
    if (red < 0) red += static_cast<std::int64_t>(m);
    std::vector<std::uint64_t> c(r->f, 0);
    c[0] = static_cast<std::uint64_t>(red);
    return WittElem(r, std::move(c), prec);
  }

  const WittRingPtr& ring() const { return ring_; }
  const std::vector<std::uint64_t>& coeffs() const { return c_; }
  unsigned precision() const { return prec_; }

  bool is_zero() const {
    for (auto v : c_)
      if (v != 0) return false;
    return true;
  }

  // Unit in the local ring == nonzero residue mod p.
  bool is_unit() const {
    for (auto v : c_)
      if (v % ring_->p != 0) return true;
    return false;
  }

  friend WittElem operator+(const WittElem& a, const WittElem& b) {
    unsigned k = common(a, b);
    std::vector<std::uint64_t> c(a.ring_->f);
    const std::uint64_t m = a.ring_->pow_p(k);
    for (unsigned i = 0; i < a.ring_->f; ++i)
      c[i] = (a.c_[i] % m + b.c_[i] % m) % m;
    return WittElem(a.ring_, std::move(c), k);
  }

  friend WittElem operator-(const WittElem& a, const WittElem& b) {
    unsigned k = common(a, b);
    std::vector<std::uint64_t> c(a.ring_->f);
    const std::uint64_t m = a.ring_->pow_p(k);
    for (unsigned i = 0; i < a.ring_->f; ++i)
      c[i] = (a.c_[i] % m + m - b.c_[i] % m) % m;
    return WittElem(a.ring_, std::move(c), k);
  }

  WittElem operator-() const {
    return zero(ring_, prec_) - *this;
  }

  friend WittElem operator*(const WittElem& a, const WittElem& b) {
    unsigned k = common(a, b);
    const std::uint64_t m = a.ring_->pow_p(k);
    const unsigned f = a.ring_->f;
    std::vector<std::uint64_t> prod(2 * f - 1, 0);
    for (unsigned i = 0; i < f; ++i) {
      if (a.c_[i] == 0) continue;
      const std::uint64_t ai = a.c_[i] % m;
      for (unsigned j = 0; j < f; ++j)
        prod[i + j] = (prod[i + j] + ai * (b.c_[j] % m)) % m;
    }
    // reduce by the monic modulus
    for (unsigned d = 2 * f - 2; d >= f && d < prod.size(); --d) {
      const std::uint64_t lead = prod[d];
      if (lead != 0) {
        for (unsigned i = 0; i < f; ++i) {
          std::uint64_t sub = (lead * (a.ring_->modulus[i] % m)) % m;
          prod[d - f + i] = (prod[d - f + i] + m - sub) % m;
        }
      }
      prod[d] = 0;
      if (d == 0) break;
    }
    prod.resize(f);
    return WittElem(a.ring_, std::move(prod), k);
  }

  friend bool operator==(const WittElem& a, const WittElem& b) {
    if (!a.ring_->same_as(*b.ring_)) return false;
    if (a.prec_ != b.prec_) return false;
    return a.c_ == b.c_;
  }
  friend bool operator!=(const WittElem& a, const WittElem& b) {
    return !(a == b);
  }

  WittElem reduce_to_precision(unsigned k) const {
    if (k > prec_)
      throw PrecisionExhausted("cannot raise precision " +
                               std::to_string(prec_) + " to " +
                               std::to_string(k));
    return WittElem(ring_, c_, k);
  }

 private:
  static unsigned common(const WittElem& a, const WittElem& b) {
    if (!a.ring_->same_as(*b.ring_))
      throw ShapeMismatch("operands from different rings");
    return a.prec_ < b.prec_ ? a.prec_ : b.prec_;
  }

  void normalize() {
    const std::uint64_t m = ring_->pow_p(prec_);
    for (auto& v : c_) v %= m;
  }

  WittRingPtr ring_;
  std::vector<std::uint64_t> c_;
  unsigned prec_;
};

// --- scalar interface used by generic matrix/group code ---

inline WittElem zero_like(const WittElem& x) {
  return WittElem::zero(x.ring(), x.precision());
}
inline WittElem one_like(const WittElem& x) {
  return WittElem::one(x.ring(), x.precision());
}
inline WittElem embed_int(const WittElem& like, std::int64_t v) {
  return WittElem::from_int(like.ring(), v, like.precision());
}
inline bool is_zero(const WittElem& x) { return x.is_zero(); }
inline bool is_unit(const WittElem& x) { return x.is_unit(); }
inline unsigned precision(const WittElem& x) { return x.precision(); }
inline WittElem reduce_to_precision(const WittElem& x, unsigned k) {
  return x.reduce_to_precision(k);
}

// Coefficientwise reduction to the residue field F_{p^f}, represented as
// the precision-1 slice of the ring.
inline WittElem reduce_mod_p(const WittElem& x) {
  return x.reduce_to_precision(1);
}

// Exact division by p; drops one level of precision.
inline WittElem div_p_exact(const WittElem& x) {
  if (x.precision() < 2)
    throw PrecisionExhausted("div_p_exact at precision " +
                             std::to_string(x.precision()));
  const std::uint64_t p = x.ring()->p;
  std::vector<std::uint64_t> c = x.coeffs();
  for (auto& v : c) {
    if (v % p != 0)
      throw NotDivisible("coefficient " + std::to_string(v) +
                         " not divisible by p=" + std::to_string(p));
    v /= p;
  }
  return WittElem(x.ring(), std::move(c), x.precision() - 1);
}

inline WittElem pow_u64(const WittElem& x, std::uint64_t e) {
  WittElem acc = one_like(x);
  WittElem base = x;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

// Inverse of a unit. Fermat inverse in the residue field, then Newton
// iteration b <- b(2 - xb) to full precision.
inline WittElem invert(const WittElem& x) {
  if (!x.is_unit()) throw NotDivisible("invert of non-unit");
  const WittRingPtr& r = x.ring();
  WittElem xr = reduce_mod_p(x);
  WittElem b1 = pow_u64(xr, r->q() - 2);
  WittElem b(r, b1.coeffs(), x.precision());
  const WittElem two = WittElem::from_int(r, 2, x.precision());
  unsigned correct = 1;
  while (correct < x.precision()) {
    b = b * (two - x * b);
    correct *= 2;
  }
  return b;
}

// Frobenius lift: substitute the generator by its sigma-image. The
// prime-field coefficients are fixed by sigma.
inline WittElem frobenius(const WittElem& x) {
  const WittRingPtr& r = x.ring();
  if (r->f == 1) return x;
  std::vector<std::uint64_t> img = r->frobenius_image;
  const std::uint64_t m = r->pow_p(x.precision());
  for (auto& v : img) v %= m;
  WittElem s(r, std::move(img), x.precision());
  // Horner evaluation of the coefficient polynomial at s
  WittElem acc = WittElem::from_int(r, 0, x.precision());
  for (unsigned i = r->f; i-- > 0;) {
    acc = acc * s + WittElem(r, {x.coeffs()[i]}, x.precision());
  }
  return acc;
}

inline WittElem random_elem(const WittRingPtr& r, Rng& rng, unsigned prec) {
  std::vector<std::uint64_t> c(r->f);
  const std::uint64_t m = r->pow_p(prec);
  for (auto& v : c) v = rng.below(m);
  return WittElem(r, std::move(c), prec);
}

inline WittElem random_unit(const WittRingPtr& r, Rng& rng, unsigned prec) {
  for (;;) {
    WittElem x = random_elem(r, rng, prec);
    if (x.is_unit()) return x;
  }
}

// Builds W_n(F_{p^f}). The modulus is the first monic degree-f polynomial
// (ordered by coefficient values) that is irreducible mod p, lifted
// coefficientwise; sigma on the generator is Hensel-lifted from x^p.
inline WittRingPtr make_witt_ring(std::uint64_t p, unsigned f, unsigned n,
                                  std::vector<std::uint64_t> modulus = {}) {
  if (!detail::is_prime_u64(p))
    throw InvalidInput("p=" + std::to_string(p) + " is not prime");
  if (f < 1) throw InvalidInput("residue degree f must be >= 1");
  if (n < 2) throw InvalidInput("precision n must be >= 2");
  // keep products inside 64 bits
  long double size = 1;
  for (unsigned i = 0; i < n; ++i) size *= static_cast<long double>(p);
  if (size > 2147483647.0L)
    throw InvalidInput("p^n too large for exact 64-bit arithmetic");

  auto ring = std::make_shared<WittRing>();
  ring->p = p;
  ring->f = f;
  ring->n = n;

  if (modulus.empty()) {
    if (f == 1) {
      modulus = {0, 1};  // x
    } else {
      // first-found irreducible monic polynomial, constant coefficient
      // varying fastest
      std::uint64_t total = 1;
      for (unsigned i = 0; i < f; ++i) total *= p;
      bool found = false;
      for (std::uint64_t code = 0; code < total && !found; ++code) {
        detail::FpPoly cand(f + 1, 0);
        std::uint64_t c = code;
        for (unsigned i = 0; i < f; ++i) {
          cand[i] = c % p;
          c /= p;
        }
        cand[f] = 1;
        if (detail::fp_irreducible(cand, p)) {
          modulus = cand;
          found = true;
        }
      }
      if (!found) throw InternalError("no irreducible modulus found");
    }
  } else {
    if (modulus.size() != f + 1 || modulus[f] % p == 0)
      throw InvalidInput("modulus must be monic of degree f");
    detail::FpPoly red(f + 1);
    for (unsigned i = 0; i <= f; ++i) red[i] = modulus[i] % p;
    if (red[f] != 1 || (f >= 2 && !detail::fp_irreducible(red, p)))
      throw InvalidInput("modulus is not irreducible mod p");
  }
  const std::uint64_t pn = [&] {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < n; ++i) r *= p;
    return r;
  }();
  for (auto& c : modulus) c %= pn;
  ring->modulus = modulus;

  if (f == 1) {
    ring->frobenius_image = {0};
    return ring;
  }

  // Hensel lift of the generator's sigma-image from the root x^p of the
  // modulus mod p: s <- s - mod(s)/mod'(s).
  WittRingPtr rp = ring;  // elements may be built before frobenius_image is set
  detail::FpPoly s0 = detail::fp_powmod_x(p, 1, [&] {
    detail::FpPoly red(f + 1);
    for (unsigned i = 0; i <= f; ++i) red[i] = modulus[i] % p;
    return red;
  }(), p);
  s0.resize(f, 0);
  WittElem s(rp, std::vector<std::uint64_t>(s0.begin(), s0.end()), n);
  auto eval_modulus = [&](const WittElem& v) {
    WittElem acc = WittElem::from_int(rp, 0, n);
    for (unsigned i = f + 1; i-- > 0;)
      acc = acc * v + WittElem(rp, {modulus[i]}, n);
    return acc;
  };
  auto eval_derivative = [&](const WittElem& v) {
    WittElem acc = WittElem::from_int(rp, 0, n);
    for (unsigned i = f + 1; i-- > 1;)
      acc = acc * v +
            WittElem(rp, {(i % pn) * modulus[i] % pn}, n);
    return acc;
  };
  for (unsigned it = 0; it < n + 2; ++it) {
    WittElem val = eval_modulus(s);
    if (val.is_zero()) break;
    s = s - val * invert(eval_derivative(s));
  }
  if (!eval_modulus(s).is_zero())
    throw InternalError("Hensel iteration did not converge");
  ring->frobenius_image = s.coeffs();
  return ring;
}

}  // namespace eozip
