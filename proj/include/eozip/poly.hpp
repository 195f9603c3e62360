#pragma once

// Polynomial simple frames W_n(F_{p^f})[t] with a chosen Frobenius lift
// sigma(t) = t^p mod p. Exact polynomial arithmetic, no degree truncation.

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "eozip/errors.hpp"
#include "eozip/witt.hpp"

namespace eozip {

struct PolyFrame;
using PolyFramePtr = std::shared_ptr<const PolyFrame>;

struct PolyFrame {
  WittRingPtr base;
  // sigma(t) as a polynomial over the base ring at full precision,
  // congruent to t^p mod p
  std::vector<WittElem> sigma_t;

  bool same_as(const PolyFrame& o) const {
    if (!base->same_as(*o.base)) return false;
    if (sigma_t.size() != o.sigma_t.size()) return false;
    for (std::size_t i = 0; i < sigma_t.size(); ++i)
      if (!(sigma_t[i] == o.sigma_t[i])) return false;
    return true;
  }

  // Equal mod p; enough for comparing residue data of two frames of the
  // same base ring.
  bool same_residue(const PolyFrame& o) const {
    return base->same_as(*o.base);
  }
};

inline PolyFramePtr make_poly_frame(const WittRingPtr& base,
                                    std::vector<WittElem> sigma_t) {
  const std::uint64_t p = base->p;
  while (!sigma_t.empty() && sigma_t.back().is_zero()) sigma_t.pop_back();
  if (sigma_t.size() < p + 1)
    throw InvalidInput("sigma(t) must be congruent to t^p mod p");
  for (std::size_t i = 0; i < sigma_t.size(); ++i) {
    if (!sigma_t[i].ring()->same_as(*base))
      throw ShapeMismatch("sigma(t) coefficient from wrong ring");
    WittElem want = (i == p) ? WittElem::one(base, 1) : WittElem::zero(base, 1);
    if (!(reduce_mod_p(sigma_t[i]) == want))
      throw InvalidInput("sigma(t) must be congruent to t^p mod p");
  }
  auto fr = std::make_shared<PolyFrame>();
  fr->base = base;
  fr->sigma_t = std::move(sigma_t);
  return fr;
}

// The standard frame with sigma(t) = t^p.
inline PolyFramePtr make_standard_frame(const WittRingPtr& base) {
  std::vector<WittElem> st(base->p + 1, WittElem::zero(base, base->n));
  st[base->p] = WittElem::one(base, base->n);
  return make_poly_frame(base, std::move(st));
}

// Element of W_n(F_{p^f})[t]; coefficients at uniform precision, trailing
// zero coefficients stripped.
class PolyElem {
 public:
  PolyElem(PolyFramePtr frame, std::vector<WittElem> coeffs, unsigned prec)
      : frame_(std::move(frame)), c_(std::move(coeffs)), prec_(prec) {
    for (auto& c : c_) c = c.reduce_to_precision(prec_);
    normalize();
  }

  static PolyElem constant(const PolyFramePtr& fr, const WittElem& w) {
    return PolyElem(fr, {w}, w.precision());
  }
  static PolyElem zero(const PolyFramePtr& fr, unsigned prec) {
    return PolyElem(fr, {}, prec);
  }
  static PolyElem one(const PolyFramePtr& fr, unsigned prec) {
    return PolyElem(fr, {WittElem::one(fr->base, prec)}, prec);
  }
  static PolyElem variable(const PolyFramePtr& fr, unsigned prec) {
    return PolyElem(
        fr, {WittElem::zero(fr->base, prec), WittElem::one(fr->base, prec)},
        prec);
  }

  const PolyFramePtr& frame() const { return frame_; }
  const std::vector<WittElem>& coeffs() const { return c_; }
  unsigned precision() const { return prec_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  bool is_zero() const { return c_.empty(); }

  // Units of (Z/p^n)[t]: unit constant term, all higher coefficients
  // nilpotent (divisible by p).
  bool is_unit() const {
    if (c_.empty() || !c_[0].is_unit()) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!reduce_mod_p(c_[i]).is_zero()) return false;
    return true;
  }

  friend PolyElem operator+(const PolyElem& a, const PolyElem& b) {
    unsigned k = common(a, b);
    std::vector<WittElem> c;
    const std::size_t sz = std::max(a.c_.size(), b.c_.size());
    c.reserve(sz);
    for (std::size_t i = 0; i < sz; ++i) c.push_back(a.coeff(i, k) + b.coeff(i, k));
    return PolyElem(a.frame_, std::move(c), k);
  }

  friend PolyElem operator-(const PolyElem& a, const PolyElem& b) {
    unsigned k = common(a, b);
    std::vector<WittElem> c;
    const std::size_t sz = std::max(a.c_.size(), b.c_.size());
    c.reserve(sz);
    for (std::size_t i = 0; i < sz; ++i) c.push_back(a.coeff(i, k) - b.coeff(i, k));
    return PolyElem(a.frame_, std::move(c), k);
  }

  PolyElem operator-() const { return zero(frame_, prec_) - *this; }

  friend PolyElem operator*(const PolyElem& a, const PolyElem& b) {
    unsigned k = common(a, b);
    if (a.c_.empty() || b.c_.empty()) return zero(a.frame_, k);
    std::vector<WittElem> c(a.c_.size() + b.c_.size() - 1,
                            WittElem::zero(a.frame_->base, k));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        c[i + j] = c[i + j] + a.coeff(i, k) * b.coeff(j, k);
    return PolyElem(a.frame_, std::move(c), k);
  }

  friend bool operator==(const PolyElem& a, const PolyElem& b) {
    if (!a.frame_->same_as(*b.frame_) || a.prec_ != b.prec_) return false;
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }
  friend bool operator!=(const PolyElem& a, const PolyElem& b) {
    return !(a == b);
  }

  PolyElem reduce_to_precision(unsigned k) const {
    std::vector<WittElem> c;
    c.reserve(c_.size());
    for (const auto& w : c_) c.push_back(w.reduce_to_precision(k));
    return PolyElem(frame_, std::move(c), k);
  }

 private:
  WittElem coeff(std::size_t i, unsigned prec) const {
    if (i < c_.size()) return c_[i].reduce_to_precision(prec);
    return WittElem::zero(frame_->base, prec);
  }

  static unsigned common(const PolyElem& a, const PolyElem& b) {
    if (!a.frame_->same_as(*b.frame_))
      throw ShapeMismatch("operands from different frames");
    return a.prec_ < b.prec_ ? a.prec_ : b.prec_;
  }

  void normalize() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  PolyFramePtr frame_;
  std::vector<WittElem> c_;
  unsigned prec_;
};

inline PolyElem zero_like(const PolyElem& x) {
  return PolyElem::zero(x.frame(), x.precision());
}
inline PolyElem one_like(const PolyElem& x) {
  return PolyElem::one(x.frame(), x.precision());
}
inline PolyElem embed_int(const PolyElem& like, std::int64_t v) {
  return PolyElem::constant(
      like.frame(), WittElem::from_int(like.frame()->base, v, like.precision()));
}
inline bool is_zero(const PolyElem& x) { return x.is_zero(); }
inline bool is_unit(const PolyElem& x) { return x.is_unit(); }
inline unsigned precision(const PolyElem& x) { return x.precision(); }
inline PolyElem reduce_to_precision(const PolyElem& x, unsigned k) {
  return x.reduce_to_precision(k);
}

inline PolyElem reduce_mod_p(const PolyElem& x) {
  return x.reduce_to_precision(1);
}

inline PolyElem div_p_exact(const PolyElem& x) {
  if (x.precision() < 2)
    throw PrecisionExhausted("div_p_exact at precision " +
                             std::to_string(x.precision()));
  std::vector<WittElem> c;
  c.reserve(x.coeffs().size());
  for (const auto& w : x.coeffs()) c.push_back(div_p_exact(w));
  return PolyElem(x.frame(), std::move(c), x.precision() - 1);
}

// Inverse of a unit via the terminating geometric series: with
// u = c0(1 + nil), (1 + nil)^{-1} = sum (-nil)^k and nil^prec = 0.
inline PolyElem invert(const PolyElem& x) {
  if (!x.is_unit()) throw NotDivisible("invert of non-unit polynomial");
  const PolyFramePtr& fr = x.frame();
  const unsigned prec = x.precision();
  WittElem c0inv = invert(x.coeffs()[0]);
  PolyElem c0inv_p = PolyElem::constant(fr, c0inv);
  PolyElem nil = c0inv_p * x - PolyElem::one(fr, prec);
  PolyElem acc = PolyElem::one(fr, prec);
  PolyElem term = PolyElem::one(fr, prec);
  for (unsigned k = 1; k < prec && !term.is_zero(); ++k) {
    term = term * (-nil);
    acc = acc + term;
  }
  return acc * c0inv_p;
}

// Frobenius lift of the frame: sigma on coefficients, t -> sigma(t).
inline PolyElem frobenius(const PolyElem& x) {
  const PolyFramePtr& fr = x.frame();
  const unsigned prec = x.precision();
  std::vector<WittElem> st;
  st.reserve(fr->sigma_t.size());
  for (const auto& w : fr->sigma_t) st.push_back(w.reduce_to_precision(prec));
  PolyElem sig_t(fr, std::move(st), prec);
  PolyElem acc = PolyElem::zero(fr, prec);
  for (std::size_t i = x.coeffs().size(); i-- > 0;) {
    acc = acc * sig_t +
          PolyElem::constant(fr, frobenius(x.coeffs()[i]));
  }
  return acc;
}

// Parallel transport of a constant family between frames with the same
// base ring: the identity on coefficients.
inline PolyElem transport_to_frame(const PolyElem& x, const PolyFramePtr& fr) {
  if (!x.frame()->same_residue(*fr))
    throw ShapeMismatch("frames have different base rings");
  return PolyElem(fr, x.coeffs(), x.precision());
}

}  // namespace eozip
