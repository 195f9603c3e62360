#pragma once

// Matrix realizations of GL_m and GSp_2g with a minuscule cocharacter given
// by 0/1 diagonal weights, the block subgroups it cuts out, mu(p)-conjugation
// with integrality tracking, the zip group and its action, and U_-^sigma
// coset arithmetic.
//
// All groups here are split over F_p and mu is defined over F_p, so the
// sigma-twisted subgroups coincide with the untwisted ones as subgroups;
// sigma still acts nontrivially on points over F_{p^f}, f > 1, and over
// polynomial frames.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "eozip/errors.hpp"
#include "eozip/matrix.hpp"
#include "eozip/random.hpp"
#include "eozip/witt.hpp"

namespace eozip {

enum class GroupKind { GL, GSp };

struct GroupSpec {
  GroupKind kind = GroupKind::GL;
  unsigned m = 0;
  std::vector<int> mu;  // 0/1 weight per standard coordinate

  unsigned d() const {
    unsigned c = 0;
    for (int w : mu) c += static_cast<unsigned>(w);
    return c;
  }
  int weight(unsigned i) const { return mu[i]; }
  unsigned g() const { return m / 2; }

  // Gram matrix entries of the fixed antidiagonal symplectic form:
  // J[i, m-1-i] = +1 for i < m/2 and -1 otherwise (0-based).
  int j_sign(unsigned i, unsigned j) const {
    if (j != m - 1 - i) return 0;
    return i < m / 2 ? 1 : -1;
  }

  std::vector<unsigned> weight_one_positions() const {
    std::vector<unsigned> r;
    for (unsigned i = 0; i < m; ++i)
      if (mu[i] == 1) r.push_back(i);
    return r;
  }
  std::vector<unsigned> weight_zero_positions() const {
    std::vector<unsigned> r;
    for (unsigned i = 0; i < m; ++i)
      if (mu[i] == 0) r.push_back(i);
    return r;
  }

  bool same_as(const GroupSpec& o) const {
    return kind == o.kind && m == o.m && mu == o.mu;
  }
};

using GroupSpecPtr = std::shared_ptr<const GroupSpec>;

inline GroupSpecPtr make_group(GroupKind kind, unsigned m, std::vector<int> mu) {
  if (m == 0 || mu.size() != m) throw InvalidWeights("weight count must equal m");
  for (int w : mu)
    if (w != 0 && w != 1) throw InvalidWeights("weights must be 0 or 1");
  if (kind == GroupKind::GSp) {
    if (m % 2 != 0) throw OddSizeGSp("GSp requires even size");
    // Siegel cocharacter: weights (1,...,1,0,...,0) with m/2 ones, so that
    // mu(t) is a similitude with factor t.
    for (unsigned i = 0; i < m; ++i) {
      int want = i < m / 2 ? 1 : 0;
      if (mu[i] != want)
        throw InvalidWeights("GSp weights must be (1,..,1,0,..,0) with m/2 ones");
    }
  }
  auto s = std::make_shared<GroupSpec>();
  s->kind = kind;
  s->m = m;
  s->mu = std::move(mu);
  return s;
}

template <class T>
Mat<T> gram_matrix(const GroupSpec& spec, const T& sample) {
  Mat<T> j(spec.m, spec.m, zero_like(sample));
  for (unsigned i = 0; i < spec.m; ++i)
    for (unsigned k = 0; k < spec.m; ++k) {
      int s = spec.j_sign(i, k);
      if (s != 0) j.at(i, k) = embed_int(sample, s);
    }
  return j;
}

template <class T>
struct Membership {
  bool ok = false;
  std::optional<T> factor;  // similitude factor for GSp
  std::string reason;
};

template <class T>
Membership<T> check_member(const GroupSpec& spec, const Mat<T>& mat) {
  Membership<T> r;
  if (mat.rows() != spec.m || mat.cols() != spec.m)
    throw ShapeMismatch("matrix size does not match the group");
  T dt = det(mat);
  if (!is_unit(dt)) {
    r.reason = "determinant is not a unit";
    return r;
  }
  if (spec.kind == GroupKind::GSp) {
    Mat<T> j = gram_matrix(spec, mat.at(0, 0));
    Mat<T> gram = mat.transpose() * j * mat;
    T c = gram.at(0, spec.m - 1);  // J[0, m-1] = +1
    if (!is_unit(c)) {
      r.reason = "similitude factor is not a unit";
      return r;
    }
    Mat<T> cj = j.map([&](const T& v) { return v * c; });
    if (!(gram == cj)) {
      r.reason = "does not preserve the symplectic form up to a unit";
      return r;
    }
    r.factor = c;
  }
  r.ok = true;
  return r;
}

template <class T>
class GroupElem {
 public:
  GroupElem(GroupSpecPtr spec, Mat<T> mat)
      : spec_(std::move(spec)), mat_(std::move(mat)) {
    Membership<T> mem = check_member(*spec_, mat_);
    if (!mem.ok) throw NotMember(mem.reason);
    factor_ = std::move(mem.factor);
  }

  struct unchecked_t {};
  GroupElem(GroupSpecPtr spec, Mat<T> mat, unchecked_t)
      : spec_(std::move(spec)), mat_(std::move(mat)) {}

  static GroupElem identity(const GroupSpecPtr& spec, const T& sample) {
    return GroupElem(spec, Mat<T>::identity(spec->m, sample), unchecked_t{});
  }

  const GroupSpecPtr& spec() const { return spec_; }
  const Mat<T>& mat() const { return mat_; }
  const std::optional<T>& similitude() const { return factor_; }

  friend GroupElem operator*(const GroupElem& a, const GroupElem& b) {
    if (!a.spec_->same_as(*b.spec_)) throw ShapeMismatch("group specs differ");
    return GroupElem(a.spec_, a.mat_ * b.mat_, unchecked_t{});
  }

  friend bool operator==(const GroupElem& a, const GroupElem& b) {
    return a.spec_->same_as(*b.spec_) && a.mat_ == b.mat_;
  }

 private:
  GroupSpecPtr spec_;
  Mat<T> mat_;
  std::optional<T> factor_;
};

template <class T>
GroupElem<T> group_element(const GroupSpecPtr& spec, Mat<T> mat) {
  return GroupElem<T>(spec, std::move(mat));
}

template <class T>
GroupElem<T> inverse(const GroupElem<T>& g) {
  return GroupElem<T>(g.spec(), inverse(g.mat()),
                      typename GroupElem<T>::unchecked_t{});
}

// Entrywise Frobenius; preserves membership since the Gram matrix has
// 0/±1 entries.
template <class T>
GroupElem<T> sigma_elem(const GroupElem<T>& g) {
  return GroupElem<T>(g.spec(), frobenius_mat(g.mat()),
                      typename GroupElem<T>::unchecked_t{});
}

template <class T>
GroupElem<T> reduce_mod_p_elem(const GroupElem<T>& g) {
  return GroupElem<T>(g.spec(), reduce_mod_p_mat(g.mat()),
                      typename GroupElem<T>::unchecked_t{});
}

// mu(s) for a unit s: diagonal with s at weight-1 coordinates.
template <class T>
GroupElem<T> cochar_at(const GroupSpecPtr& spec, const T& s) {
  if (!is_unit(s)) throw NotMember("cocharacter argument must be a unit");
  Mat<T> m = Mat<T>::identity(spec->m, s);
  for (unsigned i = 0; i < spec->m; ++i)
    if (spec->weight(i) == 1) m.at(i, i) = s;
  return GroupElem<T>(spec, std::move(m), typename GroupElem<T>::unchecked_t{});
}

// mu(p) as a plain matrix: diag with p at weight-1 coordinates. Not
// invertible over W_n; used only inside Frobenius factorizations and
// mu(p)-conjugation. Since mu is defined over F_p, this also serves as
// mu^sigma(p).
template <class T>
Mat<T> cochar_p_matrix(const GroupSpec& spec, const T& sample) {
  std::int64_t p = 0;
  // the underlying prime travels with the sample element's ring
  if constexpr (requires { sample.ring()->p; })
    p = static_cast<std::int64_t>(sample.ring()->p);
  else
    p = static_cast<std::int64_t>(sample.frame()->base->p);
  Mat<T> m = Mat<T>::identity(spec.m, sample);
  for (unsigned i = 0; i < spec.m; ++i)
    if (spec.weight(i) == 1) m.at(i, i) = embed_int(sample, p);
  return m;
}

enum class Subgroup { PPlus, UPlus, PMinus, UMinus, Levi, PMinusSigma, UMinusSigma };

// Block-pattern tests induced by the 0/1 weights. The sigma-twisted
// variants alias the untwisted tests (split group, mu over F_p).
template <class T>
bool subgroup_member(const GroupElem<T>& g, Subgroup which) {
  if (which == Subgroup::PMinusSigma) which = Subgroup::PMinus;
  if (which == Subgroup::UMinusSigma) which = Subgroup::UMinus;
  const GroupSpec& spec = *g.spec();
  const Mat<T>& m = g.mat();
  auto diag_blocks_identity = [&] {
    for (unsigned i = 0; i < spec.m; ++i)
      for (unsigned j = 0; j < spec.m; ++j) {
        if (spec.weight(i) != spec.weight(j)) continue;
        if (i == j && !(m.at(i, j) == one_like(m.at(i, j)))) return false;
        if (i != j && !is_zero(m.at(i, j))) return false;
      }
    return true;
  };
  switch (which) {
    case Subgroup::PPlus:
      for (unsigned i = 0; i < spec.m; ++i)
        for (unsigned j = 0; j < spec.m; ++j)
          if (spec.weight(i) < spec.weight(j) && !is_zero(m.at(i, j)))
            return false;
      return true;
    case Subgroup::PMinus:
      for (unsigned i = 0; i < spec.m; ++i)
        for (unsigned j = 0; j < spec.m; ++j)
          if (spec.weight(i) > spec.weight(j) && !is_zero(m.at(i, j)))
            return false;
      return true;
    case Subgroup::UPlus:
      return subgroup_member(g, Subgroup::PPlus) && diag_blocks_identity();
    case Subgroup::UMinus:
      return subgroup_member(g, Subgroup::PMinus) && diag_blocks_identity();
    case Subgroup::Levi:
      for (unsigned i = 0; i < spec.m; ++i)
        for (unsigned j = 0; j < spec.m; ++j)
          if (spec.weight(i) != spec.weight(j) && !is_zero(m.at(i, j)))
            return false;
      return true;
    default:
      return false;
  }
}

// Block-diagonal (Levi) part of an element of P_+. For GSp it inherits the
// similitude factor of the input.
template <class T>
GroupElem<T> levi_part(const GroupElem<T>& g) {
  const GroupSpec& spec = *g.spec();
  Mat<T> m(spec.m, spec.m, zero_like(g.mat().at(0, 0)));
  for (unsigned i = 0; i < spec.m; ++i)
    for (unsigned j = 0; j < spec.m; ++j)
      if (spec.weight(i) == spec.weight(j)) m.at(i, j) = g.mat().at(i, j);
  return GroupElem<T>(g.spec(), std::move(m));
}

template <class T>
struct MuConjugation {
  bool integral = false;
  bool congruent_to_1 = false;
  std::optional<GroupElem<T>> result;  // at one less level of precision
};

// mu(p) h mu(p)^{-1}: multiplies entries with weight step +1 by p and
// divides entries with weight step -1 by p. Integral exactly when the
// latter are all divisible.
template <class T>
MuConjugation<T> mu_p_conjugate(const GroupElem<T>& h) {
  const GroupSpec& spec = *h.spec();
  const Mat<T>& m = h.mat();
  const unsigned prec = min_precision(m);
  if (prec < 2) throw PrecisionExhausted("mu(p)-conjugation needs precision >= 2");
  MuConjugation<T> out;
  Mat<T> r(spec.m, spec.m, zero_like(m.at(0, 0)));
  const T p_elem = embed_int(m.at(0, 0), [&] {
    if constexpr (requires { m.at(0, 0).ring()->p; })
      return static_cast<std::int64_t>(m.at(0, 0).ring()->p);
    else
      return static_cast<std::int64_t>(m.at(0, 0).frame()->base->p);
  }());
  for (unsigned i = 0; i < spec.m; ++i)
    for (unsigned j = 0; j < spec.m; ++j) {
      const int step = spec.weight(i) - spec.weight(j);
      if (step == 1) {
        r.at(i, j) = m.at(i, j) * p_elem;
      } else if (step == -1) {
        try {
          r.at(i, j) = div_p_exact(m.at(i, j));
        } catch (const NotDivisible&) {
          return out;  // integral = false, no matrix
        }
      } else {
        r.at(i, j) = m.at(i, j);
      }
    }
  r = reduce_to_precision_mat(r, prec - 1);
  out.integral = true;
  out.congruent_to_1 = is_identity(reduce_mod_p_mat(r));
  out.result = GroupElem<T>(h.spec(), std::move(r),
                            typename GroupElem<T>::unchecked_t{});
  return out;
}

// --- zip group ---

template <class T>
struct ZipGroupElem {
  GroupElem<T> u_plus;
  GroupElem<T> levi;
  GroupElem<T> u_minus;

  GroupElem<T> p_plus() const { return u_plus * levi; }
  GroupElem<T> p_minus() const { return u_minus * sigma_elem(levi); }
};

template <class T>
ZipGroupElem<T> emu_make(GroupElem<T> u_plus, GroupElem<T> levi,
                         GroupElem<T> u_minus) {
  if (!subgroup_member(u_plus, Subgroup::UPlus))
    throw SubgroupViolation("first component must lie in U+");
  if (!subgroup_member(levi, Subgroup::Levi))
    throw SubgroupViolation("second component must lie in the Levi");
  if (!subgroup_member(u_minus, Subgroup::UMinusSigma))
    throw SubgroupViolation("third component must lie in U-^sigma");
  return ZipGroupElem<T>{std::move(u_plus), std::move(levi), std::move(u_minus)};
}

// Right action g.(p+, p-) = p+^{-1} g p- = m^{-1} u+^{-1} g u- sigma(m).
template <class T>
GroupElem<T> emu_act(const GroupElem<T>& g, const ZipGroupElem<T>& e) {
  return inverse(e.p_plus()) * g * e.p_minus();
}

// --- right U_-^sigma cosets ---

template <class T>
struct ZipCoset {
  GroupElem<T> rep;
};

template <class T>
bool coset_equal(const ZipCoset<T>& a, const ZipCoset<T>& b) {
  if (!a.rep.spec()->same_as(*b.rep.spec())) return false;
  GroupElem<T> h = inverse(a.rep) * b.rep;
  return subgroup_member(h, Subgroup::UMinusSigma);
}

// Action of P_+ on G/U_-^sigma: g.p+ = p+^{-1} g sigma(m) for p+ = u+ m.
template <class T>
ZipCoset<T> coset_act_pplus(const ZipCoset<T>& c, const GroupElem<T>& p_plus) {
  if (!subgroup_member(p_plus, Subgroup::PPlus))
    throw SubgroupViolation("coset action requires an element of P+");
  GroupElem<T> m = levi_part(p_plus);
  return ZipCoset<T>{inverse(p_plus) * c.rep * sigma_elem(m)};
}

// Lexicographically minimal representative over the residue unipotent
// group, which is small enough to sweep for the groups in play. Falls back
// to the stored representative when the sweep would be too large;
// coset_equal stays the authoritative equality.
inline GroupElem<WittElem> canonical_rep(const ZipCoset<WittElem>& c) {
  const GroupSpec& spec = *c.rep.spec();
  const WittRingPtr ring = c.rep.mat().at(0, 0).ring();
  const unsigned m = spec.m;
  std::vector<std::pair<unsigned, unsigned>> free_pos;
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = 0; j < m; ++j)
      if (spec.weight(i) < spec.weight(j)) free_pos.push_back({i, j});
  const std::uint64_t q = ring->q();
  long double sweep = 1;
  for (std::size_t k = 0; k < free_pos.size(); ++k) sweep *= q;
  if (sweep > 4096) return c.rep;

  auto flatten = [&](const Mat<WittElem>& mat) {
    std::vector<std::uint64_t> key;
    for (unsigned i = 0; i < m; ++i)
      for (unsigned j = 0; j < m; ++j)
        for (std::uint64_t v : mat.at(i, j).coeffs()) key.push_back(v);
    return key;
  };
  Mat<WittElem> rep = reduce_mod_p_mat(c.rep.mat());
  std::vector<std::uint64_t> best = flatten(rep);
  Mat<WittElem> best_mat = rep;
  std::vector<std::uint64_t> values(free_pos.size(), 0);
  auto decode = [&](std::uint64_t code) {
    std::vector<std::uint64_t> cc(ring->f);
    for (unsigned i = 0; i < ring->f; ++i) {
      cc[i] = code % ring->p;
      code /= ring->p;
    }
    return WittElem(ring, std::move(cc), 1);
  };
  for (;;) {
    Mat<WittElem> u = Mat<WittElem>::identity(m, WittElem::zero(ring, 1));
    for (std::size_t k = 0; k < free_pos.size(); ++k)
      u.at(free_pos[k].first, free_pos[k].second) = decode(values[k]);
    if (check_member(spec, u).ok) {
      Mat<WittElem> cand = rep * u;
      std::vector<std::uint64_t> key = flatten(cand);
      if (key < best) {
        best = std::move(key);
        best_mat = std::move(cand);
      }
    }
    std::size_t k = 0;
    while (k < values.size()) {
      if (++values[k] < q) break;
      values[k] = 0;
      ++k;
    }
    if (k == values.size() || values.empty()) break;
  }
  return GroupElem<WittElem>(c.rep.spec(), std::move(best_mat),
                             GroupElem<WittElem>::unchecked_t{});
}

// --- random elements (deterministic per Rng stream) ---

namespace grp {

// Strictly-upper block with the GSp constraint built in: for GSp the
// upper-right g x g block B must make w B symmetric (w the antidiagonal).
template <class T>
GroupElem<T> random_u_plus(const GroupSpecPtr& spec, const T& sample, Rng& rng,
                           const std::function<T(Rng&)>& pick) {
  const unsigned m = spec->m;
  Mat<T> u = Mat<T>::identity(m, sample);
  if (spec->kind == GroupKind::GL) {
    for (unsigned i = 0; i < m; ++i)
      for (unsigned j = 0; j < m; ++j)
        if (spec->weight(i) == 1 && spec->weight(j) == 0) u.at(i, j) = pick(rng);
  } else {
    const unsigned g = spec->g();
    // B = w S with S symmetric
    Mat<T> s(g, g, zero_like(sample));
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = i; j < g; ++j) {
        T v = pick(rng);
        s.at(i, j) = v;
        s.at(j, i) = v;
      }
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = 0; j < g; ++j) u.at(i, g + j) = s.at(g - 1 - i, j);
  }
  return GroupElem<T>(spec, std::move(u));
}

template <class T>
GroupElem<T> random_u_minus(const GroupSpecPtr& spec, const T& sample, Rng& rng,
                            const std::function<T(Rng&)>& pick) {
  GroupElem<T> u = random_u_plus(spec, sample, rng, pick);
  return GroupElem<T>(spec, u.mat().transpose());
}

// Random invertible block via rejection on the determinant.
template <class T>
Mat<T> random_invertible_block(unsigned size, const T& sample, Rng& rng,
                               const std::function<T(Rng&)>& pick) {
  for (;;) {
    Mat<T> a(size, size, zero_like(sample));
    for (unsigned i = 0; i < size; ++i)
      for (unsigned j = 0; j < size; ++j) a.at(i, j) = pick(rng);
    if (is_unit(det(a))) return a;
  }
}

template <class T>
GroupElem<T> random_levi(const GroupSpecPtr& spec, const T& sample, Rng& rng,
                         const std::function<T(Rng&)>& pick,
                         const std::function<T(Rng&)>& pick_unit) {
  const unsigned m = spec->m;
  Mat<T> l = Mat<T>::identity(m, sample);
  if (spec->kind == GroupKind::GL) {
    auto ones = spec->weight_one_positions();
    auto zeros = spec->weight_zero_positions();
    for (const auto& pos : {ones, zeros}) {
      if (pos.empty()) continue;
      Mat<T> blk = random_invertible_block(static_cast<unsigned>(pos.size()),
                                           sample, rng, pick);
      for (unsigned i = 0; i < pos.size(); ++i)
        for (unsigned j = 0; j < pos.size(); ++j) l.at(pos[i], pos[j]) = blk.at(i, j);
    }
  } else {
    // (A, c) -> diag(A, c w (A^T)^{-1} w)
    const unsigned g = spec->g();
    Mat<T> a = random_invertible_block(g, sample, rng, pick);
    T c = pick_unit(rng);
    Mat<T> w(g, g, zero_like(sample));
    for (unsigned i = 0; i < g; ++i) w.at(i, g - 1 - i) = one_like(sample);
    Mat<T> dblk = w * inverse(a.transpose()) * w;
    dblk = dblk.map([&](const T& v) { return v * c; });
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = 0; j < g; ++j) {
        l.at(i, j) = a.at(i, j);
        l.at(g + i, g + j) = dblk.at(i, j);
      }
  }
  return GroupElem<T>(spec, std::move(l));
}

}  // namespace grp

}  // namespace eozip
