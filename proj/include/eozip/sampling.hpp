#pragma once

// Seeded random elements of the rings and groups. Everything is a pure
// function of the Rng stream, so identical seeds give identical objects.

#include <functional>

#include "eozip/group.hpp"
#include "eozip/poly.hpp"
#include "eozip/witt.hpp"

namespace eozip {

template <class T>
struct ScalarSampler;

template <>
struct ScalarSampler<WittElem> {
  WittRingPtr ring;
  unsigned prec;

  WittElem sample() const { return WittElem::zero(ring, prec); }
  WittElem any(Rng& rng) const { return random_elem(ring, rng, prec); }
  WittElem unit(Rng& rng) const { return random_unit(ring, rng, prec); }
  std::uint64_t p() const { return ring->p; }
};

template <>
struct ScalarSampler<PolyElem> {
  PolyFramePtr frame;
  unsigned prec;
  unsigned max_degree = 2;

  PolyElem sample() const { return PolyElem::zero(frame, prec); }
  PolyElem any(Rng& rng) const {
    std::vector<WittElem> c;
    for (unsigned i = 0; i <= max_degree; ++i)
      c.push_back(random_elem(frame->base, rng, prec));
    return PolyElem(frame, std::move(c), prec);
  }
  // unit constant plus p times a random polynomial
  PolyElem unit(Rng& rng) const {
    PolyElem u = PolyElem::constant(frame, random_unit(frame->base, rng, prec));
    PolyElem tail = any(rng);
    return u + embed_int(u, static_cast<std::int64_t>(frame->base->p)) * tail;
  }
  std::uint64_t p() const { return frame->base->p; }
};

template <class T>
GroupElem<T> random_u_plus(const GroupSpecPtr& spec, const ScalarSampler<T>& s,
                           Rng& rng) {
  return grp::random_u_plus<T>(spec, s.sample(), rng,
                               [&](Rng& r) { return s.any(r); });
}

template <class T>
GroupElem<T> random_u_minus(const GroupSpecPtr& spec, const ScalarSampler<T>& s,
                            Rng& rng) {
  return grp::random_u_minus<T>(spec, s.sample(), rng,
                                [&](Rng& r) { return s.any(r); });
}

template <class T>
GroupElem<T> random_levi(const GroupSpecPtr& spec, const ScalarSampler<T>& s,
                         Rng& rng) {
  return grp::random_levi<T>(spec, s.sample(), rng,
                             [&](Rng& r) { return s.any(r); },
                             [&](Rng& r) { return s.unit(r); });
}

template <class T>
GroupElem<T> random_p_plus(const GroupSpecPtr& spec, const ScalarSampler<T>& s,
                           Rng& rng) {
  return random_levi(spec, s, rng) * random_u_plus(spec, s, rng);
}

// Random element congruent to 1 mod p, built exactly inside the group as
// u_-(p C) levi(1 + p A) u_+(p B).
template <class T>
GroupElem<T> random_k1(const GroupSpecPtr& spec, const ScalarSampler<T>& s,
                       Rng& rng) {
  const T p_elem = embed_int(s.sample(), static_cast<std::int64_t>(s.p()));
  auto pick_p = [&](Rng& r) { return p_elem * s.any(r); };
  auto pick_1p = [&](Rng& r) {
    return one_like(p_elem) + p_elem * s.any(r);
  };
  GroupElem<T> um = grp::random_u_minus<T>(spec, s.sample(), rng, pick_p);
  GroupElem<T> up = grp::random_u_plus<T>(spec, s.sample(), rng, pick_p);
  // Levi block congruent to 1: I + p (random); invertible automatically.
  const unsigned m = spec->m;
  Mat<T> l = Mat<T>::identity(m, s.sample());
  if (spec->kind == GroupKind::GL) {
    for (unsigned i = 0; i < m; ++i)
      for (unsigned j = 0; j < m; ++j)
        if (spec->weight(i) == spec->weight(j)) {
          T delta = pick_p(rng);
          l.at(i, j) = (i == j) ? one_like(delta) + delta : delta;
        }
  } else {
    const unsigned g = spec->g();
    Mat<T> a = Mat<T>::identity(g, s.sample());
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = 0; j < g; ++j)
        a.at(i, j) = (i == j) ? one_like(p_elem) + pick_p(rng) : pick_p(rng);
    T c = pick_1p(rng);
    Mat<T> w(g, g, zero_like(s.sample()));
    for (unsigned i = 0; i < g; ++i) w.at(i, g - 1 - i) = one_like(s.sample());
    Mat<T> dblk = (w * inverse(a.transpose()) * w)
                      .map([&](const T& v) { return v * c; });
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = 0; j < g; ++j) {
        l.at(i, j) = a.at(i, j);
        l.at(g + i, g + j) = dblk.at(i, j);
      }
  }
  GroupElem<T> levi(spec, std::move(l));
  return um * levi * up;
}

// Random group element. GL over a Witt ring uses uniform rejection on the
// determinant; everything else walks over subgroup generators, which cover
// the group over local rings.
template <class T>
GroupElem<T> random_group_elem(const GroupSpecPtr& spec,
                               const ScalarSampler<T>& s, Rng& rng) {
  if constexpr (std::is_same_v<T, WittElem>) {
    if (spec->kind == GroupKind::GL) {
      for (;;) {
        Mat<T> m(spec->m, spec->m, s.sample());
        for (unsigned i = 0; i < spec->m; ++i)
          for (unsigned j = 0; j < spec->m; ++j) m.at(i, j) = s.any(rng);
        if (is_unit(det(m))) return GroupElem<T>(spec, std::move(m));
      }
    }
  }
  GroupElem<T> acc = GroupElem<T>::identity(spec, s.sample());
  for (int step = 0; step < 12; ++step) {
    switch (rng.below(3)) {
      case 0:
        acc = acc * random_u_plus(spec, s, rng);
        break;
      case 1:
        acc = acc * random_u_minus(spec, s, rng);
        break;
      default:
        acc = acc * random_levi(spec, s, rng);
        break;
    }
  }
  return acc;
}

}  // namespace eozip
