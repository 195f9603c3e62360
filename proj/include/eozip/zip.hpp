#pragma once

// The integral pipeline for the zip invariant of a Dieudonné module with
// G-structure: trivialize, factor the trivialized Frobenius through mu(p),
// reduce mod p, project to G/U_-^sigma. The same coset is computed a second
// way from the mod-p F-zip data, and brute-force verifiers check lift
// independence, frame independence, P_+ equivariance and the agreement of
// the two routes.

#include <algorithm>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eozip/dieudonne.hpp"
#include "eozip/group.hpp"
#include "eozip/matrix.hpp"
#include "eozip/poly.hpp"
#include "eozip/sampling.hpp"

namespace eozip {

template <class T>
struct TrivializedPoint {
  DieudonneModule<T> module;
  GroupElem<T> beta;
};

// beta must lie in the group and carry the standard weight-1 coordinate
// span onto the Hodge filtration, as submodules at full precision.
template <class T>
TrivializedPoint<T> make_trivialized_point(DieudonneModule<T> module,
                                           GroupElem<T> beta) {
  if (!beta.spec()->same_as(*module.spec))
    throw ShapeMismatch("trivialization for a different group");
  Mat<T> y = inverse(beta.mat()) * module.hodge;
  auto ones = module.spec->weight_one_positions();
  auto zeros = module.spec->weight_zero_positions();
  for (unsigned i : zeros)
    for (unsigned j = 0; j < y.cols(); ++j)
      if (!is_zero(y.at(i, j)))
        throw NoTrivialization("beta does not carry the weight-1 span onto the Hodge filtration");
  Mat<T> top(static_cast<unsigned>(ones.size()), y.cols(), zero_like(y.at(0, 0)));
  for (unsigned a = 0; a < ones.size(); ++a)
    for (unsigned j = 0; j < y.cols(); ++j) top.at(a, j) = y.at(ones[a], j);
  if (!is_unit(det(top)))
    throw NoTrivialization("beta image and Hodge filtration differ at full precision");
  return TrivializedPoint<T>{std::move(module), std::move(beta)};
}

template <class T>
TrivializedPoint<T> unchecked_trivialized_point(DieudonneModule<T> module,
                                                GroupElem<T> beta) {
  return TrivializedPoint<T>{std::move(module), std::move(beta)};
}

namespace detail {

// GL completion: standard basis vectors at the rows where the Hodge block
// has no pivot mod p.
template <class T>
Mat<T> complete_gl(const DieudonneModule<T>& d) {
  const unsigned m = d.rank();
  Mat<T> red = reduce_mod_p_mat(d.hodge).transpose();
  std::vector<unsigned> piv = row_reduce(red);
  if (piv.size() != d.hodge.cols())
    throw NoTrivialization("Hodge block has deficient rank mod p");
  const GroupSpec& spec = *d.spec;
  Mat<T> beta = Mat<T>::identity(m, zero_like(d.hodge.at(0, 0)));
  auto ones = spec.weight_one_positions();
  auto zeros = spec.weight_zero_positions();
  for (unsigned j = 0; j < ones.size(); ++j)
    for (unsigned i = 0; i < m; ++i) beta.at(i, ones[j]) = d.hodge.at(i, j);
  std::vector<bool> taken(m, false);
  for (unsigned r : piv) taken[r] = true;
  unsigned out = 0;
  for (unsigned i = 0; i < m; ++i) {
    if (taken[i]) continue;
    for (unsigned k = 0; k < m; ++k)
      beta.at(k, zeros[out]) = (k == i) ? one_like(beta.at(0, 0))
                                        : zero_like(beta.at(0, 0));
    ++out;
  }
  return beta;
}

// GSp completion: hyperbolic partners for the (necessarily isotropic)
// Hodge columns, solved one at a time against the symplectic pairing.
template <class T>
Mat<T> complete_gsp(const DieudonneModule<T>& d) {
  const GroupSpec& spec = *d.spec;
  const unsigned m = spec.m, g = spec.g();
  const T zero = zero_like(d.hodge.at(0, 0));
  Mat<T> j = gram_matrix(spec, zero);
  auto pair_with = [&](const std::vector<T>& a, const std::vector<T>& b) {
    T acc = zero;
    for (unsigned r = 0; r < m; ++r)
      for (unsigned c = 0; c < m; ++c) {
        if (spec.j_sign(r, c) == 0) continue;
        acc = acc + a[r] * j.at(r, c) * b[c];
      }
    return acc;
  };
  if (rank_of(reduce_mod_p_mat(d.hodge)) != g)
    throw NoTrivialization("Hodge block has deficient rank mod p");
  std::vector<std::vector<T>> given;
  for (unsigned c = 0; c < g; ++c) given.push_back(d.hodge.column(c));
  for (unsigned a = 0; a < g; ++a)
    for (unsigned b = a + 1; b < g; ++b)
      if (!is_zero(pair_with(given[a], given[b])))
        throw NoTrivialization("Hodge filtration is not isotropic for the symplectic form");

  // row vectors v^T J for all already-fixed columns
  std::vector<std::vector<T>> partners;
  for (unsigned i = 0; i < g; ++i) {
    const unsigned nrows = g + static_cast<unsigned>(partners.size());
    Mat<T> a(nrows, m, zero);
    std::vector<T> b(nrows, zero);
    for (unsigned r = 0; r < g; ++r) {
      std::vector<T> row(m, zero);
      for (unsigned c = 0; c < m; ++c) {
        T acc = zero;
        for (unsigned k = 0; k < m; ++k)
          if (spec.j_sign(k, c) != 0) acc = acc + given[r][k] * j.at(k, c);
        row[c] = acc;
      }
      for (unsigned c = 0; c < m; ++c) a.at(r, c) = row[c];
      b[r] = (r == i) ? one_like(zero) : zero;  // similitude factor 1
    }
    for (unsigned k = 0; k < partners.size(); ++k) {
      for (unsigned c = 0; c < m; ++c) {
        T acc = zero;
        for (unsigned kk = 0; kk < m; ++kk)
          if (spec.j_sign(kk, c) != 0) acc = acc + partners[k][kk] * j.at(kk, c);
        a.at(g + k, c) = acc;
      }
      b[g + k] = zero;
    }
    std::vector<T> x;
    try {
      x = solve_unit_pivot(a, b);
    } catch (const InternalError&) {
      throw NoTrivialization("symplectic completion has no solution");
    }
    partners.push_back(std::move(x));
  }
  Mat<T> beta(m, m, zero);
  for (unsigned c = 0; c < g; ++c) beta.set_column(c, given[c]);
  for (unsigned i = 0; i < g; ++i) beta.set_column(m - 1 - i, partners[i]);
  return beta;
}

template <class T>
std::int64_t prime_of(const T& sample) {
  if constexpr (requires { sample.ring()->p; })
    return static_cast<std::int64_t>(sample.ring()->p);
  else
    return static_cast<std::int64_t>(sample.frame()->base->p);
}

inline ScalarSampler<WittElem> sampler_like(const WittElem& s, unsigned prec) {
  return ScalarSampler<WittElem>{s.ring(), prec};
}
inline ScalarSampler<PolyElem> sampler_like(const PolyElem& s, unsigned prec) {
  return ScalarSampler<PolyElem>{s.frame(), prec, 2};
}

template <class T>
std::string dump_matrix(const Mat<T>& m) {
  std::ostringstream os;
  os << "[";
  for (unsigned i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (unsigned j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      if constexpr (requires { m.at(i, j).coeffs(); } &&
                    std::is_same_v<T, WittElem>) {
        const auto& c = m.at(i, j).coeffs();
        if (c.size() == 1) {
          os << c[0];
        } else {
          os << "(";
          for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
          os << ")";
        }
      } else {
        os << "poly";
      }
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace detail

// Completes the Hodge filtration to a group element with the weight-1
// columns spanning it. Seed 0 gives the canonical completion; other seeds
// explore the P_+-orbit of solutions.
template <class T>
TrivializedPoint<T> trivialize(const DieudonneModule<T>& d, std::uint64_t seed) {
  Mat<T> b0 = d.spec->kind == GroupKind::GL ? detail::complete_gl(d)
                                            : detail::complete_gsp(d);
  GroupElem<T> beta = [&] {
    try {
      return GroupElem<T>(d.spec, std::move(b0));
    } catch (const NotMember& e) {
      throw NoTrivialization(std::string("completion is not a group element: ") +
                             e.what());
    }
  }();
  if (seed != 0) {
    Rng rng = Rng::stream(seed, 0xbe7aULL);
    auto s = detail::sampler_like(d.hodge.at(0, 0), min_precision(d.hodge));
    beta = beta * random_p_plus(d.spec, s, rng);
  }
  return make_trivialized_point(d, std::move(beta));
}

template <class T>
struct TrivializedFrobenius {
  GroupElem<T> integral;  // one precision level below the input
  Mat<T> mu_sigma_p;      // the diagonal p-part: F_triv = integral * mu_sigma_p
};

// F_triv = beta^{-1} F sigma(beta) has its weight-1 columns exactly
// divisible by p; dividing them yields the integral part, which lies in
// the group at the reduced precision.
template <class T>
TrivializedFrobenius<T> trivialized_frobenius(const TrivializedPoint<T>& x) {
  const DieudonneModule<T>& d = x.module;
  const unsigned prec = min_precision(d.frob);
  if (prec < 2)
    throw PrecisionExhausted("trivialized Frobenius needs precision >= 2");
  Mat<T> t = inverse(x.beta.mat()) * d.frob * frobenius_mat(x.beta.mat());
  Mat<T> r(t.rows(), t.cols(), zero_like(t.at(0, 0)));
  for (unsigned j = 0; j < t.cols(); ++j)
    for (unsigned i = 0; i < t.rows(); ++i)
      r.at(i, j) = d.spec->weight(j) == 1
                       ? div_p_exact(t.at(i, j))
                       : reduce_to_precision(t.at(i, j), prec - 1);
  return TrivializedFrobenius<T>{GroupElem<T>(d.spec, std::move(r)),
                                 cochar_p_matrix(*d.spec, t.at(0, 0))};
}

template <class T>
struct ZipInvariant {
  GroupElem<T> integral_part;  // over W_{n-1}
  ZipCoset<T> coset;           // over the residue ring
};

template <class T>
ZipInvariant<T> zip_invariant(const TrivializedPoint<T>& x) {
  GroupElem<T> integral = trivialized_frobenius(x).integral;
  ZipCoset<T> coset{reduce_mod_p_elem(integral)};
  return ZipInvariant<T>{std::move(integral), std::move(coset)};
}

// --- the F-zip route ---

namespace detail {

// Residue-level span membership and Verschiebung solving, uniform over the
// finite field and (for constant families) the polynomial residue ring,
// where polynomial vectors are handled one t-coefficient at a time.

inline std::vector<std::vector<WittElem>> t_slices(const std::vector<PolyElem>& v,
                                                   const WittRingPtr& base) {
  std::size_t maxlen = 1;
  for (const auto& e : v) maxlen = std::max(maxlen, e.coeffs().size());
  std::vector<std::vector<WittElem>> out(
      maxlen, std::vector<WittElem>(v.size(), WittElem::zero(base, 1)));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t k = 0; k < v[i].coeffs().size(); ++k)
      out[k][i] = v[i].coeffs()[k].reduce_to_precision(1);
  return out;
}

inline Mat<WittElem> constant_entries(const Mat<PolyElem>& m) {
  const WittRingPtr& base = m.at(0, 0).frame()->base;
  Mat<WittElem> r(m.rows(), m.cols(), WittElem::zero(base, m.at(0, 0).precision()));
  for (unsigned i = 0; i < m.rows(); ++i)
    for (unsigned j = 0; j < m.cols(); ++j) {
      const auto& c = m.at(i, j).coeffs();
      if (c.size() > 1)
        throw UnsupportedShape("module matrices must be constant families");
      r.at(i, j) = c.empty() ? WittElem::zero(base, m.at(i, j).precision()) : c[0];
    }
  return r;
}

inline DieudonneModule<WittElem> constant_module(const DieudonneModule<PolyElem>& d) {
  return DieudonneModule<WittElem>{d.spec, constant_entries(d.frob),
                                   constant_entries(d.versch),
                                   constant_entries(d.hodge)};
}

inline bool residue_in_span(const Mat<WittElem>& basis,
                            const std::vector<WittElem>& v) {
  return in_span(basis, v);
}
inline bool residue_in_span(const Mat<WittElem>& basis,
                            const std::vector<PolyElem>& v) {
  const WittRingPtr& base = basis.at(0, 0).ring();
  for (const auto& slice : t_slices(v, base))
    if (!in_span(basis, slice)) return false;
  return true;
}

inline std::vector<WittElem> residue_solve(const Mat<WittElem>& a,
                                           const std::vector<WittElem>& b) {
  return solve_field(a, b);
}
inline std::vector<PolyElem> residue_solve(const Mat<WittElem>& a,
                                           const std::vector<PolyElem>& b) {
  const PolyFramePtr& fr = b.front().frame();
  std::vector<PolyElem> x(a.cols(), PolyElem::zero(fr, 1));
  auto slices = t_slices(b, a.at(0, 0).ring());
  for (std::size_t k = 0; k < slices.size(); ++k) {
    std::vector<WittElem> xk = solve_field(a, slices[k]);
    for (unsigned c = 0; c < a.cols(); ++c) {
      // x[c] += xk[c] t^k
      std::vector<WittElem> mono(k + 1, WittElem::zero(a.at(0, 0).ring(), 1));
      mono[k] = xk[c];
      x[c] = x[c] + PolyElem(fr, std::move(mono), 1);
    }
  }
  return x;
}

template <class T>
std::vector<T> mat_vec(const Mat<T>& m, const std::vector<T>& v) {
  std::vector<T> r(m.rows(), zero_like(m.at(0, 0)));
  for (unsigned i = 0; i < m.rows(); ++i)
    for (unsigned j = 0; j < m.cols(); ++j) r[i] = r[i] + m.at(i, j) * v[j];
  return r;
}

}  // namespace detail

// Computes the coset from the mod-p side: theta' = Γ sigma(beta) reduced
// mod p, cross-checked to land in the conjugate-filtration trivializations
// and to match the zip isomorphism [Vbar]^{-1} ⊕ Fbar on the Hodge summand.
// The coset lives over the chosen chart, so comparisons against the
// integral route must use the same trivialization seed.
template <class T>
ZipCoset<T> zeta_invariant(const DieudonneModule<T>& d, std::uint64_t seed = 0) {
  TrivializedPoint<T> x = trivialize(d, seed);
  const unsigned prec = min_precision(d.frob);
  if (prec < 2) throw PrecisionExhausted("zeta route needs precision >= 2");

  // theta' = Γ sigma(beta) = the p-divided weight-1 columns of F sigma(beta)
  Mat<T> c = d.frob * frobenius_mat(x.beta.mat());
  Mat<T> theta(c.rows(), c.cols(), zero_like(c.at(0, 0)));
  for (unsigned j = 0; j < c.cols(); ++j)
    for (unsigned i = 0; i < c.rows(); ++i)
      theta.at(i, j) = d.spec->weight(j) == 1
                           ? div_p_exact(c.at(i, j))
                           : reduce_to_precision(c.at(i, j), prec - 1);
  Mat<T> theta_bar = reduce_mod_p_mat(theta);

  // conjugate filtration from the residue module
  Mat<WittElem> conj = [&] {
    if constexpr (std::is_same_v<T, WittElem>) {
      return fzip_of(d).conjugate;
    } else {
      return fzip_of(detail::constant_module(d)).conjugate;
    }
  }();
  Mat<WittElem> vbar = [&] {
    if constexpr (std::is_same_v<T, WittElem>) {
      return reduce_mod_p_mat(d.versch);
    } else {
      return detail::constant_entries(reduce_mod_p_mat(d.versch));
    }
  }();

  // theta' carries the standard weight-0 coordinates onto the conjugate
  // filtration
  for (unsigned j : d.spec->weight_zero_positions())
    if (!detail::residue_in_span(conj, theta_bar.column(j)))
      throw ExactnessFailure(
          "theta' does not carry the weight-0 coordinates into the conjugate filtration");
  {
    Mat<T> zcols(theta_bar.rows(),
                 static_cast<unsigned>(d.spec->weight_zero_positions().size()),
                 zero_like(theta_bar.at(0, 0)));
    unsigned out = 0;
    for (unsigned j : d.spec->weight_zero_positions()) {
      for (unsigned i = 0; i < theta_bar.rows(); ++i)
        zcols.at(i, out) = theta_bar.at(i, j);
      ++out;
    }
    if constexpr (std::is_same_v<T, WittElem>) {
      if (rank_of(zcols) != conj.cols())
        throw ExactnessFailure("theta' weight-0 image has deficient rank");
    }
  }

  // zip-isomorphism diagram on the Hodge summand: [Vbar]^{-1}(sigma(h)) =
  // Γbar(sigma(h)) modulo the conjugate filtration, where h runs over the
  // Hodge basis induced by beta and Γbar(sigma(h)) is the theta'-column at
  // the matching weight-1 position
  auto ones = d.spec->weight_one_positions();
  Mat<T> beta_bar = reduce_mod_p_mat(x.beta.mat());
  for (unsigned jc = 0; jc < ones.size(); ++jc) {
    std::vector<T> target = beta_bar.column(ones[jc]);
    for (auto& v : target) v = frobenius(v);
    std::vector<T> via_v = detail::residue_solve(vbar, target);
    std::vector<T> via_gamma = theta_bar.column(ones[jc]);
    std::vector<T> diff(via_v.size(), zero_like(via_v.front()));
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = via_v[i] - via_gamma[i];
    if (!detail::residue_in_span(conj, diff))
      throw ExactnessFailure("zip-isomorphism diagram does not commute");
  }

  GroupElem<T> rep(d.spec, inverse(beta_bar) * theta_bar,
                   typename GroupElem<T>::unchecked_t{});
  return ZipCoset<T>{std::move(rep)};
}

// --- brute-force verifiers ---

enum class VerifyProperty { LiftIndependence, FrameIndependence, Equivariance, Comparison };

struct VerifyReport {
  VerifyProperty property;
  unsigned trials = 0;
  unsigned failures = 0;
  std::string counterexample;  // dump from the lowest-index failing trial

  bool pass() const { return failures == 0; }
};

namespace detail {

// Deterministic seed-split across workers; the merge keeps counts and the
// lowest-index counterexample, so scheduling cannot change the report.
inline VerifyReport run_trials(
    VerifyProperty prop, unsigned trials, std::uint64_t seed,
    const std::function<std::optional<std::string>(Rng&, unsigned)>& trial) {
  VerifyReport rep;
  rep.property = prop;
  rep.trials = trials;
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
  if (workers == 0) workers = 1;
  if (trials < 16) workers = 1;
  struct Chunk {
    unsigned failures = 0;
    unsigned first_fail = ~0u;
    std::string dump;
  };
  std::vector<std::future<Chunk>> futs;
  for (unsigned w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w] {
      Chunk ch;
      for (unsigned t = w; t < trials; t += workers) {
        Rng rng = Rng::stream(seed, t);
        std::optional<std::string> fail;
        try {
          fail = trial(rng, t);
        } catch (const Error& e) {
          fail = std::string("error: ") + e.what();
        }
        if (fail) {
          ++ch.failures;
          if (t < ch.first_fail) {
            ch.first_fail = t;
            ch.dump = "trial " + std::to_string(t) + ": " + *fail;
          }
        }
      }
      return ch;
    }));
  }
  unsigned best = ~0u;
  for (auto& f : futs) {
    Chunk ch = f.get();
    rep.failures += ch.failures;
    if (ch.first_fail < best) {
      best = ch.first_fail;
      rep.counterexample = ch.dump;
    }
  }
  return rep;
}

// A lift of the base chart moved by an element congruent to 1 mod p: the
// module keeps F and V, the Hodge filtration moves to the new weight-1
// image, beta moves by right multiplication. Mod p nothing changes.
template <class T>
TrivializedPoint<T> twisted_lift(const TrivializedPoint<T>& base,
                                 const GroupElem<T>& k) {
  GroupElem<T> beta = base.beta * k;
  DieudonneModule<T> module = base.module;
  auto ones = module.spec->weight_one_positions();
  Mat<T> hodge(module.rank(), module.hodge.cols(),
               zero_like(module.hodge.at(0, 0)));
  for (unsigned j = 0; j < ones.size(); ++j)
    for (unsigned i = 0; i < module.rank(); ++i)
      hodge.at(i, j) = beta.mat().at(i, ones[j]);
  module.hodge = std::move(hodge);
  return TrivializedPoint<T>{std::move(module), std::move(beta)};
}

}  // namespace detail

template <class T>
VerifyReport verify(const DieudonneModule<T>& d, VerifyProperty prop,
                    unsigned trials, std::uint64_t seed);

namespace detail {

// An error raised while preparing the base chart means the input already
// violates the property's premises; the report carries it as a failure
// instead of escaping.
inline VerifyReport setup_failure(VerifyProperty prop, unsigned trials,
                                  const std::string& what) {
  VerifyReport rep;
  rep.property = prop;
  rep.trials = trials;
  rep.failures = trials;
  rep.counterexample = "setup: " + what;
  return rep;
}

template <class T>
VerifyReport verify_lift_independence(const DieudonneModule<T>& d,
                                      unsigned trials, std::uint64_t seed) {
  TrivializedPoint<T> base = trivialize(d, 0);
  ZipCoset<T> c0 = zip_invariant(base).coset;
  const unsigned prec = min_precision(d.frob);
  return run_trials(
      VerifyProperty::LiftIndependence, trials, seed,
      [&](Rng& rng, unsigned t) -> std::optional<std::string> {
        auto s = sampler_like(d.frob.at(0, 0), prec);
        GroupElem<T> k = random_k1(d.spec, s, rng);
        if (t % 2 == 1) {
          // beta-only move: stay inside P_+ so the filtration is fixed
          const T p_elem = embed_int(s.sample(), prime_of(s.sample()));
          auto pick_p = [&](Rng& r) { return p_elem * s.any(r); };
          GroupElem<T> up = grp::random_u_plus<T>(d.spec, s.sample(), rng, pick_p);
          k = up;
        }
        TrivializedPoint<T> moved = twisted_lift(base, k);
        ZipCoset<T> c1 = zip_invariant(moved).coset;
        if (!coset_equal(c0, c1))
          return "cosets differ; twist k = " + dump_matrix(k.mat()) +
                 ", invariant " + dump_matrix(c1.rep.mat()) + " vs base " +
                 dump_matrix(c0.rep.mat());
        return std::nullopt;
      });
}

template <class T>
VerifyReport verify_equivariance(const DieudonneModule<T>& d, unsigned trials,
                                 std::uint64_t seed) {
  TrivializedPoint<T> base = trivialize(d, 0);
  ZipInvariant<T> inv0 = zip_invariant(base);
  const unsigned prec = min_precision(d.frob);
  return run_trials(
      VerifyProperty::Equivariance, trials, seed,
      [&](Rng& rng, unsigned) -> std::optional<std::string> {
        auto s = sampler_like(d.frob.at(0, 0), prec);
        GroupElem<T> pp = random_p_plus(d.spec, s, rng);
        TrivializedPoint<T> moved = make_trivialized_point(
            d, base.beta * pp);
        ZipCoset<T> lhs = zip_invariant(moved).coset;
        ZipCoset<T> rhs = coset_act_pplus(inv0.coset, reduce_mod_p_elem(pp));
        if (!coset_equal(lhs, rhs))
          return "equivariance fails for p+ = " + dump_matrix(pp.mat());
        return std::nullopt;
      });
}

template <class T>
VerifyReport verify_comparison(const DieudonneModule<T>& d, unsigned trials,
                               std::uint64_t seed) {
  ZipCoset<T> zc = zeta_invariant(d);
  TrivializedPoint<T> base = trivialize(d, 0);
  const unsigned prec = min_precision(d.frob);
  return run_trials(
      VerifyProperty::Comparison, trials, seed,
      [&](Rng& rng, unsigned t) -> std::optional<std::string> {
        auto s = sampler_like(d.frob.at(0, 0), prec);
        TrivializedPoint<T> point =
            t == 0 ? base : twisted_lift(base, random_k1(d.spec, s, rng));
        ZipCoset<T> ec = zip_invariant(point).coset;
        if (!coset_equal(ec, zc))
          return "integral route " + dump_matrix(ec.rep.mat()) +
                 " and F-zip route " + dump_matrix(zc.rep.mat()) + " disagree";
        return std::nullopt;
      });
}

inline DieudonneModule<PolyElem> to_poly_module(
    const DieudonneModule<WittElem>& d, const PolyFramePtr& frame) {
  auto lift = [&](const Mat<WittElem>& m) {
    Mat<PolyElem> r(m.rows(), m.cols(),
                    PolyElem::zero(frame, m.at(0, 0).precision()));
    for (unsigned i = 0; i < m.rows(); ++i)
      for (unsigned j = 0; j < m.cols(); ++j)
        r.at(i, j) = PolyElem::constant(frame, m.at(i, j));
    return r;
  };
  return DieudonneModule<PolyElem>{d.spec, lift(d.frob), lift(d.versch),
                                   lift(d.hodge)};
}

inline GroupElem<PolyElem> transport_elem(const GroupElem<PolyElem>& g,
                                          const PolyFramePtr& frame) {
  Mat<PolyElem> m = g.mat().map(
      [&](const PolyElem& v) { return transport_to_frame(v, frame); });
  return GroupElem<PolyElem>(g.spec(), std::move(m),
                             GroupElem<PolyElem>::unchecked_t{});
}

// Lem-frame setting: a constant family over two frames that differ by
// sigma_2(t) = t^p + p c(t); the same polynomial trivialization is used in
// both (parallel transport is the identity on constant families), and the
// cosets over the residue polynomial ring must agree.
inline VerifyReport verify_frame_independence(const DieudonneModule<WittElem>& d,
                                              unsigned trials,
                                              std::uint64_t seed) {
  const WittRingPtr& base = d.frob.at(0, 0).ring();
  const unsigned prec = min_precision(d.frob);
  TrivializedPoint<WittElem> base_point = trivialize(d, 0);
  return run_trials(
      VerifyProperty::FrameIndependence, trials, seed,
      [&](Rng& rng, unsigned) -> std::optional<std::string> {
        PolyFramePtr f1 = make_standard_frame(base);
        // sigma_2(t) = t^p + p c(t), deg c <= 2
        std::vector<WittElem> st(base->p + 1, WittElem::zero(base, base->n));
        st[base->p] = WittElem::one(base, base->n);
        const WittElem p_elem =
            WittElem::from_int(base, static_cast<std::int64_t>(base->p), base->n);
        for (unsigned k = 0; k <= 2; ++k) {
          WittElem coeff = p_elem * random_elem(base, rng, base->n);
          if (k < st.size())
            st[k] = st[k] + coeff;
          else
            st.push_back(coeff);
        }
        PolyFramePtr f2 = make_poly_frame(base, st);

        DieudonneModule<PolyElem> d1 = to_poly_module(d, f1);
        DieudonneModule<PolyElem> d2 = to_poly_module(d, f2);

        ScalarSampler<PolyElem> ps{f1, prec, 2};
        Mat<PolyElem> beta0_mat(d.spec->m, d.spec->m, PolyElem::zero(f1, prec));
        for (unsigned i = 0; i < d.spec->m; ++i)
          for (unsigned j = 0; j < d.spec->m; ++j)
            beta0_mat.at(i, j) =
                PolyElem::constant(f1, base_point.beta.mat().at(i, j));
        GroupElem<PolyElem> beta0(d1.spec, std::move(beta0_mat),
                                  GroupElem<PolyElem>::unchecked_t{});
        GroupElem<PolyElem> beta1 = beta0 * random_p_plus(d1.spec, ps, rng);
        GroupElem<PolyElem> beta2 = transport_elem(beta1, f2);

        TrivializedPoint<PolyElem> x1 =
            twisted_lift(TrivializedPoint<PolyElem>{d1, beta1},
                         GroupElem<PolyElem>::identity(d1.spec, ps.sample()));
        TrivializedPoint<PolyElem> x2 =
            twisted_lift(TrivializedPoint<PolyElem>{d2, beta2},
                         GroupElem<PolyElem>::identity(d2.spec,
                                                       PolyElem::zero(f2, prec)));

        ZipCoset<PolyElem> c1 = zip_invariant(x1).coset;
        ZipCoset<PolyElem> c2 = zip_invariant(x2).coset;
        GroupElem<PolyElem> rep2 = transport_elem(c2.rep, f1);
        if (!coset_equal(c1, ZipCoset<PolyElem>{rep2}))
          return "cosets over the residue polynomial ring differ";
        return std::nullopt;
      });
}

}  // namespace detail

template <class T>
VerifyReport verify(const DieudonneModule<T>& d, VerifyProperty prop,
                    unsigned trials, std::uint64_t seed) {
  try {
    switch (prop) {
      case VerifyProperty::LiftIndependence:
        return detail::verify_lift_independence(d, trials, seed);
      case VerifyProperty::Equivariance:
        return detail::verify_equivariance(d, trials, seed);
      case VerifyProperty::Comparison:
        return detail::verify_comparison(d, trials, seed);
      case VerifyProperty::FrameIndependence:
        if constexpr (std::is_same_v<T, WittElem>) {
          return detail::verify_frame_independence(d, trials, seed);
        } else {
          throw UnsupportedShape("frame independence starts from a constant module");
        }
    }
    throw InternalError("unknown property");
  } catch (const Error& e) {
    // preparing the base chart already failed: the input violates the
    // property's premises, which the report records as a failure
    return detail::setup_failure(prop, trials, e.what());
  }
}

}  // namespace eozip
