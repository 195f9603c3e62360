#pragma once

// Dieudonné modules at finite precision: validation, generators, normal
// decompositions, the partially divided Frobenius factorization F = Γ∘f,
// and the mod-p F-zip with its zip isomorphism.
//
// Matrix convention: F(e_j^sigma) = sum_i F[i,j] e_i, where the
// sigma-twisted standard basis of M^sigma is identified with the standard
// basis of M (constant-family identification). Applying sigma to a map
// therefore means taking the entrywise Frobenius of its matrix.

#include <string>
#include <vector>

#include "eozip/group.hpp"
#include "eozip/matrix.hpp"
#include "eozip/sampling.hpp"

namespace eozip {

template <class T>
struct DieudonneModule {
  GroupSpecPtr spec;
  Mat<T> frob;    // F, m x m
  Mat<T> versch;  // V, m x m, FV = VF = p
  Mat<T> hodge;   // columns span M^1, m x d

  unsigned rank() const { return frob.rows(); }
  unsigned hodge_rank() const { return hodge.cols(); }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(const std::string& what) {
    ok = false;
    failures.push_back(what);
  }
  std::string first() const { return failures.empty() ? "" : failures.front(); }
};

template <class T>
ValidationReport dm_validate(const DieudonneModule<T>& d) {
  ValidationReport rep;
  const unsigned m = d.spec->m;
  if (d.frob.rows() != m || d.frob.cols() != m || d.versch.rows() != m ||
      d.versch.cols() != m || d.hodge.rows() != m ||
      d.hodge.cols() != d.spec->d()) {
    rep.fail("shape: matrices do not match the group data");
    return rep;
  }
  const T& sample = d.frob.at(0, 0);
  Mat<T> p_id = Mat<T>::identity(m, sample).map([&](const T& v) {
    return v * embed_int(sample, static_cast<std::int64_t>([&] {
                           if constexpr (requires { sample.ring()->p; })
                             return sample.ring()->p;
                           else
                             return sample.frame()->base->p;
                         }()));
  });
  if (!(d.frob * d.versch == p_id)) rep.fail("F V = p id fails");
  if (!(d.versch * d.frob == p_id)) rep.fail("V F = p id fails");

  // mod p: sigma of the Hodge filtration spans Ker(Fbar)
  Mat<T> fbar = reduce_mod_p_mat(d.frob);
  Mat<T> hbar_sigma = frobenius_mat(reduce_mod_p_mat(d.hodge));
  Mat<T> img = fbar * hbar_sigma;
  bool killed = true;
  for (unsigned i = 0; i < img.rows(); ++i)
    for (unsigned j = 0; j < img.cols(); ++j)
      if (!is_zero(img.at(i, j))) killed = false;
  if (!killed) rep.fail("Ker(Fbar) = sigma(Hodge) fails: F does not kill it");

  if (rank_of(fbar) != m - d.spec->d())
    rep.fail("Ker(Fbar) = sigma(Hodge) fails: rank(Fbar) != m - d");

  if (rank_of(reduce_mod_p_mat(d.hodge)) != d.spec->d())
    rep.fail("Hodge filtration is not a direct summand");
  return rep;
}

// Builds the module with F = g mu(p), V = (complementary diagonal) g^{-1},
// Hodge filtration the standard weight-1 columns. The zip pipeline on this
// module with beta = 1 recovers the coset of g mod p.
template <class T>
DieudonneModule<T> dm_from_group_element(const GroupElem<T>& g) {
  const GroupSpecPtr& spec = g.spec();
  const T& sample = g.mat().at(0, 0);
  const std::int64_t p = static_cast<std::int64_t>([&] {
    if constexpr (requires { sample.ring()->p; })
      return sample.ring()->p;
    else
      return sample.frame()->base->p;
  }());
  Mat<T> dmu = cochar_p_matrix(*spec, sample);
  Mat<T> dmu_c = Mat<T>::identity(spec->m, sample);
  for (unsigned i = 0; i < spec->m; ++i)
    if (spec->weight(i) == 0) dmu_c.at(i, i) = embed_int(sample, p);
  Mat<T> hodge(spec->m, spec->d(), zero_like(sample));
  unsigned col = 0;
  for (unsigned i : spec->weight_one_positions()) {
    hodge.at(i, col) = one_like(sample);
    ++col;
  }
  return DieudonneModule<T>{spec, g.mat() * dmu, dmu_c * inverse(g.mat()),
                            std::move(hodge)};
}

enum class DmKind { Ordinary, Supersingular };

// Classic fixtures. Ordinary is the module of the identity; supersingular
// is the rank-2 classic F = V = [[0,p],[1,0]] with Hodge e_2, in diagonal
// blocks for GL of even rank, and the Gram matrix's module for GSp.
template <class T>
DieudonneModule<T> dm_standard(DmKind kind, const GroupSpecPtr& spec,
                               const T& sample) {
  if (kind == DmKind::Ordinary)
    return dm_from_group_element(GroupElem<T>::identity(spec, sample));
  if (spec->kind == GroupKind::GSp) {
    Mat<T> j = gram_matrix(*spec, sample);
    return dm_from_group_element(GroupElem<T>(spec, std::move(j)));
  }
  const unsigned m = spec->m;
  if (m % 2 != 0 || spec->d() * 2 != m)
    throw UnsupportedShape("supersingular fixture needs GL of even rank with d = m/2");
  const std::int64_t p = static_cast<std::int64_t>([&] {
    if constexpr (requires { sample.ring()->p; })
      return sample.ring()->p;
    else
      return sample.frame()->base->p;
  }());
  Mat<T> f(m, m, zero_like(sample));
  Mat<T> hodge(m, m / 2, zero_like(sample));
  for (unsigned b = 0; b < m / 2; ++b) {
    f.at(2 * b, 2 * b + 1) = embed_int(sample, p);
    f.at(2 * b + 1, 2 * b) = one_like(sample);
    hodge.at(2 * b + 1, b) = one_like(sample);
  }
  return DieudonneModule<T>{spec, f, f, std::move(hodge)};
}

template <class T>
DieudonneModule<T> dm_random(const GroupSpecPtr& spec,
                             const ScalarSampler<T>& s, std::uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0x5eedULL));
  return dm_from_group_element(random_group_elem(spec, s, rng));
}

template <class T>
struct NormalDecomposition {
  Mat<T> complement;  // m x (m-d)

  // combined basis [hodge | complement]
  Mat<T> basis(const DieudonneModule<T>& d) const {
    const unsigned m = d.rank();
    Mat<T> b(m, m, zero_like(d.hodge.at(0, 0)));
    for (unsigned i = 0; i < m; ++i) {
      for (unsigned j = 0; j < d.hodge.cols(); ++j) b.at(i, j) = d.hodge.at(i, j);
      for (unsigned j = 0; j < complement.cols(); ++j)
        b.at(i, d.hodge.cols() + j) = complement.at(i, j);
    }
    return b;
  }
};

// Standard-complement source: picks standard basis columns at the rows
// where the Hodge block has no pivot mod p.
template <class T>
NormalDecomposition<T> normal_decomposition(const DieudonneModule<T>& d) {
  const unsigned m = d.rank();
  Mat<T> hbar = reduce_mod_p_mat(d.hodge);
  Mat<T> red = hbar.transpose();
  std::vector<unsigned> piv = row_reduce(red);  // pivot rows of hodge
  if (piv.size() != d.hodge.cols())
    throw NotADirectSummand("Hodge block has deficient rank mod p");
  std::vector<bool> taken(m, false);
  for (unsigned r : piv) taken[r] = true;
  Mat<T> comp(m, m - d.hodge.cols(), zero_like(d.hodge.at(0, 0)));
  unsigned col = 0;
  for (unsigned i = 0; i < m; ++i) {
    if (taken[i]) continue;
    comp.at(i, col) = one_like(d.hodge.at(0, 0));
    ++col;
  }
  NormalDecomposition<T> nd{std::move(comp)};
  if (!is_unit(det(nd.basis(d))))
    throw NotADirectSummand("standard completion is not a basis");
  return nd;
}

// Beta-induced source: the complement is the image of the weight-0
// coordinates under a trivialization.
template <class T>
NormalDecomposition<T> normal_decomposition(const DieudonneModule<T>& d,
                                            const GroupElem<T>& beta) {
  const unsigned m = d.rank();
  auto zeros = d.spec->weight_zero_positions();
  Mat<T> comp(m, static_cast<unsigned>(zeros.size()), zero_like(d.hodge.at(0, 0)));
  for (unsigned j = 0; j < zeros.size(); ++j)
    for (unsigned i = 0; i < m; ++i) comp.at(i, j) = beta.mat().at(i, zeros[j]);
  NormalDecomposition<T> nd{std::move(comp)};
  if (!is_unit(det(nd.basis(d))))
    throw NotADirectSummand("trivialization does not complement the Hodge block");
  return nd;
}

template <class T>
struct GammaFactorization {
  Mat<T> gamma;   // partially divided Frobenius, precision n-1, unit det
  Mat<T> f_part;  // p id on the twisted Hodge summand, id on the complement
};

// In the decomposition basis the M^{1,sigma}-block columns of F are exactly
// divisible by p; dividing them yields Γ with Γ f = F one precision lower.
template <class T>
GammaFactorization<T> gamma_factorization(const DieudonneModule<T>& d,
                                          const NormalDecomposition<T>& nd) {
  const unsigned prec = min_precision(d.frob);
  if (prec < 2)
    throw PrecisionExhausted("gamma factorization needs precision >= 2");
  const unsigned m = d.rank(), dd = d.hodge.cols();
  Mat<T> basis_sigma = frobenius_mat(nd.basis(d));
  Mat<T> c = d.frob * basis_sigma;
  Mat<T> divided(m, m, zero_like(c.at(0, 0)));
  for (unsigned j = 0; j < m; ++j)
    for (unsigned i = 0; i < m; ++i)
      divided.at(i, j) =
          j < dd ? div_p_exact(c.at(i, j))
                 : reduce_to_precision(c.at(i, j), prec - 1);
  Mat<T> basis_inv = inverse(reduce_to_precision_mat(basis_sigma, prec - 1));
  Mat<T> gamma = divided * basis_inv;
  if (!is_unit(det(gamma)))
    throw ExactnessFailure("partially divided Frobenius is not invertible");

  const T& sample = d.frob.at(0, 0);
  const std::int64_t p = static_cast<std::int64_t>([&] {
    if constexpr (requires { sample.ring()->p; })
      return sample.ring()->p;
    else
      return sample.frame()->base->p;
  }());
  Mat<T> diag = Mat<T>::identity(m, sample);
  for (unsigned j = 0; j < dd; ++j) diag.at(j, j) = embed_int(sample, p);
  Mat<T> f_part = basis_sigma * diag * inverse(basis_sigma);
  return GammaFactorization<T>{std::move(gamma), std::move(f_part)};
}

// --- mod-p F-zip ---

template <class T>
struct FZip {
  Mat<T> fbar, vbar;   // reduced F and V
  Mat<T> hodge_bar;    // m x d
  Mat<T> conjugate;    // basis of Ker(Vbar) = Im(Fbar), m x (m-d)

  // delta on the first summand: [Vbar]^{-1} of a vector of
  // sigma(hodge_bar)-span, well defined modulo the conjugate filtration.
  std::vector<T> delta_hodge_part(const std::vector<T>& v) const {
    return solve_field(vbar, v);
  }
  // delta on the second summand: Fbar.
  std::vector<T> delta_complement_part(const std::vector<T>& v) const {
    std::vector<T> r;
    r.reserve(fbar.rows());
    for (unsigned i = 0; i < fbar.rows(); ++i) {
      T acc = zero_like(fbar.at(0, 0));
      for (unsigned j = 0; j < fbar.cols(); ++j) acc = acc + fbar.at(i, j) * v[j];
      r.push_back(acc);
    }
    return r;
  }
};

// Kernels and images by mod-p elimination; exactness Im(Fbar) = Ker(Vbar)
// and Im(Vbar) = Ker(Fbar) is verified.
inline FZip<WittElem> fzip_of(const DieudonneModule<WittElem>& d) {
  Mat<WittElem> fbar = reduce_mod_p_mat(d.frob);
  Mat<WittElem> vbar = reduce_mod_p_mat(d.versch);
  Mat<WittElem> imf = column_space_basis(fbar);
  Mat<WittElem> kerv = kernel_basis(vbar);
  if (imf.cols() != kerv.cols())
    throw ExactnessFailure("Im(Fbar) and Ker(Vbar) have different dimensions");
  for (unsigned j = 0; j < kerv.cols(); ++j)
    if (!in_span(imf, kerv.column(j)))
      throw ExactnessFailure("Ker(Vbar) is not contained in Im(Fbar)");
  Mat<WittElem> imv = column_space_basis(vbar);
  Mat<WittElem> kerf = kernel_basis(fbar);
  if (imv.cols() != kerf.cols())
    throw ExactnessFailure("Im(Vbar) and Ker(Fbar) have different dimensions");
  for (unsigned j = 0; j < kerf.cols(); ++j)
    if (!in_span(imv, kerf.column(j)))
      throw ExactnessFailure("Ker(Fbar) is not contained in Im(Vbar)");
  if (imf.cols() != d.rank() - d.hodge.cols())
    throw ExactnessFailure("conjugate filtration has wrong rank");
  return FZip<WittElem>{fbar, vbar, reduce_mod_p_mat(d.hodge), imf};
}

}  // namespace eozip
