#pragma once

// Brute-force enumeration of G(F_q) for GL_m and GSp_2g and of the orbits
// of the zip-group action g.(p+, p-) = p+^{-1} g p-. The finite field is
// tabulated (q is tiny) and matrices are packed into 64-bit keys, so the
// breadth-first sweep over the generator moves is all table lookups.
//
// The orbits indexing Ekedahl-Oort strata are the zip-group orbits over the
// algebraic closure, traced on the F_q-points. A single geometric orbit can
// split into several E_mu(F_q)-orbits: the stabilizers have finite etale
// parts (F_p-points of Levi centralizers and twisted norm tori), and the
// splitting is their Lang obstruction. The sweep therefore first computes
// the rational suborbits and then groups them by the canonical-filtration
// fingerprint of the associated mod-p zip, an isomorphism invariant that
// reunites the pieces of one geometric orbit and separates the orbits for
// the minuscule GL and Siegel GSp data enumerated here. Suborbit sizes are
// kept in the table; each divides the order of E_mu(F_q), while the merged
// orbit sizes need not.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eozip/group.hpp"
#include "eozip/witt.hpp"

namespace eozip {

inline std::uint64_t default_orbit_cap() {
  if (const char* env = std::getenv("EOZIP_CAP")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1000000;
}

namespace orb {

// Tabulated arithmetic of F_q, elements coded 0..q-1 by base-p digits of
// their coefficient vectors.
struct FqTable {
  WittRingPtr ring;
  std::uint64_t q = 0;
  std::vector<std::uint16_t> add, mul, neg, inv, frob;

  std::uint16_t addc(std::uint16_t a, std::uint16_t b) const {
    return add[a * q + b];
  }
  std::uint16_t mulc(std::uint16_t a, std::uint16_t b) const {
    return mul[a * q + b];
  }

  WittElem decode(std::uint16_t code) const {
    std::vector<std::uint64_t> c(ring->f);
    for (unsigned i = 0; i < ring->f; ++i) {
      c[i] = code % ring->p;
      code = static_cast<std::uint16_t>(code / ring->p);
    }
    return WittElem(ring, std::move(c), 1);
  }

  std::uint16_t encode(const WittElem& e) const {
    WittElem r = reduce_mod_p(e);
    std::uint64_t code = 0, mult = 1;
    for (unsigned i = 0; i < ring->f; ++i) {
      code += r.coeffs()[i] * mult;
      mult *= ring->p;
    }
    return static_cast<std::uint16_t>(code);
  }
};

inline FqTable make_fq_table(const WittRingPtr& ring) {
  FqTable t;
  t.ring = ring;
  t.q = ring->q();
  if (t.q > 1024) throw CapExceeded("residue field too large to tabulate");
  const std::uint64_t q = t.q;
  t.add.resize(q * q);
  t.mul.resize(q * q);
  t.neg.resize(q);
  t.inv.assign(q, 0);
  t.frob.resize(q);
  for (std::uint64_t a = 0; a < q; ++a) {
    WittElem ea = t.decode(static_cast<std::uint16_t>(a));
    t.neg[a] = t.encode(-ea);
    t.frob[a] = t.encode(frobenius(ea));
    if (ea.is_unit()) t.inv[a] = t.encode(invert(ea));
    for (std::uint64_t b = 0; b < q; ++b) {
      WittElem eb = t.decode(static_cast<std::uint16_t>(b));
      t.add[a * q + b] = t.encode(ea + eb);
      t.mul[a * q + b] = t.encode(ea * eb);
    }
  }
  return t;
}

// Row-major packed matrix; the first entry is the most significant base-q
// digit, so the integer order of keys is the lexicographic order of the
// entry lists.
using Packed = std::vector<std::uint16_t>;

inline std::uint64_t pack_key(const Packed& m, std::uint64_t q) {
  std::uint64_t key = 0;
  for (std::uint16_t v : m) key = key * q + v;
  return key;
}

inline Packed unpack_key(std::uint64_t key, std::uint64_t q, unsigned m) {
  Packed out(static_cast<std::size_t>(m) * m);
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint16_t>(key % q);
    key /= q;
  }
  return out;
}

inline Packed packed_mul(const Packed& a, const Packed& b, const FqTable& t,
                         unsigned m) {
  Packed r(static_cast<std::size_t>(m) * m, 0);
  for (unsigned i = 0; i < m; ++i)
    for (unsigned k = 0; k < m; ++k) {
      std::uint16_t aik = a[i * m + k];
      if (aik == 0) continue;
      for (unsigned j = 0; j < m; ++j) {
        std::uint16_t prod = t.mulc(aik, b[k * m + j]);
        r[i * m + j] = t.addc(r[i * m + j], prod);
      }
    }
  return r;
}

inline Packed pack_elem(const GroupElem<WittElem>& g, const FqTable& t) {
  const unsigned m = g.spec()->m;
  Packed out(static_cast<std::size_t>(m) * m);
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = 0; j < m; ++j) out[i * m + j] = t.encode(g.mat().at(i, j));
  return out;
}

inline GroupElem<WittElem> unpack_elem(const Packed& p, const GroupSpecPtr& spec,
                                       const FqTable& t) {
  Mat<WittElem> mat(spec->m, spec->m, WittElem::zero(t.ring, 1));
  for (unsigned i = 0; i < spec->m; ++i)
    for (unsigned j = 0; j < spec->m; ++j) mat.at(i, j) = t.decode(p[i * spec->m + j]);
  return GroupElem<WittElem>(spec, std::move(mat),
                             GroupElem<WittElem>::unchecked_t{});
}

// All residue points of U+ or U-: candidate values at the free block
// positions, filtered through the exact membership test (which imposes the
// symplectic symmetry for GSp).
inline std::vector<GroupElem<WittElem>> enumerate_unipotent(
    const GroupSpecPtr& spec, const FqTable& t, Subgroup which) {
  if (which != Subgroup::UPlus && which != Subgroup::UMinus &&
      which != Subgroup::UMinusSigma)
    throw InternalError("enumerate_unipotent expects a unipotent radical");
  const unsigned m = spec->m;
  std::vector<std::pair<unsigned, unsigned>> free_pos;
  for (unsigned i = 0; i < m; ++i)
    for (unsigned j = 0; j < m; ++j) {
      const bool upper = spec->weight(i) > spec->weight(j);
      const bool lower = spec->weight(i) < spec->weight(j);
      if ((which == Subgroup::UPlus && upper) ||
          (which != Subgroup::UPlus && lower))
        free_pos.push_back({i, j});
    }
  std::vector<GroupElem<WittElem>> out;
  std::vector<std::uint16_t> values(free_pos.size(), 0);
  for (;;) {
    Mat<WittElem> mat = Mat<WittElem>::identity(m, WittElem::zero(t.ring, 1));
    for (std::size_t k = 0; k < free_pos.size(); ++k)
      mat.at(free_pos[k].first, free_pos[k].second) = t.decode(values[k]);
    if (check_member(*spec, mat).ok)
      out.emplace_back(spec, std::move(mat), GroupElem<WittElem>::unchecked_t{});
    std::size_t k = 0;
    while (k < values.size()) {
      if (++values[k] < t.q) break;
      values[k] = 0;
      ++k;
    }
    if (k == values.size()) break;
  }
  return out;
}

// All residue points of the Levi. For GL this scans the diagonal blocks;
// for GSp the Levi is parametrized by (A, c) -> diag(A, c w (A^T)^{-1} w),
// which avoids scanning the determined block.
inline std::vector<GroupElem<WittElem>> enumerate_levi(const GroupSpecPtr& spec,
                                                       const FqTable& t) {
  const unsigned m = spec->m;
  std::vector<GroupElem<WittElem>> out;
  if (spec->kind == GroupKind::GL) {
    std::vector<std::pair<unsigned, unsigned>> free_pos;
    for (unsigned i = 0; i < m; ++i)
      for (unsigned j = 0; j < m; ++j)
        if (spec->weight(i) == spec->weight(j)) free_pos.push_back({i, j});
    std::vector<std::uint16_t> values(free_pos.size(), 0);
    for (;;) {
      Mat<WittElem> mat(m, m, WittElem::zero(t.ring, 1));
      for (std::size_t k = 0; k < free_pos.size(); ++k)
        mat.at(free_pos[k].first, free_pos[k].second) = t.decode(values[k]);
      if (check_member(*spec, mat).ok)
        out.emplace_back(spec, std::move(mat), GroupElem<WittElem>::unchecked_t{});
      std::size_t k = 0;
      while (k < values.size()) {
        if (++values[k] < t.q) break;
        values[k] = 0;
        ++k;
      }
      if (k == values.size()) break;
    }
    return out;
  }
  const unsigned g = spec->g();
  Mat<WittElem> w(g, g, WittElem::zero(t.ring, 1));
  for (unsigned i = 0; i < g; ++i) w.at(i, g - 1 - i) = WittElem::one(t.ring, 1);
  std::vector<std::uint16_t> values(static_cast<std::size_t>(g) * g, 0);
  for (;;) {
    Mat<WittElem> a(g, g, WittElem::zero(t.ring, 1));
    for (unsigned i = 0; i < g; ++i)
      for (unsigned j = 0; j < g; ++j) a.at(i, j) = t.decode(values[i * g + j]);
    if (is_unit(det(a))) {
      Mat<WittElem> dbase = w * inverse(a.transpose()) * w;
      for (std::uint64_t cu = 1; cu < t.q; ++cu) {
        WittElem c = t.decode(static_cast<std::uint16_t>(cu));
        if (!c.is_unit()) continue;
        Mat<WittElem> l = Mat<WittElem>::identity(m, WittElem::zero(t.ring, 1));
        for (unsigned i = 0; i < g; ++i)
          for (unsigned j = 0; j < g; ++j) {
            l.at(i, j) = a.at(i, j);
            l.at(g + i, g + j) = dbase.at(i, j) * c;
          }
        out.emplace_back(spec, std::move(l), GroupElem<WittElem>::unchecked_t{});
      }
    }
    std::size_t k = 0;
    while (k < values.size()) {
      if (++values[k] < t.q) break;
      values[k] = 0;
      ++k;
    }
    if (k == values.size()) break;
  }
  return out;
}

// Greedy generating subset: closure is rebuilt as elements are adopted, so
// the breadth-first sweep later runs over a handful of moves instead of the
// whole subgroup.
inline std::vector<GroupElem<WittElem>> reduce_generators(
    const std::vector<GroupElem<WittElem>>& elems, const GroupSpecPtr& spec,
    const FqTable& t) {
  const unsigned m = spec->m;
  std::vector<GroupElem<WittElem>> gens;
  std::unordered_map<std::uint64_t, Packed> known;
  Packed id =
      pack_elem(GroupElem<WittElem>::identity(spec, WittElem::zero(t.ring, 1)), t);
  known.emplace(pack_key(id, t.q), id);
  auto close_over = [&]() {
    std::vector<Packed> frontier;
    frontier.reserve(known.size());
    for (const auto& kv : known) frontier.push_back(kv.second);
    while (!frontier.empty()) {
      std::vector<Packed> next;
      for (const auto& x : frontier)
        for (const auto& g : gens) {
          Packed y = packed_mul(x, pack_elem(g, t), t, m);
          std::uint64_t key = pack_key(y, t.q);
          if (known.emplace(key, y).second) next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
  };
  for (const auto& e : elems) {
    std::uint64_t key = pack_key(pack_elem(e, t), t.q);
    if (known.count(key)) continue;
    gens.push_back(e);
    close_over();
  }
  return gens;
}

// --- stratum fingerprint ---
//
// The orbits over the algebraic closure are detected through the canonical
// filtration of the associated mod-p zip: starting from 0 and the full
// space, subspaces are closed under the monotone operations
//   W -> Fbar(sigma W),  W -> Vbar^{-1}(sigma W),
//   W -> sigma^{-1}(Vbar W),  W -> sigma^{-1}(Fbar^{-1} W),
// and the dimension profile of the closure together with the dimensions of
// the operation images is recorded. These numbers are isomorphism
// invariants of the zip, so suborbits of one geometric orbit always agree
// on them; and the resulting refinement type separates the orbits for the
// minuscule GL and Siegel GSp data enumerated here.

// Canonical (reduced column echelon) basis of a column span; unique per
// subspace, used for dedup.
inline Mat<WittElem> echelon_span(const Mat<WittElem>& cols) {
  if (cols.cols() == 0) return cols;
  Mat<WittElem> red = cols.transpose();
  std::vector<unsigned> piv = row_reduce(red);
  Mat<WittElem> out(cols.rows(), static_cast<unsigned>(piv.size()),
                    zero_like(cols.at(0, 0)));
  for (unsigned r = 0; r < piv.size(); ++r)
    for (unsigned c = 0; c < cols.rows(); ++c) out.at(c, r) = red.at(r, c);
  return out;
}

inline Mat<WittElem> sigma_power_mat(const Mat<WittElem>& m, unsigned k) {
  Mat<WittElem> r = m;
  for (unsigned i = 0; i < k; ++i) r = frobenius_mat(r);
  return r;
}

// x-components of the solutions of A x = B y (preimage of a span).
inline Mat<WittElem> preimage_span(const Mat<WittElem>& a,
                                   const Mat<WittElem>& basis) {
  const unsigned m = a.rows();
  if (basis.cols() == 0) return echelon_span(kernel_basis(a));
  Mat<WittElem> stacked(m, a.cols() + basis.cols(), zero_like(a.at(0, 0)));
  for (unsigned i = 0; i < m; ++i) {
    for (unsigned j = 0; j < a.cols(); ++j) stacked.at(i, j) = a.at(i, j);
    for (unsigned j = 0; j < basis.cols(); ++j)
      stacked.at(i, a.cols() + j) = -basis.at(i, j);
  }
  Mat<WittElem> ker = kernel_basis(stacked);
  Mat<WittElem> xs(a.cols(), ker.cols(), zero_like(a.at(0, 0)));
  for (unsigned i = 0; i < a.cols(); ++i)
    for (unsigned j = 0; j < ker.cols(); ++j) xs.at(i, j) = ker.at(i, j);
  return echelon_span(xs);
}

inline std::vector<int> stratum_fingerprint(const GroupSpecPtr& spec,
                                            const GroupElem<WittElem>& g) {
  const unsigned m = spec->m;
  const WittRingPtr ring = g.mat().at(0, 0).ring();
  const WittElem zero = WittElem::zero(ring, 1);
  const WittElem one = WittElem::one(ring, 1);
  const unsigned sigma_inv_power = ring->f == 1 ? 0 : ring->f - 1;

  Mat<WittElem> dbar(m, m, zero);
  Mat<WittElem> dbar_c(m, m, zero);
  for (unsigned i = 0; i < m; ++i) {
    if (spec->weight(i) == 0) dbar.at(i, i) = one;
    if (spec->weight(i) == 1) dbar_c.at(i, i) = one;
  }
  Mat<WittElem> gbar = reduce_mod_p_mat(g.mat());
  Mat<WittElem> fbar = gbar * dbar;
  Mat<WittElem> vbar = dbar_c * inverse(gbar);

  auto key_of = [&](const Mat<WittElem>& basis) {
    std::vector<std::uint64_t> key{basis.cols()};
    for (unsigned j = 0; j < basis.cols(); ++j)
      for (unsigned i = 0; i < basis.rows(); ++i)
        for (std::uint64_t c : basis.at(i, j).coeffs()) key.push_back(c);
    return key;
  };
  auto alpha = [&](const Mat<WittElem>& w) {  // Fbar(sigma W)
    if (w.cols() == 0) return w;
    return echelon_span(fbar * frobenius_mat(w));
  };
  auto beta = [&](const Mat<WittElem>& w) {  // Vbar^{-1}(sigma W)
    return preimage_span(vbar, frobenius_mat(w));
  };
  auto gamma = [&](const Mat<WittElem>& w) {  // sigma^{-1}(Vbar W)
    if (w.cols() == 0) return w;
    return echelon_span(sigma_power_mat(vbar * w, sigma_inv_power));
  };
  auto delta_op = [&](const Mat<WittElem>& w) {  // sigma^{-1}(Fbar^{-1} W)
    return sigma_power_mat(preimage_span(fbar, w), sigma_inv_power);
  };

  std::vector<Mat<WittElem>> closure;
  std::vector<std::vector<std::uint64_t>> seen;
  auto add = [&](const Mat<WittElem>& w) {
    auto key = key_of(w);
    for (const auto& k : seen)
      if (k == key) return false;
    seen.push_back(std::move(key));
    closure.push_back(w);
    return true;
  };
  add(Mat<WittElem>(m, 0, zero));
  add(echelon_span(Mat<WittElem>::identity(m, zero)));
  for (std::size_t head = 0; head < closure.size(); ++head) {
    if (closure.size() > 64)
      throw InternalError("canonical filtration did not stabilize");
    Mat<WittElem> w = closure[head];
    add(alpha(w));
    add(beta(w));
    add(gamma(w));
    add(delta_op(w));
  }

  std::vector<std::vector<int>> rows;
  for (const auto& w : closure) {
    std::vector<int> row{static_cast<int>(w.cols()),
                         static_cast<int>(alpha(w).cols()),
                         static_cast<int>(beta(w).cols()),
                         static_cast<int>(gamma(w).cols()),
                         static_cast<int>(delta_op(w).cols())};
    // relative position against every other member of the closure
    for (const auto& u : closure) {
      unsigned meet = 0;
      if (u.cols() == 0 || w.cols() == 0) {
        meet = 0;
      } else {
        Mat<WittElem> both(m, w.cols() + u.cols(), zero);
        for (unsigned i = 0; i < m; ++i) {
          for (unsigned j = 0; j < w.cols(); ++j) both.at(i, j) = w.at(i, j);
          for (unsigned j = 0; j < u.cols(); ++j)
            both.at(i, w.cols() + j) = u.at(i, j);
        }
        meet = w.cols() + u.cols() - rank_of(both);  // dim of intersection
      }
      row.push_back(static_cast<int>(meet));
    }
    std::sort(row.begin() + 5, row.end());
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  std::vector<int> fp{static_cast<int>(m), static_cast<int>(spec->d())};
  for (const auto& row : rows) fp.insert(fp.end(), row.begin(), row.end());
  return fp;
}

}  // namespace orb

struct OrbitEntry {
  std::uint64_t rep_key = 0;  // lexicographically minimal member
  std::uint64_t size = 0;
  // sizes of the rational E_mu(F_q)-suborbits composing this orbit; each
  // divides the order of E_mu(F_q)
  std::vector<std::uint64_t> suborbit_sizes;
};

class OrbitTable {
 public:
  GroupSpecPtr spec;
  WittRingPtr ring;  // residue arithmetic lives at precision 1
  std::uint64_t q = 0;
  std::uint64_t group_order = 0;
  std::uint64_t emu_order = 0;
  std::vector<OrbitEntry> orbits;

  GroupElem<WittElem> representative(std::size_t idx) const {
    orb::FqTable t = orb::make_fq_table(ring);
    return orb::unpack_elem(orb::unpack_key(orbits[idx].rep_key, q, spec->m),
                            spec, t);
  }

  std::size_t classify_key(std::uint64_t key) const {
    auto it = membership_.find(key);
    if (it == membership_.end())
      throw NotInGroup("matrix is not an enumerated group element");
    return it->second;
  }

  std::unordered_map<std::uint64_t, std::uint32_t>& membership() {
    return membership_;
  }
  const std::unordered_map<std::uint64_t, std::uint32_t>& membership() const {
    return membership_;
  }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> membership_;
};

// Order of GL_m(F_q), saturating at 2^63 for cap checks.
inline std::uint64_t gl_order(unsigned m, std::uint64_t q) {
  long double acc = 1;
  std::uint64_t qm = 1;
  for (unsigned i = 0; i < m; ++i) qm *= q;
  std::uint64_t qk = 1;
  for (unsigned k = 0; k < m; ++k) {
    acc *= static_cast<long double>(qm - qk);
    qk *= q;
  }
  if (acc > 9.0e18L) return ~0ull;
  return static_cast<std::uint64_t>(acc);
}

// Order of GSp_2g(F_q) = (q-1) q^{g^2} prod (q^{2i} - 1).
inline std::uint64_t gsp_order(unsigned m, std::uint64_t q) {
  const unsigned g = m / 2;
  long double acc = static_cast<long double>(q - 1);
  for (unsigned i = 0; i < g * g; ++i) acc *= static_cast<long double>(q);
  std::uint64_t q2i = 1;
  for (unsigned i = 1; i <= g; ++i) {
    q2i *= q * q;
    acc *= static_cast<long double>(q2i - 1);
  }
  if (acc > 9.0e18L) return ~0ull;
  return static_cast<std::uint64_t>(acc);
}

inline std::uint64_t group_order_formula(const GroupSpec& spec, std::uint64_t q) {
  return spec.kind == GroupKind::GL ? gl_order(spec.m, q) : gsp_order(spec.m, q);
}

// Every member of G(F_q) exactly once, as packed keys, by a column-wise
// search pruned on linear independence and, for GSp, on the pairing
// constraints against the antidiagonal Gram matrix.
inline std::vector<std::uint64_t> enumerate_group(
    const GroupSpecPtr& spec, const WittRingPtr& ring,
    std::uint64_t cap = default_orbit_cap()) {
  if (group_order_formula(*spec, ring->q()) > cap)
    throw CapExceeded("group order exceeds the enumeration cap of " +
                      std::to_string(cap));
  orb::FqTable t = orb::make_fq_table(ring);
  const unsigned m = spec->m;
  const std::uint64_t q = t.q;
  std::uint64_t qm = 1;
  for (unsigned i = 0; i < m; ++i) qm *= q;

  std::vector<std::uint64_t> out;
  std::vector<std::vector<std::uint16_t>> cols(m, std::vector<std::uint16_t>(m, 0));
  std::vector<std::vector<std::uint16_t>> reduced;
  std::vector<int> pivot_of;

  auto pair_cols = [&](const std::vector<std::uint16_t>& a,
                       const std::vector<std::uint16_t>& b) -> std::uint16_t {
    // a^T J b with the antidiagonal +-1 Gram matrix
    std::uint16_t acc = 0;
    for (unsigned r = 0; r < m; ++r) {
      unsigned c = m - 1 - r;
      if (a[r] == 0 || b[c] == 0) continue;
      std::uint16_t prod = t.mulc(a[r], b[c]);
      if (r >= m / 2) prod = t.neg[prod];
      acc = t.addc(acc, prod);
    }
    return acc;
  };

  auto reduce_vec = [&](std::vector<std::uint16_t> v) {
    for (std::size_t k = 0; k < reduced.size(); ++k) {
      int pr = pivot_of[k];
      if (v[pr] == 0) continue;
      std::uint16_t factor = v[pr];
      for (unsigned r = 0; r < m; ++r) {
        std::uint16_t sub = t.mulc(factor, reduced[k][r]);
        v[r] = t.addc(v[r], t.neg[sub]);
      }
    }
    return v;
  };

  std::uint16_t similitude = 0;  // fixed once the first antidiagonal pair closes

  std::function<void(unsigned)> place = [&](unsigned col) {
    if (col == m) {
      orb::Packed flat(static_cast<std::size_t>(m) * m);
      for (unsigned i = 0; i < m; ++i)
        for (unsigned j = 0; j < m; ++j) flat[i * m + j] = cols[j][i];
      out.push_back(orb::pack_key(flat, q));
      return;
    }
    for (std::uint64_t code = (col == 0 ? 1 : 0); code < qm; ++code) {
      std::vector<std::uint16_t> v(m);
      std::uint64_t cc = code;
      for (unsigned r = 0; r < m; ++r) {
        v[r] = static_cast<std::uint16_t>(cc % q);
        cc /= q;
      }
      std::vector<std::uint16_t> red = reduce_vec(v);
      int pr = -1;
      for (unsigned r = 0; r < m; ++r)
        if (red[r] != 0) {
          pr = static_cast<int>(r);
          break;
        }
      if (pr < 0) continue;
      std::uint16_t saved_similitude = similitude;
      if (spec->kind == GroupKind::GSp) {
        bool ok = true;
        for (unsigned prev = 0; prev < col && ok; ++prev) {
          std::uint16_t val = pair_cols(cols[prev], v);
          if (prev == m - 1 - col) {
            std::uint16_t c_val = prev < m / 2 ? val : t.neg[val];
            if (c_val == 0)
              ok = false;
            else if (similitude == 0)
              similitude = c_val;
            else if (similitude != c_val)
              ok = false;
          } else if (val != 0) {
            ok = false;
          }
        }
        if (!ok) {
          similitude = saved_similitude;
          continue;
        }
      }
      std::uint16_t inv = t.inv[red[pr]];
      for (unsigned r = 0; r < m; ++r) red[r] = t.mulc(red[r], inv);
      reduced.push_back(red);
      pivot_of.push_back(pr);
      cols[col] = v;
      place(col + 1);
      reduced.pop_back();
      pivot_of.pop_back();
      similitude = saved_similitude;
    }
  };
  place(0);
  return out;
}

// Orbit sweep. Phase one: rational suborbits by breadth-first closure over
// the moves g -> u+^{-1} g, g -> g u-, g -> m^{-1} g sigma(m). Phase two:
// group the suborbits by the stratum fingerprint; one geometric orbit can
// split into several rational suborbits, and the fingerprint reunites them.
// Representatives are lexicographically minimal members, orbits listed in
// ascending representative order.
inline OrbitTable orbit_decompose(const GroupSpecPtr& spec, const WittRingPtr& ring,
                                  std::uint64_t cap = default_orbit_cap()) {
  orb::FqTable t = orb::make_fq_table(ring);
  const unsigned m = spec->m;
  std::vector<std::uint64_t> members = enumerate_group(spec, ring, cap);

  auto uplus = orb::enumerate_unipotent(spec, t, Subgroup::UPlus);
  auto uminus = orb::enumerate_unipotent(spec, t, Subgroup::UMinus);
  auto levi = orb::enumerate_levi(spec, t);

  OrbitTable table;
  table.spec = spec;
  table.ring = ring;
  table.q = t.q;
  table.group_order = members.size();
  table.emu_order =
      static_cast<std::uint64_t>(uplus.size()) * levi.size() * uminus.size();

  auto ugen = orb::reduce_generators(uplus, spec, t);
  auto vgen = orb::reduce_generators(uminus, spec, t);
  auto lgen = orb::reduce_generators(levi, spec, t);

  std::vector<orb::Packed> left_moves, right_moves;
  std::vector<std::pair<orb::Packed, orb::Packed>> twist_moves;
  for (const auto& u : ugen) left_moves.push_back(orb::pack_elem(inverse(u), t));
  for (const auto& u : vgen) right_moves.push_back(orb::pack_elem(u, t));
  for (const auto& l : lgen)
    twist_moves.push_back(
        {orb::pack_elem(inverse(l), t), orb::pack_elem(sigma_elem(l), t)});

  // phase one: rational suborbits
  std::unordered_map<std::uint64_t, std::uint32_t> sub_of;
  sub_of.reserve(members.size() * 2);
  struct Fine {
    std::uint64_t rep_key;
    std::uint64_t size;
  };
  std::vector<Fine> fine;
  std::vector<std::uint64_t> queue;
  for (std::uint64_t start : members) {
    if (sub_of.count(start)) continue;
    const auto id = static_cast<std::uint32_t>(fine.size());
    Fine entry{start, 0};
    queue.clear();
    queue.push_back(start);
    sub_of.emplace(start, id);
    std::size_t head = 0;
    while (head < queue.size()) {
      orb::Packed g = orb::unpack_key(queue[head++], t.q, m);
      auto visit = [&](orb::Packed&& h) {
        std::uint64_t key = orb::pack_key(h, t.q);
        if (sub_of.emplace(key, id).second) {
          if (key < entry.rep_key) entry.rep_key = key;
          queue.push_back(key);
        }
      };
      for (const auto& mv : left_moves) visit(orb::packed_mul(mv, g, t, m));
      for (const auto& mv : right_moves) visit(orb::packed_mul(g, mv, t, m));
      for (const auto& [li, ls] : twist_moves)
        visit(orb::packed_mul(orb::packed_mul(li, g, t, m), ls, t, m));
    }
    entry.size = queue.size();
    fine.push_back(entry);
  }

  // phase two: group suborbits by the stratum fingerprint
  std::vector<std::uint32_t> parent(fine.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (fine.size() > 1) {
    std::vector<std::vector<int>> prints;
    prints.reserve(fine.size());
    for (const auto& f : fine)
      prints.push_back(orb::stratum_fingerprint(
          spec, orb::unpack_elem(orb::unpack_key(f.rep_key, t.q, m), spec, t)));
    for (std::uint32_t i = 0; i < fine.size(); ++i)
      for (std::uint32_t j = i + 1; j < fine.size(); ++j) {
        if (find(i) == find(j)) continue;
        if (prints[i] == prints[j]) parent[find(j)] = find(i);
      }
  }

  // assemble merged orbits
  std::unordered_map<std::uint32_t, std::uint32_t> root_to_orbit;
  std::vector<OrbitEntry> entries;
  std::vector<std::uint32_t> fine_to_orbit(fine.size());
  for (std::uint32_t i = 0; i < fine.size(); ++i) {
    std::uint32_t root = find(i);
    auto it = root_to_orbit.find(root);
    std::uint32_t oid;
    if (it == root_to_orbit.end()) {
      oid = static_cast<std::uint32_t>(entries.size());
      root_to_orbit.emplace(root, oid);
      entries.push_back(OrbitEntry{fine[i].rep_key, 0, {}});
    } else {
      oid = it->second;
    }
    entries[oid].rep_key = std::min(entries[oid].rep_key, fine[i].rep_key);
    entries[oid].size += fine[i].size;
    entries[oid].suborbit_sizes.push_back(fine[i].size);
    fine_to_orbit[i] = oid;
  }

  // renumber in ascending representative order
  std::vector<std::uint32_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return entries[a].rep_key < entries[b].rep_key;
  });
  std::vector<std::uint32_t> rank_of(entries.size());
  for (std::uint32_t rank = 0; rank < order.size(); ++rank)
    rank_of[order[rank]] = rank;
  table.orbits.resize(entries.size());
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    std::sort(e.suborbit_sizes.begin(), e.suborbit_sizes.end());
    table.orbits[rank_of[i]] = std::move(e);
  }
  auto& owner = table.membership();
  owner.reserve(sub_of.size() * 2);
  for (const auto& kv : sub_of)
    owner.emplace(kv.first, rank_of[fine_to_orbit[kv.second]]);
  return table;
}

// Orbit id of a group element; for a coset any representative works since
// U_-^sigma is contained in the zip group.
inline std::size_t classify(const OrbitTable& table, const GroupElem<WittElem>& g) {
  if (!g.spec()->same_as(*table.spec))
    throw NotInGroup("element belongs to a different group");
  if (!g.mat().at(0, 0).ring()->same_residue(*table.ring))
    throw NotInGroup("element belongs to a different residue field");
  orb::FqTable t = orb::make_fq_table(table.ring);
  // re-home the reduction into the table's descriptor; the canonical
  // coefficient vectors agree mod p
  Mat<WittElem> rehomed(table.spec->m, table.spec->m,
                        WittElem::zero(table.ring, 1));
  for (unsigned i = 0; i < table.spec->m; ++i)
    for (unsigned j = 0; j < table.spec->m; ++j)
      rehomed.at(i, j) =
          WittElem(table.ring, reduce_mod_p(g.mat().at(i, j)).coeffs(), 1);
  GroupElem<WittElem> gr(table.spec, std::move(rehomed),
                         GroupElem<WittElem>::unchecked_t{});
  return table.classify_key(orb::pack_key(orb::pack_elem(gr, t), t.q));
}

inline std::size_t classify(const OrbitTable& table, const ZipCoset<WittElem>& c) {
  return classify(table, c.rep);
}

}  // namespace eozip
