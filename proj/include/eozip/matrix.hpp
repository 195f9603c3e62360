#pragma once

// Dense matrices over the exact rings of this library. Determinants and
// inverses go through cofactor expansion and the adjugate so that they
// work uniformly over local rings and polynomial rings (no pivoting
// assumptions); dimensions stay small throughout.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "eozip/errors.hpp"

namespace eozip {

template <class T>
class Mat {
 public:
  Mat(unsigned rows, unsigned cols, const T& fill)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(unsigned n, const T& sample) {
    Mat m(n, n, zero_like(sample));
    for (unsigned i = 0; i < n; ++i) m.at(i, i) = one_like(sample);
    return m;
  }

  unsigned rows() const { return rows_; }
  unsigned cols() const { return cols_; }

  T& at(unsigned i, unsigned j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& at(unsigned i, unsigned j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }

  const T& sample() const { return a_.front(); }

  friend Mat operator+(const Mat& x, const Mat& y) {
    x.require_same_shape(y);
    Mat r = x;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] + y.a_[k];
    return r;
  }

  friend Mat operator-(const Mat& x, const Mat& y) {
    x.require_same_shape(y);
    Mat r = x;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] - y.a_[k];
    return r;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw ShapeMismatch("matrix product shapes");
    Mat r(x.rows_, y.cols_, zero_like(x.a_.front()));
    for (unsigned i = 0; i < x.rows_; ++i)
      for (unsigned k = 0; k < x.cols_; ++k) {
        const T& xik = x.at(i, k);
        if (is_zero(xik)) continue;
        for (unsigned j = 0; j < y.cols_; ++j)
          r.at(i, j) = r.at(i, j) + xik * y.at(k, j);
      }
    return r;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) return false;
    for (std::size_t k = 0; k < x.a_.size(); ++k)
      if (!(x.a_[k] == y.a_[k])) return false;
    return true;
  }
  friend bool operator!=(const Mat& x, const Mat& y) { return !(x == y); }

  Mat transpose() const {
    Mat r(cols_, rows_, a_.front());
    for (unsigned i = 0; i < rows_; ++i)
      for (unsigned j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  Mat map(const std::function<T(const T&)>& fn) const {
    Mat r = *this;
    for (auto& v : r.a_) v = fn(v);
    return r;
  }

  Mat minor_matrix(unsigned drop_row, unsigned drop_col) const {
    Mat r(rows_ - 1, cols_ - 1, a_.front());
    for (unsigned i = 0, ri = 0; i < rows_; ++i) {
      if (i == drop_row) continue;
      for (unsigned j = 0, rj = 0; j < cols_; ++j) {
        if (j == drop_col) continue;
        r.at(ri, rj) = at(i, j);
        ++rj;
      }
      ++ri;
    }
    return r;
  }

  std::vector<T> column(unsigned j) const {
    std::vector<T> c;
    c.reserve(rows_);
    for (unsigned i = 0; i < rows_; ++i) c.push_back(at(i, j));
    return c;
  }

  void set_column(unsigned j, const std::vector<T>& c) {
    if (c.size() != rows_) throw ShapeMismatch("column length");
    for (unsigned i = 0; i < rows_; ++i) at(i, j) = c[i];
  }

 private:
  void require_same_shape(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw ShapeMismatch("matrix shapes differ");
  }

  unsigned rows_, cols_;
  std::vector<T> a_;
};

template <class T>
T det(const Mat<T>& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("determinant of non-square");
  const unsigned n = m.rows();
  if (n == 1) return m.at(0, 0);
  if (n == 2)
    return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
  T acc = zero_like(m.at(0, 0));
  for (unsigned j = 0; j < n; ++j) {
    if (is_zero(m.at(0, j))) continue;
    T term = m.at(0, j) * det(m.minor_matrix(0, j));
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

template <class T>
Mat<T> adjugate(const Mat<T>& m) {
  const unsigned n = m.rows();
  Mat<T> r(n, n, zero_like(m.at(0, 0)));
  if (n == 1) {
    r.at(0, 0) = one_like(m.at(0, 0));
    return r;
  }
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      T c = det(m.minor_matrix(i, j));
      r.at(j, i) = ((i + j) % 2 == 0) ? c : -c;
    }
  return r;
}

template <class T>
Mat<T> inverse(const Mat<T>& m) {
  T d = det(m);
  if (!is_unit(d)) throw NotMember("matrix determinant is not a unit");
  T dinv = invert(d);
  Mat<T> adj = adjugate(m);
  return adj.map([&](const T& v) { return v * dinv; });
}

template <class T>
Mat<T> frobenius_mat(const Mat<T>& m) {
  return m.map([](const T& v) { return frobenius(v); });
}

template <class T>
Mat<T> reduce_mod_p_mat(const Mat<T>& m) {
  return m.map([](const T& v) { return reduce_mod_p(v); });
}

template <class T>
Mat<T> reduce_to_precision_mat(const Mat<T>& m, unsigned k) {
  return m.map([&](const T& v) { return reduce_to_precision(v, k); });
}

template <class T>
unsigned min_precision(const Mat<T>& m) {
  unsigned k = precision(m.at(0, 0));
  for (unsigned i = 0; i < m.rows(); ++i)
    for (unsigned j = 0; j < m.cols(); ++j)
      k = std::min(k, precision(m.at(i, j)));
  return k;
}

template <class T>
bool is_identity(const Mat<T>& m) {
  if (m.rows() != m.cols()) return false;
  for (unsigned i = 0; i < m.rows(); ++i)
    for (unsigned j = 0; j < m.cols(); ++j) {
      if (i == j && !(m.at(i, j) == one_like(m.at(i, j)))) return false;
      if (i != j && !is_zero(m.at(i, j))) return false;
    }
  return true;
}

// --- linear algebra over the residue field (precision-1 WittElem) ---

// Row-reduces a copy of `m`; returns column indices of pivots. Entries
// must be field elements (precision-1 in the Witt layer), where every
// nonzero entry is invertible.
template <class T>
std::vector<unsigned> row_reduce(Mat<T>& m) {
  std::vector<unsigned> pivots;
  unsigned row = 0;
  for (unsigned col = 0; col < m.cols() && row < m.rows(); ++col) {
    unsigned sel = row;
    while (sel < m.rows() && is_zero(m.at(sel, col))) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (unsigned j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(row, j));
    T inv = invert(m.at(row, col));
    for (unsigned j = 0; j < m.cols(); ++j) m.at(row, j) = m.at(row, j) * inv;
    for (unsigned i = 0; i < m.rows(); ++i) {
      if (i == row || is_zero(m.at(i, col))) continue;
      T factor = m.at(i, col);
      for (unsigned j = 0; j < m.cols(); ++j)
        m.at(i, j) = m.at(i, j) - factor * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class T>
unsigned rank_of(const Mat<T>& m) {
  Mat<T> r = m;
  return static_cast<unsigned>(row_reduce(r).size());
}

// Basis of the column space as columns of the returned matrix.
template <class T>
Mat<T> column_space_basis(const Mat<T>& m) {
  Mat<T> r = m;
  std::vector<unsigned> piv = row_reduce(r);
  Mat<T> b(m.rows(), static_cast<unsigned>(piv.size()), zero_like(m.at(0, 0)));
  for (unsigned k = 0; k < piv.size(); ++k)
    for (unsigned i = 0; i < m.rows(); ++i) b.at(i, k) = m.at(i, piv[k]);
  return b;
}

// Basis of the kernel as columns of the returned matrix.
template <class T>
Mat<T> kernel_basis(const Mat<T>& m) {
  Mat<T> r = m;
  std::vector<unsigned> piv = row_reduce(r);
  std::vector<bool> is_piv(m.cols(), false);
  for (unsigned c : piv) is_piv[c] = true;
  unsigned freecnt = m.cols() - static_cast<unsigned>(piv.size());
  Mat<T> k(m.cols(), freecnt, zero_like(m.at(0, 0)));
  unsigned out = 0;
  for (unsigned fc = 0; fc < m.cols(); ++fc) {
    if (is_piv[fc]) continue;
    k.at(fc, out) = one_like(m.at(0, 0));
    for (unsigned pr = 0; pr < piv.size(); ++pr)
      k.at(piv[pr], out) = -r.at(pr, fc);
    ++out;
  }
  return k;
}

// Membership of the vector `v` (length = basis.rows()) in the column span
// of `basis` over the residue field.
template <class T>
bool in_span(const Mat<T>& basis, const std::vector<T>& v) {
  Mat<T> aug(basis.rows(), basis.cols() + 1, zero_like(basis.at(0, 0)));
  for (unsigned i = 0; i < basis.rows(); ++i) {
    for (unsigned j = 0; j < basis.cols(); ++j) aug.at(i, j) = basis.at(i, j);
    aug.at(i, basis.cols()) = v[i];
  }
  return rank_of(aug) == rank_of(basis);
}

// One solution of A x = b over the residue field, if any.
template <class T>
std::vector<T> solve_field(const Mat<T>& a, const std::vector<T>& b) {
  Mat<T> aug(a.rows(), a.cols() + 1, zero_like(a.at(0, 0)));
  for (unsigned i = 0; i < a.rows(); ++i) {
    for (unsigned j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<unsigned> piv = row_reduce(aug);
  std::vector<T> x(a.cols(), zero_like(a.at(0, 0)));
  for (unsigned r = 0; r < piv.size(); ++r) {
    if (piv[r] == a.cols())
      throw ExactnessFailure("linear system has no solution");
    x[piv[r]] = aug.at(r, a.cols());
  }
  return x;
}

// One solution of A x = b over a local ring, searching unit pivots. The
// systems solved this way (pairing completions) are surjective with unit
// minors, so a unit pivot always exists per row.
template <class T>
std::vector<T> solve_unit_pivot(Mat<T> a, std::vector<T> b) {
  const unsigned rows = a.rows(), cols = a.cols();
  std::vector<int> pivot_col(rows, -1);
  std::vector<bool> used(cols, false);
  for (unsigned r = 0; r < rows; ++r) {
    unsigned pc = cols;
    for (unsigned c = 0; c < cols; ++c)
      if (!used[c] && is_unit(a.at(r, c))) {
        pc = c;
        break;
      }
    if (pc == cols) throw InternalError("no unit pivot in row");
    used[pc] = true;
    pivot_col[r] = static_cast<int>(pc);
    T inv = invert(a.at(r, pc));
    for (unsigned c = 0; c < cols; ++c) a.at(r, c) = a.at(r, c) * inv;
    b[r] = b[r] * inv;
    for (unsigned i = 0; i < rows; ++i) {
      if (i == r || is_zero(a.at(i, pc))) continue;
      T factor = a.at(i, pc);
      for (unsigned c = 0; c < cols; ++c)
        a.at(i, c) = a.at(i, c) - factor * a.at(r, c);
      b[i] = b[i] - factor * b[r];
    }
  }
  std::vector<T> x(cols, zero_like(a.at(0, 0)));
  for (unsigned r = 0; r < rows; ++r) x[static_cast<unsigned>(pivot_col[r])] = b[r];
  return x;
}

}  // namespace eozip
