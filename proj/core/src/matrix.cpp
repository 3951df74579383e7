#include "iwalab/matrix.hpp"

#include <algorithm>

namespace iwalab {

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<Int>>& rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows[0].size();
  IntMat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw input_error("matrix: ragged rows");
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

IntMat IntMat::transpose() const {
  IntMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

IntMat IntMat::operator*(const IntMat& o) const {
  if (cols_ != o.rows_) throw input_error("matrix: dimension mismatch in product");
  IntMat r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& a = at(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
    }
  return r;
}

IntMat IntMat::operator+(const IntMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw input_error("matrix: shape mismatch in sum");
  IntMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
  return r;
}

IntMat IntMat::operator-(const IntMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw input_error("matrix: shape mismatch in difference");
  IntMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
  return r;
}

IntMat IntMat::scaled(const Int& c) const {
  IntMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * c;
  return r;
}

std::vector<Int> IntMat::apply(const std::vector<Int>& x) const {
  if (x.size() != cols_) throw input_error("matrix: vector length mismatch");
  std::vector<Int> y(rows_, Int(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0) y[i] += at(i, j) * x[j];
  return y;
}

IntMat IntMat::hstack(const IntMat& o) const {
  if (rows_ != o.rows_ && cols_ != 0 && o.cols_ != 0)
    throw input_error("matrix: hstack row mismatch");
  std::size_t r = std::max(rows_, o.rows_);
  IntMat m(r, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) m.at(i, cols_ + j) = o.at(i, j);
  return m;
}

IntMat IntMat::vstack(const IntMat& o) const {
  if (cols_ != o.cols_ && rows_ != 0 && o.rows_ != 0)
    throw input_error("matrix: vstack column mismatch");
  std::size_t c = std::max(cols_, o.cols_);
  IntMat m(rows_ + o.rows_, c);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) m.at(rows_ + i, j) = o.at(i, j);
  return m;
}

IntMat IntMat::submatrix(const std::vector<std::size_t>& row_idx,
                         const std::vector<std::size_t>& col_idx) const {
  IntMat m(row_idx.size(), col_idx.size());
  for (std::size_t i = 0; i < row_idx.size(); ++i)
    for (std::size_t j = 0; j < col_idx.size(); ++j) m.at(i, j) = at(row_idx[i], col_idx[j]);
  return m;
}

IntMat IntMat::column(std::size_t j) const {
  IntMat m(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) m.at(i, 0) = at(i, j);
  return m;
}

void IntMat::set_column(std::size_t j, const std::vector<Int>& v) {
  for (std::size_t i = 0; i < rows_; ++i) at(i, j) = v[i];
}

std::vector<Int> IntMat::column_vec(std::size_t j) const {
  std::vector<Int> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

void IntMat::reduce_entries_mod(const Int& m) {
  for (auto& x : data_) x = mod_reduce(x, m);
}

bool IntMat::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Int& x) { return x == 0; });
}

namespace {

struct SnfWork {
  IntMat A, U, Ui, V;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < A.cols(); ++k) std::swap(A.at(i, k), A.at(j, k));
    for (std::size_t k = 0; k < U.cols(); ++k) std::swap(U.at(i, k), U.at(j, k));
    for (std::size_t k = 0; k < Ui.rows(); ++k) std::swap(Ui.at(k, i), Ui.at(k, j));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < A.rows(); ++k) std::swap(A.at(k, i), A.at(k, j));
    for (std::size_t k = 0; k < V.rows(); ++k) std::swap(V.at(k, i), V.at(k, j));
  }
  // row i -= q * row j  (U <- E U, Ui <- Ui E^{-1})
  void row_op(std::size_t i, std::size_t j, const Int& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < A.cols(); ++k) A.at(i, k) -= q * A.at(j, k);
    for (std::size_t k = 0; k < U.cols(); ++k) U.at(i, k) -= q * U.at(j, k);
    for (std::size_t k = 0; k < Ui.rows(); ++k) Ui.at(k, j) += q * Ui.at(k, i);
  }
  // col i -= q * col j
  void col_op(std::size_t i, std::size_t j, const Int& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < A.rows(); ++k) A.at(k, i) -= q * A.at(k, j);
    for (std::size_t k = 0; k < V.rows(); ++k) V.at(k, i) -= q * V.at(k, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t k = 0; k < A.cols(); ++k) A.at(i, k) = -A.at(i, k);
    for (std::size_t k = 0; k < U.cols(); ++k) U.at(i, k) = -U.at(i, k);
    for (std::size_t k = 0; k < Ui.rows(); ++k) Ui.at(k, i) = -Ui.at(k, i);
  }
};

}  // namespace

SmithForm smith_form(const IntMat& A0) {
  SnfWork w{A0, IntMat::identity(A0.rows()), IntMat::identity(A0.rows()),
            IntMat::identity(A0.cols())};
  const std::size_t m = A0.rows(), n = A0.cols();
  const std::size_t steps = std::min(m, n);

  for (std::size_t t = 0; t < steps; ++t) {
    // locate a pivot of minimal absolute value in the trailing block
    bool found = false;
    std::size_t pi = t, pj = t;
    Int best;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        const Int& x = w.A.at(i, j);
        if (x == 0) continue;
        Int a = abs(x);
        if (!found || a < best) {
          found = true;
          best = a;
          pi = i;
          pj = j;
        }
      }
    if (!found) break;
    w.swap_rows(t, pi);
    w.swap_cols(t, pj);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (w.A.at(i, t) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), w.A.at(i, t).get_mpz_t(), w.A.at(t, t).get_mpz_t());
        w.row_op(i, t, q);
        if (w.A.at(i, t) != 0) {
          w.swap_rows(t, i);  // remainder is smaller; keep reducing
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (w.A.at(t, j) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), w.A.at(t, j).get_mpz_t(), w.A.at(t, t).get_mpz_t());
        w.col_op(j, t, q);
        if (w.A.at(t, j) != 0) {
          w.swap_cols(t, j);
          clean = false;
        }
      }
      if (!clean) continue;
      // pivot must divide every entry of the trailing block
      bool divides_all = true;
      for (std::size_t i = t + 1; i < m && divides_all; ++i)
        for (std::size_t j = t + 1; j < n; ++j) {
          if (!mpz_divisible_p(w.A.at(i, j).get_mpz_t(), w.A.at(t, t).get_mpz_t())) {
            // fold the offending row into row t and restart the reduction
            w.row_op(t, i, Int(-1));
            divides_all = false;
            break;
          }
        }
      if (divides_all) break;
    }
    if (w.A.at(t, t) < 0) w.negate_row(t);
  }

  SmithForm out;
  out.D = w.A;
  out.U = w.U;
  out.Ui = w.Ui;
  out.V = w.V;
  out.divisors.resize(steps, Int(0));
  for (std::size_t t = 0; t < steps; ++t) {
    out.divisors[t] = w.A.at(t, t);
    if (out.divisors[t] != 0) out.rank = t + 1;
  }
  return out;
}

Int determinant(const IntMat& A0) {
  if (A0.rows() != A0.cols()) throw input_error("determinant: matrix not square");
  const std::size_t n = A0.rows();
  if (n == 0) return 1;
  IntMat A = A0;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A.at(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && A.at(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(A.at(k, j), A.at(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = A.at(i, j) * A.at(k, k) - A.at(i, k) * A.at(k, j);
        mpz_divexact(A.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = A.at(k, k);
  }
  return sign * A.at(n - 1, n - 1);
}

std::optional<std::vector<Int>> solve_integer(const IntMat& A, const std::vector<Int>& b) {
  if (b.size() != A.rows()) throw input_error("solve_integer: rhs length mismatch");
  SmithForm s = smith_form(A);
  std::vector<Int> ub = s.U.apply(b);
  std::vector<Int> y(A.cols(), Int(0));
  for (std::size_t i = 0; i < ub.size(); ++i) {
    Int di = (i < s.divisors.size()) ? s.divisors[i] : Int(0);
    if (di == 0) {
      if (ub[i] != 0) return std::nullopt;
    } else {
      if (!mpz_divisible_p(ub[i].get_mpz_t(), di.get_mpz_t())) return std::nullopt;
      mpz_divexact(y[i].get_mpz_t(), ub[i].get_mpz_t(), di.get_mpz_t());
    }
  }
  return s.V.apply(y);
}

IntMat kernel_lattice(const IntMat& A) {
  SmithForm s = smith_form(A);
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < A.cols(); ++j) {
    Int dj = (j < s.divisors.size()) ? s.divisors[j] : Int(0);
    if (dj == 0) free_cols.push_back(j);
  }
  IntMat K(A.cols(), free_cols.size());
  for (std::size_t t = 0; t < free_cols.size(); ++t)
    for (std::size_t i = 0; i < A.cols(); ++i) K.at(i, t) = s.V.at(i, free_cols[t]);
  return K;
}

bool is_unimodular(const IntMat& A) {
  if (A.rows() != A.cols()) return false;
  Int d = determinant(A);
  return d == 1 || d == -1;
}

}  // namespace iwalab
