#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "iwalab/numeric.hpp"

namespace iwalab {

// Dense integer matrix over GMP integers. Row-major storage.
class IntMat {
 public:
  IntMat() : rows_(0), cols_(0) {}
  IntMat(std::size_t r, std::size_t c) : rows_(r), cols_(c), data_(r * c, Int(0)) {}
  static IntMat identity(std::size_t n);
  static IntMat from_rows(const std::vector<std::vector<Int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const IntMat& o) const = default;

  IntMat transpose() const;
  IntMat operator*(const IntMat& o) const;
  IntMat operator+(const IntMat& o) const;
  IntMat operator-(const IntMat& o) const;
  IntMat scaled(const Int& c) const;
  std::vector<Int> apply(const std::vector<Int>& x) const;  // matrix * column vector

  IntMat hstack(const IntMat& o) const;
  IntMat vstack(const IntMat& o) const;
  IntMat submatrix(const std::vector<std::size_t>& row_idx,
                   const std::vector<std::size_t>& col_idx) const;
  IntMat column(std::size_t j) const;
  void set_column(std::size_t j, const std::vector<Int>& v);
  std::vector<Int> column_vec(std::size_t j) const;

  void reduce_entries_mod(const Int& m);  // least nonnegative residues
  bool is_zero() const;

 private:
  std::size_t rows_, cols_;
  std::vector<Int> data_;
};

// Smith normal form: U * A * V = D with U, V unimodular and D diagonal,
// divisors[i] | divisors[i+1]. divisors has length min(rows, cols) and is
// padded with explicit zeros for rank-deficient input. Ui is the inverse
// of U, tracked through the elimination.
struct SmithForm {
  IntMat U, Ui, V, D;
  std::vector<Int> divisors;
  std::size_t rank = 0;  // number of nonzero divisors

  // divisor of coordinate i (0 beyond the stored list = free coordinate)
  Int divisor_at(std::size_t i) const {
    return i < divisors.size() ? divisors[i] : Int(0);
  }
};

SmithForm smith_form(const IntMat& A);

// Exact determinant (Bareiss fraction-free elimination); square input.
Int determinant(const IntMat& A);

// One solution of A x = b over the integers, if any.
std::optional<std::vector<Int>> solve_integer(const IntMat& A, const std::vector<Int>& b);

// Basis of the integer kernel lattice {x : A x = 0}, as matrix columns.
IntMat kernel_lattice(const IntMat& A);

bool is_unimodular(const IntMat& A);

}  // namespace iwalab
