#pragma once

// LU factorization of a stage matrix. Small or dense matrices use partial
// pivoting; large sparse ones (the fluid's block-tridiagonal Jacobian) use
// a sparse LU with a fill-reducing ordering.

#include "pimex/types.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <memory>

namespace pimex::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;

inline bool prefer_sparse(const Matrix& K) {
  if (K.rows() < 48) return false;
  const Index nnz = (K.array() != 0.0).count();
  return nnz * 8 < K.size();
}

class StageSolver {
 public:
  void compute(const Matrix& K) {
    n_ = K.rows();
    if (prefer_sparse(K)) {
      sparse_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
      const SparseMatrix S = K.sparseView();
      sparse_->compute(S);
      ok_ = sparse_->info() == Eigen::Success;
      if (ok_) {
        // Pivot magnitudes of U bound the conditioning from below.
        const double logdet = sparse_->logAbsDeterminant();
        ok_ = std::isfinite(logdet);
      }
      dense_.reset();
    } else {
      dense_ = std::make_unique<Eigen::PartialPivLU<Matrix>>(K);
      ok_ = n_ == 0 || dense_->rcond() > 1e-14;
      sparse_.reset();
    }
  }

  bool ok() const { return ok_; }

  Matrix solve(const Matrix& b) const {
    return sparse_ ? Matrix(sparse_->solve(b)) : Matrix(dense_->solve(b));
  }
  Vector solve(const Vector& b) const {
    return sparse_ ? Vector(sparse_->solve(b)) : Vector(dense_->solve(b));
  }
  Vector solve_transpose(const Vector& b) const {
    return sparse_ ? Vector(sparse_->transpose().solve(b)) : Vector(dense_->transpose().solve(b));
  }

 private:
  Index n_ = 0;
  bool ok_ = false;
  std::unique_ptr<Eigen::PartialPivLU<Matrix>> dense_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> sparse_;
};

}  // namespace pimex::detail
