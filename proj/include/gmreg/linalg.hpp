#pragma once

#include <Eigen/Core>

#include <string>

namespace gmreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thin singular value decomposition F ~ U * sigma.asDiagonal() * V^T with
// singular values sorted in decreasing order.  Values at or below the
// numerical rank tolerance are excluded, so rank() == sigma.size() and
// every stored sigma_i is strictly positive.
struct SingularSystem {
    Matrix U;      // data_dim x r, orthonormal columns
    Vector sigma;  // r, strictly positive, non-increasing
    Matrix V;      // solution_dim x r, orthonormal columns

    Index rank() const { return sigma.size(); }
    Index data_dim() const { return U.rows(); }
    Index solution_dim() const { return V.rows(); }
};

// Threshold below which a singular value counts as zero:
// max(rows, cols) * machine epsilon * sigma_max.
double rank_tolerance(Index rows, Index cols, double sigma_max);

// Computes the rank-truncated thin SVD.  Throws DomainError on empty or
// non-finite input, DecompositionError if the factorization fails.
SingularSystem svd(const Matrix& F);

// Minimum-norm least-squares solution sum_i (u_i'y / sigma_i) v_i over the
// retained (numerically nonzero) triples.
Vector pseudo_solve(const SingularSystem& S, const Vector& y);

Vector matvec(const Matrix& F, const Vector& x);
double inner(const Vector& a, const Vector& b);
double norm2(const Vector& a);

// Throws DomainError mentioning `label` if the argument has NaN or Inf
// entries.
void require_finite(const Vector& v, const std::string& label);
void require_finite(const Matrix& a, const std::string& label);

}  // namespace gmreg
