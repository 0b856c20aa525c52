#include "gmreg/linalg.hpp"

#include "gmreg/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace gmreg {

double rank_tolerance(Index rows, Index cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

void require_finite(const Vector& v, const std::string& label) {
    if (!v.allFinite())
        throw DomainError(label + " has NaN or Inf entries");
}

void require_finite(const Matrix& a, const std::string& label) {
    if (!a.allFinite())
        throw DomainError(label + " has NaN or Inf entries");
}

SingularSystem svd(const Matrix& F) {
    if (F.rows() < 1 || F.cols() < 1)
        throw DomainError("svd: empty matrix");
    require_finite(F, "svd input");

    Eigen::JacobiSVD<Matrix> dec(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw DecompositionError("SVD failed to converge on a " +
                                 std::to_string(F.rows()) + "x" +
                                 std::to_string(F.cols()) + " matrix");

    const Vector& sv = dec.singularValues();
    const double tol = rank_tolerance(F.rows(), F.cols(), sv.size() ? sv(0) : 0.0);
    Index r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;

    SingularSystem S;
    S.U = dec.matrixU().leftCols(r);
    S.sigma = sv.head(r);
    S.V = dec.matrixV().leftCols(r);
    return S;
}

Vector pseudo_solve(const SingularSystem& S, const Vector& y) {
    if (y.size() != S.data_dim())
        throw ShapeError("pseudo_solve: y has length " +
                         std::to_string(y.size()) + ", expected " +
                         std::to_string(S.data_dim()));
    Vector coeffs = S.U.transpose() * y;
    coeffs.array() /= S.sigma.array();
    return S.V * coeffs;
}

Vector matvec(const Matrix& F, const Vector& x) {
    if (x.size() != F.cols())
        throw ShapeError("matvec: x has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(F.cols()));
    return F * x;
}

double inner(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ShapeError("inner: length mismatch " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    return a.dot(b);
}

double norm2(const Vector& a) { return a.norm(); }

}  // namespace gmreg
