#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "bandchol/errors.hpp"

namespace bandchol {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionMismatch(std::string(what) + ": matrix is not square");
}

template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if (m.size() == 0) return Scalar(0);
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Relative tolerance used when accepting a matrix as symmetric.
inline constexpr double kSymmetryTolerance = 1e-12;

/**
 * Symmetric positive-definite matrix.
 *
 * Construction symmetrizes the input as (m + m^T)/2 after checking that the
 * asymmetry is within kSymmetryTolerance relative to the largest entry, and
 * rejects anything whose Cholesky factorization fails.
 */
template <typename Scalar>
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix<Scalar> m) {
        detail::require_square(m, "SpdMatrix");
        detail::require_finite(m, "SpdMatrix");
        if (m.size() == 0) throw InputError("SpdMatrix: empty matrix");
        const Scalar scale = m.cwiseAbs().maxCoeff();
        if (detail::asymmetry(m) > Scalar(kSymmetryTolerance) * scale)
            throw InputError("SpdMatrix: matrix is not symmetric");
        m = (m + m.transpose()).eval() / Scalar(2);
        Eigen::LLT<Matrix<Scalar>> llt(m);
        if (llt.info() != Eigen::Success) throw SingularMatrix("SpdMatrix: matrix is not positive definite");
        m_ = std::move(m);
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix<Scalar>& matrix() const { return m_; }
    operator const Matrix<Scalar>&() const { return m_; }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Matrix<Scalar> m_;
};

using SpdMatrixXd = SpdMatrix<double>;

/// Largest singular value.
template <typename Derived>
typename Derived::Scalar norm_spectral(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    detail::require_finite(m, "norm_spectral");
    if (m.size() == 0) return Scalar(0);
    if (m.rows() == m.cols() && detail::asymmetry(m) == Scalar(0)) {
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    const Matrix<Scalar> gram = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(Scalar(0), es.eigenvalues().maxCoeff()));
}

/// Maximum absolute column sum.
template <typename Derived>
typename Derived::Scalar norm_l1(const Eigen::MatrixBase<Derived>& m) {
    detail::require_finite(m, "norm_l1");
    if (m.size() == 0) return 0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Maximum absolute row sum.
template <typename Derived>
typename Derived::Scalar norm_linf(const Eigen::MatrixBase<Derived>& m) {
    detail::require_finite(m, "norm_linf");
    if (m.size() == 0) return 0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar norm_fro(const Eigen::MatrixBase<Derived>& m) {
    detail::require_finite(m, "norm_fro");
    return m.norm();
}

template <typename Derived>
typename Derived::Scalar norm_max(const Eigen::MatrixBase<Derived>& m) {
    detail::require_finite(m, "norm_max");
    if (m.size() == 0) return 0;
    return m.cwiseAbs().maxCoeff();
}

/// Keeps entry (i,j) iff |i - j| <= k.
template <typename Derived>
Matrix<typename Derived::Scalar> band_matrix(const Eigen::MatrixBase<Derived>& m, Eigen::Index k) {
    using Scalar = typename Derived::Scalar;
    if (k < 0) throw InputError("band_matrix: negative bandwidth");
    Matrix<Scalar> out = m;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            if (std::abs(i - j) > k) out(i, j) = Scalar(0);
    return out;
}

/// Keeps entry i iff |i - j| <= k; j is 1-based.
template <typename Derived>
Vector<typename Derived::Scalar> band_vector(const Eigen::MatrixBase<Derived>& v, Eigen::Index k,
                                             Eigen::Index j) {
    using Scalar = typename Derived::Scalar;
    if (k < 0) throw InputError("band_vector: negative bandwidth");
    if (j < 1 || j > v.size()) throw InputError("band_vector: index out of range");
    Vector<Scalar> out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (std::abs(i - (j - 1)) > k) out(i) = Scalar(0);
    return out;
}

/// (lambda_min, lambda_max) of a symmetric matrix.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> eig_extremes(
    const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(m, "eig_extremes");
    detail::require_finite(m, "eig_extremes");
    if (m.size() == 0) throw InputError("eig_extremes: empty matrix");
    if (detail::asymmetry(m) > Scalar(kSymmetryTolerance) * m.cwiseAbs().maxCoeff())
        throw InputError("eig_extremes: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

template <typename Scalar>
std::pair<Scalar, Scalar> eig_extremes(const SpdMatrix<Scalar>& m) {
    return eig_extremes(m.matrix());
}

/// Lower-triangular L with L L^T = m.
template <typename Derived>
Matrix<typename Derived::Scalar> spd_cholesky(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(m, "spd_cholesky");
    Eigen::LLT<Matrix<Scalar>> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMatrix("spd_cholesky: factorization failed");
    return llt.matrixL();
}

template <typename Scalar>
Matrix<Scalar> spd_cholesky(const SpdMatrix<Scalar>& m) {
    return spd_cholesky(m.matrix());
}

template <typename Derived, typename Rhs>
Vector<typename Derived::Scalar> spd_solve(const Eigen::MatrixBase<Derived>& m,
                                           const Eigen::MatrixBase<Rhs>& rhs) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(m, "spd_solve");
    if (rhs.size() != m.rows()) throw DimensionMismatch("spd_solve: rhs length differs from matrix size");
    Eigen::LLT<Matrix<Scalar>> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMatrix("spd_solve: factorization failed");
    return llt.solve(rhs);
}

template <typename Scalar, typename Rhs>
Vector<Scalar> spd_solve(const SpdMatrix<Scalar>& m, const Eigen::MatrixBase<Rhs>& rhs) {
    return spd_solve(m.matrix(), rhs);
}

}  // namespace bandchol
