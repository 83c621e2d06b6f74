#pragma once

#include <cstddef>
#include <vector>

#include "bandchol/linalg.hpp"

namespace bandchol {

/// n x p data, one observation per row. Entries are assumed mean zero.
class DataMatrix {
public:
    explicit DataMatrix(MatrixXd x);

    Eigen::Index n() const { return x_.rows(); }
    Eigen::Index p() const { return x_.cols(); }
    const MatrixXd& values() const { return x_; }

    /// Copy with every column shifted to mean zero.
    DataMatrix centered() const;
    /// Rows selected by index, in the given order.
    DataMatrix rows(const std::vector<Eigen::Index>& idx) const;

    /// Raw second-moment matrix X^T X / n.
    MatrixXd second_moments() const;

private:
    MatrixXd x_;
};

struct SampleMoments {
    MatrixXd shat;   ///< second moments of the regressors
    VectorXd chat;   ///< cross moments regressors x response
    double varhat;   ///< second moment of the response
};

/**
 * Raw (divisor n) moments for column j (0-based) and its min(j, k) nearest
 * predecessors.
 */
SampleMoments sample_moments(const DataMatrix& data, Eigen::Index j, Eigen::Index k);

/// Per-column banded least-squares fit.
struct ColumnFit {
    Eigen::Index kj = 0;       ///< number of regressors, min(j, k)
    MatrixXd shat;             ///< kj x kj
    VectorXd chat;             ///< kj
    VectorXd ahat;             ///< solves shat * ahat = chat
    MatrixXd shat_chol;        ///< lower Cholesky factor of shat
    double varhat = 0.0;
    double dhat = 0.0;         ///< residual second moment
    double nj = 0.0;           ///< n + nu0 - kj - 4
};

struct BandedRegressionStats {
    Eigen::Index k = 0;
    Eigen::Index n = 0;
    double nu0 = 0.0;
    std::vector<ColumnFit> columns;

    Eigen::Index p() const { return static_cast<Eigen::Index>(columns.size()); }
    /// Strictly lower-triangular coefficient matrix assembled from the fits.
    MatrixXd coefficient_matrix() const;
    VectorXd residual_variances() const;
};

/// Residual variances at or below this are treated as degenerate.
inline constexpr double kMinResidual = 1e-14;

/**
 * Least-squares fits of each column on its k nearest predecessors, given the
 * raw second-moment matrix of the data. No check on n_j is made here.
 *
 * Throws SingularDesign when a regressor block is not numerically invertible
 * and DegenerateResidual when a residual variance is at or below kMinResidual.
 */
BandedRegressionStats least_squares_columns(const MatrixXd& second_moments, Eigen::Index n, Eigen::Index k,
                                            double nu0 = 0.0);

/// least_squares_columns plus the requirement n_j > 0 for every column.
BandedRegressionStats banded_regression(const DataMatrix& data, Eigen::Index k, double nu0);
BandedRegressionStats banded_regression(const MatrixXd& second_moments, Eigen::Index n, Eigen::Index k,
                                        double nu0);

}  // namespace bandchol
