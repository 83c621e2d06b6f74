#pragma once

#include <vector>

#include "bandchol/stats.hpp"

namespace bandchol {

/// Contiguous index range [first, last] (0-based, inclusive).
struct IndexBlock {
    Eigen::Index first;
    Eigen::Index last;
    Eigen::Index size() const { return last - first + 1; }
};

/**
 * Junction structure of the k-banded graph on p nodes: cliques
 * {j, ..., min(j+k, p-1)} and separators between consecutive cliques.
 */
struct BandedGraph {
    Eigen::Index p = 0;
    Eigen::Index k = 0;
    std::vector<IndexBlock> cliques;
    std::vector<IndexBlock> separators;
};

BandedGraph make_banded_graph(Eigen::Index p, Eigen::Index k);

/// Banded Cholesky estimator from OLS coefficients and divisor-n residual variances.
SpdMatrixXd bl_banded_estimator(const DataMatrix& data, Eigen::Index k);
SpdMatrixXd bl_banded_estimator(const MatrixXd& second_moments, Eigen::Index n, Eigen::Index k);

/// Closed-form MLE of the decomposable k-banded Gaussian graphical model.
SpdMatrixXd graphical_mle_banded(const DataMatrix& data, Eigen::Index k);
SpdMatrixXd graphical_mle_banded(const MatrixXd& second_moments, Eigen::Index k);

}  // namespace bandchol
