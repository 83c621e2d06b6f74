#include "bandchol/competitors.hpp"

#include <algorithm>

#include "bandchol/mcd.hpp"

namespace bandchol {

BandedGraph make_banded_graph(Eigen::Index p, Eigen::Index k) {
    if (p < 1) throw InputError("make_banded_graph: p must be positive");
    if (k < 0) throw InputError("make_banded_graph: negative bandwidth");
    BandedGraph g;
    g.p = p;
    g.k = std::min(k, p - 1);
    const Eigen::Index count = p - g.k;
    for (Eigen::Index j = 0; j < count; ++j) g.cliques.push_back({j, j + g.k});
    if (g.k > 0)
        for (Eigen::Index j = 0; j + 1 < count; ++j) g.separators.push_back({j + 1, j + g.k});
    return g;
}

SpdMatrixXd bl_banded_estimator(const MatrixXd& g, Eigen::Index n, Eigen::Index k) {
    const BandedRegressionStats s = least_squares_columns(g, n, k);
    return SpdMatrixXd(compose_dense(s.coefficient_matrix(), s.residual_variances()));
}

SpdMatrixXd bl_banded_estimator(const DataMatrix& data, Eigen::Index k) {
    return bl_banded_estimator(data.second_moments(), data.n(), k);
}

namespace {

MatrixXd block_inverse(const MatrixXd& s, const IndexBlock& b, std::size_t clique_index) {
    const MatrixXd sub = s.block(b.first, b.first, b.size(), b.size());
    Eigen::LLT<MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) throw SingularClique(clique_index);
    const MatrixXd l = llt.matrixL();
    if (!(l.diagonal().array().square().minCoeff() > 1e-12 * sub.diagonal().maxCoeff()))
        throw SingularClique(clique_index);
    return llt.solve(MatrixXd::Identity(b.size(), b.size()));
}

}  // namespace

SpdMatrixXd graphical_mle_banded(const MatrixXd& s, Eigen::Index k) {
    if (s.rows() != s.cols()) throw DimensionMismatch("graphical_mle_banded: second-moment matrix not square");
    const BandedGraph graph = make_banded_graph(s.rows(), k);
    MatrixXd omega = MatrixXd::Zero(s.rows(), s.cols());
    for (std::size_t c = 0; c < graph.cliques.size(); ++c) {
        const IndexBlock& b = graph.cliques[c];
        omega.block(b.first, b.first, b.size(), b.size()) += block_inverse(s, b, c + 1);
    }
    for (std::size_t c = 0; c < graph.separators.size(); ++c) {
        const IndexBlock& b = graph.separators[c];
        omega.block(b.first, b.first, b.size(), b.size()) -= block_inverse(s, b, c + 1);
    }
    return SpdMatrixXd((omega + omega.transpose()) / 2.0);
}

SpdMatrixXd graphical_mle_banded(const DataMatrix& data, Eigen::Index k) {
    return graphical_mle_banded(data.second_moments(), k);
}

}  // namespace bandchol
