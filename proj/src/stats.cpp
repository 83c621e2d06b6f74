#include "bandchol/stats.hpp"

#include <algorithm>
#include <string>

namespace bandchol {

DataMatrix::DataMatrix(MatrixXd x) : x_(std::move(x)) {
    if (x_.rows() < 1 || x_.cols() < 1) throw InputError("DataMatrix: need at least one row and one column");
    if (!x_.allFinite()) throw InputError("DataMatrix: non-finite entries");
}

DataMatrix DataMatrix::centered() const {
    MatrixXd c = x_;
    c.rowwise() -= x_.colwise().mean();
    return DataMatrix(std::move(c));
}

DataMatrix DataMatrix::rows(const std::vector<Eigen::Index>& idx) const {
    MatrixXd sub(static_cast<Eigen::Index>(idx.size()), x_.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x_.row(idx[r]);
    return DataMatrix(std::move(sub));
}

MatrixXd DataMatrix::second_moments() const {
    MatrixXd g = MatrixXd::Zero(p(), p());
    g.selfadjointView<Eigen::Lower>().rankUpdate(x_.transpose());
    g = g.selfadjointView<Eigen::Lower>();
    return g / static_cast<double>(n());
}

SampleMoments sample_moments(const DataMatrix& data, Eigen::Index j, Eigen::Index k) {
    if (j < 0 || j >= data.p()) throw InputError("sample_moments: column index out of range");
    if (k < 0) throw InputError("sample_moments: negative bandwidth");
    const Eigen::Index kj = std::min(j, k);
    const Eigen::Index first = j - kj;
    const auto& x = data.values();
    const double n = static_cast<double>(data.n());
    const auto z = x.middleCols(first, kj);
    SampleMoments m;
    m.shat = z.transpose() * z / n;
    m.chat = z.transpose() * x.col(j) / n;
    m.varhat = x.col(j).squaredNorm() / n;
    return m;
}

MatrixXd BandedRegressionStats::coefficient_matrix() const {
    const Eigen::Index dim = p();
    MatrixXd a = MatrixXd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto& c = columns[static_cast<std::size_t>(j)];
        if (c.kj > 0) a.block(j, j - c.kj, 1, c.kj) = c.ahat.transpose();
    }
    return a;
}

VectorXd BandedRegressionStats::residual_variances() const {
    VectorXd d(p());
    for (Eigen::Index j = 0; j < p(); ++j) d(j) = columns[static_cast<std::size_t>(j)].dhat;
    return d;
}

BandedRegressionStats least_squares_columns(const MatrixXd& g, Eigen::Index n, Eigen::Index k, double nu0) {
    if (k < 0) throw InputError("banded_regression: negative bandwidth");
    if (g.rows() != g.cols()) throw DimensionMismatch("banded_regression: second-moment matrix not square");
    const Eigen::Index p = g.rows();
    BandedRegressionStats out;
    out.k = k;
    out.n = n;
    out.nu0 = nu0;
    out.columns.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        ColumnFit& c = out.columns[static_cast<std::size_t>(j)];
        c.kj = std::min(j, k);
        const Eigen::Index first = j - c.kj;
        c.varhat = g(j, j);
        c.nj = static_cast<double>(n) + nu0 - static_cast<double>(c.kj) - 4.0;
        c.shat = g.block(first, first, c.kj, c.kj);
        c.chat = g.block(first, j, c.kj, 1);
        if (c.kj == 0) {
            c.ahat.resize(0);
            c.shat_chol.resize(0, 0);
            c.dhat = c.varhat;
        } else {
            Eigen::LLT<MatrixXd> llt(c.shat);
            if (llt.info() != Eigen::Success) throw SingularDesign(static_cast<std::size_t>(j + 1));
            c.shat_chol = llt.matrixL();
            const double max_diag = c.shat.diagonal().maxCoeff();
            const double min_pivot = c.shat_chol.diagonal().array().square().minCoeff();
            if (!(min_pivot > 1e-12 * max_diag)) throw SingularDesign(static_cast<std::size_t>(j + 1));
            c.ahat = llt.solve(c.chat);
            c.dhat = std::max(0.0, c.varhat - c.chat.dot(c.ahat));
        }
        if (!(c.dhat > kMinResidual)) throw DegenerateResidual(static_cast<std::size_t>(j + 1));
    }
    return out;
}

BandedRegressionStats banded_regression(const MatrixXd& g, Eigen::Index n, Eigen::Index k, double nu0) {
    if (nu0 < 0.0) throw InputError("banded_regression: nu0 must be nonnegative");
    BandedRegressionStats s = least_squares_columns(g, n, k, nu0);
    for (std::size_t j = 0; j < s.columns.size(); ++j)
        if (!(s.columns[j].nj > 0.0))
            throw InputError("banded_regression: n + nu0 - min(j-1,k) - 4 must be positive (column " +
                             std::to_string(j + 1) + ")");
    return s;
}

BandedRegressionStats banded_regression(const DataMatrix& data, Eigen::Index k, double nu0) {
    return banded_regression(data.second_moments(), data.n(), k, nu0);
}

}  // namespace bandchol
