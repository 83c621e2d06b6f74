#pragma once

#include <cmath>
#include <type_traits>
#include <variant>
#include <vector>

#include "bandchol/linalg.hpp"

namespace bandchol {

/**
 * Modified Cholesky factor (A, D) of a precision matrix,
 * Omega = (I - A)^T D^{-1} (I - A).
 *
 * Row j of A holds the autoregressive coefficients of coordinate j on its
 * predecessors, D(j) the corresponding innovation variance.
 */
template <typename Scalar>
class CholeskyFactor {
public:
    CholeskyFactor(Matrix<Scalar> a, Vector<Scalar> d) : a_(std::move(a)), d_(std::move(d)) {
        if (a_.rows() != a_.cols() || a_.rows() != d_.size())
            throw DimensionMismatch("CholeskyFactor: A must be p x p and D of length p");
        if (!a_.allFinite() || !d_.allFinite()) throw InputError("CholeskyFactor: non-finite entries");
        for (Eigen::Index i = 0; i < a_.rows(); ++i)
            for (Eigen::Index j = i; j < a_.cols(); ++j)
                if (a_(i, j) != Scalar(0)) throw InputError("CholeskyFactor: A must be strictly lower triangular");
        if ((d_.array() <= Scalar(0)).any()) throw InputError("CholeskyFactor: D must be positive");
    }

    Eigen::Index dim() const { return d_.size(); }
    const Matrix<Scalar>& A() const { return a_; }
    const Vector<Scalar>& D() const { return d_; }

private:
    Matrix<Scalar> a_;
    Vector<Scalar> d_;
};

using CholeskyFactorXd = CholeskyFactor<double>;

/// (I - A)^T D^{-1} (I - A) as a dense matrix, skipping the SPD check.
template <typename Scalar>
Matrix<Scalar> compose_dense(const Matrix<Scalar>& a, const Vector<Scalar>& d) {
    const Eigen::Index p = d.size();
    const Matrix<Scalar> t = Matrix<Scalar>::Identity(p, p) - a;
    Matrix<Scalar> omega = t.transpose() * d.cwiseInverse().asDiagonal() * t;
    return (omega + omega.transpose()) / Scalar(2);
}

template <typename Scalar>
SpdMatrix<Scalar> compose(const CholeskyFactor<Scalar>& f) {
    return SpdMatrix<Scalar>(compose_dense(f.A(), f.D()));
}

/// Unique (A, D) with compose(A, D) = omega.
template <typename Scalar>
CholeskyFactor<Scalar> decompose(const SpdMatrix<Scalar>& omega) {
    const Eigen::Index p = omega.dim();
    // Reverse the coordinate order, factor, and reverse back: omega = T^T T
    // with T lower triangular.
    const Matrix<Scalar> reversed = omega.matrix().reverse();
    Eigen::LLT<Matrix<Scalar>> llt(reversed);
    if (llt.info() != Eigen::Success) throw SingularMatrix("decompose: factorization failed");
    const Matrix<Scalar> lower = llt.matrixL();
    const Matrix<Scalar> t = lower.transpose().reverse();

    Vector<Scalar> d(p);
    Matrix<Scalar> a = Matrix<Scalar>::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Scalar tjj = t(j, j);
        if (!(tjj > Scalar(0))) throw SingularMatrix("decompose: non-positive pivot");
        d(j) = Scalar(1) / (tjj * tjj);
        for (Eigen::Index l = 0; l < j; ++l) a(j, l) = -t(j, l) / tjj;
    }
    return CholeskyFactor<Scalar>(std::move(a), std::move(d));
}

/**
 * Population coefficients when each coordinate is regressed on at most its
 * k nearest predecessors under covariance sigma.
 */
template <typename Scalar>
CholeskyFactor<Scalar> population_coefficients(const SpdMatrix<Scalar>& sigma, Eigen::Index k) {
    if (k < 0) throw InputError("population_coefficients: negative bandwidth");
    const Matrix<Scalar>& s = sigma.matrix();
    const Eigen::Index p = sigma.dim();
    Matrix<Scalar> a = Matrix<Scalar>::Zero(p, p);
    Vector<Scalar> d(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::Index kj = std::min(j, k);
        const Eigen::Index first = j - kj;
        if (kj == 0) {
            d(j) = s(j, j);
            continue;
        }
        const Matrix<Scalar> szz = s.block(first, first, kj, kj);
        const Vector<Scalar> szx = s.block(first, j, kj, 1);
        Eigen::LLT<Matrix<Scalar>> llt(szz);
        if (llt.info() != Eigen::Success) throw SingularMatrix("population_coefficients: singular principal block");
        const Vector<Scalar> coef = llt.solve(szx);
        a.block(j, first, 1, kj) = coef.transpose();
        d(j) = s(j, j) - szx.dot(coef);
        if (!(d(j) > Scalar(0))) throw SingularMatrix("population_coefficients: non-positive residual variance");
    }
    return CholeskyFactor<Scalar>(std::move(a), std::move(d));
}

/// Decay envelope gamma(k) for the out-of-band mass of a Cholesky factor.
struct PolynomialDecay {
    double alpha;
    double scale;
};
struct ExponentialDecay {
    double beta;
    double scale;
};
/// gamma(k) = scale for k <= k0 and 0 beyond.
struct ExactBanding {
    int k0;
    double scale = 0.0;
};

class GammaSpec {
public:
    using Kind = std::variant<PolynomialDecay, ExponentialDecay, ExactBanding>;

    template <typename T>
        requires std::is_constructible_v<Kind, T>
    GammaSpec(T kind) : kind_(std::move(kind)) {}  // NOLINT(google-explicit-constructor)

    const Kind& kind() const { return kind_; }

    double operator()(int k) const {
        return std::visit(
            [k](const auto& g) -> double {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, PolynomialDecay>) {
                    return g.scale * std::pow(static_cast<double>(k), -g.alpha);
                } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
                    return g.scale * std::exp(-g.beta * k);
                } else {
                    return k > g.k0 ? 0.0 : g.scale;
                }
            },
            kind_);
    }

private:
    Kind kind_;
};

struct ClassReport {
    bool eps0_ok = false;
    /// gamma_profile[k] = max_i sum_{j < i-k} |a_ij|, for k = 0..p-1.
    std::vector<double> gamma_profile;
    /// omega_profile[k] = max_i sum_{|i-j| > k} |omega_ij|, for k = 0..p-1.
    std::vector<double> omega_profile;
    bool member_U = false;
    bool member_Ustar = false;
};

/// Out-of-band row mass max_i sum_{|i-j|>k} |m_ij| for k = 0..p-1.
template <typename Derived>
std::vector<double> off_band_profile(const Eigen::MatrixBase<Derived>& m) {
    const Eigen::Index p = m.rows();
    std::vector<double> profile(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index k = 0; k < p; ++k) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (std::abs(i - j) > k) row += std::abs(static_cast<double>(m(i, j)));
            worst = std::max(worst, row);
        }
        profile[static_cast<std::size_t>(k)] = worst;
    }
    return profile;
}

/**
 * Membership of omega in the bandable classes defined through the Cholesky
 * factor (U) and through omega itself (U*). The envelope constraint is
 * checked for 1 <= k <= p-1 against gamma_scale * gamma(k).
 */
template <typename Scalar>
ClassReport class_membership(const SpdMatrix<Scalar>& omega, double eps0, const GammaSpec& gamma,
                             double gamma_scale = 1.0) {
    if (!(eps0 > 0.0)) throw InputError("class_membership: eps0 must be positive");
    ClassReport report;
    const auto [lmin, lmax] = eig_extremes(omega);
    report.eps0_ok = eps0 <= lmin && lmax <= 1.0 / eps0;

    const CholeskyFactor<Scalar> f = decompose(omega);
    report.gamma_profile = off_band_profile(f.A());
    report.omega_profile = off_band_profile(omega.matrix());

    bool within_u = true;
    bool within_ustar = true;
    for (std::size_t k = 1; k < report.gamma_profile.size(); ++k) {
        const double bound = gamma_scale * gamma(static_cast<int>(k));
        within_u = within_u && report.gamma_profile[k] <= bound;
        within_ustar = within_ustar && report.omega_profile[k] <= bound;
    }
    report.member_U = report.eps0_ok && within_u;
    report.member_Ustar = report.eps0_ok && within_ustar;
    return report;
}

}  // namespace bandchol
