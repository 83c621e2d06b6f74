#pragma once

// Reference computations used only by the tests. Each one follows a route
// independent of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Cyclic Jacobi rotations; returns ascending eigenvalues of a symmetric matrix.
inline std::vector<double> jacobi_eigenvalues(MatrixXd a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        if (off < 1e-28) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Gauss-Jordan inverse with partial pivoting.
inline MatrixXd gauss_jordan_inverse(MatrixXd a) {
    const Eigen::Index n = a.rows();
    MatrixXd inv = MatrixXd::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index piv = c;
        for (Eigen::Index r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        a.row(c).swap(a.row(piv));
        inv.row(c).swap(inv.row(piv));
        const double d = a(c, c);
        a.row(c) /= d;
        inv.row(c) /= d;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            a.row(r) -= f * a.row(c);
            inv.row(r) -= f * inv.row(c);
        }
    }
    return inv;
}

/// Sequential regressions on the covariance: a_j = Var(Z_j)^{-1} Cov(Z_j, Y_j).
struct Factor {
    MatrixXd a;
    VectorXd d;
};
inline Factor regression_factor(const MatrixXd& sigma, Eigen::Index k) {
    const Eigen::Index p = sigma.rows();
    Factor f{MatrixXd::Zero(p, p), VectorXd(p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::Index kj = std::min(j, k);
        const Eigen::Index first = j - kj;
        if (kj == 0) {
            f.d(j) = sigma(j, j);
            continue;
        }
        const MatrixXd szz = sigma.block(first, first, kj, kj);
        const VectorXd szx = sigma.block(first, j, kj, 1);
        const VectorXd coef = szz.colPivHouseholderQr().solve(szx);
        f.a.block(j, first, 1, kj) = coef.transpose();
        f.d(j) = sigma(j, j) - szx.dot(coef);
    }
    return f;
}

/// Random SPD matrix Q diag(eigs) Q^T with log-uniform spectrum in [1, cond].
inline MatrixXd random_spd(Eigen::Index p, double cond, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MatrixXd g(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) g(i, j) = normal(rng);
    const MatrixXd q = g.householderQr().householderQ();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VectorXd eig(p);
    for (Eigen::Index i = 0; i < p; ++i) eig(i) = std::pow(cond, u(rng));
    eig(0) = 1.0;
    if (p > 1) eig(p - 1) = cond;
    MatrixXd s = q * eig.asDiagonal() * q.transpose();
    return (s + s.transpose()) / 2.0;
}

inline MatrixXd random_gaussian_data(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = normal(rng);
    return x;
}

/// Composite Simpson integral of the IG(shape, rate) density over (0, m], in
/// the variable t = log x to spread the mass.
inline double ig_cdf_quadrature(double m, double shape, double rate, int intervals = 20000) {
    const double lo = std::log(rate) - 40.0;  // density is negligible below this
    const double hi = std::log(m);
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / intervals;
    auto f = [&](double t) {
        // x * IG density at x = e^t
        const double logx = t;
        const double logd = shape * std::log(rate) - std::lgamma(shape) - shape * logx - rate * std::exp(-logx);
        return std::exp(logd);
    };
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

}  // namespace oracle
