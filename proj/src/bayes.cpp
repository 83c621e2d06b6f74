#include "bandchol/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bandchol/parallel.hpp"

namespace bandchol {

namespace {

namespace bm = boost::math;
using GammaPolicy = bm::policies::policy<bm::policies::overflow_error<bm::policies::ignore_error>,
                                         bm::policies::underflow_error<bm::policies::ignore_error>,
                                         bm::policies::evaluation_error<bm::policies::ignore_error>>;

// Draws are summed in fixed-size blocks, then blocks in order, so the result
// does not depend on the number of workers.
constexpr std::size_t kDrawBlock = 64;

}  // namespace

double ig_cdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw InputError("ig_cdf: shape and rate must be positive");
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 1.0;
    return bm::gamma_q(shape, rate / x, GammaPolicy());
}

double log_ig_cdf(double x, double shape, double rate) {
    const double q = ig_cdf(x, shape, rate);
    return q > 0.0 ? std::log(q) : -std::numeric_limits<double>::infinity();
}

double sample_truncated_gamma(double shape, double rate, double lower, Engine& rng, std::size_t column) {
    const GammaPolicy pol;
    const double x0 = rate * lower;
    const double retained = x0 > 0.0 ? bm::gamma_q(shape, x0, pol) : 1.0;
    if (!(retained >= 1e-300)) throw TruncationMassZero(column);
    const double below = x0 > 0.0 ? bm::gamma_p(shape, x0, pol) : 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    // Invert through whichever tail keeps the target probability well away from 1.
    const double upper_tail = (1.0 - u) * retained;
    double x;
    if (upper_tail <= 0.0) {
        x = std::numeric_limits<double>::max();
    } else if (upper_tail < 0.5) {
        x = bm::gamma_q_inv(shape, upper_tail, pol);
    } else {
        x = bm::gamma_p_inv(shape, below + u * retained, pol);
    }
    return std::max(x, x0) / rate;
}

PosteriorModel fit_posterior(const MatrixXd& second_moments, Eigen::Index n, const PriorConfig& prior) {
    if (!(prior.M > 0.0)) throw InputError("fit_posterior: M must be positive");
    PosteriorModel model{banded_regression(second_moments, n, prior.k, prior.nu0), prior};
    for (Eigen::Index j = 0; j < model.p(); ++j)
        if (!(ig_cdf(prior.M, model.shape(j), model.rate(j)) >= 1e-300))
            throw TruncationMassZero(static_cast<std::size_t>(j + 1));
    return model;
}

PosteriorModel fit_posterior(const DataMatrix& data, const PriorConfig& prior) {
    return fit_posterior(data.second_moments(), data.n(), prior);
}

SpdMatrixXd plug_in_estimator(const PosteriorModel& model) {
    const Eigen::Index p = model.p();
    const double n = static_cast<double>(model.n());
    VectorXd d(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto& c = model.stats.columns[static_cast<std::size_t>(j)];
        if (!(c.dhat > kMinResidual)) throw DegenerateResidual(static_cast<std::size_t>(j + 1));
        if (!(c.nj > 0.0)) throw InputError("plug_in_estimator: n_j must be positive");
        // E(d_j^{-1} | X) = n_j / (n dhat_j) under the untruncated posterior.
        d(j) = n * c.dhat / c.nj;
    }
    return SpdMatrixXd(compose_dense(model.stats.coefficient_matrix(), d));
}

CholeskyFactorXd sample_posterior(const PosteriorModel& model, std::uint64_t seed) {
    const Eigen::Index p = model.p();
    const double n = static_cast<double>(model.n());
    MatrixXd a = MatrixXd::Zero(p, p);
    VectorXd d(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < p; ++j) {
        Engine rng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(j)}));
        const double theta = sample_truncated_gamma(model.shape(j), model.rate(j), 1.0 / model.prior.M, rng,
                                                    static_cast<std::size_t>(j + 1));
        d(j) = std::min(1.0 / theta, model.prior.M);
        const auto& c = model.stats.columns[static_cast<std::size_t>(j)];
        if (c.kj == 0) continue;
        VectorXd z(c.kj);
        for (Eigen::Index i = 0; i < c.kj; ++i) z(i) = normal(rng);
        // Cov(L^{-T} z) = (L L^T)^{-1} = Shat^{-1}.
        const VectorXd noise = c.shat_chol.transpose().triangularView<Eigen::Upper>().solve(z);
        a.block(j, j - c.kj, 1, c.kj) = (c.ahat + std::sqrt(d(j) / n) * noise).transpose();
    }
    return CholeskyFactorXd(std::move(a), std::move(d));
}

SpdMatrixXd posterior_mean_omega(const PosteriorModel& model, std::size_t draws, std::uint64_t seed,
                                 unsigned threads) {
    if (draws < 1) throw InputError("posterior_mean_omega: need at least one draw");
    const Eigen::Index p = model.p();
    const std::size_t blocks = (draws + kDrawBlock - 1) / kDrawBlock;
    std::vector<MatrixXd> partial(blocks, MatrixXd::Zero(p, p));
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t end = std::min(draws, (b + 1) * kDrawBlock);
        for (std::size_t s = b * kDrawBlock; s < end; ++s) {
            const CholeskyFactorXd f = sample_posterior(model, draw_seed(seed, s));
            partial[b] += compose_dense(f.A(), f.D());
        }
    });
    MatrixXd total = MatrixXd::Zero(p, p);
    for (const auto& m : partial) total += m;
    return SpdMatrixXd(total / static_cast<double>(draws));
}

std::string_view norm_name(Norm norm) {
    switch (norm) {
        case Norm::Spectral: return "spectral";
        case Norm::Linf: return "linf";
        case Norm::Frobenius: return "fro";
    }
    return "unknown";
}

Norm parse_norm(std::string_view name) {
    if (name == "spectral") return Norm::Spectral;
    if (name == "linf") return Norm::Linf;
    if (name == "fro" || name == "frobenius") return Norm::Frobenius;
    throw InputError("unknown norm '" + std::string(name) + "' (expected spectral, linf or fro)");
}

double matrix_norm(const MatrixXd& m, Norm norm) {
    switch (norm) {
        case Norm::Spectral: return norm_spectral(m);
        case Norm::Linf: return norm_linf(m);
        case Norm::Frobenius: return norm_fro(m);
    }
    throw InputError("matrix_norm: unknown norm");
}

PLossEstimate estimate_p_loss(const PosteriorModel& model, const SpdMatrixXd& omega0, std::size_t draws, Norm norm,
                              std::uint64_t seed, unsigned threads) {
    if (draws < 1) throw InputError("estimate_p_loss: need at least one draw");
    if (omega0.dim() != model.p()) throw DimensionMismatch("estimate_p_loss: truth dimension differs from model");
    std::vector<double> losses(draws);
    const std::size_t blocks = (draws + kDrawBlock - 1) / kDrawBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t end = std::min(draws, (b + 1) * kDrawBlock);
        for (std::size_t s = b * kDrawBlock; s < end; ++s) {
            const CholeskyFactorXd f = sample_posterior(model, draw_seed(seed, s));
            losses[s] = matrix_norm(compose_dense(f.A(), f.D()) - omega0.matrix(), norm);
        }
    });
    double sum = 0.0;
    for (double l : losses) sum += l;
    const double mean = sum / static_cast<double>(draws);
    double ss = 0.0;
    for (double l : losses) ss += (l - mean) * (l - mean);
    PLossEstimate est;
    est.mean = mean;
    est.std_error = draws > 1 ? std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws)) : 0.0;
    return est;
}

}  // namespace bandchol
