#pragma once

#include <cstdint>
#include <string_view>

#include "bandchol/mcd.hpp"
#include "bandchol/rng.hpp"
#include "bandchol/stats.hpp"

namespace bandchol {

/// k-banded Cholesky prior: flat on in-band coefficients, d_j^{nu0/2-1} on (0, M].
struct PriorConfig {
    Eigen::Index k = 1;
    double M = 1e6;
    double nu0 = 2.0;
};

/**
 * Conditional posterior family for a fixed bandwidth:
 *   d_j | X        ~ IG(n_j/2, n dhat_j/2) truncated to (0, M]
 *   a_j | d_j, X   ~ N(ahat_j, (d_j/n) Shat_j^{-1})
 */
struct PosteriorModel {
    BandedRegressionStats stats;
    PriorConfig prior;

    Eigen::Index n() const { return stats.n; }
    Eigen::Index p() const { return stats.p(); }
    double shape(Eigen::Index j) const { return stats.columns[static_cast<std::size_t>(j)].nj / 2.0; }
    double rate(Eigen::Index j) const {
        return static_cast<double>(stats.n) * stats.columns[static_cast<std::size_t>(j)].dhat / 2.0;
    }
};

/// P(d <= x) for d ~ IG(shape, rate), i.e. the upper regularized gamma Q(shape, rate/x).
double ig_cdf(double x, double shape, double rate);
double log_ig_cdf(double x, double shape, double rate);

/**
 * Draws theta ~ Gamma(shape, rate) conditioned on theta >= lower by inverting
 * the truncated CDF. Throws TruncationMassZero(column) when the retained
 * mass underflows.
 */
double sample_truncated_gamma(double shape, double rate, double lower, Engine& rng, std::size_t column = 0);

PosteriorModel fit_posterior(const DataMatrix& data, const PriorConfig& prior);
PosteriorModel fit_posterior(const MatrixXd& second_moments, Eigen::Index n, const PriorConfig& prior);

/// (I - Ahat)^T diag(n_j / (n dhat_j)) (I - Ahat).
SpdMatrixXd plug_in_estimator(const PosteriorModel& model);

/// One joint posterior draw; column j uses the substream derive_seed(seed, {j}).
CholeskyFactorXd sample_posterior(const PosteriorModel& model, std::uint64_t seed);

/// Seed of the s-th draw used by the Monte-Carlo routines below.
inline std::uint64_t draw_seed(std::uint64_t master, std::size_t s) { return derive_seed(master, {s}); }

/// Monte-Carlo posterior mean of Omega over `draws` draws.
SpdMatrixXd posterior_mean_omega(const PosteriorModel& model, std::size_t draws, std::uint64_t seed,
                                 unsigned threads = 1);

enum class Norm { Spectral, Linf, Frobenius };

std::string_view norm_name(Norm norm);
Norm parse_norm(std::string_view name);
double matrix_norm(const MatrixXd& m, Norm norm);

struct PLossEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E(||Omega - omega0|| | X).
PLossEstimate estimate_p_loss(const PosteriorModel& model, const SpdMatrixXd& omega0, std::size_t draws,
                              Norm norm, std::uint64_t seed, unsigned threads = 1);

}  // namespace bandchol
