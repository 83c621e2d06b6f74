#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bandchol/bayes.hpp"

namespace bandchol {

/// Unnormalized log prior on the bandwidth; defaults to -k^4.
struct BandwidthPrior {
    std::function<double(Eigen::Index)> log_weight = [](Eigen::Index k) {
        const double kk = static_cast<double>(k);
        return -kk * kk * kk * kk;
    };
};

struct BandwidthPosterior {
    std::vector<Eigen::Index> k_values;
    std::vector<double> log_post;
    Eigen::Index mode = 0;
};

/**
 * Unnormalized log marginal posterior of the bandwidth k, with A and D
 * integrated out under the k-banded Cholesky prior. prior.k is ignored.
 */
double log_marginal_k(const DataMatrix& data, Eigen::Index k, const PriorConfig& prior,
                      const BandwidthPrior& kprior = {});
double log_marginal_k(const MatrixXd& second_moments, Eigen::Index n, Eigen::Index k, const PriorConfig& prior,
                      const BandwidthPrior& kprior = {});

/// Largest k for which the marginal posterior is defined: min(n - 5 + nu0, p - 1).
Eigen::Index max_evaluable_k(Eigen::Index n, Eigen::Index p, double nu0);

/// Evaluates k = 1..kmax and returns the profile with its argmax (ties toward smaller k).
BandwidthPosterior select_k_posterior_mode(const DataMatrix& data, Eigen::Index kmax, const PriorConfig& prior,
                                           const BandwidthPrior& kprior = {});

struct ResamplingConfig {
    std::size_t splits = 50;       ///< number of random splits T
    Eigen::Index reference_k = 20; ///< bandwidth K of the reference estimator
    int max_retries = 10;          ///< per split, on singular designs
};

struct ResamplingResult {
    Eigen::Index k_hat = 0;
    /// risk[k-1] is the averaged l1 distance at bandwidth k.
    std::vector<double> risk;
};

/**
 * Random-split risk estimate: for each split, the banded estimator on a third
 * of the rows at bandwidth k is compared in l1 norm with the banded estimator
 * on the remaining rows at bandwidth K. Returns the minimizing k in 1..kmax.
 */
ResamplingResult select_k_resampling(const DataMatrix& data, Eigen::Index kmax, const ResamplingConfig& config,
                                     std::uint64_t seed, unsigned threads = 1);

}  // namespace bandchol
