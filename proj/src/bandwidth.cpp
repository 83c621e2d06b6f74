#include "bandchol/bandwidth.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "bandchol/competitors.hpp"
#include "bandchol/parallel.hpp"

namespace bandchol {

double log_marginal_k(const MatrixXd& g, Eigen::Index n, Eigen::Index k, const PriorConfig& prior,
                      const BandwidthPrior& kprior) {
    const BandedRegressionStats s = banded_regression(g, n, k, prior.nu0);
    const double nd = static_cast<double>(n);
    double total = kprior.log_weight(k);
    for (std::size_t j = 0; j < s.columns.size(); ++j) {
        const ColumnFit& c = s.columns[j];
        const double shape = c.nj / 2.0;
        const double rate = nd * c.dhat / 2.0;
        if (j > 0) {
            const double log_det_shat = 2.0 * c.shat_chol.diagonal().array().log().sum();
            const double log_det = static_cast<double>(c.kj) * std::log(nd / (2.0 * std::numbers::pi)) + log_det_shat;
            total += -0.5 * log_det + std::lgamma(shape) - shape * std::log(rate);
        }
        total += log_ig_cdf(prior.M, shape, rate);
    }
    if (!std::isfinite(total))
        throw NonFiniteLogPosterior("log_marginal_k: non-finite log posterior at k = " + std::to_string(k));
    return total;
}

double log_marginal_k(const DataMatrix& data, Eigen::Index k, const PriorConfig& prior,
                      const BandwidthPrior& kprior) {
    return log_marginal_k(data.second_moments(), data.n(), k, prior, kprior);
}

Eigen::Index max_evaluable_k(Eigen::Index n, Eigen::Index p, double nu0) {
    const auto by_n = static_cast<Eigen::Index>(std::ceil(static_cast<double>(n) + nu0 - 4.0)) - 1;
    return std::min(by_n, p - 1);
}

BandwidthPosterior select_k_posterior_mode(const DataMatrix& data, Eigen::Index kmax, const PriorConfig& prior,
                                           const BandwidthPrior& kprior) {
    if (kmax < 1) throw EmptyGrid("select_k_posterior_mode: kmax must be at least 1");
    if (kmax > max_evaluable_k(data.n(), data.p(), prior.nu0))
        throw InputError("select_k_posterior_mode: kmax exceeds min(n - 5 + nu0, p - 1)");
    const MatrixXd g = data.second_moments();
    BandwidthPosterior post;
    for (Eigen::Index k = 1; k <= kmax; ++k) {
        post.k_values.push_back(k);
        post.log_post.push_back(log_marginal_k(g, data.n(), k, prior, kprior));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.log_post.size(); ++i)
        if (post.log_post[i] > post.log_post[best]) best = i;
    post.mode = post.k_values[best];
    return post;
}

ResamplingResult select_k_resampling(const DataMatrix& data, Eigen::Index kmax, const ResamplingConfig& config,
                                     std::uint64_t seed, unsigned threads) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (kmax < 1) throw EmptyGrid("select_k_resampling: kmax must be at least 1");
    if (n < 6) throw InputError("select_k_resampling: need at least 6 observations");
    if (config.splits < 1) throw InputError("select_k_resampling: need at least one split");
    if (config.reference_k < 1 || config.reference_k > std::min(n - 1, p - 1))
        throw InputError("select_k_resampling: reference bandwidth must lie in 1..min(n-1, p-1)");
    const Eigen::Index n1 = n / 3;

    std::vector<std::vector<double>> per_split(config.splits);
    parallel_for(config.splits, threads, [&](std::size_t t) {
        for (int attempt = 0;; ++attempt) {
            Engine rng = make_engine(derive_seed(seed, {t, static_cast<std::uint64_t>(attempt)}));
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
            // Fisher-Yates; only the first n1 positions need to be random.
            for (Eigen::Index i = 0; i < n1; ++i) {
                std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
                std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
            }
            const std::vector<Eigen::Index> first(idx.begin(), idx.begin() + n1);
            const std::vector<Eigen::Index> second(idx.begin() + n1, idx.end());
            try {
                const DataMatrix d1 = data.rows(first);
                const DataMatrix d2 = data.rows(second);
                const MatrixXd g1 = d1.second_moments();
                const MatrixXd reference = bl_banded_estimator(d2, config.reference_k).matrix();
                std::vector<double> risk(static_cast<std::size_t>(kmax));
                for (Eigen::Index k = 1; k <= kmax; ++k)
                    risk[static_cast<std::size_t>(k - 1)] =
                        norm_l1(bl_banded_estimator(g1, d1.n(), k).matrix() - reference);
                per_split[t] = std::move(risk);
                return;
            } catch (const NumericalError&) {
                if (attempt >= config.max_retries) throw;
            }
        }
    });

    ResamplingResult result;
    result.risk.assign(static_cast<std::size_t>(kmax), 0.0);
    for (const auto& r : per_split)
        for (std::size_t i = 0; i < r.size(); ++i) result.risk[i] += r[i];
    for (double& r : result.risk) r /= static_cast<double>(config.splits);
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.risk.size(); ++i)
        if (result.risk[i] < result.risk[best]) best = i;
    result.k_hat = static_cast<Eigen::Index>(best) + 1;
    return result;
}

}  // namespace bandchol
