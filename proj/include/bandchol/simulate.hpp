#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bandchol/bandwidth.hpp"

namespace bandchol {

SpdMatrixXd make_ar1_cov(double rho, Eigen::Index p);
/// Banded precision with entries coefficients[|i-j|] for |i-j| <= 4, 1 on the diagonal.
SpdMatrixXd make_ar4_precision(Eigen::Index p, const std::array<double, 4>& coefficients = {0.4, 0.2, 0.2, 0.1});
/// Fractional Gaussian noise autocovariance with Hurst exponent H.
SpdMatrixXd make_fgn_cov(double hurst, Eigen::Index p);

struct Ar1Model {
    double rho = 0.3;
};
struct Ar4Model {
    std::array<double, 4> coefficients{0.4, 0.2, 0.2, 0.1};
};
struct FgnModel {
    double hurst = 0.7;
};

struct TrueModelSpec {
    std::variant<Ar1Model, Ar4Model, FgnModel> variant;
    Eigen::Index p = 100;

    std::string name() const;
    /// Throws InputError when parameters fall outside the documented ranges.
    void validate() const;
    SpdMatrixXd covariance() const;
    SpdMatrixXd precision() const;
};

/// n iid rows from N(0, sigma), generated as L z.
DataMatrix sample_gaussian(const SpdMatrixXd& sigma, Eigen::Index n, std::uint64_t seed);

std::map<Norm, double> evaluate_losses(const MatrixXd& estimate, const MatrixXd& truth,
                                       const std::vector<Norm>& losses);

enum class Estimator { LL, BL1, BL2, MLE };

std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view name);

struct ExperimentConfig {
    TrueModelSpec truth;
    Eigen::Index n = 100;
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    std::vector<Estimator> estimators{Estimator::LL, Estimator::BL1, Estimator::BL2, Estimator::MLE};
    std::vector<Norm> losses{Norm::Spectral, Norm::Linf, Norm::Frobenius};
    Eigen::Index kmax = 20;
    PriorConfig prior;  ///< k is ignored; bandwidths are selected per replication
    ResamplingConfig resampling;
    bool center = false;

    void validate() const;
};

struct RepResult {
    std::size_t rep = 0;
    Eigen::Index k_hat = 0;     ///< posterior mode, 0 if not computed
    Eigen::Index k_bl = 0;      ///< resampling choice, 0 if not computed
    /// losses[estimator][norm]
    std::map<Estimator, std::map<Norm, double>> losses;
    double seconds = 0.0;
    std::optional<std::string> error;
};

struct LossSummary {
    double mean = 0.0;
    double sd = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RepResult> reps;
    std::map<Estimator, std::map<Norm, LossSummary>> summary;
    std::size_t failures = 0;
};

/// Runs one replication; exposed for tests and the CLI.
RepResult run_replication(const ExperimentConfig& config, const SpdMatrixXd& sigma, const SpdMatrixXd& omega,
                          std::size_t rep);

/**
 * Replicated simulation. Replication r uses seeds derived from (seed, r) only,
 * so results do not depend on `threads`. Fails when more than 5% of
 * replications error.
 */
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1);

}  // namespace bandchol
