#include "bandchol/simulate.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "bandchol/competitors.hpp"
#include "bandchol/parallel.hpp"

namespace bandchol {

SpdMatrixXd make_ar1_cov(double rho, Eigen::Index p) {
    if (!(std::abs(rho) < 1.0)) throw InputError("make_ar1_cov: |rho| must be < 1");
    if (p < 1) throw InputError("make_ar1_cov: p must be positive");
    MatrixXd s(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    return SpdMatrixXd(std::move(s));
}

SpdMatrixXd make_ar4_precision(Eigen::Index p, const std::array<double, 4>& c) {
    if (p < 5) throw InputError("make_ar4_precision: p must be at least 5");
    MatrixXd w = MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        w(i, i) = 1.0;
        for (Eigen::Index lag = 1; lag <= 4; ++lag) {
            if (i + lag >= p) break;
            w(i, i + lag) = w(i + lag, i) = c[static_cast<std::size_t>(lag - 1)];
        }
    }
    return SpdMatrixXd(std::move(w));
}

SpdMatrixXd make_fgn_cov(double hurst, Eigen::Index p) {
    if (!(hurst >= 0.5 && hurst <= 1.0)) throw InputError("make_fgn_cov: H must lie in [0.5, 1]");
    if (p < 1) throw InputError("make_fgn_cov: p must be positive");
    const double e = 2.0 * hurst;
    std::vector<double> acf(static_cast<std::size_t>(p));
    for (Eigen::Index h = 0; h < p; ++h) {
        const double hd = static_cast<double>(h);
        acf[static_cast<std::size_t>(h)] =
            0.5 * (std::pow(hd + 1.0, e) - 2.0 * std::pow(hd, e) + std::pow(std::abs(hd - 1.0), e));
    }
    MatrixXd s(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) s(i, j) = acf[static_cast<std::size_t>(std::abs(i - j))];
    return SpdMatrixXd(std::move(s));
}

namespace {

MatrixXd spd_inverse(const MatrixXd& m) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMatrix("spd_inverse: factorization failed");
    return llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string TrueModelSpec::name() const {
    return std::visit(overloaded{[](const Ar1Model&) { return std::string("ar1"); },
                                 [](const Ar4Model&) { return std::string("ar4"); },
                                 [](const FgnModel&) { return std::string("fgn"); }},
                      variant);
}

void TrueModelSpec::validate() const {
    if (p < 1) throw InputError("truth: p must be positive");
    std::visit(overloaded{[](const Ar1Model& m) {
                              if (!(std::abs(m.rho) < 1.0)) throw InputError("truth.rho: must satisfy |rho| < 1");
                          },
                          [this](const Ar4Model&) {
                              if (p < 5) throw InputError("truth: AR(4) model needs p >= 5");
                          },
                          [](const FgnModel& m) {
                              if (!(m.hurst >= 0.5 && m.hurst <= 1.0))
                                  throw InputError("truth.hurst: must lie in [0.5, 1]");
                          }},
               variant);
}

SpdMatrixXd TrueModelSpec::covariance() const {
    return std::visit(overloaded{[this](const Ar1Model& m) { return make_ar1_cov(m.rho, p); },
                                 [this](const Ar4Model& m) {
                                     return SpdMatrixXd(spd_inverse(make_ar4_precision(p, m.coefficients).matrix()));
                                 },
                                 [this](const FgnModel& m) { return make_fgn_cov(m.hurst, p); }},
                      variant);
}

SpdMatrixXd TrueModelSpec::precision() const {
    return std::visit(
        overloaded{[this](const Ar1Model& m) {
                       // Exact factor: x_j = rho x_{j-1} + e_j with Var(e_1) = 1, Var(e_j) = 1 - rho^2.
                       MatrixXd a = MatrixXd::Zero(p, p);
                       VectorXd d = VectorXd::Constant(p, 1.0 - m.rho * m.rho);
                       d(0) = 1.0;
                       for (Eigen::Index j = 1; j < p; ++j) a(j, j - 1) = m.rho;
                       return SpdMatrixXd(compose_dense(a, d));
                   },
                   [this](const Ar4Model& m) { return make_ar4_precision(p, m.coefficients); },
                   [this](const FgnModel& m) { return SpdMatrixXd(spd_inverse(make_fgn_cov(m.hurst, p).matrix())); }},
        variant);
}

DataMatrix sample_gaussian(const SpdMatrixXd& sigma, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw InputError("sample_gaussian: n must be positive");
    const MatrixXd l = spd_cholesky(sigma);
    const Eigen::Index p = sigma.dim();
    Engine rng = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXd z(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    return DataMatrix(z * l.transpose());
}

std::map<Norm, double> evaluate_losses(const MatrixXd& estimate, const MatrixXd& truth,
                                       const std::vector<Norm>& losses) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw DimensionMismatch("evaluate_losses: estimate and truth differ in size");
    const MatrixXd diff = estimate - truth;
    std::map<Norm, double> out;
    for (Norm norm : losses) out[norm] = matrix_norm(diff, norm);
    return out;
}

std::string_view estimator_name(Estimator e) {
    switch (e) {
        case Estimator::LL: return "LL";
        case Estimator::BL1: return "BL1";
        case Estimator::BL2: return "BL2";
        case Estimator::MLE: return "MLE";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "LL") return Estimator::LL;
    if (name == "BL1") return Estimator::BL1;
    if (name == "BL2") return Estimator::BL2;
    if (name == "MLE") return Estimator::MLE;
    throw InputError("unknown estimator '" + std::string(name) + "' (expected LL, BL1, BL2 or MLE)");
}

void ExperimentConfig::validate() const {
    truth.validate();
    if (n < 6) throw InputError("n: must be at least 6");
    if (reps < 1) throw InputError("reps: must be at least 1");
    if (estimators.empty()) throw InputError("estimators: must not be empty");
    if (losses.empty()) throw InputError("losses: must not be empty");
    if (kmax < 1) throw InputError("kmax: must be at least 1");
    if (!(prior.M > 0.0)) throw InputError("prior.M: must be positive");
    if (!(prior.nu0 >= 0.0)) throw InputError("prior.nu0: must be nonnegative");
    if (resampling.splits < 1) throw InputError("resampling.splits: must be at least 1");
    if (resampling.reference_k < 1) throw InputError("resampling.reference_k: must be at least 1");
    if (truth.p < 2) throw InputError("truth.p: must be at least 2");
}

namespace {

bool uses(const ExperimentConfig& c, Estimator e) {
    for (Estimator x : c.estimators)
        if (x == e) return true;
    return false;
}

}  // namespace

RepResult run_replication(const ExperimentConfig& config, const SpdMatrixXd& sigma, const SpdMatrixXd& omega,
                          std::size_t rep) {
    const auto start = std::chrono::steady_clock::now();
    RepResult r;
    r.rep = rep;
    try {
        const std::uint64_t rep_seed = derive_seed(config.seed, {rep});
        DataMatrix data = sample_gaussian(sigma, config.n, derive_seed(rep_seed, {0}));
        if (config.center) data = data.centered();
        const Eigen::Index n = data.n();
        const Eigen::Index p = data.p();
        const MatrixXd g = data.second_moments();

        if (uses(config, Estimator::LL) || uses(config, Estimator::BL2) || uses(config, Estimator::MLE)) {
            const Eigen::Index kmax = std::min(config.kmax, max_evaluable_k(n, p, config.prior.nu0));
            r.k_hat = select_k_posterior_mode(data, kmax, config.prior).mode;
        }
        if (uses(config, Estimator::BL1)) {
            const Eigen::Index n1 = n / 3;
            const Eigen::Index kmax = std::min({config.kmax, n1 - 1, p - 1});
            ResamplingConfig rc = config.resampling;
            rc.reference_k = std::min({rc.reference_k, p - 1, n - n1 - 1});
            r.k_bl = select_k_resampling(data, kmax, rc, derive_seed(rep_seed, {1})).k_hat;
        }
        for (Estimator e : config.estimators) {
            MatrixXd est;
            switch (e) {
                case Estimator::LL: {
                    PriorConfig prior = config.prior;
                    prior.k = r.k_hat;
                    est = plug_in_estimator(fit_posterior(g, n, prior)).matrix();
                    break;
                }
                case Estimator::BL1: est = bl_banded_estimator(g, n, r.k_bl).matrix(); break;
                case Estimator::BL2: est = bl_banded_estimator(g, n, r.k_hat).matrix(); break;
                case Estimator::MLE: est = graphical_mle_banded(g, r.k_hat).matrix(); break;
            }
            r.losses[e] = evaluate_losses(est, omega.matrix(), config.losses);
        }
    } catch (const Error& e) {
        r.error = std::string(e.name()) + ": " + e.what();
        r.losses.clear();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    const SpdMatrixXd sigma = config.truth.covariance();
    const SpdMatrixXd omega = config.truth.precision();

    ExperimentResult result;
    result.config = config;
    result.reps.resize(config.reps);
    parallel_for(config.reps, threads,
                 [&](std::size_t r) { result.reps[r] = run_replication(config, sigma, omega, r); });

    for (const RepResult& r : result.reps)
        if (r.error) ++result.failures;
    if (static_cast<double>(result.failures) > 0.05 * static_cast<double>(config.reps)) {
        std::string first;
        for (const RepResult& r : result.reps)
            if (r.error) {
                first = *r.error;
                break;
            }
        throw NumericalError("run_experiment: " + std::to_string(result.failures) + " of " +
                             std::to_string(config.reps) + " replications failed; first: " + first);
    }

    for (Estimator e : config.estimators) {
        for (Norm norm : config.losses) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const RepResult& r : result.reps) {
                if (r.error) continue;
                sum += r.losses.at(e).at(norm);
                ++count;
            }
            LossSummary s;
            s.mean = count > 0 ? sum / static_cast<double>(count) : std::nan("");
            double ss = 0.0;
            for (const RepResult& r : result.reps) {
                if (r.error) continue;
                const double dlt = r.losses.at(e).at(norm) - s.mean;
                ss += dlt * dlt;
            }
            s.sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
            result.summary[e][norm] = s;
        }
    }
    return result;
}

}  // namespace bandchol
