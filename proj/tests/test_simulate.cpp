#include <doctest.h>

#include <random>

#include "bandchol/simulate.hpp"
#include "oracles.hpp"

using namespace bandchol;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.truth = TrueModelSpec{Ar1Model{0.3}, 12};
    c.n = 40;
    c.reps = 6;
    c.seed = 17;
    c.kmax = 4;
    c.resampling.splits = 5;
    c.resampling.reference_k = 6;
    return c;
}

double min_eig(const MatrixXd& m) { return oracle::jacobi_eigenvalues(m).front(); }

}  // namespace

TEST_CASE("AR(1) covariance") {
    const MatrixXd s2 = make_ar1_cov(0.3, 2).matrix();
    CHECK(s2(0, 0) == 1.0);
    CHECK(s2(1, 1) == 1.0);
    CHECK(s2(0, 1) == doctest::Approx(0.3));
    CHECK(s2(1, 0) == doctest::Approx(0.3));

    CHECK(make_ar1_cov(0.0, 7).matrix() == MatrixXd::Identity(7, 7));

    const MatrixXd inv = oracle::gauss_jordan_inverse(make_ar1_cov(0.3, 5).matrix());
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            if (std::abs(i - j) > 1) CHECK(std::abs(inv(i, j)) <= 1e-12);

    CHECK_THROWS_AS(make_ar1_cov(1.0, 3), InputError);
}

TEST_CASE("AR(4) precision") {
    const MatrixXd w5 = make_ar4_precision(5).matrix();
    CHECK(w5(0, 1) == 0.4);
    CHECK(w5(0, 4) == 0.1);
    const MatrixXd w10 = make_ar4_precision(10).matrix();
    CHECK(w10(0, 5) == 0.0);
    CHECK(w10(2, 4) == 0.2);
    for (Eigen::Index p : {10, 100}) CHECK(min_eig(make_ar4_precision(p).matrix()) > 0.0);
    CHECK(eig_extremes(make_ar4_precision(500)).first > 0.0);
    CHECK_THROWS_AS(make_ar4_precision(4), InputError);
}

TEST_CASE("fractional Gaussian noise covariance") {
    CHECK(make_fgn_cov(0.5, 6).matrix().isApprox(MatrixXd::Identity(6, 6), 1e-15));
    const MatrixXd s = make_fgn_cov(0.7, 4).matrix();
    CHECK(s(0, 1) == doctest::Approx(0.5 * (std::pow(2.0, 1.4) - 2.0)).epsilon(1e-14));
    CHECK(s(0, 1) == doctest::Approx(0.3195079107728942).epsilon(1e-14));
    CHECK(s(0, 0) == 1.0);
    for (Eigen::Index p : {10, 100}) CHECK(min_eig(make_fgn_cov(0.7, p).matrix()) > 0.0);
    CHECK(eig_extremes(make_fgn_cov(0.7, 500)).first > 0.0);
    CHECK_THROWS_AS(make_fgn_cov(0.4, 3), InputError);
    CHECK_THROWS_AS(make_fgn_cov(1.1, 3), InputError);
}

TEST_CASE("true model specs") {
    for (Eigen::Index p : {10, 60}) {
        const TrueModelSpec ar1{Ar1Model{0.3}, p};
        CHECK(norm_max(ar1.precision().matrix() * ar1.covariance().matrix() - MatrixXd::Identity(p, p)) < 1e-12);
        const TrueModelSpec ar4{Ar4Model{}, p};
        CHECK(norm_max(ar4.precision().matrix() * ar4.covariance().matrix() - MatrixXd::Identity(p, p)) < 1e-10);
        const TrueModelSpec fgn{FgnModel{0.7}, p};
        CHECK(norm_max(fgn.precision().matrix() * fgn.covariance().matrix() - MatrixXd::Identity(p, p)) < 1e-10);
    }
    CHECK(TrueModelSpec{Ar1Model{}, 5}.name() == "ar1");
    CHECK(TrueModelSpec{Ar4Model{}, 5}.name() == "ar4");
    CHECK(TrueModelSpec{FgnModel{}, 5}.name() == "fgn");
    CHECK_THROWS_AS(TrueModelSpec({Ar1Model{-1.0}, 5}).validate(), InputError);
    CHECK_THROWS_AS(TrueModelSpec({Ar4Model{}, 3}).validate(), InputError);
    CHECK_THROWS_AS(TrueModelSpec({FgnModel{0.2}, 5}).validate(), InputError);
}

TEST_CASE("Gaussian sampling") {
    const SpdMatrixXd id = make_ar1_cov(0.0, 3);
    const DataMatrix a = sample_gaussian(id, 50, 5);
    const DataMatrix b = sample_gaussian(id, 50, 5);
    CHECK(a.values() == b.values());
    CHECK(a.values() != sample_gaussian(id, 50, 6).values());

    const DataMatrix big = sample_gaussian(id, 100000, 1);
    CHECK(norm_max(big.second_moments() - MatrixXd::Identity(3, 3)) < 0.02);

    const DataMatrix ar = sample_gaussian(make_ar1_cov(0.3, 2), 100000, 2);
    const MatrixXd g = ar.centered().second_moments();
    CHECK(std::abs(g(0, 1) / std::sqrt(g(0, 0) * g(1, 1)) - 0.3) < 0.01);
}

TEST_CASE("loss evaluation") {
    const std::vector<Norm> all{Norm::Spectral, Norm::Linf, Norm::Frobenius};
    const MatrixXd id = MatrixXd::Identity(4, 4);
    auto l = evaluate_losses(2.0 * id, id, all);
    CHECK(l[Norm::Spectral] == doctest::Approx(1.0));
    CHECK(l[Norm::Linf] == doctest::Approx(1.0));
    CHECK(l[Norm::Frobenius] == doctest::Approx(2.0));
    for (const auto& [norm, v] : evaluate_losses(id, id, all)) CHECK(v == 0.0);

    std::mt19937_64 rng(6);
    const MatrixXd x = oracle::random_spd(10, 20.0, rng);
    const MatrixXd y = oracle::random_spd(10, 20.0, rng);
    l = evaluate_losses(x, y, all);
    CHECK(l[Norm::Spectral] == doctest::Approx(norm_spectral(x - y)).epsilon(1e-14));
    CHECK(l[Norm::Linf] == doctest::Approx(norm_linf(x - y)).epsilon(1e-14));
    CHECK(l[Norm::Frobenius] == doctest::Approx(norm_fro(x - y)).epsilon(1e-14));

    CHECK(evaluate_losses(x, y, {Norm::Linf}).size() == 1);
    CHECK_THROWS_AS(evaluate_losses(MatrixXd::Identity(3, 3), id, all), DimensionMismatch);
}

TEST_CASE("estimator names") {
    for (Estimator e : {Estimator::LL, Estimator::BL1, Estimator::BL2, Estimator::MLE})
        CHECK(parse_estimator(estimator_name(e)) == e);
    CHECK_THROWS_AS(parse_estimator("BG1"), InputError);
}

TEST_CASE("experiment configuration validation") {
    ExperimentConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    c.reps = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config();
    c.estimators.clear();
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config();
    c.losses.clear();
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config();
    c.kmax = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("experiment runs are reproducible and schedule independent") {
    const ExperimentConfig c = small_config();
    const ExperimentResult a = run_experiment(c, 1);
    const ExperimentResult b = run_experiment(c, 3);
    REQUIRE(a.reps.size() == 6);
    CHECK(a.failures == 0);
    for (std::size_t r = 0; r < a.reps.size(); ++r) {
        CHECK(a.reps[r].rep == r);
        CHECK(a.reps[r].k_hat == b.reps[r].k_hat);
        CHECK(a.reps[r].k_bl == b.reps[r].k_bl);
        CHECK(a.reps[r].k_hat >= 1);
        CHECK(a.reps[r].k_bl >= 1);
        CHECK(a.reps[r].losses == b.reps[r].losses);
    }
    for (const auto& [e, by_norm] : a.summary)
        for (const auto& [norm, s] : by_norm) {
            CHECK(s.mean == b.summary.at(e).at(norm).mean);
            CHECK(s.sd == b.summary.at(e).at(norm).sd);
            CHECK(s.sd >= 0.0);
            CHECK(std::isfinite(s.mean));
        }
    // BL2 and MLE share the bandwidth and agree.
    for (const RepResult& r : a.reps)
        CHECK(r.losses.at(Estimator::BL2).at(Norm::Spectral) ==
              doctest::Approx(r.losses.at(Estimator::MLE).at(Norm::Spectral)).epsilon(1e-8));
}

TEST_CASE("experiment summary matches the replications") {
    ExperimentConfig c = small_config();
    c.estimators = {Estimator::LL};
    c.losses = {Norm::Frobenius};
    const ExperimentResult res = run_experiment(c);
    double sum = 0.0;
    for (const RepResult& r : res.reps) sum += r.losses.at(Estimator::LL).at(Norm::Frobenius);
    const double mean = sum / 6.0;
    double ss = 0.0;
    for (const RepResult& r : res.reps) ss += std::pow(r.losses.at(Estimator::LL).at(Norm::Frobenius) - mean, 2);
    CHECK(res.summary.at(Estimator::LL).at(Norm::Frobenius).mean == doctest::Approx(mean));
    CHECK(res.summary.at(Estimator::LL).at(Norm::Frobenius).sd == doctest::Approx(std::sqrt(ss / 5.0)));
    CHECK(res.reps[0].k_bl == 0);

    c.reps = 1;
    const ExperimentResult one = run_experiment(c);
    CHECK(one.reps[0].losses == res.reps[0].losses);
}

TEST_CASE("failing replications") {
    ExperimentConfig c = small_config();
    c.prior.M = 1e-6;  // no posterior mass below the bound
    const RepResult r = run_replication(c, c.truth.covariance(), c.truth.precision(), 0);
    REQUIRE(r.error.has_value());
    CHECK(r.losses.empty());
    CHECK_THROWS_AS(run_experiment(c), NumericalError);
}
