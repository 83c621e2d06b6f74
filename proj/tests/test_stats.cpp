#include <doctest.h>

#include <random>

#include "bandchol/mcd.hpp"
#include "bandchol/simulate.hpp"
#include "bandchol/stats.hpp"
#include "oracles.hpp"

using namespace bandchol;

namespace {

DataMatrix small_data() {
    MatrixXd x(2, 2);
    x << 1, 2, -1, 0;
    return DataMatrix(x);
}

}  // namespace

TEST_CASE("DataMatrix validation") {
    CHECK_THROWS_AS(DataMatrix(MatrixXd(0, 3)), InputError);
    MatrixXd x = MatrixXd::Ones(2, 2);
    x(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DataMatrix{x}, InputError);
}

TEST_CASE("sample_moments") {
    MatrixXd one(2, 1);
    one << 1, -1;
    const SampleMoments m1 = sample_moments(DataMatrix(one), 0, 3);
    CHECK(m1.varhat == 1.0);
    CHECK(m1.shat.size() == 0);
    CHECK(m1.chat.size() == 0);

    const SampleMoments m2 = sample_moments(small_data(), 1, 1);
    CHECK(m2.shat(0, 0) == 1.0);
    CHECK(m2.chat(0) == 1.0);
    CHECK(m2.varhat == 2.0);

    MatrixXd z = MatrixXd::Ones(4, 3);
    z.col(2).setZero();
    CHECK(sample_moments(DataMatrix(z), 2, 1).varhat == 0.0);
    CHECK_THROWS_AS(sample_moments(small_data(), 2, 1), InputError);
}

TEST_CASE("banded_regression definitions") {
    // ahat_2 = 1, dhat_2 = 1 but n_2 = 2 + 2 - 1 - 4 < 0.
    const BandedRegressionStats s = least_squares_columns(small_data().second_moments(), 2, 1, 2.0);
    CHECK(s.columns[1].ahat(0) == doctest::Approx(1.0));
    CHECK(s.columns[1].dhat == doctest::Approx(1.0));
    CHECK(s.columns[1].nj == -1.0);
    CHECK_THROWS_AS(banded_regression(small_data(), 1, 2.0), InputError);

    std::mt19937_64 rng(1);
    const DataMatrix iid(oracle::random_gaussian_data(50, 4, rng));
    const BandedRegressionStats k0 = banded_regression(iid, 0, 2.0);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const auto& c = k0.columns[static_cast<std::size_t>(j)];
        CHECK(c.kj == 0);
        CHECK(c.ahat.size() == 0);
        CHECK(c.dhat == doctest::Approx(iid.values().col(j).squaredNorm() / 50.0));
        CHECK(c.nj == 48.0);
    }
}

TEST_CASE("banded_regression recovers AR(1) coefficients") {
    const SpdMatrixXd sigma = make_ar1_cov(0.3, 10);
    const DataMatrix data = sample_gaussian(sigma, 200, 1234);
    const BandedRegressionStats s = banded_regression(data, 1, 2.0);
    const CholeskyFactorXd pop = population_coefficients(sigma, 1);
    double mean_a = 0.0, mean_d = 0.0;
    CHECK(s.columns[0].kj == 0);
    CHECK(s.columns[0].dhat == doctest::Approx(s.columns[0].varhat));
    for (Eigen::Index j = 1; j < 10; ++j) {
        const auto& c = s.columns[static_cast<std::size_t>(j)];
        // Sampling sd of ahat is about sqrt(0.91 / 200) = 0.067.
        CHECK(std::abs(c.ahat(0) - pop.A()(j, j - 1)) < 4 * 0.068);
        CHECK(std::abs(c.dhat - pop.D()(j)) < 0.2);
        mean_a += c.ahat(0) / 9.0;
        mean_d += c.dhat / 9.0;
        CHECK((c.shat * c.ahat - c.chat).norm() < 1e-9);
        CHECK(c.nj == 200.0 + 2.0 - 1.0 - 4.0);
    }
    CHECK(std::abs(mean_a - 0.3) < 0.1);
    CHECK(std::abs(mean_d - 0.91) < 0.1);
}

TEST_CASE("full bandwidth reproduces the inverse sample second-moment matrix") {
    std::mt19937_64 rng(6);
    const DataMatrix data(oracle::random_gaussian_data(40, 8, rng));
    const BandedRegressionStats s = banded_regression(data, 7, 2.0);
    const MatrixXd omega = compose_dense(s.coefficient_matrix(), s.residual_variances());
    const MatrixXd inv = oracle::gauss_jordan_inverse(data.values().transpose() * data.values() / 40.0);
    CHECK(norm_max(MatrixXd(omega - inv)) < 1e-8);
}

TEST_CASE("residual variances are nonincreasing in k") {
    std::mt19937_64 rng(10);
    const DataMatrix data = sample_gaussian(make_fgn_cov(0.8, 12), 60, 99);
    std::vector<double> prev;
    for (Eigen::Index k = 0; k < 12; ++k) {
        const BandedRegressionStats s = banded_regression(data, k, 2.0);
        for (std::size_t j = 0; j < prev.size(); ++j) CHECK(s.columns[j].dhat <= prev[j] * (1 + 1e-12));
        prev.clear();
        for (const auto& c : s.columns) {
            CHECK(c.dhat >= 0.0);
            prev.push_back(c.dhat);
        }
    }
}

TEST_CASE("banded_regression errors") {
    std::mt19937_64 rng(12);
    // k >= n: the column with n regressors is fitted exactly.
    const DataMatrix wide(oracle::random_gaussian_data(5, 12, rng));
    try {
        least_squares_columns(wide.second_moments(), 5, 8);
        FAIL("expected a numerical error");
    } catch (const DegenerateResidual& e) {
        CHECK(e.index() == 6);
    }

    // Near-collinear pair: residual of column 2 clears the floor, the
    // relative pivot of the block {1, 2} does not.
    MatrixXd g = MatrixXd::Identity(3, 3);
    g(0, 0) = g(1, 1) = 1e4;
    g(0, 1) = g(1, 0) = 1e4 - 1e-9;
    CHECK_NOTHROW(least_squares_columns(g, 10, 1));
    try {
        least_squares_columns(g, 10, 2);
        FAIL("expected SingularDesign");
    } catch (const SingularDesign& e) {
        CHECK(e.index() == 3);
    }

    // Column exactly predicted by its predecessor.
    MatrixXd x = oracle::random_gaussian_data(20, 3, rng);
    x.col(1) = 2.0 * x.col(0);
    CHECK_THROWS_AS(least_squares_columns(DataMatrix(x).second_moments(), 20, 1), DegenerateResidual);

    MatrixXd zero = oracle::random_gaussian_data(20, 3, rng);
    zero.col(0).setZero();
    CHECK_THROWS_AS(banded_regression(DataMatrix(zero), 0, 2.0), DegenerateResidual);
}

TEST_CASE("centering and row selection") {
    MatrixXd x(3, 2);
    x << 1, 2, 3, 4, 5, 9;
    const DataMatrix c = DataMatrix(x).centered();
    CHECK(std::abs(c.values().col(0).sum()) < 1e-14);
    CHECK(std::abs(c.values().col(1).sum()) < 1e-14);
    const DataMatrix r = DataMatrix(x).rows({2, 0});
    CHECK(r.values()(0, 1) == 9.0);
    CHECK(r.values()(1, 0) == 1.0);
}
