#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cpnet/corr.hpp"

using namespace cpnet;

namespace {

Eigen::MatrixXd random_returns(Eigen::Index t, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 0.01);
    Eigen::MatrixXd r(t, n);
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index k = 0; k < n; ++k) r(i, k) = z(rng) + (k > 0 ? 0.5 * r(i, k - 1) : 0.0);
    return r;
}

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back("S" + std::to_string(i));
    return s;
}

// Textbook two-pass Pearson for one pair.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double mx = x.mean(), my = y.mean(), sxy = 0, sxx = 0, syy = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sxy += (x(i) - mx) * (y(i) - my);
        sxx += (x(i) - mx) * (x(i) - mx);
        syy += (y(i) - my) * (y(i) - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST(ExpWeights, SumToOne) {
    for (std::size_t t : {1u, 2u, 125u, 240u, 10000u})
        for (double theta : {1.0, 60.0, 240.0, 1e4}) EXPECT_NEAR(exp_weights(t, theta).weights.sum(), 1.0, 1e-12);
}

TEST(ExpWeights, MostRecentHeaviest) {
    auto w = exp_weights(240, 240.0).weights;
    for (Eigen::Index i = 1; i < w.size(); ++i) EXPECT_GT(w(i), w(i - 1));
    EXPECT_NEAR(w(0) / w(239), std::exp(-239.0 / 240.0), 1e-14);
}

TEST(ExpWeights, RejectsBadArguments) {
    EXPECT_THROW(exp_weights(0, 1.0), DomainError);
    EXPECT_THROW(exp_weights(5, 0.0), DomainError);
}

TEST(Pearson, MatchesPairwiseFormula) {
    auto r = random_returns(125, 6, 1);
    auto c = pearson_matrix(r, names(6));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            EXPECT_NEAR(c(i, j), i == j ? 1.0 : pearson(r.col(static_cast<Eigen::Index>(i)), r.col(static_cast<Eigen::Index>(j))),
                        1e-12);
}

TEST(Pearson, SymmetricUnitDiagonalBounded) {
    auto c = pearson_matrix(random_returns(50, 10, 2), names(10));
    EXPECT_EQ(c.coefficients, c.coefficients.transpose());
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(c(i, i), 1.0);
        for (std::size_t j = 0; j < 10; ++j) EXPECT_LE(std::abs(c(i, j)), 1.0);
    }
}

TEST(Pearson, PositiveSemidefinite) {
    auto c = pearson_matrix(random_returns(80, 20, 3), names(20));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.coefficients);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Pearson, PerfectlyCorrelatedAndAnti) {
    Eigen::MatrixXd r(4, 3);
    r << 1, 2, -1, 2, 4, -2, 3, 6, -3, 5, 10, -5;
    auto c = pearson_matrix(r, names(3));
    EXPECT_NEAR(c(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(c(0, 2), -1.0, 1e-15);
}

TEST(Pearson, ZeroVarianceColumnFlagged) {
    Eigen::MatrixXd r = random_returns(20, 3, 4);
    r.col(1).setConstant(0.003);
    try {
        pearson_matrix(r, names(3));
        FAIL();
    } catch (const FlaggedSymbolError& e) {
        EXPECT_EQ(e.symbol(), "S1");
    }
}

TEST(WeightedPearson, UniformWeightsEqualPlain) {
    auto r = random_returns(125, 15, 5);
    ExpWeights flat{125, 0.0, Eigen::VectorXd::Constant(125, 1.0 / 125.0)};
    auto a = pearson_matrix(r, names(15));
    auto b = weighted_pearson_matrix(r, flat, names(15));
    EXPECT_LT((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeightedPearson, DiffersFromPlainUnderDecay) {
    auto r = random_returns(240, 4, 6);
    auto a = pearson_matrix(r, names(4));
    auto b = weighted_pearson_matrix(r, exp_weights(240, 30.0), names(4));
    EXPECT_GT((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(WeightedPearson, LengthMismatch) {
    auto r = random_returns(10, 3, 7);
    EXPECT_THROW(weighted_pearson_matrix(r, exp_weights(9, 5.0), names(3)), DomainError);
}
