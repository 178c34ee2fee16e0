#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cpnet/portfolio.hpp"
#include "oracles.hpp"

using namespace cpnet;

namespace {

const std::vector<std::string> kFive{"A", "B", "C", "D", "E"};

WeightedGraph star5() {
    WeightedGraph g(5);
    for (std::size_t i = 1; i < 5; ++i) g.add_edge(0, i, 1.0);
    return g;
}

WeightedGraph k5() {
    WeightedGraph g(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) g.add_edge(i, j, 1.0);
    return g;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

double sharpe_of(const Eigen::VectorXd& w, const Eigen::VectorXd& r, const Eigen::MatrixXd& cov) {
    return w.dot(r) / std::sqrt(w.dot(cov * w));
}

Eigen::MatrixXd random_corr(std::size_t n, std::mt19937_64& rng) { return oracle::random_correlation(n, rng, 2, 40); }

} // namespace

TEST(Select, TypeOnePeripheryBySharpe) {
    auto profile = rossa_profile(star5());
    std::vector<double> sharpe{0.9, 0.3, 0.1, 0.5, 0.2};
    SelectionInputs in{kFive, sharpe, &profile};
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type1, 2, in)), (std::set<std::size_t>{1, 3}));
    // Five requested: the four leaves then the hub
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type1, 5, in)).size(), 5u);
}

TEST(Select, TypeFourLargestPhi) {
    auto profile = rossa_profile(k5());
    SelectionInputs in{kFive, {}, &profile};
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type4, 2, in)), (std::set<std::size_t>{profile.order[3], profile.order[4]}));
}

TEST(Select, TypeTwoUsesCoreScores) {
    CoreScores cs{kFive, {0.0, 1.0, 0.0, 0.4, 0.0}};
    std::vector<double> sharpe{0.1, 0.2, 0.7, 0.3, 0.4};
    SelectionInputs in{kFive, sharpe, nullptr, &cs};
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type2, 2, in)), (std::set<std::size_t>{2, 4}));
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type2, 4, in)), (std::set<std::size_t>{0, 2, 3, 4}));
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type5, 2, in)), (std::set<std::size_t>{1, 3}));
}

TEST(Select, TypeThreeLargestHybrid) {
    HybridScores h{kFive, {0.1, 1.9, 0.5, 1.2, 0.0}};
    SelectionInputs in{kFive, {}, nullptr, nullptr, &h};
    EXPECT_EQ(as_set(select_portfolio(Strategy::Type3, 2, in)), (std::set<std::size_t>{1, 3}));
}

TEST(Select, TypeSixIsEverything) {
    SelectionInputs in{kFive};
    EXPECT_EQ(select_portfolio(Strategy::Type6, 1, in).size(), 5u);
}

TEST(Select, Errors) {
    auto profile = rossa_profile(k5());
    std::vector<double> sharpe(5, 0.0);
    SelectionInputs in{kFive, sharpe, &profile};
    EXPECT_THROW(select_portfolio(Strategy::Type1, 6, in), DomainError);
    EXPECT_THROW(select_portfolio(Strategy::Type5, 2, in), ConfigError);
    EXPECT_THROW(select_portfolio(Strategy::Type3, 2, in), ConfigError);
}

TEST(Select, Deterministic) {
    auto profile = rossa_profile(k5());
    std::vector<double> sharpe{0.2, 0.2, 0.2, 0.2, 0.2};
    SelectionInputs in{kFive, sharpe, &profile};
    EXPECT_EQ(select_portfolio(Strategy::Type1, 3, in), select_portfolio(Strategy::Type1, 3, in));
}

TEST(Weights, Uniform) {
    EXPECT_EQ(uniform_weights(1), std::vector<double>{1.0});
    EXPECT_EQ(uniform_weights(4), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
    auto w = uniform_weights(30);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(uniform_weights(0), DomainError);
}

TEST(Markowitz, ClosedFormCases) {
    Eigen::VectorXd r(2), s(2);
    r << 0.1, 0.1;
    s << 0.2, 0.2;
    auto w = markowitz_weights(r, s, Eigen::MatrixXd::Identity(2, 2)).weights;
    EXPECT_NEAR(w[0], 0.5, 1e-9);
    EXPECT_NEAR(w[1], 0.5, 1e-9);

    r << 0.1, 0.0;
    w = markowitz_weights(r, s, Eigen::MatrixXd::Identity(2, 2)).weights;
    EXPECT_NEAR(w[0], 1.0, 1e-9);
    EXPECT_NEAR(w[1], 0.0, 1e-9);

    Eigen::VectorXd one(1), vol(1);
    one << 0.05;
    vol << 0.1;
    EXPECT_EQ(markowitz_weights(one, vol, Eigen::MatrixXd::Identity(1, 1)).weights, std::vector<double>{1.0});
}

TEST(Markowitz, DegenerateFlagged) {
    Eigen::VectorXd r(3), s(3);
    r << -0.1, -0.02, -0.3;
    s << 0.1, 0.1, 0.1;
    auto res = markowitz_weights(r, s, Eigen::MatrixXd::Identity(3, 3));
    EXPECT_TRUE(res.degenerate);
    EXPECT_NEAR(res.weights[1], 1.0, 1e-12);
}

TEST(Markowitz, InputErrors) {
    Eigen::VectorXd r(2), s(2);
    r << 0.1, 0.1;
    s << 0.1, 0.0;
    EXPECT_THROW(markowitz_weights(r, s, Eigen::MatrixXd::Identity(2, 2)), DomainError);
    s << 0.1, 0.1;
    EXPECT_THROW(markowitz_weights(r, s, Eigen::MatrixXd::Identity(3, 3)), DomainError);
}

TEST(Markowitz, MatchesGridOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> mu(-0.02, 0.05), vol(0.05, 0.3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
        Eigen::VectorXd r(n), s(n);
        for (std::size_t i = 0; i < n; ++i) {
            r(static_cast<Eigen::Index>(i)) = mu(rng);
            s(static_cast<Eigen::Index>(i)) = vol(rng);
        }
        if (r.maxCoeff() <= 0.0) r(0) = 0.01;
        auto c = random_corr(n, rng);
        Eigen::MatrixXd cov = s.asDiagonal() * c * s.asDiagonal();
        auto res = markowitz_weights(r, s, c);
        Eigen::Map<const Eigen::VectorXd> w(res.weights.data(), static_cast<Eigen::Index>(n));
        EXPECT_NEAR(w.sum(), 1.0, 1e-9);
        EXPECT_GE(w.minCoeff(), -1e-9);
        EXPECT_GE(sharpe_of(w, r, cov), oracle::grid_markowitz(r, cov).sharpe - 1e-6);
        EXPECT_NEAR(res.sharpe, sharpe_of(w, r, cov), 1e-9);
    }
}

TEST(Markowitz, BeatsUniformAndScaleInvariant) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> mu(0.0, 0.05), vol(0.05, 0.3);
    for (std::size_t n = 3; n <= 10; ++n) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n)), s(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            r(i) = mu(rng);
            s(i) = vol(rng);
        }
        auto c = random_corr(n, rng);
        Eigen::MatrixXd cov = s.asDiagonal() * c * s.asDiagonal();
        auto res = markowitz_weights(r, s, c);
        Eigen::Map<const Eigen::VectorXd> w(res.weights.data(), r.size());
        Eigen::VectorXd u = Eigen::VectorXd::Constant(r.size(), 1.0 / static_cast<double>(n));
        EXPECT_GE(sharpe_of(w, r, cov), sharpe_of(u, r, cov) - 1e-12);
        auto doubled = markowitz_weights(2.0 * r, s, c);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(doubled.weights[i], res.weights[i], 1e-6);
    }
}

TEST(Returns, PortfolioReturn) {
    PriceMatrix pm;
    pm.symbols = {"A", "B"};
    pm.timeline = {"0", "1"};
    pm.prices.resize(2, 2);
    pm.prices << 100, 100, 110, 90;
    std::vector<std::size_t> a{0}, ab{0, 1};
    std::vector<double> one{1.0}, half{0.5, 0.5};
    EXPECT_NEAR(portfolio_return(a, one, pm, 0, 1), std::log(1.1), 1e-15);
    EXPECT_NEAR(portfolio_return(ab, half, pm, 0, 1), 0.5 * (std::log(1.1) + std::log(0.9)), 1e-15);
    EXPECT_EQ(portfolio_return(ab, half, pm, 0, 0), 0.0);
    EXPECT_THROW(portfolio_return(ab, half, pm, 1, 1), RangeError);
    EXPECT_THROW(portfolio_return(a, half, pm, 0, 1), DomainError);
}

TEST(Returns, SharpeRatio) {
    std::vector<double> r{0.01, 0.03};
    auto rec = sharpe_ratio(r, 5);
    EXPECT_NEAR(rec.mean, 0.02, 1e-15);
    EXPECT_NEAR(rec.std, 0.0141421356, 1e-9);
    EXPECT_NEAR(rec.sharpe, 1.41421356, 1e-8);
    EXPECT_EQ(rec.holding_period, 5u);
    std::vector<double> neg{-0.01, -0.03};
    EXPECT_NEAR(sharpe_ratio(neg).sharpe, -rec.sharpe, 1e-15);
    std::vector<double> flat{0.02, 0.02, 0.02};
    try {
        sharpe_ratio(flat);
        FAIL() << "expected UndefinedSharpeError";
    } catch (const UndefinedSharpeError& e) {
        EXPECT_DOUBLE_EQ(e.mean(), 0.02);
    }
    std::vector<double> single{0.1};
    EXPECT_THROW(sharpe_ratio(single), DomainError);
}
