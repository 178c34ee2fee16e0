#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/csv.hpp"
#include "cpnet/errors.hpp"

namespace cpnet {

// Normalized exponential weights w_t = w0 * exp((t - T) / theta), t = 1..T.
struct ExpWeights {
    std::size_t length = 0;
    double theta = 0.0;
    Eigen::VectorXd weights;
};

inline ExpWeights exp_weights(std::size_t length, double theta) {
    if (length < 1) throw DomainError("window length must be at least 1");
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    ExpWeights w{length, theta, Eigen::VectorXd(static_cast<Eigen::Index>(length))};
    const double T = static_cast<double>(length);
    for (std::size_t t = 1; t <= length; ++t)
        w.weights(static_cast<Eigen::Index>(t - 1)) = std::exp((static_cast<double>(t) - T) / theta);
    // Sum from the smallest term up for accuracy.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.weights.size(); ++i) sum += w.weights(i);
    w.weights /= sum;
    return w;
}

struct CorrelationMatrix {
    std::vector<std::string> symbols;
    Eigen::MatrixXd coefficients;

    std::size_t size() const { return symbols.size(); }
    double operator()(std::size_t i, std::size_t j) const {
        return coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

namespace detail {

// Correlation from weighted central moments; weights need not be
// normalized since the normalization cancels in the quotient.
inline CorrelationMatrix correlation_from_weights(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                                  const Eigen::VectorXd& weights,
                                                  const std::vector<std::string>& symbols) {
    const auto n = window.cols();
    if (static_cast<std::size_t>(n) != symbols.size()) throw DomainError("symbol count does not match window columns");
    Eigen::RowVectorXd mean = (weights.transpose() * window) / weights.sum();
    Eigen::MatrixXd centered = window.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * weights.asDiagonal() * centered;
    Eigen::VectorXd sd(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        // Relative test: a column whose spread is at rounding level of its
        // magnitude is constant.
        double scale = centered.col(k).cwiseAbs().maxCoeff();
        double level = window.col(k).cwiseAbs().maxCoeff();
        if (!(cov(k, k) > 0.0) || scale <= 1e-14 * level) throw FlaggedSymbolError(symbols[static_cast<std::size_t>(k)]);
        sd(k) = std::sqrt(cov(k, k));
    }
    CorrelationMatrix out{symbols, Eigen::MatrixXd(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.coefficients(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double c = std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
            out.coefficients(i, j) = c;
            out.coefficients(j, i) = c;
        }
    }
    return out;
}

} // namespace detail

// Sample Pearson coefficients of every column pair of a return window.
inline CorrelationMatrix pearson_matrix(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                        const std::vector<std::string>& symbols) {
    if (window.rows() < 2) throw DomainError("correlation window needs at least two rows");
    return detail::correlation_from_weights(window, Eigen::VectorXd::Ones(window.rows()), symbols);
}

inline CorrelationMatrix weighted_pearson_matrix(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                                 const ExpWeights& weights,
                                                 const std::vector<std::string>& symbols) {
    if (window.rows() < 2) throw DomainError("correlation window needs at least two rows");
    if (static_cast<std::size_t>(window.rows()) != weights.length)
        throw DomainError("weight length " + std::to_string(weights.length) + " != window length " +
                          std::to_string(window.rows()));
    return detail::correlation_from_weights(window, weights.weights, symbols);
}

inline void write_correlation_matrix(std::ostream& out, const CorrelationMatrix& c) {
    out << "symbol";
    for (const auto& s : c.symbols) out << ',' << s;
    out << '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << c.symbols[i];
        for (std::size_t j = 0; j < c.size(); ++j) out << ',' << csv::format(c(i, j));
        out << '\n';
    }
}

} // namespace cpnet
