#pragma once

// Logistic regression by iteratively reweighted least squares, with Wald
// standard errors from the observed information matrix.  Dimensions here
// are tiny (intercept plus two features), so the normal equations are
// solved with plain Gaussian elimination.

#include <cmath>
#include <cstdint>
#include <vector>

#include "teamflow/errors.hpp"

namespace teamflow {

struct logit_term {
    double estimate = 0;
    double std_error = 0;
    double z_value = 0;
    double p_value = 0;
    double ci_lo = 0;  // 95% Wald interval
    double ci_hi = 0;
};

struct logit_fit {
    std::vector<logit_term> terms;  // intercept first, then features in order
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0;
    double max_abs_gradient = 0;  // score vector at the optimum, largest entry
    std::vector<double> step_trace;  // per-iteration largest coefficient change
    std::int64_t n = 0;
};

namespace detail {

// solve A x = b in place, partial pivoting; throws when singular
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t k = b.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12)
            throw constant_feature("information matrix is singular (constant feature?)");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < k; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// (X^T W X)^{-1} by solving against unit vectors
inline std::vector<std::vector<double>> invert_dense(const std::vector<std::vector<double>>& a) {
    const std::size_t k = a.size();
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> e(k, 0.0);
        e[j] = 1.0;
        auto col = solve_dense(a, e);
        for (std::size_t i = 0; i < k; ++i) inv[i][j] = col[i];
    }
    return inv;
}

}  // namespace detail

inline constexpr double z_95 = 1.959963984540054;  // Phi^{-1}(0.975)

// features: one row per observation, without the intercept column
inline logit_fit fit_logistic(const std::vector<std::vector<double>>& features,
                              const std::vector<int>& outcome) {
    const std::size_t n = outcome.size();
    if (features.size() != n) throw error("feature/outcome length mismatch");
    if (n < 10) throw too_few_observations("need at least 10 observations");
    const std::size_t kf = features.front().size();
    const std::size_t k = kf + 1;

    bool any0 = false, any1 = false;
    for (int y : outcome) (y ? any1 : any0) = true;
    if (!any0 || !any1) throw all_same_outcome("every observation has the same outcome");
    for (std::size_t j = 0; j < kf; ++j) {
        const double first = features.front()[j];
        bool varies = false;
        for (const auto& row : features)
            if (row[j] != first) { varies = true; break; }
        if (!varies) throw constant_feature("feature " + std::to_string(j) + " is constant");
    }

    auto xrow = [&](std::size_t i, std::size_t j) -> double {
        return j == 0 ? 1.0 : features[i][j - 1];
    };

    std::vector<double> beta(k, 0.0);
    logit_fit fit;
    fit.n = static_cast<std::int64_t>(n);
    std::vector<std::vector<double>> info(k, std::vector<double>(k, 0.0));
    for (int iter = 1; iter <= 100; ++iter) {
        fit.iterations = iter;
        std::vector<double> score(k, 0.0);
        for (auto& row : info) std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0;
            for (std::size_t j = 0; j < k; ++j) eta += beta[j] * xrow(i, j);
            const double mu = 1.0 / (1.0 + std::exp(-eta));
            const double w = mu * (1.0 - mu);
            const double resid = static_cast<double>(outcome[i]) - mu;
            for (std::size_t j = 0; j < k; ++j) {
                score[j] += xrow(i, j) * resid;
                for (std::size_t l = j; l < k; ++l) info[j][l] += w * xrow(i, j) * xrow(i, l);
            }
        }
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < j; ++l) info[j][l] = info[l][j];
        std::vector<double> step;
        try {
            step = detail::solve_dense(info, score);
        } catch (const constant_feature&) {
            // at beta = 0 the weights are uniform, so a singular system really
            // is a degenerate design; later on it means the weights collapsed
            // because the coefficients ran off -- that is separation
            if (iter == 1) throw;
            throw separation_detected("weights vanished at iteration " +
                                      std::to_string(iter) + "; data are separated");
        }
        double max_step = 0;
        for (std::size_t j = 0; j < k; ++j) {
            beta[j] += step[j];
            max_step = std::max(max_step, std::fabs(step[j]));
            if (std::fabs(beta[j]) > 50.0)
                throw separation_detected("coefficient " + std::to_string(j) +
                                          " diverged; data are separated");
        }
        fit.step_trace.push_back(max_step);
        if (max_step < 1e-8) {
            fit.converged = true;
            break;
        }
    }

    // final pass for the log-likelihood, score check and covariance
    std::vector<double> score(k, 0.0);
    for (auto& row : info) std::fill(row.begin(), row.end(), 0.0);
    double ll = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0;
        for (std::size_t j = 0; j < k; ++j) eta += beta[j] * xrow(i, j);
        const double mu = 1.0 / (1.0 + std::exp(-eta));
        ll += outcome[i] ? std::log(std::max(mu, 1e-300))
                         : std::log(std::max(1.0 - mu, 1e-300));
        const double w = mu * (1.0 - mu);
        const double resid = static_cast<double>(outcome[i]) - mu;
        for (std::size_t j = 0; j < k; ++j) {
            score[j] += xrow(i, j) * resid;
            for (std::size_t l = j; l < k; ++l) info[j][l] += w * xrow(i, j) * xrow(i, l);
        }
    }
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < j; ++l) info[j][l] = info[l][j];
    fit.log_likelihood = ll;
    for (double g : score) fit.max_abs_gradient = std::max(fit.max_abs_gradient, std::fabs(g));
    const auto cov = detail::invert_dense(info);
    fit.terms.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        logit_term& t = fit.terms[j];
        t.estimate = beta[j];
        t.std_error = std::sqrt(cov[j][j]);
        t.z_value = t.estimate / t.std_error;
        t.p_value = std::erfc(std::fabs(t.z_value) / std::sqrt(2.0));
        t.ci_lo = t.estimate - z_95 * t.std_error;
        t.ci_hi = t.estimate + z_95 * t.std_error;
    }
    return fit;
}

// multiplicative change in the odds for a `delta` change of one feature
inline double odds_factor(const logit_fit& fit, std::size_t term, double delta) {
    return std::exp(delta * fit.terms[term].estimate);
}

}  // namespace teamflow
