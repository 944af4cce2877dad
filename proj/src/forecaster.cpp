#include "datesso/forecaster.hpp"

#include "datesso/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace datesso {

ForecastModel ForecastModel::white_noise(double mean) {
    ForecastModel m;
    m.training_mean = mean;
    m.frac_weights = kernels::frac_weights(0.0, kFracDiffLags);
    return m;
}

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

std::vector<double> demeaned(std::span<const double> x, double mean) {
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v -= mean;
    return out;
}

std::size_t long_ar_order(std::size_t n) {
    const auto k = static_cast<std::size_t>(std::ceil(10.0 * std::log10(static_cast<double>(n))));
    return std::min(std::max<std::size_t>(k, 10), n / 4);
}

/// Max modulus of the roots of z^k - c_1 z^{k-1} - ... - c_k, i.e. the
/// companion-matrix eigenvalues. < 1 means 1 - c_1 B - ... is stationary.
double max_companion_modulus(const std::vector<double>& c) {
    const auto k = static_cast<Eigen::Index>(c.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) companion(0, i) = c[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::string join(const std::vector<double>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    return out.str();
}

void check_polynomials(const std::vector<double>& phi, const std::vector<double>& theta) {
    const double ar = max_companion_modulus(phi);
    if (!(ar < 1.0)) {
        throw FitError("non-stationary AR fit: phi = [" + join(phi) +
                       "], max companion root modulus " + std::to_string(ar));
    }
    std::vector<double> neg(theta.size());
    std::transform(theta.begin(), theta.end(), neg.begin(), [](double v) { return -v; });
    const double ma = max_companion_modulus(neg);
    if (!(ma < 1.0)) {
        throw FitError("non-invertible MA fit: theta = [" + join(theta) +
                       "], max companion root modulus " + std::to_string(ma));
    }
}

struct Prepared {
    double mean = 0.0;
    double d = 0.0;
    std::vector<double> differenced;
};

Prepared prepare(std::span<const double> series) {
    Prepared prep;
    prep.mean = mean_of(series);
    prep.d = estimate_d(series);
    const auto centered = demeaned(series, prep.mean);
    prep.differenced = frac_diff(centered, prep.d);
    return prep;
}

ForecastModel assemble(const Prepared& prep, std::size_t p, std::size_t q, ArmaFit arma) {
    ForecastModel model;
    model.p = p;
    model.q = q;
    model.d = prep.d;
    model.phi = std::move(arma.phi);
    model.theta = std::move(arma.theta);
    model.training_mean = prep.mean;
    model.sigma2 = arma.sigma2;
    model.aic = arma.aic;
    const std::size_t keep = std::min<std::size_t>(arma.residuals.size(), 64);
    model.residuals.assign(arma.residuals.end() - static_cast<std::ptrdiff_t>(keep),
                           arma.residuals.end());
    model.frac_weights = kernels::frac_weights(prep.d, kFracDiffLags);
    return model;
}

void check_length(std::size_t n, std::size_t p, std::size_t q) {
    if (p > kMaxArmaOrder || q > kMaxArmaOrder) throw FitError("ARMA orders must be <= 3");
    const std::size_t needed = std::max(kMinGphLength, 10 * (p + q + 1));
    if (n < needed) {
        throw FitError("series too short: " + std::to_string(n) + " < " + std::to_string(needed));
    }
}

}  // namespace

double estimate_d(std::span<const double> series) {
    if (series.size() < kMinGphLength) {
        throw FitError("GPH needs at least " + std::to_string(kMinGphLength) + " observations");
    }
    if (is_constant(series)) throw DegenerateSeries("degenerate series: constant input");

    const auto centered = demeaned(series, mean_of(series));
    const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(series.size()))));
    const auto spectrum = kernels::periodogram(centered, m);

    std::vector<double> xs;
    std::vector<double> ys;
    const double n = static_cast<double>(series.size());
    for (std::size_t j = 1; j <= m; ++j) {
        const double power = spectrum[j - 1];
        if (!(power > 0.0)) continue;
        const double s = std::sin(std::numbers::pi * static_cast<double>(j) / n);
        xs.push_back(std::log(4.0 * s * s));
        ys.push_back(std::log(power));
    }
    if (xs.size() < 3) throw DegenerateSeries("degenerate series: empty low-frequency spectrum");

    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return std::clamp(-sxy / sxx, -kMaxMemory, kMaxMemory);
}

std::vector<double> frac_diff(std::span<const double> series, double d) {
    if (!(std::abs(d) < 0.5)) throw std::invalid_argument("frac_diff requires |d| < 0.5");
    const auto weights = kernels::frac_weights(d, std::min(series.size(), kFracDiffLags));
    return kernels::frac_diff(series, weights);
}

ArmaFit fit_arma(std::span<const double> u, std::size_t p, std::size_t q) {
    const std::size_t n = u.size();
    const std::size_t k_long = long_ar_order(n);
    const std::size_t start = k_long + kMaxArmaOrder;
    if (p > kMaxArmaOrder || q > kMaxArmaOrder) throw FitError("ARMA orders must be <= 3");
    if (n <= start + 10 * (p + q + 1)) throw FitError("series too short for ARMA fit");

    // Stage one: long autoregression for innovation estimates.
    std::vector<double> innovations(n, 0.0);
    if (q > 0) {
        const auto rows = static_cast<Eigen::Index>(n - k_long);
        Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(k_long));
        Eigen::VectorXd target(rows);
        for (std::size_t t = k_long; t < n; ++t) {
            const auto r = static_cast<Eigen::Index>(t - k_long);
            target(r) = u[t];
            for (std::size_t i = 1; i <= k_long; ++i) {
                design(r, static_cast<Eigen::Index>(i - 1)) = u[t - i];
            }
        }
        const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
        const Eigen::VectorXd resid = target - design * coef;
        for (Eigen::Index r = 0; r < rows; ++r) {
            innovations[static_cast<std::size_t>(r) + k_long] = resid(r);
        }
    }

    // Stage two: regress on lagged values and lagged innovations.
    const auto rows = static_cast<Eigen::Index>(n - start);
    const auto cols = static_cast<Eigen::Index>(p + q);
    Eigen::VectorXd target(rows);
    for (std::size_t t = start; t < n; ++t) target(static_cast<Eigen::Index>(t - start)) = u[t];

    ArmaFit fit;
    Eigen::VectorXd resid = target;
    if (cols > 0) {
        Eigen::MatrixXd design(rows, cols);
        for (std::size_t t = start; t < n; ++t) {
            const auto r = static_cast<Eigen::Index>(t - start);
            for (std::size_t i = 1; i <= p; ++i) design(r, static_cast<Eigen::Index>(i - 1)) = u[t - i];
            for (std::size_t j = 1; j <= q; ++j) {
                design(r, static_cast<Eigen::Index>(p + j - 1)) = innovations[t - j];
            }
        }
        const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
        resid = target - design * coef;
        for (std::size_t i = 0; i < p; ++i) fit.phi.push_back(coef(static_cast<Eigen::Index>(i)));
        for (std::size_t j = 0; j < q; ++j) {
            fit.theta.push_back(coef(static_cast<Eigen::Index>(p + j)));
        }
    }
    check_polynomials(fit.phi, fit.theta);

    fit.sigma2 = resid.squaredNorm() / static_cast<double>(rows);
    const double log_sigma2 = std::log(std::max(fit.sigma2, std::numeric_limits<double>::min()));
    fit.aic = static_cast<double>(rows) * log_sigma2 + 2.0 * static_cast<double>(p + q + 1);
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    return fit;
}

ForecastModel fit(std::span<const double> series, std::size_t p, std::size_t q) {
    check_length(series.size(), p, q);
    const auto prep = prepare(series);
    return assemble(prep, p, q, fit_arma(prep.differenced, p, q));
}

namespace {

struct OrderSearch {
    ArmaOrder order;
    ArmaFit fit;
};

OrderSearch search_orders(const Prepared& prep, std::size_t p_max, std::size_t q_max) {
    if (p_max > kMaxArmaOrder || q_max > kMaxArmaOrder) {
        throw std::invalid_argument("select_order: p_max and q_max must be <= 3");
    }
    // Visit candidates by (p + q, p) so a strictly-smaller AIC is needed to
    // move off a simpler model.
    std::vector<ArmaOrder> grid;
    for (std::size_t p = 0; p <= p_max; ++p) {
        for (std::size_t q = 0; q <= q_max; ++q) grid.push_back({p, q});
    }
    std::stable_sort(grid.begin(), grid.end(), [](const ArmaOrder& a, const ArmaOrder& b) {
        return a.p + a.q != b.p + b.q ? a.p + a.q < b.p + b.q : a.p < b.p;
    });

    std::optional<OrderSearch> best;
    std::string failures;
    for (const auto& order : grid) {
        try {
            auto candidate = fit_arma(prep.differenced, order.p, order.q);
            if (!best || candidate.aic < best->fit.aic) best = OrderSearch{order, std::move(candidate)};
        } catch (const FitError& e) {
            failures += "\n  (" + std::to_string(order.p) + "," + std::to_string(order.q) + "): " + e.what();
        }
    }
    if (!best) throw FitError("select_order: every candidate fit failed" + failures);
    return std::move(*best);
}

}  // namespace

ArmaOrder select_order(std::span<const double> series, std::size_t p_max, std::size_t q_max) {
    check_length(series.size(), 0, 0);
    return search_orders(prepare(series), p_max, q_max).order;
}

ForecastModel fit_auto(std::span<const double> series, std::size_t p_max, std::size_t q_max) {
    check_length(series.size(), 0, 0);
    const auto prep = prepare(series);
    auto found = search_orders(prep, p_max, q_max);
    return assemble(prep, found.order.p, found.order.q, std::move(found.fit));
}

std::vector<double> forecast(const ForecastModel& model, std::span<const double> history,
                             std::size_t h) {
    if (history.size() < std::max<std::size_t>({model.p, model.q, 1})) {
        throw std::invalid_argument("forecast: history shorter than the model order");
    }
    ArfimaPredictor predictor(model);
    for (double v : history) predictor.observe(v);
    return predictor.predict(h);
}

// =============================================================================
// ArfimaPredictor
// =============================================================================

ArfimaPredictor::ArfimaPredictor(ForecastModel model) : model_(std::move(model)) {
    if (model_.frac_weights.empty()) model_.frac_weights = kernels::frac_weights(model_.d, kFracDiffLags);
    model_.phi.resize(model_.p, 0.0);
    model_.theta.resize(model_.q, 0.0);
}

void ArfimaPredictor::observe(double value) {
    const auto& w = model_.frac_weights;
    x_.push_back(value - model_.training_mean);
    const std::size_t t = x_.size() - 1;
    const std::size_t lags = std::min(t + 1, w.size());
    double u = 0.0;
    for (std::size_t k = 0; k < lags; ++k) u += w[k] * x_[t - k];
    u_.push_back(u);

    double e = u;
    for (std::size_t i = 1; i <= model_.p && i <= t; ++i) e -= model_.phi[i - 1] * u_[t - i];
    for (std::size_t j = 1; j <= model_.q && j <= t; ++j) e -= model_.theta[j - 1] * eps_[t - j];
    eps_.push_back(e);
}

std::vector<double> ArfimaPredictor::predict(std::size_t h) const {
    const auto& w = model_.frac_weights;
    const std::size_t n = x_.size();
    std::vector<double> u_future(h, 0.0);
    std::vector<double> x_future(h, 0.0);
    const auto u_at = [&](std::size_t i) { return i < n ? u_[i] : u_future[i - n]; };
    const auto x_at = [&](std::size_t i) { return i < n ? x_[i] : x_future[i - n]; };

    std::vector<double> out(h);
    for (std::size_t j = 0; j < h; ++j) {
        const std::size_t t = n + j;
        double u = 0.0;
        for (std::size_t i = 1; i <= model_.p && i <= t; ++i) u += model_.phi[i - 1] * u_at(t - i);
        for (std::size_t k = 1; k <= model_.q && k <= t; ++k) {
            if (t - k < n) u += model_.theta[k - 1] * eps_[t - k];
        }
        u_future[j] = u;

        const std::size_t lags = std::min(t + 1, w.size());
        double x = u;
        for (std::size_t k = 1; k < lags; ++k) x -= w[k] * x_at(t - k);
        x_future[j] = x;
        out[j] = std::max(0.0, x + model_.training_mean);
    }
    return out;
}

}  // namespace datesso
