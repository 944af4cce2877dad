#pragma once

// ARFIMA(p, d, q) workload forecasting.
//
// Fitting: d from the GPH log-periodogram regression, then the demeaned series
// is fractionally differenced and an ARMA(p, q) is fitted to the result by
// Hannan-Rissanen two-stage least squares. Forecasts iterate one-step-ahead
// predictions in differenced space and invert them through the
// fractional-differencing weights.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace datesso {

/// Constant (or otherwise unusable) input series.
class DegenerateSeries : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Series too short, or the fitted polynomials are non-stationary / non-invertible.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kFracDiffLags = 1000;
inline constexpr std::size_t kMinGphLength = 64;
inline constexpr std::size_t kMaxArmaOrder = 3;
inline constexpr double kMaxMemory = 0.499;

struct ForecastModel {
    std::size_t p = 0;
    std::size_t q = 0;
    double d = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    double training_mean = 0.0;
    double sigma2 = 0.0;
    double aic = 0.0;
    std::vector<double> residuals;     ///< last stage-two residuals of the fit
    std::vector<double> frac_weights;  ///< (1 - B)^d weights, kFracDiffLags long

    /// p = q = 0, d = 0: forecasts are the mean.
    static ForecastModel white_noise(double mean);
};

/// GPH estimate over the first floor(sqrt(n)) Fourier frequencies, clamped to
/// [-0.499, 0.499]. Needs >= 64 points and a non-constant series.
double estimate_d(std::span<const double> series);

/// (1 - B)^d truncated at min(length, 1000) lags. |d| < 0.5.
std::vector<double> frac_diff(std::span<const double> series, double d);

struct ArmaFit {
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma2 = 0.0;
    double aic = 0.0;
    std::vector<double> residuals;
};

/// Hannan-Rissanen ARMA(p, q) on an already differenced, zero-mean series.
/// All orders use the same residual sample so AIC values are comparable.
ArmaFit fit_arma(std::span<const double> series, std::size_t p, std::size_t q);

ForecastModel fit(std::span<const double> series, std::size_t p, std::size_t q);

struct ArmaOrder {
    std::size_t p = 0;
    std::size_t q = 0;
    bool operator==(const ArmaOrder&) const = default;
};

/// AIC grid search over p <= p_max, q <= q_max (both <= 3); ties go to
/// smaller p + q, then smaller p.
ArmaOrder select_order(std::span<const double> series, std::size_t p_max, std::size_t q_max);

/// select_order followed by fit, sharing the d estimate and differencing.
ForecastModel fit_auto(std::span<const double> series, std::size_t p_max, std::size_t q_max);

/// h iterated predictions following `history`, clamped to >= 0.
std::vector<double> forecast(const ForecastModel& model, std::span<const double> history,
                             std::size_t h);

/// Incremental form of forecast(): observe() one value at a time, predict()
/// at any point. Gives exactly the same numbers as forecast() on the same history.
class ArfimaPredictor {
public:
    explicit ArfimaPredictor(ForecastModel model);

    void observe(double value);
    std::vector<double> predict(std::size_t h) const;
    std::size_t observed() const { return x_.size(); }
    const ForecastModel& model() const { return model_; }

private:
    ForecastModel model_;
    std::vector<double> x_;    ///< demeaned history
    std::vector<double> u_;    ///< fractionally differenced history
    std::vector<double> eps_;  ///< one-step innovations
};

}  // namespace datesso
