#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diffcal/error.hpp"
#include "diffcal/series.hpp"

namespace diffcal::signal {

enum class TrendKind { linear, polynomial, exp_approach };

/// Which model family to fit. Parsed from "linear", "poly:D" or "exp".
struct TrendSpec {
  TrendKind kind = TrendKind::linear;
  int degree = 1;

  static TrendSpec linear() { return {TrendKind::linear, 1}; }
  static TrendSpec polynomial(int degree) {
    return {TrendKind::polynomial, degree};
  }
  static TrendSpec exp_approach() { return {TrendKind::exp_approach, 0}; }
  static TrendSpec parse(std::string_view text);

  std::string label() const;
};

/// Fitted trend. The model is evaluated in u = (t - time_origin) / time_scale:
///  - linear:       params = [intercept, slope] with origin 0, scale 1, i.e.
///                  directly in seconds;
///  - polynomial:   params = c0..cD in the normalized variable u (origin at
///                  the span midpoint, scale = half span);
///  - exp_approach: params = [a, b, tau] for a + b * exp(-(t - origin) / tau),
///                  origin at the first sample.
struct TrendModel {
  TrendKind kind = TrendKind::linear;
  int degree = 1;
  std::vector<double> params;
  double time_origin = 0.0;
  double time_scale = 1.0;
  double rms_residual = 0.0;
  int iterations = 0;  // Levenberg-Marquardt only

  double evaluate(double t) const noexcept;
};

/// Levenberg-Marquardt did not meet its tolerance; `best()` holds the lowest
/// cost parameters seen.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, TrendModel best)
      : Error(ErrorCode::no_convergence, message), best_(std::move(best)) {}
  const TrendModel& best() const noexcept { return best_; }

 private:
  TrendModel best_;
};

/// Least-squares trend fit. Polynomials use column-pivoted Householder QR on
/// a normalized time axis; exp_approach uses Levenberg-Marquardt started from
/// (last value, first - last, span / 3), stopping when the relative parameter
/// change drops below 1e-9 or after 200 iterations.
TrendModel fit_trend(const TimeSeries& series, const TrendSpec& spec);

/// residual[i] = series[i] - model(t_i).
TimeSeries detrend(const TimeSeries& series, const TrendModel& model);

}  // namespace diffcal::signal
