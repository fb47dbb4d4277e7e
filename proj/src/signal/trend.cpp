#include "diffcal/signal/trend.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace diffcal::signal {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelTolerance = 1e-9;

double rms(const Eigen::VectorXd& r) {
  return r.size() == 0 ? 0.0 : std::sqrt(r.squaredNorm() / double(r.size()));
}

TrendModel fit_polynomial(const TimeSeries& series, const TrendSpec& spec) {
  const auto n = static_cast<Eigen::Index>(series.size());
  const int degree = spec.degree;
  const double t0 = series.start;
  const double t1 = series.end_time();
  const double origin = 0.5 * (t0 + t1);
  const double scale = t1 > t0 ? 0.5 * (t1 - t0) : 1.0;

  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (series.time_at(static_cast<std::size_t>(i)) - origin) / scale;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      design(i, j) = p;
      p *= u;
    }
    y(i) = series.values[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < degree + 1) {
    throw Error(ErrorCode::rank_deficient,
                "trend design matrix is rank deficient");
  }
  const Eigen::VectorXd coef = qr.solve(y);
  const Eigen::VectorXd residual = y - design * coef;

  TrendModel m;
  m.kind = spec.kind;
  m.degree = degree;
  m.rms_residual = rms(residual);
  if (spec.kind == TrendKind::linear) {
    // Report in seconds: a + b * t.
    m.params = {coef(0) - coef(1) * origin / scale, coef(1) / scale};
    m.time_origin = 0.0;
    m.time_scale = 1.0;
  } else {
    m.params.assign(coef.data(), coef.data() + coef.size());
    m.time_origin = origin;
    m.time_scale = scale;
  }
  return m;
}

// a + b * exp(-s / kappa) on s = (t - t0) / span.
struct ExpProblem {
  Eigen::VectorXd s;
  Eigen::VectorXd y;

  Eigen::VectorXd residual(const Eigen::Vector3d& p) const {
    return y - (p(0) + p(1) * (-s.array() / p(2)).exp()).matrix();
  }

  Eigen::MatrixXd jacobian(const Eigen::Vector3d& p) const {
    Eigen::MatrixXd j(s.size(), 3);
    const Eigen::ArrayXd e = (-s.array() / p(2)).exp();
    j.col(0).setOnes();
    j.col(1) = e.matrix();
    j.col(2) = (p(1) * e * s.array() / (p(2) * p(2))).matrix();
    return j;
  }
};

TrendModel fit_exp(const TimeSeries& series) {
  const auto n = static_cast<Eigen::Index>(series.size());
  const double t0 = series.start;
  const double span = series.end_time() - t0;
  if (!(span > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "exp_approach needs a time span");
  }
  ExpProblem prob{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    prob.s(i) = (series.time_at(static_cast<std::size_t>(i)) - t0) / span;
    prob.y(i) = series.values[static_cast<std::size_t>(i)];
  }
  const double y_scale = std::max(prob.y.maxCoeff() - prob.y.minCoeff(),
                                  std::numeric_limits<double>::min());

  Eigen::Vector3d p(series.values.back(),
                    series.values.front() - series.values.back(), 1.0 / 3.0);
  double cost = prob.residual(p).squaredNorm();
  double lambda = 1e-3;
  bool converged = cost == 0.0;
  int iter = 0;

  auto relative_change = [&](const Eigen::Vector3d& delta,
                             const Eigen::Vector3d& at) {
    return std::max({std::abs(delta(0)) / y_scale, std::abs(delta(1)) / y_scale,
                     std::abs(delta(2)) / std::abs(at(2))});
  };

  while (!converged && iter < kMaxIterations) {
    ++iter;
    const Eigen::MatrixXd j = prob.jacobian(p);
    const Eigen::VectorXd r = prob.residual(p);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d jtr = j.transpose() * r;
    Eigen::Matrix3d a = jtj;
    a.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector3d delta = a.ldlt().solve(jtr);
    const Eigen::Vector3d trial = p + delta;
    const bool finite = delta.allFinite();
    const double trial_cost = finite && trial(2) > 0.0
                                  ? prob.residual(trial).squaredNorm()
                                  : std::numeric_limits<double>::infinity();
    if (trial_cost < cost) {
      const double change = relative_change(delta, p);
      p = trial;
      cost = trial_cost;
      lambda = std::max(lambda / 10.0, 1e-12);
      converged = change < kRelTolerance;
    } else {
      // No decrease: either at a numerical minimum (step already negligible)
      // or the damping must grow.
      if (finite && relative_change(delta, p) < kRelTolerance * 1e-3) {
        converged = true;
      }
      lambda *= 10.0;
      if (lambda > 1e16) converged = true;
    }
  }

  TrendModel m;
  m.kind = TrendKind::exp_approach;
  m.degree = 0;
  m.params = {p(0), p(1), p(2) * span};
  m.time_origin = t0;
  m.time_scale = 1.0;
  m.iterations = iter;
  m.rms_residual = rms(prob.residual(p));
  if (!converged) {
    throw NonConvergenceError(
        "Levenberg-Marquardt did not converge in 200 iterations", m);
  }
  return m;
}

}  // namespace

TrendSpec TrendSpec::parse(std::string_view text) {
  if (text == "linear") return linear();
  if (text == "exp" || text == "exp_approach") return exp_approach();
  if (text.starts_with("poly:")) {
    int degree = 0;
    const auto digits = text.substr(5);
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), degree);
    if (ec == std::errc() && ptr == digits.data() + digits.size() &&
        degree >= 1 && degree <= 6) {
      return polynomial(degree);
    }
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown trend model '" + std::string(text) +
                  "' (expected linear, poly:1..6 or exp)");
}

std::string TrendSpec::label() const {
  switch (kind) {
    case TrendKind::linear: return "linear";
    case TrendKind::polynomial: return "poly:" + std::to_string(degree);
    case TrendKind::exp_approach: return "exp";
  }
  return "?";
}

double TrendModel::evaluate(double t) const noexcept {
  const double u = (t - time_origin) / time_scale;
  switch (kind) {
    case TrendKind::linear:
    case TrendKind::polynomial: {
      double acc = 0.0;
      for (auto it = params.rbegin(); it != params.rend(); ++it) {
        acc = acc * u + *it;
      }
      return acc;
    }
    case TrendKind::exp_approach:
      return params[0] + params[1] * std::exp(-u / params[2]);
  }
  return 0.0;
}

TrendModel fit_trend(const TimeSeries& series, const TrendSpec& spec) {
  for (double v : series.values) require_finite(v, "series value");
  if (!(series.period > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "series period must be positive");
  }
  switch (spec.kind) {
    case TrendKind::linear:
    case TrendKind::polynomial: {
      if (spec.degree < 1 || spec.degree > 6 ||
          (spec.kind == TrendKind::linear && spec.degree != 1)) {
        throw Error(ErrorCode::invalid_argument,
                    "polynomial degree must be in [1, 6]");
      }
      if (series.size() <= static_cast<std::size_t>(spec.degree + 1)) {
        throw Error(ErrorCode::invalid_argument,
                    "series too short for the requested trend");
      }
      return fit_polynomial(series, spec);
    }
    case TrendKind::exp_approach:
      if (series.size() <= 3) {
        throw Error(ErrorCode::invalid_argument,
                    "series too short for exp_approach");
      }
      return fit_exp(series);
  }
  throw Error(ErrorCode::invalid_argument, "unknown trend kind");
}

TimeSeries detrend(const TimeSeries& series, const TrendModel& model) {
  TimeSeries out{series.start, series.period, series.values};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] -= model.evaluate(series.time_at(i));
  }
  return out;
}

}  // namespace diffcal::signal
