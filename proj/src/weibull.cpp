#include "censorbias/weibull.hpp"

#include <cmath>
#include <string>

#include "censorbias/errors.hpp"

namespace censorbias {

WeibullParams quantiles_to_weibull(double q_a, double q_b, double p_a, double p_b) {
  if (!(p_a > 0.0 && p_a < p_b && p_b < 1.0))
    throw DomainError("quantile probabilities must satisfy 0 < p_a < p_b < 1");
  if (!(q_a > 0.0 && q_a < q_b) || !std::isfinite(q_b))
    throw DomainError("quantile times must satisfy 0 < q_a < q_b, got " + std::to_string(q_a) +
                      " and " + std::to_string(q_b));
  const double shape = std::log(std::log1p(-p_b) / std::log1p(-p_a)) / std::log(q_b / q_a);
  const double scale = q_a / std::pow(-std::log1p(-p_a), 1.0 / shape);
  if (!(shape > 0.0 && std::isfinite(shape) && scale > 0.0 && std::isfinite(scale)))
    throw DomainError("quantiles do not define a finite Weibull distribution");
  return {shape, scale};
}

double inverse_weibull(const WeibullParams& params, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("survival probability must be in (0, 1]");
  return params.scale * std::pow(-std::log(p), 1.0 / params.shape);
}

std::vector<double> inverse_weibull(const WeibullParams& params, std::span<const double> p) {
  std::vector<double> times;
  times.reserve(p.size());
  for (double value : p) times.push_back(inverse_weibull(params, value));
  return times;
}

double weibull_quantile(const WeibullParams& params, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile probability must be in [0, 1)");
  return params.scale * std::pow(-std::log1p(-p), 1.0 / params.shape);
}

double weibull_cdf(const WeibullParams& params, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-std::pow(t / params.scale, params.shape));
}

}  // namespace censorbias
