#pragma once

#include <span>
#include <vector>

namespace censorbias {

/// Two-parameter Weibull with survival S(t) = exp(-(t/scale)^shape).
struct WeibullParams {
  double shape;
  double scale;
};

/// Shape and scale of the Weibull whose CDF quantiles at p_a and p_b are q_a and q_b.
///
/// Requires 0 < p_a < p_b < 1 and 0 < q_a < q_b; throws DomainError otherwise.
WeibullParams quantiles_to_weibull(double q_a, double q_b, double p_a = 0.5, double p_b = 0.99);

/// Time at which the survival function equals `p`: scale * (-ln p)^(1/shape).
///
/// `p` is a survival probability in (0, 1]; p = 1 maps to t = 0.
double inverse_weibull(const WeibullParams& params, double p);

std::vector<double> inverse_weibull(const WeibullParams& params, std::span<const double> p);

/// CDF quantile: the time t with F(t) = p.
double weibull_quantile(const WeibullParams& params, double p);

double weibull_cdf(const WeibullParams& params, double t);

}  // namespace censorbias
