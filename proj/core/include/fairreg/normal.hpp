#pragma once

namespace fairreg {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// Inverse of normal_cdf on (0, 1); accurate to about 1e-14.
double normal_quantile(double p);

}  // namespace fairreg
