#pragma once

#include <functional>

namespace dpre {

// Compensated accumulator for long sums of small terms.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Adaptive Simpson quadrature on [a,b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

// Integral of f over [a, infinity) for integrands that decay at least
// exponentially in y after the substitution x = a * e^y. `y_max` caps the
// substituted domain; integrand values beyond it must be negligible.
double integral_exp_substitution(const std::function<double(double)>& f,
                                 double a, double tol, double y_max = 60.0);

// Standard normal quantile (Wichura's AS 241, double precision branch).
double normal_inv_cdf(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

} // namespace dpre
