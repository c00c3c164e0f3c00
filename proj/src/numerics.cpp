#include "dpre/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace dpre {

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson_rule(fa, fm, fb, b - a);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double integral_exp_substitution(const std::function<double(double)>& f,
                                 double a, double tol, double y_max) {
    // x = a e^y maps [a, inf) to y in [0, inf); dx = x dy.
    auto g = [&](double y) {
        const double x = a * std::exp(y);
        return f(x) * x;
    };
    return adaptive_simpson(g, 0.0, y_max, tol);
}

// AS 241 algorithm PPND16. Accurate to ~1e-15 over (0,1).
double normal_inv_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_inv_cdf: p outside (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r +
                      3.3430575583588128105e+4) *
                         r +
                     6.7265770927008700853e+4) *
                        r +
                    4.5921953931549871457e+4) *
                       r +
                   1.3731693765509461125e+4) *
                      r +
                  1.9715909503065514427e+3) *
                     r +
                 1.3314166789178437745e+2) *
                    r +
                3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r +
                      2.8729085735721942674e+4) *
                         r +
                     3.9307895800092710610e+4) *
                        r +
                    2.1213794301586595867e+4) *
                       r +
                   5.3941960214247511077e+3) *
                      r +
                  6.8718700749205790830e+2) *
                     r +
                 4.2313330701600911252e+1) *
                    r +
                1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r +
                     2.27238449892691845833e-2) *
                        r +
                    2.41780725177450611770e-1) *
                       r +
                   1.27045825245236838258e+0) *
                      r +
                  3.64784832476320460504e+0) *
                     r +
                 5.76949722146069140550e+0) *
                    r +
                4.63033784615654529590e+0) *
                   r +
               1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r +
                     5.47593808499534494600e-4) *
                        r +
                    1.51986665636164571966e-2) *
                       r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e+0) *
                    r +
                2.05319162663775882187e+0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r +
                     2.71155556874348757815e-5) *
                        r +
                    1.24266094738807843860e-3) *
                       r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e+0) *
                    r +
                5.46378491116411436990e+0) *
                   r +
               6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r +
                     1.42151175831644588870e-7) *
                        r +
                    1.84631831751005468180e-5) *
                       r +
                   7.86869131145613259100e-4) *
                      r +
                  1.48753612908506148525e-2) *
                     r +
                 1.36929880922735805310e-1) *
                    r +
                5.99832206555887937690e-1) *
                   r +
               1.0);
    }
    return q < 0.0 ? -val : val;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

} // namespace dpre
