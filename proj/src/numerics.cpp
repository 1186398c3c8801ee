#include "isoshell/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace isoshell {

double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                  double xtol, int max_iter) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant step
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

std::vector<double> bracketed_roots(const std::function<double(double)>& g,
                                    std::span<const double> x, std::span<const double> gx,
                                    double xtol) {
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double ga = gx[i], gb = gx[i + 1];
        if (ga == 0.0) {
            if (roots.empty() || std::abs(roots.back() - x[i]) > xtol) roots.push_back(x[i]);
        } else if (ga * gb < 0.0) {
            roots.push_back(brent_root(g, x[i], x[i + 1], ga, gb, xtol));
        }
    }
    if (!gx.empty() && gx.back() == 0.0) {
        if (roots.empty() || std::abs(roots.back() - x.back()) > xtol) roots.push_back(x.back());
    }
    return roots;
}

double gauss5(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < 5; ++k)
        s += GaussLegendre5::weights[k] * f(mid + half * GaussLegendre5::nodes[k]);
    return s * half;
}

double gauss5_composite(const std::function<double(double)>& f, std::span<const double> breaks) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += gauss5(f, breaks[i], breaks[i + 1]);
    return s;
}

}  // namespace isoshell
