#include "afp/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afp {
namespace {

// Symmetric positive definite pentadiagonal system: main diagonal d0,
// first super-diagonal d1 (A[j][j+1]) and second super-diagonal d2 (A[j][j+2]).
std::vector<double> solve_pentadiagonal(const std::vector<double>& d0, const std::vector<double>& d1,
                                        const std::vector<double>& d2, const std::vector<double>& rhs) {
    const std::size_t n = d0.size();
    std::vector<double> diag(n), l1(n, 0.0), l2(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double dj = d0[j];
        if (j >= 1) dj -= l1[j - 1] * l1[j - 1] * diag[j - 1];
        if (j >= 2) dj -= l2[j - 2] * l2[j - 2] * diag[j - 2];
        diag[j] = dj;
        if (j + 1 < n) {
            double a = d1[j];
            if (j >= 1) a -= l2[j - 1] * l1[j - 1] * diag[j - 1];
            l1[j] = a / dj;
        }
        if (j + 2 < n) {
            l2[j] = d2[j] / dj;
        }
    }
    std::vector<double> z(rhs);
    for (std::size_t j = 0; j < n; ++j) {
        if (j >= 1) z[j] -= l1[j - 1] * z[j - 1];
        if (j >= 2) z[j] -= l2[j - 2] * z[j - 2];
    }
    for (std::size_t j = 0; j < n; ++j) z[j] /= diag[j];
    for (std::size_t j = n; j-- > 0;) {
        if (j + 1 < n) z[j] -= l1[j] * z[j + 1];
        if (j + 2 < n) z[j] -= l2[j] * z[j + 2];
    }
    return z;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.rss += r * r;
    }
    return fit;
}

// Penalized fit for a fixed multiplier alpha: solves
// (R + alpha Q^T Q) gamma = Q^T y and returns g = y - alpha Q gamma.
class PenalizedSystem {
public:
    PenalizedSystem(std::span<const double> x, std::span<const double> y) : x_(x), y_(y) {
        const std::size_t n = x.size() - 1;
        h_.resize(n);
        for (std::size_t i = 0; i < n; ++i) h_[i] = x[i + 1] - x[i];
        const std::size_t m = n - 1;  // interior knots
        qty_.resize(m);
        r0_.resize(m);
        r1_.assign(m, 0.0);
        q0_.resize(m);
        q1_.assign(m, 0.0);
        q2_.assign(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = k + 1;
            const double ih0 = 1.0 / h_[j - 1];
            const double ih1 = 1.0 / h_[j];
            qty_[k] = (y[j + 1] - y[j]) * ih1 - (y[j] - y[j - 1]) * ih0;
            r0_[k] = (h_[j - 1] + h_[j]) / 3.0;
            if (k + 1 < m) r1_[k] = h_[j] / 6.0;
            q0_[k] = ih0 * ih0 + (ih0 + ih1) * (ih0 + ih1) + ih1 * ih1;
            if (k + 1 < m) {
                const double ih2 = 1.0 / h_[j + 1];
                q1_[k] = -(ih0 + ih1) * ih1 - ih1 * (ih1 + ih2);
            }
            if (k + 2 < m) q2_[k] = ih1 / h_[j + 1];
        }
    }

    struct Solution {
        std::vector<double> values;  // fitted g at every knot
        std::vector<double> gamma;   // second derivatives at every knot (natural ends)
        double rss = 0.0;
    };

    Solution solve(double alpha) const {
        const std::size_t m = qty_.size();
        std::vector<double> d0(m), d1(m), d2(m);
        for (std::size_t k = 0; k < m; ++k) {
            d0[k] = r0_[k] + alpha * q0_[k];
            d1[k] = r1_[k] + alpha * q1_[k];
            d2[k] = alpha * q2_[k];
        }
        const std::vector<double> interior = solve_pentadiagonal(d0, d1, d2, qty_);
        Solution sol;
        sol.gamma.assign(x_.size(), 0.0);
        std::copy(interior.begin(), interior.end(), sol.gamma.begin() + 1);
        sol.values.assign(y_.begin(), y_.end());
        if (alpha > 0.0) {
            // (Q gamma)_i over the n+1 knots.
            for (std::size_t i = 0; i < x_.size(); ++i) {
                double qg = 0.0;
                if (i >= 1 && i + 1 < x_.size()) qg += (-1.0 / h_[i - 1] - 1.0 / h_[i]) * sol.gamma[i];
                if (i >= 1) qg += sol.gamma[i - 1] / h_[i - 1];
                if (i + 1 < x_.size()) qg += sol.gamma[i + 1] / h_[i];
                const double delta = alpha * qg;
                sol.values[i] -= delta;
                sol.rss += delta * delta;
            }
        }
        return sol;
    }

private:
    std::span<const double> x_;
    std::span<const double> y_;
    std::vector<double> h_;
    std::vector<double> qty_;
    std::vector<double> r0_, r1_;
    std::vector<double> q0_, q1_, q2_;
};

void validate_samples(std::span<const double> x, std::span<const double> y, double s) {
    if (x.size() != y.size()) throw std::invalid_argument("spline: x and y sizes differ");
    if (x.size() < 2) throw std::invalid_argument("spline: need at least two samples");
    if (!(s >= 0.0)) throw std::invalid_argument("spline: smoothing factor must be >= 0");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument("spline: x values must be strictly increasing (index " +
                                        std::to_string(i) + ")");
        }
    }
}

}  // namespace

Spline Spline::from_values(std::span<const double> x, std::vector<double> g,
                           const std::vector<double>& second_derivs, int degree) {
    Spline sp;
    sp.degree_ = degree;
    sp.knots_x_.assign(x.begin(), x.end());
    sp.pieces_.reserve(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        const double g0 = second_derivs[i];
        const double g1 = second_derivs[i + 1];
        SplinePiece p;
        p.x0 = x[i];
        p.a = g[i];
        p.b = (g[i + 1] - g[i]) / h - h * (2.0 * g0 + g1) / 6.0;
        p.c = g0 / 2.0;
        p.d = (g1 - g0) / (6.0 * h);
        sp.pieces_.push_back(p);
    }
    sp.knot_values_ = std::move(g);
    return sp;
}

Spline Spline::smoothing_spline(std::span<const double> x, std::span<const double> y, double s) {
    validate_samples(x, y, s);
    const std::vector<double> zeros(x.size(), 0.0);
    const LineFit line = least_squares_line(x, y);

    auto line_values = [&] {
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = line.intercept + line.slope * x[i];
        return g;
    };
    auto finish = [&](Spline sp, double rss) {
        sp.smoothing_ = s;
        sp.rss_ = rss;
        return sp;
    };

    if (x.size() < 4) {
        if (line.rss <= s) {
            return finish(from_values(x, line_values(), zeros, 1), line.rss);
        }
        return finish(from_values(x, std::vector<double>(y.begin(), y.end()), zeros, 1), 0.0);
    }
    if (s > 0.0 && line.rss <= s) {
        return finish(from_values(x, line_values(), zeros, 3), line.rss);
    }

    const PenalizedSystem system(x, y);
    if (s == 0.0) {
        auto sol = system.solve(0.0);
        return finish(from_values(x, std::move(sol.values), sol.gamma, 3), 0.0);
    }

    // RSS(alpha) increases monotonically from 0 (alpha = 0) toward line.rss.
    double lo = 1.0, hi = 1.0;
    while (system.solve(hi).rss < s) {
        lo = hi;
        hi *= 16.0;
        if (hi > 1e300) break;
    }
    while (lo == hi || system.solve(lo).rss > s) {
        hi = lo;
        lo /= 16.0;
        if (lo < 1e-300) {
            lo = 0.0;
            break;
        }
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 2.0;
        if (!(mid > lo && mid < hi)) break;
        const double rss = system.solve(mid).rss;
        if (std::abs(rss - s) <= 1e-10 * s) {
            lo = hi = mid;
            break;
        }
        (rss < s ? lo : hi) = mid;
        if (hi / std::max(lo, 1e-300) < 1.0 + 1e-12) break;
    }
    // Use the side that satisfies the residual constraint.
    auto sol = system.solve(lo);
    const double rss = sol.rss;
    return finish(from_values(x, std::move(sol.values), sol.gamma, 3), rss);
}

double Spline::operator()(double x) const {
    if (!(x >= x_min() && x <= x_max())) {
        throw std::out_of_range("spline evaluated at " + std::to_string(x) + " outside [" +
                                std::to_string(x_min()) + ", " + std::to_string(x_max()) + "]");
    }
    const auto it = std::upper_bound(knots_x_.begin(), knots_x_.end(), x);
    const auto k = static_cast<std::size_t>(std::distance(knots_x_.begin(), it)) - 1;
    if (knots_x_[k] == x) {
        return knot_values_[k];
    }
    const SplinePiece& p = pieces_[k];
    const double t = x - p.x0;
    return p.a + t * (p.b + t * (p.c + t * p.d));
}

}  // namespace afp
