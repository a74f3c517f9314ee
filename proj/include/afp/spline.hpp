#pragma once

#include <span>
#include <vector>

namespace afp {

/// One cubic segment: y = a + b t + c t^2 + d t^3 with t = x - x0.
struct SplinePiece {
    double x0 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Piecewise polynomial y = f(x) with natural end conditions.
///
/// `smoothing_spline` fits the cubic that minimizes the integrated squared
/// second derivative subject to sum((y_i - f(x_i))^2) <= s, i.e. the classic
/// Reinsch formulation: s = 0 interpolates, large s tends to the least-squares
/// line. With fewer than four samples the fit is linear: the least-squares line
/// when its residual is within s, otherwise piecewise-linear interpolation.
class Spline {
public:
    static Spline smoothing_spline(std::span<const double> x, std::span<const double> y, double s);

    /// Throws std::out_of_range outside [x_min(), x_max()].
    double operator()(double x) const;

    double x_min() const noexcept { return knots_x_.front(); }
    double x_max() const noexcept { return knots_x_.back(); }
    int degree() const noexcept { return degree_; }
    double smoothing() const noexcept { return smoothing_; }
    /// Sum of squared residuals at the fitted samples.
    double residual_sum_of_squares() const noexcept { return rss_; }

    const std::vector<SplinePiece>& pieces() const noexcept { return pieces_; }
    const std::vector<double>& knots_x() const noexcept { return knots_x_; }
    /// Fitted values at the knots.
    const std::vector<double>& knot_values() const noexcept { return knot_values_; }

private:
    static Spline from_values(std::span<const double> x, std::vector<double> g,
                              const std::vector<double>& second_derivs, int degree);

    std::vector<double> knots_x_;
    std::vector<double> knot_values_;
    std::vector<SplinePiece> pieces_;
    int degree_ = 3;
    double smoothing_ = 0.0;
    double rss_ = 0.0;
};

}  // namespace afp
