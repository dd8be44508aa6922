#pragma once

#include <span>
#include <vector>

#include "core/model.hpp"

namespace weaver {

// Count-per-probability-mass of each union term at y: tau_j = b_j / (delta_j' y).
// y need not be simplicial (thickness scales inversely: tau(c y) = tau(y)/c).
std::vector<double> thickness(const CountModel& m, std::span<const double> y);

// Minimizer of the reconstruction error over the ionic-slice coefficient:
// tau0*(x) = x'{a - diag(x)(1 - Delta) tau(x)} / (x'x).
double tau0_star(const CountModel& m, std::span<const double> x);

// R(x, tau0) = x * (tau0 + (1 - Delta) tau(x)), componentwise.
std::vector<double> reconstruct(const CountModel& m, std::span<const double> x, double tau0);

// d = R - a
std::vector<double> deviation(const CountModel& m, std::span<const double> x, double tau0);

// || R(x, tau0) - a ||^2
double sse(const CountModel& m, std::span<const double> x, double tau0);

// sse at the optimal tau0 for this x
double sse_at_best_tau0(const CountModel& m, std::span<const double> x);

// sse(tau0 | x) = a2 tau0^2 + a1 tau0 + a0
struct QuadraticCoeffs {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
    double eval(double tau0) const { return (a2 * tau0 + a1) * tau0 + a0; }
};
QuadraticCoeffs quadratic_coeffs(const CountModel& m, std::span<const double> x);

// tau with the optimal tau0 attached, evaluated at a simplex point
struct ThicknessProfile {
    double tau0 = 0.0;
    std::vector<double> tau;
    std::vector<double> evaluated_at;
};
ThicknessProfile thickness_profile(const CountModel& m, const SimplexPoint& p);

}  // namespace weaver
