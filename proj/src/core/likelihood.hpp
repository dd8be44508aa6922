#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace weaver {

// log f(x | a, b, Delta) up to the normalizing constant:
// sum_i a_i ln x_i + sum_j b_j ln(delta_j' x)
double log_likelihood(const CountModel& m, std::span<const double> x);

// Gradient in the (x_1, ..., x_{n-1}) chart, x_n = 1 - sum of the rest:
// component i is a_i/x_i - a_n/x_n + sum_j b_j (d_ij - d_nj) / (delta_j' x).
std::vector<double> score(const CountModel& m, std::span<const double> x);

struct HessianBlock {
    Eigen::MatrixXd H;    // (n-1) x (n-1), symmetric
    Eigen::MatrixXd psi;  // accumulated union-term curvature, same shape
};

// H = -diag(a_i/x_i^2) - (a_n/x_n^2) * ones - psi,
// psi_ik = sum_j b_j (d_ij - d_nj)(d_kj - d_nj) / (delta_j' x)^2
HessianBlock hessian(const CountModel& m, std::span<const double> x);

}  // namespace weaver
