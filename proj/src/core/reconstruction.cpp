#include "core/reconstruction.hpp"

#include <cmath>

namespace weaver {

namespace {

constexpr double kSingularForm = 1e-300;

void check_dimension(const CountModel& m, std::span<const double> x) {
    if (x.size() != m.n())
        throw_error(ErrorCode::invalid_argument, "point dimension does not match model");
}

}  // namespace

std::vector<double> thickness(const CountModel& m, std::span<const double> y) {
    check_dimension(m, y);
    std::vector<double> tau(m.q());
    for (std::size_t j = 0; j < m.q(); ++j) {
        const double mass = m.patterns()[j].dot(y);
        if (std::abs(mass) < kSingularForm)
            throw_error(ErrorCode::singular_evaluation,
                        "event mass underflow at union term " + std::to_string(j + 1));
        tau[j] = m.union_counts()[j] / mass;
    }
    return tau;
}

// Shared kernel: per-ion sum of thicknesses over the terms *excluding* that
// ion, i.e. ((1 - Delta) tau)_i = sum(tau) - sum_{j: ion i in term j} tau_j.
static std::vector<double> excluded_thickness_sum(const CountModel& m,
                                                  const std::vector<double>& tau) {
    double total = 0.0;
    for (double t : tau) total += t;
    std::vector<double> excl(m.n(), total);
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j : m.terms_of_ion(i)) excl[i] -= tau[j];
    return excl;
}

double tau0_star(const CountModel& m, std::span<const double> x) {
    check_dimension(m, x);
    const auto tau = thickness(m, x);
    const auto excl = excluded_thickness_sum(m, tau);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        num += x[i] * (m.ionic_counts()[i] - x[i] * excl[i]);
        den += x[i] * x[i];
    }
    return num / den;
}

std::vector<double> reconstruct(const CountModel& m, std::span<const double> x, double tau0) {
    check_dimension(m, x);
    const auto tau = thickness(m, x);
    const auto excl = excluded_thickness_sum(m, tau);
    std::vector<double> r(m.n());
    for (std::size_t i = 0; i < m.n(); ++i) r[i] = x[i] * (tau0 + excl[i]);
    return r;
}

std::vector<double> deviation(const CountModel& m, std::span<const double> x, double tau0) {
    auto d = reconstruct(m, x, tau0);
    for (std::size_t i = 0; i < m.n(); ++i) d[i] -= m.ionic_counts()[i];
    return d;
}

double sse(const CountModel& m, std::span<const double> x, double tau0) {
    const auto d = deviation(m, x, tau0);
    double e = 0.0;
    for (double v : d) e += v * v;
    return e;
}

double sse_at_best_tau0(const CountModel& m, std::span<const double> x) {
    return sse(m, x, tau0_star(m, x));
}

QuadraticCoeffs quadratic_coeffs(const CountModel& m, std::span<const double> x) {
    check_dimension(m, x);
    const auto tau = thickness(m, x);
    const auto excl = excluded_thickness_sum(m, tau);
    // d(tau0 | x) = tau0 x + eta(x) - a with eta_i = x_i excl_i
    QuadraticCoeffs c;
    for (std::size_t i = 0; i < m.n(); ++i) {
        const double eta = x[i] * excl[i];
        const double g = eta - m.ionic_counts()[i];
        c.a2 += x[i] * x[i];
        c.a1 += 2.0 * x[i] * g;
        c.a0 += g * g;
    }
    return c;
}

ThicknessProfile thickness_profile(const CountModel& m, const SimplexPoint& p) {
    ThicknessProfile t;
    t.tau = thickness(m, p);
    t.tau0 = tau0_star(m, p);
    t.evaluated_at = p.coords();
    return t;
}

}  // namespace weaver
