#include "core/likelihood.hpp"

#include <cmath>

namespace weaver {

namespace {

constexpr double kSingularForm = 1e-300;

double safe_form(const CountModel& m, std::size_t j, std::span<const double> x) {
    const double mass = m.patterns()[j].dot(x);
    if (std::abs(mass) < kSingularForm)
        throw_error(ErrorCode::singular_evaluation,
                    "event mass underflow at union term " + std::to_string(j + 1));
    return mass;
}

}  // namespace

double log_likelihood(const CountModel& m, std::span<const double> x) {
    if (x.size() != m.n())
        throw_error(ErrorCode::invalid_argument, "point dimension does not match model");
    double ll = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        const double a = m.ionic_counts()[i];
        if (a == 0.0) continue;
        if (x[i] < kSingularForm)
            throw_error(ErrorCode::singular_evaluation, "ionic coordinate underflow");
        ll += a * std::log(x[i]);
    }
    for (std::size_t j = 0; j < m.q(); ++j)
        ll += m.union_counts()[j] * std::log(safe_form(m, j, x));
    return ll;
}

std::vector<double> score(const CountModel& m, std::span<const double> x) {
    if (x.size() != m.n())
        throw_error(ErrorCode::invalid_argument, "point dimension does not match model");
    const std::size_t n = m.n();
    // g_i = a_i / x_i + (Delta tau)_i with tau_j = b_j / (delta_j' x)
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(x[i]) < kSingularForm)
            throw_error(ErrorCode::singular_evaluation, "ionic coordinate underflow");
        g[i] = m.ionic_counts()[i] / x[i];
    }
    for (std::size_t j = 0; j < m.q(); ++j) {
        const double t = m.union_counts()[j] / safe_form(m, j, x);
        for (std::size_t i = 0; i < n; ++i)
            if (m.patterns()[j].test(i)) g[i] += t;
    }
    std::vector<double> s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) s[i] = g[i] - g[n - 1];
    return s;
}

HessianBlock hessian(const CountModel& m, std::span<const double> x) {
    if (x.size() != m.n())
        throw_error(ErrorCode::invalid_argument, "point dimension does not match model");
    const std::size_t n = m.n();
    const auto k = static_cast<Eigen::Index>(n - 1);

    HessianBlock out;
    out.psi = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t j = 0; j < m.q(); ++j) {
        const double mass = safe_form(m, j, x);
        const double w = m.union_counts()[j] / (mass * mass);
        const bool dn = m.patterns()[j].test(n - 1);
        for (Eigen::Index r = 0; r < k; ++r) {
            const double dr = (m.patterns()[j].test(static_cast<std::size_t>(r)) ? 1.0 : 0.0) -
                              (dn ? 1.0 : 0.0);
            if (dr == 0.0) continue;
            for (Eigen::Index c = 0; c < k; ++c) {
                const double dc = (m.patterns()[j].test(static_cast<std::size_t>(c)) ? 1.0 : 0.0) -
                                  (dn ? 1.0 : 0.0);
                out.psi(r, c) += w * dr * dc;
            }
        }
    }

    const double an = m.ionic_counts()[n - 1] / (x[n - 1] * x[n - 1]);
    out.H = -out.psi;
    out.H.array() -= an;
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out.H(i, i) -= m.ionic_counts()[ui] / (x[ui] * x[ui]);
    }
    return out;
}

}  // namespace weaver
