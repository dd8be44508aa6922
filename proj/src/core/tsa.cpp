#include "core/tsa.hpp"

namespace weaver {

std::vector<double> TsaSystem::residual(std::span<const double> p, double tau0,
                                        std::span<const double> tau) const {
    const CountModel& m = *model_;
    if (p.size() != m.n() || tau.size() != m.q())
        throw_error(ErrorCode::invalid_argument, "unknown vector sizes do not match the system");

    std::vector<double> r;
    r.reserve(dimension());

    for (std::size_t j = 0; j < m.q(); ++j)
        r.push_back(m.union_counts()[j] - tau[j] * m.patterns()[j].dot(p));

    double tau_total = 0.0;
    for (double t : tau) tau_total += t;
    for (std::size_t i = 0; i < m.n(); ++i) {
        double excl = tau_total;
        for (std::size_t j : m.terms_of_ion(i)) excl -= tau[j];
        r.push_back(m.ionic_counts()[i] - p[i] * (tau0 + excl));
    }

    double sum = 0.0;
    for (double v : p) sum += v;
    r.push_back(1.0 - sum);
    return r;
}

}  // namespace weaver
