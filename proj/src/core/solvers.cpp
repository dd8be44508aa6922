#include "core/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace weaver::solvers {

namespace {

constexpr double kCoordinateFloor = 1e-12;
constexpr double kMmStepTolerance = 1e-12;
constexpr int kGrowthLimit = 25;

struct BestTracker {
    double sse = std::numeric_limits<double>::infinity();
    std::vector<double> x;

    void offer(double e, const std::vector<double>& candidate) {
        if (e < sse) {
            sse = e;
            x = candidate;
        }
    }
};

Solution finish(const CountModel& m, SolverKind kind, SolveStatus status, std::vector<double> x,
                double e, std::vector<double> trace, int iterations) {
    SimplexPoint p{std::move(x)};
    Solution s{p, thickness_profile(m, p), e, std::move(trace), iterations, kind, status};
    return s;
}

double excluded_sum(const CountModel& m, const std::vector<double>& tau, std::size_t i,
                    double tau_total) {
    double excl = tau_total;
    for (std::size_t j : m.terms_of_ion(i)) excl -= tau[j];
    return excl;
}

}  // namespace

const char* to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::weaver: return "weaver";
        case SolverKind::greedy_weaver: return "greedy_weaver";
        case SolverKind::alliance: return "alliance";
        case SolverKind::mm: return "mm";
        case SolverKind::newton: return "newton";
        case SolverKind::grid_oracle: return "grid_oracle";
    }
    return "?";
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::iteration_cap: return "iteration_cap";
        case SolveStatus::diverged_with_best: return "diverged_with_best";
    }
    return "?";
}

SimplexPoint initial_point(const CountModel& m) {
    double total = 0.0;
    for (double a : m.ionic_counts()) total += a;
    std::vector<double> x(m.n());
    for (std::size_t i = 0; i < m.n(); ++i)
        x[i] = total > 0.0 ? m.ionic_counts()[i] / total : 0.0;
    for (double& c : x)
        if (c <= 0.0) c = 1e-6;
    return SimplexPoint(std::move(x));
}

Solution weaver(const CountModel& m, const SolverOptions& opts) {
    std::vector<double> x = initial_point(m).coords();
    double e = sse_at_best_tau0(m, x);
    BestTracker best;
    best.offer(e, x);

    std::vector<double> trace;
    int it = 0;
    int growth = 0;
    SolveStatus status = SolveStatus::iteration_cap;

    while (true) {
        bool broke = false;
        try {
            const auto tau = thickness(m, x);
            const double tau0 = tau0_star(m, x);
            double tau_total = 0.0;
            for (double t : tau) tau_total += t;

            std::vector<double> next(m.n());
            double sum = 0.0;
            for (std::size_t i = 0; i < m.n(); ++i) {
                const double denom = tau0 + excluded_sum(m, tau, i, tau_total);
                if (!(denom > 0.0)) {
                    broke = true;  // denominator lost its sign
                    break;
                }
                next[i] = m.ionic_counts()[i] / denom;
                sum += next[i];
            }
            if (!broke) {
                for (double& c : next) c /= sum;
                for (double c : next)
                    if (!(c > 0.0) || !std::isfinite(c)) broke = true;
                if (!broke) {
                    const double prev = e;
                    e = sse_at_best_tau0(m, next);
                    x = std::move(next);
                    ++it;
                    trace.push_back(e);
                    if (opts.bookkeeping) best.offer(e, x);
                    growth = e > prev ? growth + 1 : 0;
                }
            }
        } catch (const Error&) {
            broke = true;  // singular evaluation counts as going astray
        }

        if (broke || growth >= kGrowthLimit) {
            status = SolveStatus::diverged_with_best;
            break;
        }
        if (e <= opts.sse_tolerance) {
            status = SolveStatus::converged;
            break;
        }
        if (it >= opts.max_iterations) {
            status = SolveStatus::iteration_cap;
            break;
        }
    }

    if (status == SolveStatus::converged)
        return finish(m, SolverKind::weaver, status, std::move(x), e, std::move(trace), it);
    if (!opts.bookkeeping || best.x.empty()) best = {e, x};
    return finish(m, SolverKind::weaver, status, std::move(best.x), best.sse, std::move(trace), it);
}

namespace {

// Root of the interpolating parabola through (0, v1), (u2, v2), (u3, v3),
// preferring (-beta + sqrt(disc)) / (2 alpha); vertex and linear fallbacks.
std::optional<double> parabola_root(double u2, double u3, double v1, double v2, double v3) {
    const double den = u2 * u2 * u3 - u2 * u3 * u3;
    if (den == 0.0 || !std::isfinite(den)) return std::nullopt;
    const double alpha = (u3 * (v2 - v1) - u2 * (v3 - v1)) / den;
    const double beta = (-u3 * u3 * (v2 - v1) + u2 * u2 * (v3 - v1)) / den;
    const double gamma = v1;

    auto usable = [](double r) { return std::isfinite(r) && r > kCoordinateFloor; };

    if (std::abs(alpha) <= 1e-14 * std::max(1.0, std::abs(beta))) {
        if (beta == 0.0) return std::nullopt;
        const double r = -gamma / beta;
        return usable(r) ? std::optional<double>(r) : std::nullopt;
    }
    const double disc = beta * beta - 4.0 * alpha * gamma;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double r1 = (-beta + sq) / (2.0 * alpha);
        if (usable(r1)) return r1;
        const double r2 = (-beta - sq) / (2.0 * alpha);
        if (usable(r2)) return r2;
        return std::nullopt;
    }
    const double vertex = -beta / (2.0 * alpha);
    return usable(vertex) ? std::optional<double>(vertex) : std::nullopt;
}

// Put the budget of 1 - sum(head) into the last coordinate; renormalize
// everything when that budget is gone.
void repair_feasibility(std::vector<double>& x, std::size_t touched) {
    const std::size_t last = x.size() - 1;
    if (touched != last) {
        double head = 0.0;
        for (std::size_t k = 0; k < last; ++k) head += x[k];
        const double tail = 1.0 - head;
        if (tail > 0.0) {
            x[last] = tail;
            return;
        }
    }
    double sum = 0.0;
    for (double c : x) sum += c;
    for (double& c : x) c /= sum;
}

}  // namespace

Solution greedy_weaver(const CountModel& m, const SolverOptions& opts,
                       const std::optional<SimplexPoint>& init) {
    std::vector<double> x = init ? init->coords() : initial_point(m).coords();
    double e = sse_at_best_tau0(m, x);
    BestTracker best;
    best.offer(e, x);

    std::vector<double> trace;
    int it = 0;
    SolveStatus status = SolveStatus::iteration_cap;

    while (true) {
        if (e <= opts.sse_tolerance) {
            status = SolveStatus::converged;
            break;
        }
        if (it >= opts.max_iterations) {
            status = SolveStatus::iteration_cap;
            break;
        }

        bool broke = false;
        try {
            const auto d = deviation(m, x, tau0_star(m, x));
            std::size_t i = 0;
            for (std::size_t k = 1; k < d.size(); ++k)
                if (std::abs(d[k]) > std::abs(d[i])) i = k;

            const double u2 = x[i];
            const double u3 = opts.perturbation_factor * x[i];
            std::vector<double> probe = x;
            probe[i] = u3;
            repair_feasibility(probe, i);
            const double v3 = deviation(m, probe, tau0_star(m, probe))[i];

            const auto root = parabola_root(u2, u3, -m.ionic_counts()[i], d[i], v3);
            if (!root) {
                broke = true;
            } else {
                std::vector<double> next = x;
                next[i] = *root;
                repair_feasibility(next, i);
                for (double c : next)
                    if (!(c > 0.0) || !std::isfinite(c)) broke = true;
                if (!broke) {
                    x = std::move(next);
                    ++it;
                    e = sse_at_best_tau0(m, x);
                    trace.push_back(e);
                    if (opts.bookkeeping) best.offer(e, x);
                }
            }
        } catch (const Error&) {
            broke = true;
        }
        if (broke) {
            status = SolveStatus::diverged_with_best;
            break;
        }
    }

    if (status == SolveStatus::converged)
        return finish(m, SolverKind::greedy_weaver, status, std::move(x), e, std::move(trace), it);
    if (!opts.bookkeeping || best.x.empty()) best = {e, x};
    return finish(m, SolverKind::greedy_weaver, status, std::move(best.x), best.sse,
                  std::move(trace), it);
}

Solution alliance(const CountModel& m, const SolverOptions& opts) {
    Solution first = weaver(m, opts);
    if (first.status != SolveStatus::diverged_with_best) return first;

    Solution second = greedy_weaver(m, opts, first.p);
    if (second.status == SolveStatus::converged) return second;

    Solution out = second.sse <= first.sse ? std::move(second) : std::move(first);
    out.solver = SolverKind::alliance;
    out.status = SolveStatus::diverged_with_best;
    return out;
}

Solution mm_solve(const CountModel& m, const SolverOptions& opts) {
    for (double a : m.ionic_counts())
        if (a <= 0.0)
            throw_error(ErrorCode::invalid_argument,
                        "the MM iteration needs strictly positive ionic counts");

    double total_a = 0.0;
    for (double a : m.ionic_counts()) total_a += a;

    std::vector<double> x = initial_point(m).coords();
    double e = sse_at_best_tau0(m, x);
    BestTracker best;
    best.offer(e, x);

    std::vector<double> trace;
    int it = 0;
    SolveStatus status = SolveStatus::iteration_cap;

    while (it < opts.max_iterations) {
        bool broke = false;
        double step = 0.0;
        try {
            const auto tau = thickness(m, x);
            std::vector<double> lin(m.n(), 0.0);  // (Delta tau)_i, the linearized pull
            for (std::size_t i = 0; i < m.n(); ++i)
                for (std::size_t j : m.terms_of_ion(i)) lin[i] += tau[j];
            const double lin_max = *std::max_element(lin.begin(), lin.end());

            // normalization multiplier: sum_i a_i / (lambda - lin_i) = 1 has a
            // unique root in (lin_max, lin_max + sum a]
            double lo = lin_max, hi = lin_max + total_a;
            for (int k = 0; k < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++k) {
                const double mid = 0.5 * (lo + hi);
                double g = 0.0;
                for (std::size_t i = 0; i < m.n(); ++i) g += m.ionic_counts()[i] / (mid - lin[i]);
                (g > 1.0 ? lo : hi) = mid;
            }
            const double lambda = 0.5 * (lo + hi);

            std::vector<double> next(m.n());
            double sum = 0.0;
            for (std::size_t i = 0; i < m.n(); ++i) {
                const double denom = lambda - lin[i];
                if (!(denom > 0.0)) broke = true;
                next[i] = m.ionic_counts()[i] / denom;
                sum += next[i];
            }
            if (!broke) {
                for (double& c : next) c /= sum;
                for (std::size_t i = 0; i < m.n(); ++i)
                    step = std::max(step, std::abs(next[i] - x[i]));
                x = std::move(next);
                ++it;
                e = sse_at_best_tau0(m, x);
                trace.push_back(e);
                if (opts.bookkeeping) best.offer(e, x);
            }
        } catch (const Error&) {
            broke = true;
        }
        if (broke) {
            status = SolveStatus::diverged_with_best;
            break;
        }
        if (step <= kMmStepTolerance) {
            status = SolveStatus::converged;
            break;
        }
    }

    if (status == SolveStatus::converged)
        return finish(m, SolverKind::mm, status, std::move(x), e, std::move(trace), it);
    if (!opts.bookkeeping || best.x.empty()) best = {e, x};
    return finish(m, SolverKind::mm, status, std::move(best.x), best.sse, std::move(trace), it);
}

NewtonResult newton_solve(const CountModel& m, const SolverOptions& opts) {
    const std::size_t n = m.n();
    std::vector<double> x = initial_point(m).coords();
    double e = sse_at_best_tau0(m, x);
    BestTracker best;
    best.offer(e, x);

    const double score_tol = 1e-10 * std::max(1.0, m.count_scale());
    std::vector<double> trace;
    int it = 0;
    SolveStatus status = SolveStatus::iteration_cap;

    while (it < opts.max_iterations) {
        bool broke = false;
        try {
            const auto s = score(m, x);
            double s_inf = 0.0;
            for (double v : s) s_inf = std::max(s_inf, std::abs(v));
            if (s_inf <= score_tol) {
                status = SolveStatus::converged;
                break;
            }

            const auto hb = hessian(m, x);
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
            for (std::size_t i = 0; i + 1 < n; ++i) rhs(static_cast<Eigen::Index>(i)) = s[i];
            Eigen::VectorXd dy = hb.H.partialPivLu().solve(rhs);
            const bool solved = dy.allFinite() && (hb.H * dy - rhs).norm() <=
                                                      1e-6 * rhs.norm() + 1e-12;
            if (!solved) {
                broke = true;  // the inversion halted the iteration
            } else {
                double t = 1.0;
                std::vector<double> next(n);
                bool feasible = false;
                for (int halving = 0; halving < 60 && !feasible; ++halving, t *= 0.5) {
                    double head = 0.0;
                    feasible = true;
                    for (std::size_t i = 0; i + 1 < n; ++i) {
                        next[i] = x[i] - t * dy(static_cast<Eigen::Index>(i));
                        head += next[i];
                        if (next[i] <= kCoordinateFloor) feasible = false;
                    }
                    next[n - 1] = 1.0 - head;
                    if (next[n - 1] <= kCoordinateFloor) feasible = false;
                }
                if (!feasible) {
                    broke = true;
                } else {
                    x = std::move(next);
                    ++it;
                    e = sse_at_best_tau0(m, x);
                    trace.push_back(e);
                    if (opts.bookkeeping) best.offer(e, x);
                }
            }
        } catch (const Error&) {
            broke = true;
        }
        if (broke) {
            status = SolveStatus::diverged_with_best;
            break;
        }
    }

    std::vector<double> final_x = x;
    if (status != SolveStatus::converged && opts.bookkeeping && !best.x.empty()) {
        final_x = best.x;
        e = best.sse;
    }
    Solution sol = finish(m, SolverKind::newton, status, std::move(final_x), e, std::move(trace), it);
    HessianBlock hb = hessian(m, sol.p);
    return NewtonResult{std::move(sol), std::move(hb)};
}

namespace {

void lattice_search(const CountModel& m, int resolution, std::size_t coord, int budget,
                    std::vector<double>& x, double& best_ll, std::vector<double>& best_x) {
    const std::size_t n = m.n();
    if (coord + 1 == n) {
        x[coord] = static_cast<double>(budget) / resolution;
        const double ll = log_likelihood(m, x);
        if (ll > best_ll) {
            best_ll = ll;
            best_x = x;
        }
        return;
    }
    const int remaining = static_cast<int>(n - coord - 1);
    for (int k = 1; k + remaining <= budget; ++k) {
        x[coord] = static_cast<double>(k) / resolution;
        lattice_search(m, resolution, coord + 1, budget - k, x, best_ll, best_x);
    }
}

}  // namespace

SimplexPoint grid_oracle(const CountModel& m, int resolution) {
    if (m.n() > 4)
        throw_error(ErrorCode::size_cap, "grid oracle is limited to 4 ions");
    if (resolution < static_cast<int>(m.n()) || resolution > 200)
        throw_error(ErrorCode::invalid_argument, "resolution out of range");
    std::vector<double> x(m.n(), 0.0), best_x;
    double best_ll = -std::numeric_limits<double>::infinity();
    lattice_search(m, resolution, 0, resolution, x, best_ll, best_x);
    return SimplexPoint(std::move(best_x));
}

}  // namespace weaver::solvers
