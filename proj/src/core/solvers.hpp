#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/likelihood.hpp"
#include "core/model.hpp"
#include "core/reconstruction.hpp"

namespace weaver::solvers {

struct SolverOptions {
    double sse_tolerance = 1e-13;
    int max_iterations = 10000;
    double perturbation_factor = 1.05;
    bool bookkeeping = true;  // track the best iterate seen
};

enum class SolverKind { weaver, greedy_weaver, alliance, mm, newton, grid_oracle };
enum class SolveStatus { converged, iteration_cap, diverged_with_best };

const char* to_string(SolverKind kind);
const char* to_string(SolveStatus status);

struct Solution {
    SimplexPoint p;
    ThicknessProfile thickness;
    double sse = 0.0;
    std::vector<double> sse_trace;  // one entry per iteration
    int iterations = 0;
    SolverKind solver = SolverKind::weaver;
    SolveStatus status = SolveStatus::converged;
};

// a / sum(a), with zero coordinates nudged to 1e-6 and renormalized
SimplexPoint initial_point(const CountModel& m);

// Dual fixed point: refresh tau from x, refresh x from the ion rows,
// renormalize. Derivative-free. Reports divergence (carrying the best
// iterate) on a non-positive denominator or coordinate, or after 25
// consecutive error increases.
Solution weaver(const CountModel& m, const SolverOptions& opts = {});

// Coordinate descent on the largest reconstruction deviation: fit a parabola
// through three evaluations of d_i against x_i and jump to its root.
Solution greedy_weaver(const CountModel& m, const SolverOptions& opts = {},
                       const std::optional<SimplexPoint>& init = {});

// Weaver first; on divergence, greedy restarted from Weaver's best iterate.
Solution alliance(const CountModel& m, const SolverOptions& opts = {});

// Minorization-maximization fixed point; needs strictly positive ionic
// counts. Converges on successive-iterate distance.
Solution mm_solve(const CountModel& m, const SolverOptions& opts = {});

struct NewtonResult {
    Solution solution;
    HessianBlock hessian_at_p;
};

// Damped Newton on the score in the (x_1..x_{n-1}) chart.
NewtonResult newton_solve(const CountModel& m, const SolverOptions& opts = {});

// Exhaustive interior lattice search for the likelihood maximum; test oracle.
SimplexPoint grid_oracle(const CountModel& m, int resolution);

}  // namespace weaver::solvers
