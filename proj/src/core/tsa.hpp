#pragma once

#include <span>
#include <vector>

#include "core/model.hpp"

namespace weaver {

// The polynomial reconstruction system obtained by completing every union
// term with ionic fragments: Q composite rows b_j - tau_j (delta_j' p),
// n ion rows a_i - p_i (tau0 + sum of tau over terms excluding ion i), and
// one normalization row 1 - sum p. Square: n + Q + 1 equations in as many
// unknowns (p, tau0, tau).
class TsaSystem {
public:
    explicit TsaSystem(const CountModel& m) : model_(&m) {}

    const CountModel& model() const { return *model_; }
    std::size_t dimension() const { return model_->n() + model_->q() + 1; }

    // p entries must be non-zero but need not be simplicial mid-iteration
    std::vector<double> residual(std::span<const double> p, double tau0,
                                 std::span<const double> tau) const;

private:
    const CountModel* model_;
};

}  // namespace weaver
