#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/pattern.hpp"

namespace weaver::algebra {

// A single power of a linear form: (delta' x)^rho with delta != 0, rho != 0.
struct OrderOneFragment {
    Pattern pattern;
    double count = 0.0;

    bool ionic() const { return pattern.is_unit(); }
    bool exhaustive() const { return pattern.all(); }
    std::size_t event_size() const { return pattern.popcount(); }
};

// Ordered product of order-1 fragments over a shared ion vector.
class ProductOfFragments {
public:
    explicit ProductOfFragments(std::size_t n) : n_(n) {}
    ProductOfFragments(std::size_t n, std::vector<OrderOneFragment> fragments);

    std::size_t n() const { return n_; }
    std::size_t order() const { return fragments_.size(); }
    const std::vector<OrderOneFragment>& fragments() const { return fragments_; }

    // merge equal patterns (first-appearance order), dropping merged zeros
    ProductOfFragments collected() const;

private:
    std::size_t n_;
    std::vector<OrderOneFragment> fragments_;
};

// closure: the patterns sum to a 0/1 vector
bool is_fragment(const ProductOfFragments& prod);

// exhaustiveness: the patterns sum to exactly the all-ones vector
bool is_slice(const ProductOfFragments& prod);

// componentwise max of patterns, counts added; a zero merged count is degenerate
OrderOneFragment union_fragments(const OrderOneFragment& f1, const OrderOneFragment& f2);

// whether `covering` covers `covered` (covering has the dominating pattern)
bool covers(const OrderOneFragment& covering, const OrderOneFragment& covered);

// order-q covering: a perfect matching of distinct order-1 covers.
// Products of different order never cover each other.
bool covers_product(const ProductOfFragments& covering, const ProductOfFragments& covered);

// same set of event patterns (counts are irrelevant)
bool collects_with(const ProductOfFragments& p1, const ProductOfFragments& p2);

enum class Refinement { no, refines, splits };

// Exact backtracking search for disjoint index sets tiling each coarse
// pattern with fine patterns, counts dominating (refines) or matching
// exactly (splits). Desk scale only.
Refinement refines(const ProductOfFragments& fine, const ProductOfFragments& coarse,
                   std::size_t fragment_cap = 16);

// Right-hand side minus left-hand side of
//   prod x_i^{a_i} <= [prod a_i^{a_i} / (sum a)^{sum a}] (sum x)^{sum a},
// all inputs strictly positive. Zero exactly when x is proportional to a.
double weighted_amgm_gap(std::span<const double> x, std::span<const double> a);

// log RHS - log LHS of the same inequality; safe for huge exponents
double weighted_amgm_log_gap(std::span<const double> x, std::span<const double> a);

// Collected patterns ordered by dominance, with immediate-cover arrows
// pointing from the covered pattern to the covering one.
struct CoveringGraph {
    struct Node {
        Pattern pattern;
        double count = 0.0;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // covered -> covering

    std::string to_dot() const;
};

CoveringGraph covering_graph(const CountModel& m);

struct RegularityResult {
    enum class Verdict { regular, irregular, size_cap };
    Verdict verdict = Verdict::regular;

    // present when irregular: the offending union of negative fragments
    std::optional<Pattern> witness_pattern;
    double witness_union_count = 0.0;  // summed counts of the unionized fragments
    double witness_covered_sum = 0.0;  // covered-count sum that went negative

    std::size_t negative_terms = 0;  // N
    std::size_t unions_checked = 0;
};

// Enumerates every non-exhaustive union of the negatively counted collected
// fragments and sums the counts of all fragments it covers; regular iff every
// such sum is non-negative. Exponential in the number of negative terms.
RegularityResult check_uniform_regularity(const CountModel& m,
                                          std::size_t max_negative_terms = 20);

}  // namespace weaver::algebra
