#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/pattern.hpp"

namespace weaver {

// One power of a linear form, before collection.
struct RawTerm {
    Pattern pattern;
    double count = 0.0;
};

// Strictly positive point on the unit simplex. Renormalized on construction;
// the stored coordinates sum to 1 within 1e-12.
class SimplexPoint {
public:
    explicit SimplexPoint(std::vector<double> coords);

    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<double>& coords() const { return coords_; }
    operator std::span<const double>() const { return coords_; }

    static constexpr double kSumTolerance = 1e-12;

private:
    std::vector<double> coords_;
};

// Counting data in collected form: ionic counts a (one per ion, >= 0, zero
// meaning the ion never appears alone), union/conditional counts b (non-zero,
// negative entries record exclusion sessions), and the n x q bit matrix of
// union membership. Terms keep first-appearance order.
class CountModel {
public:
    // Collects raw terms: duplicate patterns merge by summing counts, merged
    // zeros drop, single-ion patterns fold into the ionic vector.
    static CountModel canonicalize(const std::vector<RawTerm>& terms,
                                   std::vector<std::string> ion_names = {});

    // Already-separated form (grid input); runs the same collection rules.
    static CountModel from_parts(std::vector<double> ionic, std::vector<double> union_counts,
                                 std::vector<Pattern> patterns,
                                 std::vector<std::string> ion_names = {});

    std::size_t n() const { return ionic_.size(); }
    std::size_t q() const { return union_counts_.size(); }

    const std::vector<double>& ionic_counts() const { return ionic_; }
    const std::vector<double>& union_counts() const { return union_counts_; }
    const std::vector<Pattern>& patterns() const { return patterns_; }
    const std::vector<std::string>& ion_names() const { return ion_names_; }

    // term indices whose pattern includes ion i
    const std::vector<std::size_t>& terms_of_ion(std::size_t i) const { return ion_terms_[i]; }

    double count_scale() const;  // sum of |a_i| + |b_j|

    bool operator==(const CountModel& other) const;

private:
    CountModel() = default;
    void finish();  // validates invariants, builds ion_terms_

    std::vector<double> ionic_;
    std::vector<double> union_counts_;
    std::vector<Pattern> patterns_;
    std::vector<std::string> ion_names_;
    std::vector<std::vector<std::size_t>> ion_terms_;
};

}  // namespace weaver
