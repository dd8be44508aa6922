#include "core/model.hpp"

#include <cmath>
#include <unordered_map>

namespace weaver {

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw_error(ErrorCode::invalid_argument, "empty simplex point");
    double sum = 0.0;
    for (double c : coords_) {
        if (!std::isfinite(c) || c <= 0.0)
            throw_error(ErrorCode::invalid_argument,
                        "simplex point coordinates must be finite and strictly positive");
        sum += c;
    }
    for (double& c : coords_) c /= sum;
}

CountModel CountModel::canonicalize(const std::vector<RawTerm>& terms,
                                    std::vector<std::string> ion_names) {
    if (terms.empty()) throw_error(ErrorCode::invalid_argument, "no terms to canonicalize");
    const std::size_t n = terms.front().pattern.size();

    // collect duplicates, keeping first-appearance order
    std::vector<RawTerm> collected;
    std::unordered_map<Pattern, std::size_t, PatternHash> index;
    for (const auto& t : terms) {
        if (t.pattern.size() != n)
            throw_error(ErrorCode::invalid_argument, "terms disagree on the number of ions");
        if (t.pattern.none())
            throw_error(ErrorCode::invalid_argument, "all-zero event pattern");
        if (!std::isfinite(t.count))
            throw_error(ErrorCode::invalid_argument, "non-finite count");
        auto [it, inserted] = index.try_emplace(t.pattern, collected.size());
        if (inserted)
            collected.push_back(t);
        else
            collected[it->second].count += t.count;
    }

    CountModel m;
    m.ionic_.assign(n, 0.0);
    for (const auto& t : collected) {
        if (t.count == 0.0) continue;  // cancelled out
        if (t.pattern.is_unit()) {
            for (std::size_t i = 0; i < n; ++i)
                if (t.pattern.test(i)) m.ionic_[i] += t.count;
        } else {
            m.patterns_.push_back(t.pattern);
            m.union_counts_.push_back(t.count);
        }
    }
    m.ion_names_ = std::move(ion_names);
    m.finish();
    return m;
}

CountModel CountModel::from_parts(std::vector<double> ionic, std::vector<double> union_counts,
                                  std::vector<Pattern> patterns,
                                  std::vector<std::string> ion_names) {
    if (union_counts.size() != patterns.size())
        throw_error(ErrorCode::invalid_argument, "count/pattern length mismatch");
    std::vector<RawTerm> terms;
    const std::size_t n = ionic.size();
    for (std::size_t i = 0; i < n; ++i)
        if (ionic[i] != 0.0) terms.push_back({Pattern::unit(n, i), ionic[i]});
    for (std::size_t j = 0; j < patterns.size(); ++j)
        terms.push_back({patterns[j], union_counts[j]});
    if (terms.empty()) throw_error(ErrorCode::invalid_argument, "empty model");
    auto m = canonicalize(terms, std::move(ion_names));
    if (m.n() != n) throw_error(ErrorCode::model_invariant, "ion count changed in collection");
    return m;
}

void CountModel::finish() {
    const std::size_t nn = ionic_.size();
    if (nn < 2)
        throw_error(ErrorCode::model_invariant, "a model needs at least two ions");
    for (double a : ionic_)
        if (a < 0.0)
            throw_error(ErrorCode::model_invariant, "negative ionic count after collection");
    for (double b : union_counts_)
        if (b == 0.0) throw_error(ErrorCode::model_invariant, "zero union count survived collection");

    if (ion_names_.empty()) {
        ion_names_.reserve(nn);
        for (std::size_t i = 0; i < nn; ++i) ion_names_.push_back("x" + std::to_string(i + 1));
    }
    if (ion_names_.size() != nn)
        throw_error(ErrorCode::invalid_argument, "ion name list has wrong length");

    ion_terms_.assign(nn, {});
    for (std::size_t j = 0; j < patterns_.size(); ++j)
        for (std::size_t i = 0; i < nn; ++i)
            if (patterns_[j].test(i)) ion_terms_[i].push_back(j);

    // exhaustiveness: every ion carries information somewhere
    for (std::size_t i = 0; i < nn; ++i)
        if (ionic_[i] == 0.0 && ion_terms_[i].empty())
            throw_error(ErrorCode::model_invariant,
                        "ion " + ion_names_[i] + " appears in no count");
}

double CountModel::count_scale() const {
    double s = 0.0;
    for (double a : ionic_) s += std::abs(a);
    for (double b : union_counts_) s += std::abs(b);
    return s;
}

bool CountModel::operator==(const CountModel& other) const {
    return ionic_ == other.ionic_ && union_counts_ == other.union_counts_ &&
           patterns_ == other.patterns_ && ion_names_ == other.ion_names_;
}

}  // namespace weaver
