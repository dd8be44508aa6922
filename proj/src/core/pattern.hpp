#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace weaver {

// Event pattern: one bit per ion. Packed into 64-bit blocks so that
// dominance tests and unions stay cheap during lattice enumeration.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::size_t n) : n_(n), blocks_((n + 63) / 64, 0) {}

    static Pattern from_bits(const std::vector<int>& bits);
    static Pattern from_string(const std::string& bits);  // e.g. "1100"
    static Pattern unit(std::size_t n, std::size_t i);

    std::size_t size() const { return n_; }

    bool test(std::size_t i) const { return (blocks_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { blocks_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    bool any() const;
    bool none() const { return !any(); }
    bool all() const { return popcount() == n_; }
    std::size_t popcount() const;

    // true iff this is a standard unit vector
    bool is_unit() const { return popcount() == 1; }

    // componentwise max
    Pattern operator|(const Pattern& other) const;

    // componentwise this <= other
    bool subset_of(const Pattern& other) const;

    bool operator==(const Pattern& other) const {
        return n_ == other.n_ && blocks_ == other.blocks_;
    }
    bool operator!=(const Pattern& other) const { return !(*this == other); }
    bool operator<(const Pattern& other) const;  // lexicographic, for ordered maps

    double dot(std::span<const double> x) const;

    std::string to_string() const;  // "1100"

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> blocks_;
};

struct PatternHash {
    std::size_t operator()(const Pattern& p) const;
};

}  // namespace weaver
