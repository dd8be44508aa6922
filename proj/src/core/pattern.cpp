#include "core/pattern.hpp"

#include "core/errors.hpp"

namespace weaver {

Pattern Pattern::from_bits(const std::vector<int>& bits) {
    Pattern p(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1)
            throw_error(ErrorCode::invalid_argument, "pattern entries must be 0 or 1");
        if (bits[i]) p.set(i);
    }
    return p;
}

Pattern Pattern::from_string(const std::string& bits) {
    Pattern p(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw_error(ErrorCode::invalid_argument, "pattern string must be 0/1");
        if (bits[i] == '1') p.set(i);
    }
    return p;
}

Pattern Pattern::unit(std::size_t n, std::size_t i) {
    Pattern p(n);
    p.set(i);
    return p;
}

bool Pattern::any() const {
    for (auto b : blocks_)
        if (b) return true;
    return false;
}

std::size_t Pattern::popcount() const {
    std::size_t c = 0;
    for (auto b : blocks_) c += static_cast<std::size_t>(std::popcount(b));
    return c;
}

Pattern Pattern::operator|(const Pattern& other) const {
    if (n_ != other.n_)
        throw_error(ErrorCode::invalid_argument, "pattern length mismatch in union");
    Pattern r(n_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) r.blocks_[k] = blocks_[k] | other.blocks_[k];
    return r;
}

bool Pattern::subset_of(const Pattern& other) const {
    if (n_ != other.n_) return false;
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        if (blocks_[k] & ~other.blocks_[k]) return false;
    return true;
}

bool Pattern::operator<(const Pattern& other) const {
    if (n_ != other.n_) return n_ < other.n_;
    return blocks_ < other.blocks_;
}

double Pattern::dot(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        std::uint64_t b = blocks_[k];
        while (b) {
            const int i = std::countr_zero(b);
            s += x[(k << 6) + static_cast<std::size_t>(i)];
            b &= b - 1;
        }
    }
    return s;
}

std::string Pattern::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (test(i)) s[i] = '1';
    return s;
}

std::size_t PatternHash::operator()(const Pattern& p) const {
    // FNV-1a over the bit string; good enough for collection maps
    std::size_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < p.size(); ++i) {
        h ^= static_cast<std::size_t>(p.test(i)) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace weaver
