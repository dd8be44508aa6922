#include "core/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace weaver::algebra {

ProductOfFragments::ProductOfFragments(std::size_t n, std::vector<OrderOneFragment> fragments)
    : n_(n), fragments_(std::move(fragments)) {
    for (const auto& f : fragments_) {
        if (f.pattern.size() != n_)
            throw_error(ErrorCode::invalid_argument, "fragment has wrong pattern length");
        if (f.pattern.none())
            throw_error(ErrorCode::invalid_argument, "fragment with all-zero pattern");
        if (f.count == 0.0 || !std::isfinite(f.count))
            throw_error(ErrorCode::invalid_argument, "fragment count must be non-zero and finite");
    }
}

ProductOfFragments ProductOfFragments::collected() const {
    std::vector<OrderOneFragment> out;
    std::unordered_map<Pattern, std::size_t, PatternHash> index;
    for (const auto& f : fragments_) {
        auto [it, inserted] = index.try_emplace(f.pattern, out.size());
        if (inserted)
            out.push_back(f);
        else
            out[it->second].count += f.count;
    }
    std::erase_if(out, [](const OrderOneFragment& f) { return f.count == 0.0; });
    return ProductOfFragments(n_, std::move(out));
}

namespace {

std::vector<int> row_sums(const ProductOfFragments& prod) {
    std::vector<int> s(prod.n(), 0);
    for (const auto& f : prod.fragments())
        for (std::size_t i = 0; i < prod.n(); ++i)
            if (f.pattern.test(i)) ++s[i];
    return s;
}

}  // namespace

bool is_fragment(const ProductOfFragments& prod) {
    for (int s : row_sums(prod))
        if (s > 1) return false;
    return true;
}

bool is_slice(const ProductOfFragments& prod) {
    for (int s : row_sums(prod))
        if (s != 1) return false;
    return true;
}

OrderOneFragment union_fragments(const OrderOneFragment& f1, const OrderOneFragment& f2) {
    OrderOneFragment u{f1.pattern | f2.pattern, f1.count + f2.count};
    if (u.count == 0.0)
        throw_error(ErrorCode::invalid_argument, "degenerate union: counts cancel to zero");
    return u;
}

bool covers(const OrderOneFragment& covering, const OrderOneFragment& covered) {
    return covered.pattern.subset_of(covering.pattern);
}

namespace {

// Kuhn's augmenting-path matching on the "can cover" bipartite graph.
bool try_augment(std::size_t u, const std::vector<std::vector<std::size_t>>& adj,
                 std::vector<int>& match_of, std::vector<char>& visited) {
    for (std::size_t v : adj[u]) {
        if (visited[v]) continue;
        visited[v] = 1;
        if (match_of[v] < 0 ||
            try_augment(static_cast<std::size_t>(match_of[v]), adj, match_of, visited)) {
            match_of[v] = static_cast<int>(u);
            return true;
        }
    }
    return false;
}

}  // namespace

bool covers_product(const ProductOfFragments& covering, const ProductOfFragments& covered) {
    if (covering.n() != covered.n())
        throw_error(ErrorCode::invalid_argument, "products disagree on the number of ions");
    if (covering.order() != covered.order()) return false;
    const std::size_t q = covered.order();
    std::vector<std::vector<std::size_t>> adj(q);
    for (std::size_t u = 0; u < q; ++u)
        for (std::size_t v = 0; v < q; ++v)
            if (covered.fragments()[u].pattern.subset_of(covering.fragments()[v].pattern))
                adj[u].push_back(v);
    std::vector<int> match_of(q, -1);
    for (std::size_t u = 0; u < q; ++u) {
        std::vector<char> visited(q, 0);
        if (!try_augment(u, adj, match_of, visited)) return false;
    }
    return true;
}

bool collects_with(const ProductOfFragments& p1, const ProductOfFragments& p2) {
    if (p1.n() != p2.n()) return false;
    auto patterns_of = [](const ProductOfFragments& p) {
        std::vector<Pattern> ps;
        ps.reserve(p.order());
        for (const auto& f : p.fragments()) ps.push_back(f.pattern);
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        return ps;
    };
    return patterns_of(p1) == patterns_of(p2);
}

namespace {

struct RefineSearch {
    const std::vector<OrderOneFragment>& fine;
    const std::vector<OrderOneFragment>& coarse;
    bool exact;  // require count sums to match instead of dominate
    std::vector<char> used;

    static bool count_ok(double got, double want, bool exact) {
        if (exact) return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want));
        return got >= want - 1e-12 * std::max(1.0, std::abs(want));
    }

    // Tile what is left of coarse pattern j, then move on to j+1.
    bool tile(std::size_t j, const Pattern& remaining, double count_sum) {
        if (remaining.none()) {
            if (!count_ok(count_sum, coarse[j].count, exact)) return false;
            return assign(j + 1);
        }
        // anchor on the lowest uncovered ion to avoid revisiting permutations
        std::size_t anchor = 0;
        while (!remaining.test(anchor)) ++anchor;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            if (used[i]) continue;
            const Pattern& g = fine[i].pattern;
            if (!g.test(anchor) || !g.subset_of(remaining)) continue;
            used[i] = 1;
            Pattern next(remaining.size());
            for (std::size_t k = 0; k < remaining.size(); ++k)
                if (remaining.test(k) && !g.test(k)) next.set(k);
            if (tile(j, next, count_sum + fine[i].count)) return true;
            used[i] = 0;
        }
        return false;
    }

    bool assign(std::size_t j) {
        if (j == coarse.size()) return true;
        return tile(j, coarse[j].pattern, 0.0);
    }
};

}  // namespace

Refinement refines(const ProductOfFragments& fine, const ProductOfFragments& coarse,
                   std::size_t fragment_cap) {
    if (fine.n() != coarse.n())
        throw_error(ErrorCode::invalid_argument, "products disagree on the number of ions");
    if (fine.order() > fragment_cap || coarse.order() > fragment_cap)
        throw_error(ErrorCode::size_cap, "refinement search limited to " +
                                             std::to_string(fragment_cap) + " fragments");
    RefineSearch exact_search{fine.fragments(), coarse.fragments(), true,
                              std::vector<char>(fine.order(), 0)};
    if (exact_search.assign(0)) return Refinement::splits;
    RefineSearch dom_search{fine.fragments(), coarse.fragments(), false,
                            std::vector<char>(fine.order(), 0)};
    if (dom_search.assign(0)) return Refinement::refines;
    return Refinement::no;
}

namespace {

void check_amgm_input(std::span<const double> x, std::span<const double> a) {
    if (x.size() != a.size() || x.empty())
        throw_error(ErrorCode::invalid_argument, "weight and base vectors must match and be non-empty");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0) || !(a[i] > 0.0))
            throw_error(ErrorCode::invalid_argument, "weighted AM-GM needs strictly positive inputs");
}

}  // namespace

double weighted_amgm_log_gap(std::span<const double> x, std::span<const double> a) {
    check_amgm_input(x, a);
    double log_lhs = 0.0, log_coef = 0.0, sum_a = 0.0, sum_x = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        log_lhs += a[i] * std::log(x[i]);
        log_coef += a[i] * std::log(a[i]);
        sum_a += a[i];
        sum_x += x[i];
    }
    const double log_rhs = log_coef - sum_a * std::log(sum_a) + sum_a * std::log(sum_x);
    double gap = log_rhs - log_lhs;
    // the inequality guarantees >= 0; absorb the evaluation roundoff
    const double slack = 1e-13 * (1.0 + std::abs(log_rhs) + std::abs(log_lhs));
    if (gap < 0.0 && gap > -slack) gap = 0.0;
    return gap;
}

double weighted_amgm_gap(std::span<const double> x, std::span<const double> a) {
    const double log_gap = weighted_amgm_log_gap(x, a);
    double log_rhs = 0.0, sum_a = 0.0, sum_x = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        log_rhs += a[i] * std::log(a[i]);
        sum_a += a[i];
        sum_x += x[i];
    }
    log_rhs += sum_a * (std::log(sum_x) - std::log(sum_a));
    const double rel = -std::expm1(-log_gap);  // (RHS - LHS) / RHS, in [0, 1]
    if (rel == 0.0) return 0.0;
    return std::exp(log_rhs) * rel;
}

namespace {

std::vector<CoveringGraph::Node> collected_nodes(const CountModel& m) {
    std::vector<CoveringGraph::Node> nodes;
    for (std::size_t i = 0; i < m.n(); ++i)
        if (m.ionic_counts()[i] != 0.0)
            nodes.push_back({Pattern::unit(m.n(), i), m.ionic_counts()[i]});
    for (std::size_t j = 0; j < m.q(); ++j)
        nodes.push_back({m.patterns()[j], m.union_counts()[j]});
    return nodes;
}

}  // namespace

CoveringGraph covering_graph(const CountModel& m) {
    CoveringGraph g;
    g.nodes = collected_nodes(m);
    const std::size_t nn = g.nodes.size();
    // immediate covers only: no third pattern strictly between
    for (std::size_t u = 0; u < nn; ++u) {
        for (std::size_t v = 0; v < nn; ++v) {
            if (u == v) continue;
            const Pattern& pu = g.nodes[u].pattern;
            const Pattern& pv = g.nodes[v].pattern;
            if (!pu.subset_of(pv) || pu == pv) continue;
            bool immediate = true;
            for (std::size_t w = 0; w < nn && immediate; ++w) {
                if (w == u || w == v) continue;
                const Pattern& pw = g.nodes[w].pattern;
                if (pu.subset_of(pw) && pw.subset_of(pv) && pw != pu && pw != pv)
                    immediate = false;
            }
            if (immediate) g.edges.emplace_back(u, v);
        }
    }
    return g;
}

std::string CoveringGraph::to_dot() const {
    std::string out = "digraph {\n";
    char buf[64];
    for (const auto& node : nodes) {
        std::snprintf(buf, sizeof buf, "%.17g", node.count);
        out += "  \"" + node.pattern.to_string() + "\" [w=" + buf + "];\n";
    }
    for (const auto& [u, v] : edges)
        out += "  \"" + nodes[u].pattern.to_string() + "\" -> \"" +
               nodes[v].pattern.to_string() + "\";\n";
    out += "}\n";
    return out;
}

RegularityResult check_uniform_regularity(const CountModel& m,
                                          std::size_t max_negative_terms) {
    RegularityResult res;
    std::vector<std::size_t> negatives;
    for (std::size_t j = 0; j < m.q(); ++j)
        if (m.union_counts()[j] < 0.0) negatives.push_back(j);
    res.negative_terms = negatives.size();
    if (negatives.size() > max_negative_terms) {
        res.verdict = RegularityResult::Verdict::size_cap;
        return res;
    }

    const auto fragments = collected_nodes(m);
    const double tol = 1e-12 * std::max(1.0, m.count_scale());
    const std::size_t nsets = std::size_t{1} << negatives.size();
    for (std::size_t mask = 1; mask < nsets; ++mask) {
        Pattern u(m.n());
        double union_count = 0.0;
        for (std::size_t k = 0; k < negatives.size(); ++k) {
            if (!(mask & (std::size_t{1} << k))) continue;
            u = u | m.patterns()[negatives[k]];
            union_count += m.union_counts()[negatives[k]];
        }
        if (u.all()) continue;  // exhaustive unions vanish nowhere on the simplex
        ++res.unions_checked;
        double covered_sum = 0.0;
        for (const auto& f : fragments)
            if (f.pattern.subset_of(u)) covered_sum += f.count;
        if (covered_sum < -tol) {
            res.verdict = RegularityResult::Verdict::irregular;
            res.witness_pattern = u;
            res.witness_union_count = union_count;
            res.witness_covered_sum = covered_sum;
            return res;
        }
    }
    res.verdict = RegularityResult::Verdict::regular;
    return res;
}

}  // namespace weaver::algebra
