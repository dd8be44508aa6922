#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "core/algebra.hpp"
#include "core/likelihood.hpp"
#include "test_util.hpp"

using namespace weaver;
using namespace weaver::algebra;
using testutil::make_model;

namespace {

OrderOneFragment frag(const std::string& bits, double count) {
    return {Pattern::from_string(bits), count};
}

ProductOfFragments product(std::size_t n, std::vector<OrderOneFragment> fs) {
    return ProductOfFragments(n, std::move(fs));
}

}  // namespace

TEST_CASE("closure and exhaustiveness of products") {
    // x1 x2^2
    CHECK(is_fragment(product(5, {frag("10000", 1), frag("01000", 2)})));
    CHECK_FALSE(is_slice(product(5, {frag("10000", 1), frag("01000", 2)})));
    // x1 x2^2 (x1+x2) breaks closure: row sums (2,2,0,0,0)
    CHECK_FALSE(is_fragment(product(5, {frag("10000", 1), frag("01000", 2), frag("11000", 1)})));
    // x1 x2^2 (x3+x4+x5)^3 is a slice
    CHECK(is_slice(product(5, {frag("10000", 1), frag("01000", 2), frag("00111", 3)})));
    // x2^2 x4^5 / (x1+x3+x5)^3 is a slice with a negative count
    CHECK(is_slice(product(5, {frag("01000", 2), frag("00010", 5), frag("10101", -3)})));
    // empty product satisfies closure vacuously
    CHECK(is_fragment(product(5, {})));
    CHECK_FALSE(is_slice(product(5, {})));
}

TEST_CASE("fragment classification helpers") {
    CHECK(frag("10000", 1).ionic());
    CHECK_FALSE(frag("00111", -2).ionic());
    CHECK(frag("11111", 3).exhaustive());
    CHECK(frag("00111", -2).event_size() == 3);
}

TEST_CASE("unions of order-1 fragments") {
    // x1 with (x3+x4+x5)^-2
    const auto u = union_fragments(frag("10000", 1), frag("00111", -2));
    CHECK(u.pattern.to_string() == "10111");
    CHECK(u.count == -1.0);
    CHECK_FALSE(u.exhaustive());

    const auto same = union_fragments(frag("01100", 3), frag("01100", 3));
    CHECK(same.pattern.to_string() == "01100");
    CHECK(same.count == 6.0);

    const auto top = union_fragments(frag("11100", -202), frag("01110", -220));
    CHECK(top.pattern.to_string() == "11110");
    CHECK(top.count == -422.0);

    CHECK_THROWS_AS(union_fragments(frag("110", 4), frag("011", -4)), Error);
}

TEST_CASE("order-1 covering") {
    CHECK(covers(frag("11000", 3), frag("10000", 30)));   // (x1+x2)^3 covers x1^30
    CHECK_FALSE(covers(frag("10000", 30), frag("11000", 3)));
    CHECK(covers(frag("10000", 7), frag("10000", -7)));   // any fragment covers itself
    // counts are irrelevant to the ordering
    CHECK(covers(frag("11111", -70), frag("11110", 7)));
    CHECK(covers(frag("11110", 7), frag("11100", -70)));
    CHECK(covers(frag("11100", -70), frag("11000", 7)));
}

TEST_CASE("order-q covering needs distinct matches") {
    // x1^-70 x2^-70 finds no pair of distinct covers inside a single union power
    const auto two_ions = product(5, {frag("10000", -70), frag("01000", -70)});
    const auto one_union = product(5, {frag("11111", -70)});
    CHECK_FALSE(covers_product(one_union, two_ions));  // different orders never cover

    // two copies of (x1+x2) do cover x1 x2
    const auto doubled = product(5, {frag("11000", 3), frag("11000", 5)});
    CHECK(covers_product(doubled, two_ions));

    // (x1+x2)^3 x3^2 cannot cover x1 x2: x3 covers neither
    const auto mismatched = product(5, {frag("11000", 3), frag("00100", 2)});
    CHECK_FALSE(covers_product(mismatched, two_ions));

    CHECK(covers_product(two_ions, two_ions));  // reflexive
}

TEST_CASE("collection equivalence") {
    const auto p1 = product(2, {frag("11", 3)});
    const auto p2 = product(2, {frag("11", -5)});
    CHECK(collects_with(p1, p2));
    CHECK_FALSE(collects_with(product(2, {frag("10", 1)}), product(2, {frag("01", 1)})));
    // multiplicity does not matter, only the set of patterns
    CHECK(collects_with(product(2, {frag("11", 3), frag("11", 4), frag("10", 1)}),
                        product(2, {frag("10", 9), frag("11", 2)})));
}

TEST_CASE("mutual covering coincides with collection (random products)") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> mask_dist(1, 15);
    std::uniform_int_distribution<int> order_dist(1, 4);
    std::uniform_real_distribution<double> count_dist(-5.0, 5.0);
    for (int rep = 0; rep < 500; ++rep) {
        auto draw = [&] {
            std::vector<OrderOneFragment> fs;
            const int k = order_dist(rng);
            for (int i = 0; i < k; ++i) {
                Pattern p(4);
                const int mask = mask_dist(rng);
                for (int bit = 0; bit < 4; ++bit)
                    if (mask & (1 << bit)) p.set(static_cast<std::size_t>(bit));
                double c = count_dist(rng);
                if (c == 0.0) c = 1.0;
                fs.push_back({p, c});
            }
            return product(4, fs);
        };
        const auto a = draw(), b = draw();
        const bool mutual = a.order() == b.order() && covers_product(a, b) && covers_product(b, a);
        if (mutual) CHECK(collects_with(a, b));
        if (collects_with(a, b) && a.order() == b.order()) {
            CHECK(covers_product(a, b));
            CHECK(covers_product(b, a));
        }
    }
}

TEST_CASE("refinement examples") {
    // x1^2 x2^4 (x3+x4)^-7 x5^100 refines x1 x2^2 (x3+x4+x5)^3
    const auto fine = product(5, {frag("10000", 2), frag("01000", 4), frag("00110", -7),
                                  frag("00001", 100)});
    const auto coarse = product(5, {frag("10000", 1), frag("01000", 2), frag("00111", 3)});
    CHECK(refines(fine, coarse) == Refinement::refines);

    // (x1+x3)(x2+x4)^100 x5 does not refine x2^2 x4^5 (x1+x3+x5)^-3
    const auto xi5 = product(5, {frag("10100", 1), frag("01010", 100), frag("00001", 1)});
    const auto omega5 = product(5, {frag("01000", 2), frag("00010", 5), frag("10101", -3)});
    CHECK(refines(xi5, omega5) == Refinement::no);

    // every product splits itself
    CHECK(refines(coarse, coarse) == Refinement::splits);
    CHECK(refines(fine, fine) == Refinement::splits);

    // chain link: ionized quotient refines the union form
    const auto ionized = product(3, {frag("100", 3), frag("010", 4), frag("001", 5),
                                     frag("100", 1), frag("010", 1), frag("100", -1),
                                     frag("001", -1), frag("010", -1), frag("001", -1)});
    const auto unioned = product(3, {frag("100", 3), frag("010", 4), frag("001", 5),
                                     frag("110", 2), frag("101", -4), frag("011", -5)});
    CHECK(refines(ionized, unioned) == Refinement::refines);

    CHECK_THROWS_AS(refines(product(17, std::vector<OrderOneFragment>(17, frag(std::string(16, '0') + "1", 1.0))),
                            product(17, {frag(std::string(16, '0') + "1", 1.0)})),
                    Error);
}

TEST_CASE("splitting preserves total counts (constructed splits)") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> count_dist(0.5, 8.0);
    for (int rep = 0; rep < 200; ++rep) {
        // build a coarse product over disjoint halves, then split each
        // pattern into singletons with counts that sum exactly
        const std::size_t n = 6;
        std::vector<OrderOneFragment> coarse_fs, fine_fs;
        std::vector<int> perm{0, 1, 2, 3, 4, 5};
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int g = 0; g < 2; ++g) {
            Pattern p(n);
            std::vector<std::size_t> members;
            for (int k = 0; k < 3; ++k) {
                p.set(static_cast<std::size_t>(perm[3 * g + k]));
                members.push_back(static_cast<std::size_t>(perm[3 * g + k]));
            }
            double total = 0.0;
            std::vector<double> parts;
            for (std::size_t i = 0; i < members.size(); ++i) {
                const double c = std::round(count_dist(rng) * 16.0) / 16.0;  // dyadic, sums exact
                parts.push_back(c);
                total += c;
            }
            coarse_fs.push_back({p, total});
            for (std::size_t i = 0; i < members.size(); ++i)
                fine_fs.push_back({Pattern::unit(n, members[i]), parts[i]});
        }
        const auto coarse = product(n, coarse_fs);
        const auto fine = product(n, fine_fs);
        REQUIRE(refines(fine, coarse) == Refinement::splits);
        double coarse_total = 0.0, fine_total = 0.0;
        for (const auto& f : coarse.fragments()) coarse_total += f.count;
        for (const auto& f : fine.fragments()) fine_total += f.count;
        CHECK(coarse_total == doctest::Approx(fine_total).epsilon(1e-12));
    }
}

TEST_CASE("refinement is transitive (constructed chains)") {
    // singletons refine pairs refine the exhaustive union
    const std::size_t n = 4;
    const auto bottom = product(n, {frag("1111", 4)});
    const auto middle = product(n, {frag("1100", 3), frag("0011", 2)});
    const auto top = product(n, {frag("1000", 3), frag("0100", 1), frag("0010", 1), frag("0001", 1)});
    CHECK(refines(middle, bottom) == Refinement::refines);
    CHECK(refines(top, middle) == Refinement::refines);
    CHECK(refines(top, bottom) == Refinement::refines);
}

TEST_CASE("weighted AM-GM gap") {
    // (x1+x2)^5 >= 5^5/(3^3 2^2) x1^3 x2^2
    const std::vector<double> a{3, 2};
    for (double k : {0.2, 1.0, 7.0}) {
        const std::vector<double> x{3 * k, 2 * k};
        const double rel = -std::expm1(-weighted_amgm_log_gap(x, a));
        CHECK(std::abs(rel) <= 1e-12);
    }
    const std::vector<double> x{1.0, 2.0};
    CHECK(weighted_amgm_gap(x, a) > 0.0);
    // direct numeric check of the displayed inequality at a generic point
    const double lhs = std::pow(1.0, 3) * std::pow(2.0, 2);
    const double rhs = std::pow(27.0 * 4.0 / std::pow(5, 5), 1.0) * std::pow(3.0, 5);
    CHECK(weighted_amgm_gap(x, a) == doctest::Approx(rhs - lhs).epsilon(1e-12));

    CHECK(weighted_amgm_gap(a, a) == 0.0);
    CHECK_THROWS_AS(weighted_amgm_gap(std::vector<double>{1, -1}, a), Error);
    CHECK_THROWS_AS(weighted_amgm_gap(std::vector<double>{1}, a), Error);
}

TEST_CASE("masked corollary with zero powers dropped") {
    // (x1+x3+x5)^13 >= 13^13/(3^3 4^4 6^6) x1^3 x3^4 x5^6, equality iff 3:4:6
    const std::vector<double> beta{3, 4, 6};
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        CHECK(weighted_amgm_log_gap(x, beta) >= 0.0);
    }
    const double k = 0.31;
    const std::vector<double> prop{3 * k, 4 * k, 6 * k};
    CHECK(weighted_amgm_log_gap(prop, beta) <= 1e-12);
    CHECK(weighted_amgm_log_gap(std::vector<double>{3, 4, 7}, beta) > 1e-6);
}

TEST_CASE("gap is non-negative and vanishes only on proportional pairs") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.05, 20.0);
    std::uniform_int_distribution<int> len(1, 6);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = len(rng);
        std::vector<double> x(n), a(n);
        for (auto& v : x) v = u(rng);
        for (auto& v : a) v = u(rng);
        const double lg = weighted_amgm_log_gap(x, a);
        CHECK(lg >= 0.0);
        double ratio0 = x[0] / a[0];
        bool proportional = true;
        for (int i = 1; i < n; ++i)
            if (std::abs(x[i] / a[i] - ratio0) > 1e-9 * ratio0) proportional = false;
        if (proportional)
            CHECK(-std::expm1(-lg) <= 1e-12);
        else
            CHECK(lg > 0.0);
    }
}

TEST_CASE("entropy inequality for simplicial pairs") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = testutil::random_interior_point(rng, 5);
        const auto a = testutil::random_interior_point(rng, 5);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < 5; ++i) {
            lhs += a[i] * std::log(x[i]);
            rhs += a[i] * std::log(a[i]);
        }
        CHECK(lhs <= rhs + 1e-12);
    }
    const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
    double diff = 0.0;
    for (int i = 0; i < 4; ++i) diff += a[i] * (std::log(a[i]) - std::log(a[i]));
    CHECK(diff == 0.0);
}

TEST_CASE("covering graph of the irregular boundary example") {
    const auto g = covering_graph(testutil::regularity_example(2));
    REQUIRE(g.nodes.size() == 9);  // 5 ions, 2 middle unions, 2 top unions

    auto node_index = [&](const std::string& bits) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            if (g.nodes[i].pattern.to_string() == bits) return i;
        REQUIRE(false);
        return std::size_t{0};
    };
    CHECK(g.nodes[node_index("11100")].count == -202.0);
    CHECK(g.nodes[node_index("01110")].count == -220.0);
    CHECK(g.nodes[node_index("11000")].count == 1.0);
    CHECK(g.nodes[node_index("00110")].count == 20.0);

    auto has_edge = [&](const std::string& u, const std::string& v) {
        const auto ui = node_index(u), vi = node_index(v);
        for (const auto& e : g.edges)
            if (e.first == ui && e.second == vi) return true;
        return false;
    };
    CHECK(g.edges.size() == 8);
    CHECK(has_edge("10000", "11000"));
    CHECK(has_edge("01000", "11000"));
    CHECK(has_edge("00100", "00110"));
    CHECK(has_edge("00010", "00110"));
    CHECK(has_edge("11000", "11100"));
    CHECK(has_edge("00110", "01110"));
    CHECK(has_edge("00100", "11100"));
    CHECK(has_edge("01000", "01110"));
    // the isolated fifth ion has no arrows at all
    for (const auto& e : g.edges) {
        CHECK(g.nodes[e.first].pattern.to_string() != "00001");
        CHECK(g.nodes[e.second].pattern.to_string() != "00001");
    }
}

TEST_CASE("covering graph of a multinomial is arrowless") {
    const auto g = covering_graph(make_model({1, 2, 3}, {}, {}));
    CHECK(g.nodes.size() == 3);
    CHECK(g.edges.empty());
}

TEST_CASE("covering graph edges match the dominance oracle") {
    const auto m = testutil::playboard_model();
    const auto g = covering_graph(m);
    CHECK(g.nodes.size() == 11);
    // oracle: immediate covers = strict dominance minus its own composition
    const std::size_t nn = g.nodes.size();
    std::vector<std::vector<bool>> less(nn, std::vector<bool>(nn, false));
    for (std::size_t u = 0; u < nn; ++u)
        for (std::size_t v = 0; v < nn; ++v)
            if (u != v && g.nodes[u].pattern.subset_of(g.nodes[v].pattern) &&
                g.nodes[u].pattern != g.nodes[v].pattern)
                less[u][v] = true;
    std::size_t expected_edges = 0;
    for (std::size_t u = 0; u < nn; ++u)
        for (std::size_t v = 0; v < nn; ++v) {
            if (!less[u][v]) continue;
            bool through = false;
            for (std::size_t w = 0; w < nn; ++w)
                if (less[u][w] && less[w][v]) through = true;
            if (!through) ++expected_edges;
        }
    CHECK(g.edges.size() == expected_edges);
}

TEST_CASE("DOT export format") {
    const auto dot = covering_graph(make_model({2, 3}, {-5}, {"11"})).to_dot();
    CHECK(dot.find("digraph {") == 0);
    CHECK(dot.find("\"10\" [w=2];") != std::string::npos);
    CHECK(dot.find("\"11\" [w=-5];") != std::string::npos);
    CHECK(dot.find("\"10\" -> \"11\";") != std::string::npos);
    CHECK(dot.find("\"01\" -> \"11\";") != std::string::npos);
}

TEST_CASE("uniform regularity of the three boundary examples") {
    const auto r1 = check_uniform_regularity(testutil::regularity_example(1));
    CHECK(r1.verdict == RegularityResult::Verdict::regular);
    CHECK(r1.negative_terms == 2);
    CHECK(r1.unions_checked == 3);

    const auto r2 = check_uniform_regularity(testutil::regularity_example(2));
    REQUIRE(r2.verdict == RegularityResult::Verdict::irregular);
    REQUIRE(r2.witness_pattern.has_value());
    CHECK(r2.witness_pattern->to_string() == "11110");
    CHECK(r2.witness_union_count == -422.0);
    CHECK(r2.witness_covered_sum == doctest::Approx(-1.0).epsilon(1e-12));

    const auto r3 = check_uniform_regularity(testutil::regularity_example(3));
    CHECK(r3.verdict == RegularityResult::Verdict::regular);
    CHECK(r3.unions_checked == 2);  // the pair union is exhaustive and skipped
}

TEST_CASE("multinomial models are trivially regular") {
    const auto r = check_uniform_regularity(make_model({5, 6}, {}, {}));
    CHECK(r.verdict == RegularityResult::Verdict::regular);
    CHECK(r.unions_checked == 0);
}

TEST_CASE("regularity size cap") {
    // 21 negative pair terms over 7 ions
    std::vector<std::string> bits;
    std::vector<double> counts;
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) {
            std::string s(7, '0');
            s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(j)] = '1';
            bits.push_back(s);
            counts.push_back(-1.0);
        }
    const auto m = make_model(std::vector<double>(7, 100.0), counts, bits);
    CHECK(check_uniform_regularity(m, 20).verdict == RegularityResult::Verdict::size_cap);
    CHECK(check_uniform_regularity(m, 21).verdict == RegularityResult::Verdict::regular);
}

TEST_CASE("regularity verdict agrees with a numerical boundary probe") {
    // walk toward the face where the witness union vanishes and watch the
    // log-kernel slope against log distance: the covered-count sum
    auto probe_slope = [](const CountModel& m, const Pattern& face) {
        auto point_at = [&](double eps) {
            std::vector<double> x(m.n());
            const auto inside = face.popcount();
            const auto outside = m.n() - inside;
            for (std::size_t i = 0; i < m.n(); ++i)
                x[i] = face.test(i) ? eps / static_cast<double>(inside)
                                    : (1.0 - eps) / static_cast<double>(outside);
            return x;
        };
        const double lo = log_likelihood(m, point_at(1e-4));
        const double hi = log_likelihood(m, point_at(1e-8));
        return (hi - lo) / (std::log(1e-8) - std::log(1e-4));
    };

    const auto m2 = testutil::regularity_example(2);
    const auto r2 = check_uniform_regularity(m2);
    REQUIRE(r2.witness_pattern.has_value());
    const double slope2 = probe_slope(m2, *r2.witness_pattern);
    // irregular: the kernel blows up, slope approximates the negative sum
    CHECK(slope2 < 0.0);
    CHECK(slope2 == doctest::Approx(r2.witness_covered_sum).epsilon(0.05));

    const auto m1 = testutil::regularity_example(1);
    const double slope1 = probe_slope(m1, Pattern::from_string("11110"));
    CHECK(slope1 >= -1e-6);  // bounded at the same face
}

TEST_CASE("enumeration work grows with the number of negative terms") {
    std::size_t prev = 0;
    for (int N = 2; N <= 9; ++N) {
        const int n = N + 2;
        std::vector<std::string> bits;
        std::vector<double> counts;
        for (int k = 0; k < N; ++k) {
            std::string s(static_cast<std::size_t>(n), '0');
            s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k + 1)] = '1';
            bits.push_back(s);
            counts.push_back(-1.0);
        }
        const auto m = make_model(std::vector<double>(static_cast<std::size_t>(n), 50.0), counts,
                                  bits);
        const auto r = check_uniform_regularity(m);
        REQUIRE(r.verdict == RegularityResult::Verdict::regular);
        CHECK(r.unions_checked > prev);
        prev = r.unions_checked;
    }
}
