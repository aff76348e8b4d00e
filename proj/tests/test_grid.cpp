#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "shiftlab/grid.hpp"

using namespace shiftlab::grid;

namespace {

GroupElement random_element(const GroupPtr& g, std::mt19937& rng, int max_len = 4) {
    std::vector<int> symbols;
    const int len = int(rng() % uint32_t(max_len + 1));
    for (int i = 0; i < len; ++i)
        symbols.push_back(int(rng() % uint32_t(g->symbol_count())));
    return g->normalize(symbols);
}

Pattern random_pattern(const SpacePtr& sp, std::mt19937& rng, int max_cells = 4) {
    std::vector<Pattern::Cell> cells;
    std::set<GroupElement> used;
    const int n = int(rng() % uint32_t(max_cells + 1));
    for (int i = 0; i < n; ++i) {
        auto g = random_element(sp->group, rng);
        if (!used.insert(g).second) continue;
        cells.push_back({g, int(rng() % uint32_t(sp->alphabet->size()))});
    }
    return Pattern(sp, std::move(cells));
}

}  // namespace

TEST_CASE("normalize cancels inverses across the builtin families") {
    auto z = GroupSpec::integers();
    CHECK(z->z_value(z->parse_word("+1 -1 +1")) == 1);
    CHECK(z->parse_word("+1 -1").is_identity());

    auto f2 = GroupSpec::free_group(2);
    CHECK(f2->print_word(f2->parse_word("a b b'")) == "a");
    CHECK(f2->parse_word("a a' b b'").is_identity());

    auto z2 = GroupSpec::lattice(2);
    CHECK(z2->print_word(z2->parse_word("x y x'")) == "y");
    CHECK(z2->parse_word("x y x' y'").is_identity());
}

TEST_CASE("normalize is idempotent and solves the word problem") {
    std::mt19937 rng(3);
    for (auto g : {GroupSpec::integers(), GroupSpec::lattice(2),
                   GroupSpec::free_group(2)}) {
        for (int i = 0; i < 200; ++i) {
            auto a = random_element(g, rng);
            // w * w^-1 normalizes to the identity
            CHECK(g->multiply(a, g->inverse(a)).is_identity());
            // round trip through text
            CHECK(g->parse_word(g->print_word(a)) == a);
        }
    }
}

TEST_CASE("ball sizes match hand counts") {
    CHECK(GroupSpec::integers()->ball(2).size() == 5);
    CHECK(GroupSpec::lattice(2)->ball(1).size() == 5);
    // 1 + 4 + 4*3 reduced words
    CHECK(GroupSpec::free_group(2)->ball(2).size() == 17);
}

TEST_CASE("lattice ball cardinality equals the closed l1 count for d <= 2") {
    for (int d = 1; d <= 2; ++d) {
        auto g = GroupSpec::lattice(d);
        for (int n = 0; n <= 4; ++n) {
            // independent census over the coordinate box
            long long count = 0;
            for (long long x = -n; x <= n; ++x) {
                if (d == 1) {
                    count += 1;
                    continue;
                }
                for (long long y = -n; y <= n; ++y)
                    if (std::llabs(x) + std::llabs(y) <= n) ++count;
            }
            CHECK(static_cast<long long>(g->ball(n).size()) == count);
        }
    }
}

TEST_CASE("balls are nested prefixes, symmetric, and duplicate free") {
    for (auto g : {GroupSpec::integers(), GroupSpec::lattice(2),
                   GroupSpec::free_group(2)}) {
        for (int n = 0; n < 3; ++n) {
            const auto& small = g->ball(n);
            const auto& big = g->ball(n + 1);
            REQUIRE(small.size() <= big.size());
            for (size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
            std::set<GroupElement> seen(big.begin(), big.end());
            CHECK(seen.size() == big.size());
            for (const auto& e : small) CHECK(seen.count(g->inverse(e)) == 1);
        }
    }
}

TEST_CASE("translate: identity, shift, and the action law") {
    auto sp = z_binary_space();
    auto p = Pattern::word(sp, "1");
    CHECK(translate(sp->group->identity(), p) == p);

    auto q = translate(sp->group->z_element(1), p);
    REQUIRE(q.size() == 1);
    CHECK(sp->group->z_value(q.cells()[0].key) == 1);

    std::mt19937 rng(17);
    for (auto group : {GroupSpec::integers(), GroupSpec::free_group(2)}) {
        auto space = make_space(group, Alphabet::binary());
        for (int i = 0; i < 100; ++i) {
            auto g = random_element(group, rng);
            auto h = random_element(group, rng);
            auto pat = random_pattern(space, rng);
            CHECK(translate(g, translate(h, pat)) ==
                  translate(group->multiply(g, h), pat));
        }
    }
}

TEST_CASE("occurs_in on words and the empty pattern") {
    auto sp = z_binary_space();
    CHECK(occurs_in(Pattern::word(sp, "11"), Pattern::word(sp, "0110")));
    CHECK(!occurs_in(Pattern::word(sp, "11"), Pattern::word(sp, "0101")));
    CHECK(occurs_in(Pattern(sp), Pattern::word(sp, "0")));
    CHECK(occurs_in(Pattern(sp), Pattern(sp)));
}

TEST_CASE("occurs_in is translation invariant") {
    std::mt19937 rng(23);
    for (auto group : {GroupSpec::integers(), GroupSpec::lattice(2)}) {
        auto space = make_space(group, Alphabet::binary());
        for (int i = 0; i < 150; ++i) {
            auto p = random_pattern(space, rng, 3);
            auto q = random_pattern(space, rng, 5);
            auto g = random_element(group, rng);
            CHECK(occurs_in(p, q) == occurs_in(translate(g, p), translate(g, q)));
        }
    }
}

TEST_CASE("extensions enumerate the fillings of the missing ball cells") {
    auto sp = z_binary_space();
    auto p = Pattern::word(sp, "1");  // {0 -> 1}
    auto exts = extensions(p, 1, 1 << 20);
    CHECK(exts.size() == 4);  // two free cells at -1 and +1
    for (const auto& e : exts) {
        CHECK(e.size() == 3);
        CHECK(occurs_in(p, e));
        CHECK(e.at(sp->group->z_element(0)) == 1);
    }
    // support already covers the ball: singleton
    auto wide = Pattern::word_at(sp, "010", -1);
    auto only = extensions(wide, 1, 1 << 20);
    REQUIRE(only.size() == 1);
    CHECK(only[0] == wide);

    CHECK_THROWS_AS(extensions(Pattern(sp), 30, 1 << 10), CapExceeded);
}

TEST_CASE("pattern enumerator starts with the ball(0) letters and has no dups") {
    PatternEnumerator en(z_binary_space());
    auto first = en.next();
    auto second = en.next();
    CHECK(first.to_text() == "0");
    CHECK(second.to_text() == "1");

    PatternEnumerator en2(z_binary_space());
    std::set<Pattern> seen;
    bool found_all_ones = false;
    for (int i = 0; i < 300; ++i) {
        auto p = en2.next();
        CHECK(seen.insert(p).second);
        bool all_ones = p.size() == 3;
        for (const auto& c : p.cells()) all_ones = all_ones && c.letter == 1;
        found_all_ones = found_all_ones || all_ones;
    }
    CHECK(found_all_ones);  // the ball(1) pattern "111" shows up early
}

TEST_CASE("pattern text round trips bit exactly") {
    auto sp = z_binary_space();
    CHECK(Pattern::parse(sp, "0110").to_text() == "0110");
    CHECK(Pattern::parse(sp, "").empty_support());
    auto gap = Pattern::parse(sp, "0:0,2:1");
    CHECK(gap.size() == 2);
    CHECK(gap.to_text() == "0:0,2:1");
    CHECK(Pattern::parse(sp, gap.to_text()) == gap);

    auto z2 = make_space(GroupSpec::lattice(2), Alphabet::binary());
    auto p2 = Pattern::parse(z2, "x y:1, e:0");
    CHECK(p2.size() == 2);
    CHECK(Pattern::parse(z2, p2.to_text()) == p2);

    std::mt19937 rng(29);
    for (auto group : {GroupSpec::integers(), GroupSpec::lattice(2),
                       GroupSpec::free_group(2)}) {
        auto space = make_space(group, Alphabet::binary());
        for (int i = 0; i < 200; ++i) {
            auto p = random_pattern(space, rng, 5);
            CHECK(Pattern::parse(space, p.to_text()) == p);
        }
    }
}

TEST_CASE("word letter rows and hulls") {
    auto sp = z_binary_space();
    auto w = Pattern::word(sp, "0110");
    REQUIRE(w.word_letters().has_value());
    CHECK(*w.word_letters() == std::vector<int>{0, 1, 1, 0});
    auto hull = w.z_hull();
    REQUIRE(hull.has_value());
    CHECK(hull->first == 0);
    CHECK(hull->second == 3);
    CHECK(!Pattern::parse(sp, "0:0,2:1").word_letters().has_value());
}

TEST_CASE("candidate stream covers words and gap patterns without duplicates") {
    CandidateStream cs(z_binary_space());
    std::set<Pattern> seen;
    bool found_gap = false;
    bool found_11 = false;
    auto sp = z_binary_space();
    const auto gap = Pattern::parse(sp, "0:0,2:1");
    const auto word11 = Pattern::word(sp, "11");
    for (size_t i = 0; i < 2000; ++i) {
        const auto& p = cs.at(i);
        CHECK(!p.empty_support());
        CHECK(seen.insert(p).second);
        found_gap = found_gap || p == gap;
        found_11 = found_11 || p == word11;
    }
    CHECK(found_gap);
    CHECK(found_11);
}

TEST_CASE("candidate stream on a free group emits ball subsets") {
    auto space = make_space(GroupSpec::free_group(2), Alphabet::binary());
    CandidateStream cs(space);
    std::set<Pattern> seen;
    for (size_t i = 0; i < 200; ++i) {
        const auto& p = cs.at(i);
        CHECK(!p.empty_support());
        CHECK(seen.insert(p).second);
    }
}
