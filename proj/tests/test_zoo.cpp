#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "shiftlab/zoo.hpp"

using namespace shiftlab;
using namespace shiftlab::zoo;
using grid::Pattern;
using streams::ApproxReal;
using streams::Rational;

namespace {

bool accepts(const ZooShift& z, const std::string& text) {
    return z.oracle(Pattern::parse(z.space, text));
}

// independent Fibonacci factors: plain string rewriting
std::set<std::string> fib_factors(int len) {
    std::string u = "0";
    for (int i = 0; i < 24 && int(u.size()) < 4000; ++i) {
        std::string next;
        for (char c : u) next += (c == '0') ? "01" : "0";
        u = next;
    }
    std::set<std::string> out;
    for (size_t s = 0; s + size_t(len) <= u.size(); ++s)
        out.insert(u.substr(s, size_t(len)));
    return out;
}

}  // namespace

TEST_CASE("golden mean sft oracle") {
    auto gm = golden_mean();
    CHECK(accepts(gm, "0101"));
    CHECK(!accepts(gm, "110"));
    CHECK(accepts(gm, ""));  // nonempty shift
    // word counts are Fibonacci: 2, 3, 5, 8, 13, 21
    const uint64_t expect[] = {2, 3, 5, 8, 13, 21};
    for (int n = 1; n <= 6; ++n) {
        uint64_t count = 0;
        for (uint32_t v = 0; v < (1u << n); ++v) {
            std::vector<int> w(size_t(n), 0);
            for (int i = 0; i < n; ++i) w[size_t(i)] = (v >> i) & 1;
            if (gm.word_oracle(w)) ++count;
        }
        CHECK(count == expect[n - 1]);
    }
}

TEST_CASE("full shift and emptied sft") {
    auto full = full_shift({"0", "1"});
    CHECK(accepts(full, "11111"));
    CHECK(accepts(full, "010101"));

    auto sp = grid::z_binary_space();
    std::vector<Pattern> all2;
    for (const char* w : {"00", "01", "10", "11"}) all2.push_back(Pattern::word(sp, w));
    auto dead = sft(sp, all2);
    CHECK(!dead.oracle(Pattern(sp)));  // empty shift
    CHECK(!accepts(dead, "0"));
    CHECK(!accepts(dead, "00"));
}

TEST_CASE("sft oracle sees non-local death") {
    // forbidding 01 and 10 freezes the configuration; 0 and 1 both survive,
    // but any mixed word dies
    auto sp = grid::z_binary_space();
    auto frozen = sft(sp, {Pattern::word(sp, "01"), Pattern::word(sp, "10")});
    CHECK(accepts(frozen, "000"));
    CHECK(accepts(frozen, "111"));
    CHECK(!accepts(frozen, "0:0,2:1"));  // every filling of the gap dies
}

TEST_CASE("sturmian windows") {
    auto x12 = sturmian_window(ApproxReal::rational(Rational(0)),
                               ApproxReal::rational(Rational(1, 2)));
    REQUIRE(x12.has_oracle);
    CHECK(!accepts(x12, "11"));  // 2 ones > ceil(1/2 * 2) = 1
    CHECK(accepts(x12, "0101"));
    CHECK(accepts(x12, "00"));

    auto full = sturmian_window(ApproxReal::rational(Rational(0)),
                                ApproxReal::rational(Rational(1)));
    for (const char* w : {"0", "1", "11", "000", "1111"}) CHECK(accepts(full, w));
    // and its presentation never finds a forbidden word
    CHECK(full.presentation.source->ensure(16) == 0);

    auto third = sturmian_window(ApproxReal::rational(Rational(1, 3)),
                                 ApproxReal::rational(Rational(1, 3)));
    CHECK(!accepts(third, "000"));  // 0 ones < floor(1/3 * 3) = 1
    CHECK(!accepts(third, "11"));
    CHECK(accepts(third, "100100"));
}

TEST_CASE("sturmian window contains the balanced word of its rational slope") {
    for (auto [p, q] : {std::pair{1, 3}, {2, 5}, {1, 2}}) {
        auto z = sturmian_window(ApproxReal::rational(Rational(p, q)),
                                 ApproxReal::rational(Rational(p, q)));
        std::vector<int> w;
        for (int i = 0; i < 3 * q; ++i)
            w.push_back(int((i + 1) * p / q) - int(i * p / q));
        for (size_t s = 0; s < w.size(); ++s) {
            for (size_t e = s + 1; e <= w.size() && e - s <= 8; ++e) {
                std::vector<int> sub(w.begin() + long(s), w.begin() + long(e));
                CHECK(z.word_oracle(sub));
            }
        }
    }
}

TEST_CASE("fibonacci substitution shift") {
    auto fib = fibonacci();
    CHECK(!accepts(fib, "11"));
    CHECK(accepts(fib, "00"));
    CHECK(!accepts(fib, "000"));
    CHECK(accepts(fib, "0100101001001"));

    // factor counts are n + 1, checked against an independent expansion
    for (int n = 1; n <= 6; ++n) {
        const auto expect = fib_factors(n);
        CHECK(expect.size() == size_t(n + 1));
        uint64_t count = 0;
        for (uint32_t v = 0; v < (1u << n); ++v) {
            std::vector<int> w(size_t(n), 0);
            std::string s;
            for (int i = 0; i < n; ++i) {
                w[size_t(i)] = (v >> i) & 1;
                s += char('0' + ((v >> i) & 1));
            }
            const bool in = fib.word_oracle(w);
            CHECK(in == (expect.count(s) > 0));
            if (in) ++count;
        }
        CHECK(count == uint64_t(n + 1));
    }
}

TEST_CASE("constant substitution degenerates to a fixed point orbit") {
    auto z = substitution_shift({{"0", "00"}});
    CHECK(accepts(z, "000"));
    auto bad = [] { substitution_shift({{"0", "1"}, {"1", "0"}}); };
    CHECK_THROWS_AS(bad(), grid::ConfigError);  // not prolongable
}

TEST_CASE("periodic orbits") {
    auto one = periodic_orbit("1");
    CHECK(accepts(one, "111"));
    CHECK(!accepts(one, "0"));

    auto alt = periodic_orbit("01");
    CHECK(accepts(alt, "0101"));
    CHECK(accepts(alt, "1010"));
    CHECK(!accepts(alt, "00"));
    CHECK(alt.meta.per_prefix == std::vector<uint64_t>({0, 2, 2, 2}));
}

TEST_CASE("products") {
    auto gm = golden_mean();
    auto ab = full_shift({"a", "b"});
    auto prod = product_shift(gm, ab);
    REQUIRE(prod.has_oracle);
    CHECK(accepts(prod, "0a1b"));   // ("01", "ab")
    CHECK(!accepts(prod, "1a1a"));  // ("11", "aa")
    // language counts multiply: N_2 = 3 * 4 = 12
    uint64_t count = 0;
    const int a = prod.space->alphabet->size();
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j)
            if (prod.word_oracle({i, j})) ++count;
    CHECK(count == 12);

    // product with an empty shift is empty
    auto sp = grid::z_binary_space();
    std::vector<Pattern> all2;
    for (const char* w : {"00", "01", "10", "11"}) all2.push_back(Pattern::word(sp, w));
    auto dead = product_shift(gm, sft(sp, all2));
    CHECK(!dead.oracle(Pattern(dead.space)));
}

TEST_CASE("single-one shift") {
    auto so = single_one();
    CHECK(accepts(so, "0001000"));
    CHECK(!accepts(so, "10001"));
    CHECK(accepts(so, "1"));
    // the presentation lists 1 0^k 1 in order
    auto& src = *so.presentation.source;
    REQUIRE(src.ensure(3) == 3);
    CHECK(src.at(0).to_text() == "11");
    CHECK(src.at(1).to_text() == "101");
    CHECK(src.at(2).to_text() == "1001");
}

TEST_CASE("oracles are factorial and translation invariant") {
    std::mt19937 rng(41);
    std::vector<ZooShift> shifts;
    shifts.push_back(golden_mean());
    shifts.push_back(fibonacci());
    shifts.push_back(single_one());
    shifts.push_back(periodic_orbit("01"));
    shifts.push_back(sturmian_window(ApproxReal::rational(Rational(1, 4)),
                                     ApproxReal::rational(Rational(3, 4))));
    for (const auto& z : shifts) {
        for (int iter = 0; iter < 120; ++iter) {
            const int len = 1 + int(rng() % 8);
            std::vector<int> w(size_t(len), 0);
            for (auto& l : w) l = int(rng() % 2);
            const auto q = Pattern::from_letter_row(z.space, w, 0);
            if (!z.oracle(q)) continue;
            // factorial: any subpattern of an accepted pattern is accepted
            std::vector<Pattern::Cell> sub;
            for (const auto& c : q.cells())
                if (rng() % 2) sub.push_back(c);
            const Pattern p(z.space, std::move(sub));
            CHECK(z.oracle(p));
            // translation invariant
            const auto g = z.space->group->z_element(int(rng() % 7) - 3);
            CHECK(z.oracle(translate(g, q)));
        }
    }
}

TEST_CASE("consistency: co-language emissions are never oracle accepted") {
    for (const char* sel : {"golden-mean", "fibonacci", "single-one", "orbit:01"}) {
        auto z = by_selector(sel);
        streams::CoLanguage co(z.presentation, {});
        co.step(20000);
        CHECK(!co.emitted().empty());
        for (const auto& e : co.emitted()) {
            CHECK(!z.oracle(e.pattern));
        }
    }
}

TEST_CASE("registry selectors and presentation reconstruction") {
    for (const char* sel :
         {"full", "golden-mean", "fibonacci", "single-one", "orbit:01",
          "sturmian:1/4,3/4", "product:golden-mean,full:ab"}) {
        auto z = by_selector(sel);
        auto desc = z.presentation.describe();
        auto rebuilt = presentation_from_json(desc);
        CHECK(rebuilt.space->same(*z.space));
        // same forbidden prefix
        const uint64_t n = z.presentation.source->ensure(6);
        CHECK(rebuilt.source->ensure(6) == n);
        for (uint64_t i = 0; i < n; ++i)
            CHECK(rebuilt.source->at(i) == z.presentation.source->at(i));
    }
    CHECK_THROWS_AS(by_selector("nope"), grid::ConfigError);
}
