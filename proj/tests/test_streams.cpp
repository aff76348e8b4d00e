#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "shiftlab/streams.hpp"

using namespace shiftlab;
using namespace shiftlab::streams;
using grid::Pattern;

namespace {

ForbiddenPresentation golden_mean() {
    auto sp = grid::z_binary_space();
    return make_sft(sp, {Pattern::word(sp, "11")}, "golden-mean");
}

bool emits(const std::vector<Emission>& es, const Pattern& p) {
    for (const auto& e : es)
        if (e.pattern == p) return true;
    return false;
}

}  // namespace

TEST_CASE("compare_log_ratio decides exactly") {
    CHECK(compare_log_ratio(4, 2, Rational(1)) == 0);
    CHECK(compare_log_ratio(3, 1, Rational(3, 2)) > 0);  // 9 > 8
    CHECK(compare_log_ratio(2, 2, Rational(1, 2)) == 0);
    CHECK(compare_log_ratio(1, 5, Rational(0)) == 0);
    CHECK(compare_log_ratio(1, 5, Rational(1, 100)) < 0);

    // independent big-integer oracle for the large case
    const BigInt lhs = boost::multiprecision::pow(BigInt(2584), 10);
    const BigInt rhs = BigInt(1) << (7 * 16);
    const int expect = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    CHECK(compare_log_ratio(2584, 16, Rational(7, 10)) == expect);
    CHECK(expect > 0);
}

TEST_CASE("rational text round trip and floor/ceil") {
    CHECK(print_rational(parse_rational("3/5")) == "3/5");
    CHECK(print_rational(parse_rational("7")) == "7");
    CHECK(rational_floor(Rational(7, 2)) == 3);
    CHECK(rational_ceil(Rational(7, 2)) == 4);
    CHECK(rational_floor(Rational(-1, 2)) == -1);
    CHECK(rational_ceil(Rational(-1, 2)) == 0);
    CHECK(rational_floor(Rational(4)) == 4);
}

TEST_CASE("builtin reals stream directed bounds") {
    auto third = ApproxReal::rational(Rational(1, 3));
    CHECK(*third.lower(1) == Rational(1, 3));
    CHECK(*third.upper(5) == Rational(1, 3));
    CHECK(third.exact().has_value());

    auto phi = ApproxReal::golden_ratio_conjugate();
    CHECK(*phi.lower(1) == Rational(1, 2));
    CHECK(*phi.upper(2) == Rational(2, 3));
    CHECK(*phi.lower(3) == Rational(3, 5));
    CHECK(*phi.upper(4) == Rational(5, 8));
    // enclosing and shrinking (upper bounds start at step 2)
    for (size_t i = 3; i <= 12; ++i) {
        CHECK(*phi.lower(i) < *phi.upper(i));
        CHECK(*phi.lower(i) >= *phi.lower(i - 1));
        CHECK(*phi.upper(i) <= *phi.upper(i - 1));
    }

    auto lgm = ApproxReal::log_golden_mean();
    std::optional<Rational> prev;
    for (size_t i = 1; i <= 24; ++i) {
        auto lo = lgm.lower(i);
        REQUIRE(lo.has_value());
        if (prev) CHECK(*lo >= *prev);
        CHECK(*lo < Rational(7, 10));
        prev = lo;
    }
    // the stream actually climbs toward log2(phi) ~ 0.694
    CHECK(*prev > Rational(6, 10));
}

TEST_CASE("probe agrees with the materialized-extensions oracle") {
    auto pres = golden_mean();
    auto sp = pres.space;
    std::mt19937 rng(5);
    for (int iter = 0; iter < 60; ++iter) {
        const int len = 1 + int(rng() % 4);
        std::string w;
        for (int i = 0; i < len; ++i) w += char('0' + rng() % 2);
        const auto p = Pattern::word(sp, w);
        for (int radius = 0; radius <= 2; ++radius) {
            const uint64_t prefix = 1;
            bool oracle = true;
            for (const auto& e : grid::extensions(p, radius, 1 << 20))
                oracle = oracle && pres.source->kills(e, prefix);
            CHECK(verify_emission(pres, p, radius, prefix) == oracle);
        }
    }
}

TEST_CASE("co-language of the golden mean emits 11 with certificate (0,1)") {
    CoLanguage co(golden_mean(), {});
    co.step(20000);
    auto sp = grid::z_binary_space();
    const auto w11 = Pattern::word(sp, "11");
    REQUIRE(emits(co.emitted(), w11));
    for (const auto& e : co.emitted()) {
        if (e.pattern == w11) {
            CHECK(e.radius == 0);
            CHECK(e.prefix_len == 1);
        }
        // soundness at desk scale: no emitted word avoids 11 entirely unless
        // forced by extensions; spot check emissions that are words
        if (auto letters = e.pattern.word_letters()) {
            bool has11 = false;
            for (size_t i = 0; i + 1 < letters->size(); ++i)
                has11 = has11 || ((*letters)[i] == 1 && (*letters)[i + 1] == 1);
            if (!has11) {
                // must be certified by exhaustion, so re-verify
                CHECK(verify_emission(golden_mean(), e.pattern, e.radius,
                                      e.prefix_len));
            }
        }
    }
}

TEST_CASE("gap pattern forced by {01,10} is emitted") {
    auto sp = grid::z_binary_space();
    auto pres = make_sft(
        sp, {Pattern::word(sp, "01"), Pattern::word(sp, "10")}, "freeze");
    // derived oracle: both length-3 fillings of {0->0, 2->1} die
    const auto gap = Pattern::parse(sp, "0:0,2:1");
    for (const auto& e : grid::extensions(gap, 1, 1 << 10)) {
        CHECK(pres.source->kills(e, 2));
    }
    CoLanguage co(pres, {});
    co.step(50000);
    CHECK(emits(co.emitted(), gap));
}

TEST_CASE("forbid_pattern presents the subshift minus an orbit") {
    auto sp = grid::z_binary_space();
    // full shift minus [1]: every word containing 1 is certified
    auto full = make_sft(sp, {}, "full");
    auto no_one = forbid_pattern(full, Pattern::word(sp, "1"));
    CHECK(verify_emission(no_one, Pattern::word(sp, "1"), 0, 1));
    CHECK(verify_emission(no_one, Pattern::word(sp, "010"), 0, 1));
    CHECK(!verify_emission(no_one, Pattern::word(sp, "000"), 2, 1));

    // forbidding an already-forbidden pattern changes nothing up to length 4
    auto gm = golden_mean();
    auto gm2 = forbid_pattern(gm, Pattern::word(sp, "11"));
    for (uint32_t v = 0; v < (1u << 4); ++v) {
        std::string w;
        for (int i = 0; i < 4; ++i) w += char('0' + ((v >> i) & 1));
        const auto p = Pattern::word(sp, w);
        CHECK(verify_emission(gm, p, 0, 1) == verify_emission(gm2, p, 0, 2));
    }

    // golden mean + forbid "0" presents the empty shift
    auto emptied = forbid_pattern(gm, Pattern::word(sp, "0"));
    const auto v = emptiness_certificate(emptied, 200000);
    CHECK(v.outcome == Verdict::Outcome::yes);
}

TEST_CASE("emptiness certificates") {
    auto sp = grid::z_binary_space();
    auto both = make_sft(sp, {Pattern::word(sp, "0"), Pattern::word(sp, "1")}, "none");
    auto v0 = emptiness_certificate(both, 10000);
    CHECK(v0.outcome == Verdict::Outcome::yes);
    CHECK(v0.certificate["radius"] == 0);

    std::vector<Pattern> len2;
    for (const char* w : {"00", "01", "10", "11"}) len2.push_back(Pattern::word(sp, w));
    auto v1 = emptiness_certificate(make_sft(sp, len2, "len2"), 10000);
    CHECK(v1.outcome == Verdict::Outcome::yes);

    auto v2 = emptiness_certificate(golden_mean(), 20000);
    CHECK(v2.outcome == Verdict::Outcome::exhausted);
    CHECK(v2.budget_used >= 20000);
}

TEST_CASE("budget monotonicity: chunked runs agree as prefixes") {
    auto mk = [] { return CoLanguage(golden_mean(), ProbeOptions{}); };
    auto a = mk();
    auto b = mk();
    a.step(30000);
    for (int i = 0; i < 30; ++i) b.step(1000);
    REQUIRE(a.emitted().size() == b.emitted().size());
    for (size_t i = 0; i < a.emitted().size(); ++i) {
        CHECK(a.emitted()[i].pattern == b.emitted()[i].pattern);
        CHECK(a.emitted()[i].prefix_len == b.emitted()[i].prefix_len);
        CHECK(a.emitted()[i].units_at_emit == b.emitted()[i].units_at_emit);
    }
    // raising the budget only appends
    auto c = mk();
    c.step(10000);
    const size_t early = c.emitted().size();
    c.step(20000);
    CHECK(c.emitted().size() >= early);
    for (size_t i = 0; i < early; ++i)
        CHECK(c.emitted()[i].pattern == a.emitted()[i].pattern);
}

TEST_CASE("certificate replay reproduces every emission and rejects tampering") {
    CoLanguage co(golden_mean(), {});
    co.step(30000);
    REQUIRE(!co.emitted().empty());
    for (const auto& e : co.emitted()) {
        CHECK(verify_emission(golden_mean(), e.pattern, e.radius, e.prefix_len));
    }
    // tamper: prefix 0 cannot certify anything
    const auto& first = co.emitted().front();
    CHECK(!verify_emission(golden_mean(), first.pattern, first.radius, 0));
}

TEST_CASE("SFT agreement: certification matches local admissibility to length 8") {
    // golden mean is a nearest-neighbor SFT whose language is exactly the
    // 11-free words (padding with zeros always extends), so the independent
    // oracle is a substring check.
    auto pres = golden_mean();
    auto sp = pres.space;
    for (int len = 1; len <= 8; ++len) {
        for (uint32_t v = 0; v < (1u << len); ++v) {
            std::string w;
            for (int i = 0; i < len; ++i) w += char('0' + ((v >> i) & 1));
            const bool rejected = w.find("11") != std::string::npos;
            BudgetMeter meter;
            Certifier cert(pres, Pattern::word(sp, w), {});
            const auto res = cert.advance(meter, 4000);
            CHECK(res.has_value() == rejected);
        }
    }
}

TEST_CASE("single-unit stepping matches a one-shot run") {
    auto a = CoLanguage(golden_mean(), ProbeOptions{});
    auto b = CoLanguage(golden_mean(), ProbeOptions{});
    a.step(3000);
    for (int i = 0; i < 3000; ++i) b.step(1);
    CHECK(a.spent() == b.spent());
    REQUIRE(a.emitted().size() == b.emitted().size());
    for (size_t i = 0; i < a.emitted().size(); ++i)
        CHECK(a.emitted()[i].units_at_emit == b.emitted()[i].units_at_emit);
}
