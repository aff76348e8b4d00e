#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/streams.hpp"

namespace shiftlab::zoo {

using grid::Pattern;
using grid::SpacePtr;
using streams::ApproxReal;
using streams::ForbiddenPresentation;
using streams::Rational;
using json = nlohmann::ordered_json;

struct Metadata {
    std::vector<std::string> tags;
    std::vector<uint64_t> per_prefix;  // Per_i for i = 1..k, when known
    std::string entropy;               // informal description
    std::vector<std::string> distinguishing;
};

// A concrete shift: a presentation plus (usually) an exact membership
// oracle serving as ground truth. Oracles are translation invariant and
// factorial; both properties are tested, not assumed.
struct ZooShift {
    std::string label;
    SpacePtr space;
    ForbiddenPresentation presentation;
    bool has_oracle = false;
    std::function<bool(const Pattern&)> oracle;  // [p] ∩ X nonempty?
    std::function<bool(const std::vector<int>&)> word_oracle;  // fast path, Z
    Metadata meta;
};

ZooShift full_shift(const std::vector<std::string>& letters);
// Z SFT with bounded-window forbidden patterns; oracle via De Bruijn graph
// reachability (bi-infinite extendability).
ZooShift sft(const SpacePtr& space, std::vector<Pattern> forbidden);
// X_[alpha, beta]: forbids words with too few or too many ones. The oracle
// is exact only when both endpoints are exact rationals.
ZooShift sturmian_window(const ApproxReal& alpha_lo, const ApproxReal& beta_hi);
// Primitive substitution with a prolongable first letter; the oracle reads
// factors off the stabilized factor sets of sigma^m(a0).
ZooShift substitution_shift(const std::vector<std::pair<std::string, std::string>>& rules);
ZooShift periodic_orbit(const std::string& word);
ZooShift product_shift(const ZooShift& x, const ZooShift& y);
ZooShift single_one();

ZooShift golden_mean();
ZooShift fibonacci();

// Registry selectors: full | full:<letters> | golden-mean | fibonacci |
// single-one | orbit:<word> | sturmian:<alo>,<bhi> | product:<a>,<b> |
// sft:<file.json>
ZooShift by_selector(const std::string& selector);
std::vector<std::string> registry_names();

// Rebuild a presentation from its describe() JSON (replay path).
ForbiddenPresentation presentation_from_json(const json& j);

// The certified reason a Sturmian source emitted a word.
struct SturmianViolation {
    int length = 0;
    int ones = 0;
    bool too_many = false;  // otherwise too few
};

class SturmianSource final : public streams::ForbiddenSource {
  public:
    SturmianSource(SpacePtr space, ApproxReal alpha_lo, ApproxReal beta_hi);

    SpacePtr space() const override { return space_; }
    bool finite() const override { return false; }
    uint64_t ensure(uint64_t want) override;
    const Pattern& at(uint64_t i) const override { return items_.at(i); }
    json describe() const override;
    bool kills(const Pattern& q, uint64_t t) override;
    bool kills_row(const std::vector<int>& row, long long start, uint64_t t) override;

    const std::vector<SturmianViolation>& violations() const { return violations_; }

  private:
    void round(int r);

    SpacePtr space_;
    ApproxReal alpha_lo_, beta_hi_;
    int next_round_ = 1;
    std::vector<uint64_t> per_round_total_;  // cumulative items after round r
    std::vector<Pattern> items_;
    std::vector<SturmianViolation> violations_;
    std::map<std::vector<int>, uint64_t> index_;
};

// Gap-filling adapter: [p] ∩ X is nonempty iff some filling of the hull of
// p is in the word language.
std::function<bool(const Pattern&)> pattern_oracle_from_words(
    const SpacePtr& space, std::function<bool(const std::vector<int>&)> words,
    bool nonempty);

}  // namespace shiftlab::zoo
