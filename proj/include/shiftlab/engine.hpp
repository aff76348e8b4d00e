#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shiftlab/properties.hpp"
#include "shiftlab/streams.hpp"

namespace shiftlab::engine {

using grid::Pattern;
using grid::SpacePtr;
using properties::Refuter;
using properties::RefuterContext;
using properties::RefuterSpec;
using streams::BudgetMeter;
using streams::CoLanguage;
using streams::Emission;
using streams::Enumeration;
using streams::ForbiddenPresentation;
using streams::ProbeOptions;
using streams::Verdict;
using json = nlohmann::ordered_json;

using PatternOracle = std::function<bool(const Pattern&)>;

struct EngineOptions {
    ProbeOptions probe;
    bool trace = false;
    uint64_t quantum = 16;
};

// One decision of "p in L(X)?" for a presentation asserted P-minimal:
// dovetails the membership semi-test (the refuter against X minus the orbit
// of [p]) and the non-membership semi-test (a co-language certificate for
// p), with equal budget shares. Resumable, so budgets can grow.
class DecisionRun {
  public:
    DecisionRun(ForbiddenPresentation base, RefuterSpec refuter, Pattern p,
                EngineOptions opts = {});

    Verdict::Outcome advance(uint64_t extra_budget);
    Verdict verdict() const;
    Verdict::Outcome outcome() const { return outcome_; }
    uint64_t spent() const;
    const json& trace() const { return trace_; }
    const Pattern& pattern() const { return pattern_; }

  private:
    ForbiddenPresentation base_;
    RefuterSpec rspec_;
    Pattern pattern_;
    EngineOptions opts_;

    std::unique_ptr<streams::Certifier> no_arm_;
    BudgetMeter no_meter_;
    bool no_stuck_ = false;
    int no_idle_ = 0;

    ForbiddenPresentation forbidden_;  // base + p
    std::unique_ptr<RefuterContext> yes_ctx_;
    std::unique_ptr<Refuter> refuter_;

    Verdict::Outcome outcome_ = Verdict::Outcome::exhausted;
    bool final_ = false;
    int stalls_ = 0;
    json certificate_;
    json trace_ = json::array();
};

Verdict decide_pattern(const ForbiddenPresentation& base, const RefuterSpec& refuter,
                       const Pattern& p, uint64_t budget, EngineOptions opts = {});

// Dovetailed decisions over the ball-supported pattern enumeration, with a
// doubling per-candidate budget schedule. Candidates may run in parallel
// workers; the report order is the candidate order either way.
struct LanguageReport {
    struct Entry {
        Pattern pattern;
        Verdict::Outcome outcome;
        uint64_t spent;
    };
    std::vector<Entry> entries;
    uint64_t budget_used = 0;
};

LanguageReport enumerate_language(const ForbiddenPresentation& base,
                                  const RefuterSpec& refuter, uint64_t budget,
                                  size_t max_candidates, int jobs = 1,
                                  EngineOptions opts = {});

// Emits a one-sided pattern p exactly when every pairing (p, q) over the
// other side's letters has been emitted by the product co-language.
class ProductCoLanguage : public Enumeration {
  public:
    ProductCoLanguage(ForbiddenPresentation product, grid::AlphabetPtr left,
                      grid::AlphabetPtr right, bool left_side,
                      ProbeOptions opts = {});

  protected:
    void run(uint64_t target) override;

  private:
    std::unique_ptr<CoLanguage> base_;
    grid::AlphabetPtr left_, right_;
    bool left_side_;
    SpacePtr side_space_;
    size_t consumed_ = 0;
    std::map<Pattern, std::set<Pattern>> pairings_;
    std::set<Pattern> done_;
};

// Smallest N <= n_max such that no pattern on ball(n), N < n <= n_max, is
// accepted by both oracles; nullopt when the largest radius still conflicts
// (a definite answer about the searched range only).
std::optional<int> disjoint_separation_radius(const PatternOracle& in_x,
                                              const PatternOracle& in_y,
                                              const SpacePtr& space, int n_max);

// The decidable superset E_Y of L(Y) ∩ L^c(X) used by the disjoint-union
// reduction; decided by finitely many oracle calls on ball-supported
// patterns. The working radius is lifted to the first conflict-free one.
class UnionEY {
  public:
    UnionEY(SpacePtr space, PatternOracle in_x, PatternOracle in_y, int radius);

    bool contains(const Pattern& p, BudgetMeter* meter = nullptr) const;
    int effective_radius() const { return radius_; }

  private:
    SpacePtr space_;
    PatternOracle in_x_, in_y_;
    int radius_;
    std::vector<Pattern> ball_patterns_;   // all patterns on ball(radius)
    std::vector<bool> alive_y_;            // [q] ∩ Y nonempty, per pattern
};

// Canonical presentation of X ∪ Y from the two membership oracles: the
// forbidden stream enumerates candidates rejected by both.
ForbiddenPresentation canonical_union_presentation(const SpacePtr& space,
                                                   const PatternOracle& in_x,
                                                   const PatternOracle& in_y,
                                                   std::string label);

// Derives an enumeration of L^c(X) from an enumeration of L^c(X ∪ Y) and
// the E_Y predicate: direct emissions, E_Y hits over the candidate stream,
// and an exhaustion closure over everything found so far.
class UnionCoLanguage : public Enumeration {
  public:
    UnionCoLanguage(ForbiddenPresentation union_pres, std::shared_ptr<UnionEY> ey,
                    ProbeOptions opts = {});

  protected:
    void run(uint64_t target) override;

  private:
    void add_forbidden(const Pattern& p);
    void emit(const Pattern& p, int radius, uint64_t prefix);

    SpacePtr space_;
    std::shared_ptr<UnionEY> ey_;
    ProbeOptions opts_;
    std::unique_ptr<CoLanguage> base_;
    uint64_t base_seen_ = 0;
    grid::CandidateStream ey_candidates_;
    size_t ey_cursor_ = 0;
    BudgetMeter side_meter_;

    std::shared_ptr<std::vector<Pattern>> derived_;
    ForbiddenPresentation derived_pres_;
    std::unique_ptr<CoLanguage> closure_;
    uint64_t closure_seen_ = 0;
    std::set<Pattern> known_;
};

}  // namespace shiftlab::engine
