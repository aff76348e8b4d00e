#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "shiftlab/grid.hpp"
#include "shiftlab/kernels/wordscan.hpp"

namespace shiftlab::streams {

using grid::Pattern;
using grid::SpacePtr;
using json = nlohmann::ordered_json;

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational parse_rational(std::string_view text);  // "p/q" or "p"
std::string print_rational(const Rational& r);
BigInt floor_div(const BigInt& num, const BigInt& den);
BigInt rational_floor(const Rational& r);
BigInt rational_ceil(const Rational& r);

// Exact sign of log2(N)/n - q, decided by comparing N^b against 2^(a*n).
int compare_log_ratio(uint64_t N, uint64_t n, const Rational& q);

// One budget unit is one pattern-containment test: a filling examined by a
// flat exhaustion, or a node visited by a pruned one.
class BudgetMeter {
  public:
    void charge(uint64_t units) { spent_ += units; }
    uint64_t spent() const { return spent_; }

  private:
    uint64_t spent_ = 0;
};

// --- directed rational approximations ---------------------------------------

// A real given by rational bounds: `left` streams lower bounds, `right`
// upper bounds, `two_sided` enclosing intervals with widths -> 0.
class ApproxReal {
  public:
    enum class Direction { left, right, two_sided };

    static ApproxReal rational(const Rational& r);
    static ApproxReal golden_ratio_conjugate();  // 1/phi via CF convergents
    static ApproxReal log_golden_mean();         // left stream of log2(phi)
    static ApproxReal by_name(std::string_view name);  // CLI selector

    Direction direction() const { return direction_; }
    const std::optional<Rational>& exact() const { return exact_; }
    // best bounds after consuming `steps` stream items; monotone in steps
    std::optional<Rational> lower(size_t steps) const;
    std::optional<Rational> upper(size_t steps) const;
    json describe() const;

  private:
    struct State {
        std::vector<std::optional<Rational>> lows, highs;
    };
    Direction direction_;
    std::optional<Rational> exact_;
    std::string name_;
    std::function<void(size_t, std::optional<Rational>&, std::optional<Rational>&)>
        gen_;
    std::shared_ptr<State> state_ = std::make_shared<State>();

    void materialize(size_t steps) const;
};

// --- forbidden-pattern sources ----------------------------------------------

// A deterministic, index-addressable enumeration of forbidden patterns.
// ensure(t) materializes a prefix and returns its effective length n_t,
// a pure function of t (bounded search keeps sources with thin streams
// from stalling). The SFT flag marks finite lists.
class ForbiddenSource {
  public:
    virtual ~ForbiddenSource() = default;

    virtual SpacePtr space() const = 0;
    virtual bool finite() const = 0;
    virtual uint64_t ensure(uint64_t want) = 0;
    virtual const Pattern& at(uint64_t i) const = 0;
    virtual json describe() const = 0;

    // Does q contain an occurrence of one of the first ensure(t) patterns?
    virtual bool kills(const Pattern& q, uint64_t t);
    // Row form of the same test for Z probes: row[i] is the letter at
    // position start+i, -1 marks a cell outside the support.
    virtual bool kills_row(const std::vector<int>& row, long long start, uint64_t t);
    // Packed prefix for the flat kernels; false when not representable.
    virtual bool packed(uint64_t t, std::vector<kernels::PackedWord>& out);
};

using SourcePtr = std::shared_ptr<ForbiddenSource>;

struct ForbiddenPresentation {
    SpacePtr space;
    SourcePtr source;
    std::string label;

    bool is_sft() const { return source->finite(); }
    json describe() const;
};

ForbiddenPresentation make_sft(const SpacePtr& space, std::vector<Pattern> forbidden,
                               std::string label);
// Length-lex enumeration of every word the oracle rejects (G = Z).
ForbiddenPresentation make_rejected_words(const SpacePtr& space,
                                          std::function<bool(const std::vector<int>&)>
                                              word_in_language,
                                          std::string label, json description);
// X' = X minus the orbit of [p]: p first, then the base stream.
ForbiddenPresentation forbid_pattern(const ForbiddenPresentation& base,
                                     const Pattern& p);
ForbiddenPresentation forbid_patterns(const ForbiddenPresentation& base,
                                      const std::vector<Pattern>& ps);

// --- verdicts ----------------------------------------------------------------

struct Verdict {
    enum class Outcome { yes, no, exhausted };
    Outcome outcome = Outcome::exhausted;
    json certificate;  // replayable witness
    uint64_t budget_used = 0;

    static const char* name(Outcome o);
};

// --- the canonical exhaustion probe -------------------------------------------

struct ProbeOptions {
    uint64_t extension_cap = uint64_t{1} << 22;  // flat fillings per probe
    static uint64_t default_cap_from_env();
};

// Resumable exhaustion of one (pattern, radius, prefix) triple: certified
// when every extension of the pattern to supp ∪ ball(radius) contains one
// of the first `prefix` forbidden patterns. Flat scan when the filling
// count is small, pruned depth-first search otherwise (same outcome; the
// charge is fillings resp. nodes examined).
class Probe {
  public:
    enum class Status { running, certified, survivor, capped };

    Probe(const ForbiddenPresentation& pres, const Pattern& p, int radius,
          uint64_t prefix, const ProbeOptions& opts);
    Status advance(BudgetMeter& meter, uint64_t unit_limit);
    uint64_t effective_prefix() const { return prefix_; }

    static constexpr uint64_t kFlatLimit = uint64_t{1} << 16;
    static constexpr uint64_t kDfsLimit = uint64_t{1} << 10;

  private:
    Status run_flat(BudgetMeter& meter, uint64_t unit_limit);
    Status run_dfs(BudgetMeter& meter, uint64_t unit_limit);
    bool partial_dies() const;

    const ForbiddenPresentation& pres_;
    Pattern pattern_;
    uint64_t prefix_ = 0;
    uint64_t count_ = 0;
    bool flat_ = true;
    bool capped_ = false;

    // Z row mode: the hull row carries letters, -1 for cells outside the
    // probe support or not yet assigned; free cells listed by position.
    bool z_mode_ = false;
    long long row_start_ = 0;
    std::vector<int> row_;
    std::vector<size_t> free_pos_;  // indices into row_, ascending

    // generic mode
    grid::ExtensionFrame frame_;

    // flat state
    uint64_t cursor_ = 0;
    bool packed_ok_ = false;
    std::vector<kernels::PackedWord> packed_;
    kernels::ScanFrame scan_;

    // dfs state
    int pos_ = -1;
    std::vector<int> digits_;
    std::vector<int> assigned_;  // letter per free cell, -1 when unset
};

// Deterministic probing schedule shared by the stream and targeted probers.
struct Schedule {
    static uint64_t prefix_at(int pass) { return 8ull * uint64_t(pass + 1); }
    static size_t candidates_at(int pass) { return 16ull * size_t(pass + 1); }
};

// Per-pattern probing state under the schedule: radii up to the pass index,
// prefixes growing linearly, failed (radius, prefix) pairs never retried.
class PatternProber {
  public:
    PatternProber(const ForbiddenPresentation& pres, Pattern p,
                  const ProbeOptions& opts);

    enum class Status { running, certified };
    // Probes under the schedule for passes <= `pass`; stops early when the
    // meter reaches `target`.
    Status advance(BudgetMeter& meter, uint64_t target, int pass);
    bool certified() const { return cert_.has_value(); }
    const std::optional<std::pair<int, uint64_t>>& certificate() const {
        return cert_;
    }
    const Pattern& pattern() const { return pattern_; }

  private:
    const ForbiddenPresentation& pres_;
    Pattern pattern_;
    ProbeOptions opts_;
    std::optional<std::pair<int, uint64_t>> cert_;  // (radius, prefix)
    std::vector<uint64_t> fail_prefix_;             // per radius
    std::optional<int> capped_radius_;
    std::unique_ptr<Probe> active_;
    int active_radius_ = 0;
    int next_radius_ = 0;
    int pass_done_ = -1;
};

// Targeted semi-decision: halts (certifies) exactly when p is in the
// co-language, given unbounded budget.
class Certifier {
  public:
    Certifier(ForbiddenPresentation pres, Pattern p, ProbeOptions opts);
    // Advance until `target` total units on the shared meter.
    std::optional<std::pair<int, uint64_t>> advance(BudgetMeter& meter,
                                                    uint64_t target);
    bool certified() const { return prober_ && prober_->certified(); }
    const Pattern& pattern() const { return pattern_; }

  private:
    ForbiddenPresentation pres_;
    Pattern pattern_;
    ProbeOptions opts_;
    std::unique_ptr<PatternProber> prober_;
    int pass_ = 0;
};

// --- budgeted enumerations -----------------------------------------------------

struct Emission {
    Pattern pattern;
    int radius = 0;
    uint64_t prefix_len = 0;
    uint64_t units_at_emit = 0;
};

// Deterministic stateful producer: step(units) advances the underlying
// process; emissions are never retracted and depend only on cumulative
// budget, so raising the budget only appends.
class Enumeration {
  public:
    virtual ~Enumeration() = default;
    void step(uint64_t units);
    const std::vector<Emission>& emitted() const { return emissions_; }
    uint64_t spent() const { return meter_.spent(); }
    json trace() const;

  protected:
    virtual void run(uint64_t target) = 0;
    BudgetMeter meter_;
    std::vector<Emission> emissions_;
};

// The co-language derivation: cycles candidates (words interleaved with
// ball subsets), probing each under the schedule; emits a candidate when a
// probe certifies it. Sound for any presentation; complete in the limit by
// compactness.
class CoLanguage : public Enumeration {
  public:
    CoLanguage(ForbiddenPresentation pres, ProbeOptions opts);
    const ForbiddenPresentation& presentation() const { return pres_; }

  protected:
    void run(uint64_t target) override;

  private:
    ForbiddenPresentation pres_;
    ProbeOptions opts_;
    grid::CandidateStream candidates_;
    std::vector<std::unique_ptr<PatternProber>> probers_;
    int pass_ = 0;
    size_t cand_idx_ = 0;
};

// Yes with certificate (n, t) when every pattern with support ball(n) is
// certified by prefix t; never No (emptiness is only semi-decidable).
Verdict emptiness_certificate(const ForbiddenPresentation& pres, uint64_t budget,
                              const ProbeOptions& opts = {});

// Replay helpers: verify a recorded (pattern, radius, prefix) certificate by
// re-running the canonical probe without a budget limit.
bool verify_emission(const ForbiddenPresentation& pres, const Pattern& p,
                     int radius, uint64_t prefix, const ProbeOptions& opts = {});

json pattern_json(const Pattern& p);
Pattern pattern_from_json(const SpacePtr& space, const json& j);

}  // namespace shiftlab::streams
