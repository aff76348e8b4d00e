#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/streams.hpp"

namespace shiftlab::properties {

using grid::Pattern;
using grid::SpacePtr;
using streams::ApproxReal;
using streams::BudgetMeter;
using streams::Certifier;
using streams::CoLanguage;
using streams::ForbiddenPresentation;
using streams::ProbeOptions;
using json = nlohmann::ordered_json;

// Everything a refuter may consume: the presentation, a co-language stream
// over it (created on demand), and a meter for the refuter's own
// containment tests. Total spend is the sum of both meters.
struct RefuterContext {
    ForbiddenPresentation pres;
    ProbeOptions opts;
    std::unique_ptr<CoLanguage> stream;
    BudgetMeter meter;

    explicit RefuterContext(ForbiddenPresentation p, ProbeOptions o = {})
        : pres(std::move(p)), opts(o) {}

    CoLanguage& ensure_stream() {
        if (!stream) stream = std::make_unique<CoLanguage>(pres, opts);
        return *stream;
    }
    uint64_t total_spent() const {
        return meter.spent() + (stream ? stream->spent() : 0);
    }
};

struct Refutation {
    json certificate;
};

// A budgeted realization of a Pi-0-1 property's halting condition: fed a
// co-language enumeration of Y, it fires exactly when Y is outside the
// property (under unbounded budget and a complete stream). Every refuter
// also runs an emptiness arm, since the empty shift satisfies no property.
class Refuter {
  public:
    virtual ~Refuter() = default;
    virtual const std::string& label() const { return label_; }
    virtual json describe() const = 0;

    // Advance until ctx.total_spent() >= target or a refutation fires.
    std::optional<Refutation> advance(RefuterContext& ctx, uint64_t target);
    bool stuck() const { return stuck_; }

  protected:
    explicit Refuter(std::string label) : label_(std::move(label)) {}
    // One bounded slice of the specific criterion; returns the refutation
    // detail when it fires.
    virtual std::optional<json> step_specific(RefuterContext& ctx,
                                              uint64_t target) = 0;

    std::string label_;

  private:
    std::unique_ptr<Certifier> emptiness_;
    bool stuck_ = false;
    int idle_rounds_ = 0;
};

// Construction specs (mirrors the CLI property selectors).
struct RefuterSpec {
    std::string name;  // nonempty | entropy | periods | contains | cylinder | intersect
    json params;

    json to_json() const { return json{{"name", name}, {"params", params}}; }
    static RefuterSpec from_json(const json& j);
};

std::unique_ptr<Refuter> make_refuter(const SpacePtr& space, const RefuterSpec& spec);

// Direct constructors.
std::unique_ptr<Refuter> nonempty_refuter();
std::unique_ptr<Refuter> entropy_at_least_refuter(ApproxReal q);
std::unique_ptr<Refuter> periods_at_least_refuter(const SpacePtr& space,
                                                  std::vector<uint64_t> ref);
std::unique_ptr<Refuter> contains_patterns_refuter(std::vector<Pattern> ps);
std::unique_ptr<Refuter> cylinder_refuter(Pattern p);
std::unique_ptr<Refuter> intersect_refuters(std::unique_ptr<Refuter> a,
                                            std::unique_ptr<Refuter> b);

// Primitive necklace representatives (lex-least rotations) of length <= max
// over `letters` letters, used for periodic bookkeeping.
std::vector<std::vector<int>> primitive_necklaces(int letters, int max_len);
// Number of periodic points with orbit size <= i in the full shift.
uint64_t full_shift_periodic_count(int letters, int i);

// Re-checks a refutation certificate: every recorded emission is re-proved
// and the fold re-run. Budget free.
bool verify_refutation(const ForbiddenPresentation& pres, const json& certificate,
                       const ProbeOptions& opts = {});

}  // namespace shiftlab::properties
