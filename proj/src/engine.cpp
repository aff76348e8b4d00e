#include "shiftlab/engine.hpp"

#include <algorithm>
#include <future>

namespace shiftlab::engine {

using grid::ConfigError;
using grid::Family;
using grid::GroupElement;

namespace {

uint64_t pow_u64(uint64_t base, size_t exp, uint64_t guard) {
    uint64_t out = 1;
    for (size_t i = 0; i < exp; ++i) {
        if (out > guard / base) throw ConfigError("support too large for a lift count");
        out *= base;
    }
    return out;
}

// all patterns with support exactly ball(n), in assignment order
std::vector<Pattern> ball_patterns(const SpacePtr& space, int n) {
    const auto& ball = space->group->ball(n);
    const uint64_t base = uint64_t(space->alphabet->size());
    const uint64_t count = pow_u64(base, ball.size(), uint64_t{1} << 22);
    std::vector<Pattern> out;
    out.reserve(count);
    for (uint64_t v = 0; v < count; ++v) {
        std::vector<Pattern::Cell> cells;
        uint64_t rest = v;
        for (size_t i = 0; i < ball.size(); ++i) {
            cells.push_back({ball[i], int(rest % base)});
            rest /= base;
        }
        out.push_back(Pattern(space, std::move(cells)));
    }
    return out;
}

}  // namespace

// --- DecisionRun ----------------------------------------------------------------

DecisionRun::DecisionRun(ForbiddenPresentation base, RefuterSpec refuter, Pattern p,
                         EngineOptions opts)
    : base_(std::move(base)),
      rspec_(std::move(refuter)),
      pattern_(std::move(p)),
      opts_(opts),
      forbidden_(streams::forbid_pattern(base_, pattern_)) {
    no_arm_ = std::make_unique<streams::Certifier>(base_, pattern_, opts_.probe);
    yes_ctx_ = std::make_unique<RefuterContext>(forbidden_, opts_.probe);
    refuter_ = properties::make_refuter(base_.space, rspec_);
}

uint64_t DecisionRun::spent() const {
    return no_meter_.spent() + yes_ctx_->total_spent();
}

Verdict::Outcome DecisionRun::advance(uint64_t extra_budget) {
    if (final_) return outcome_;
    const uint64_t target = spent() + extra_budget;
    size_t round = 0;
    while (spent() < target && !final_) {
        const uint64_t before = spent();
        // non-membership arm: a co-language certificate for p itself
        if (!no_stuck_) {
            const uint64_t slice = std::min<uint64_t>(opts_.quantum, target - spent());
            const uint64_t m_before = no_meter_.spent();
            if (auto cert = no_arm_->advance(no_meter_, m_before + slice)) {
                outcome_ = Verdict::Outcome::no;
                certificate_ = json{{"kind", "colanguage"},
                                    {"pattern", pattern_.to_text()},
                                    {"radius", cert->first},
                                    {"prefixLen", cert->second},
                                    {"presentation", base_.describe()}};
                final_ = true;
                break;
            }
            if (no_meter_.spent() == m_before) {
                if (++no_idle_ >= 3) no_stuck_ = true;
            } else {
                no_idle_ = 0;
            }
        }
        if (spent() >= target) break;
        // membership arm: refute X' = X minus the orbit of [p]
        if (!refuter_->stuck()) {
            const uint64_t slice = std::min<uint64_t>(opts_.quantum, target - spent());
            if (auto r = refuter_->advance(*yes_ctx_, yes_ctx_->total_spent() + slice)) {
                outcome_ = Verdict::Outcome::yes;
                certificate_ = r->certificate;
                certificate_["presentation"] = forbidden_.describe();
                final_ = true;
                break;
            }
        }
        if (no_stuck_ && refuter_->stuck()) {
            final_ = true;  // nothing can ever resolve
            break;
        }
        if (opts_.trace && (round < 32 || round % 256 == 0) && trace_.size() < 2048) {
            trace_.push_back(json{{"round", round},
                                  {"noSpent", no_meter_.spent()},
                                  {"yesSpent", yes_ctx_->total_spent()}});
        }
        ++round;
        if (spent() == before) {
            if (++stalls_ >= 2) final_ = true;  // nothing can make progress
            break;
        }
        stalls_ = 0;
    }
    if (opts_.trace && final_) {
        trace_.push_back(json{{"event", "resolved"},
                              {"verdict", Verdict::name(outcome_)},
                              {"noSpent", no_meter_.spent()},
                              {"yesSpent", yes_ctx_->total_spent()}});
    }
    return outcome_;
}

Verdict DecisionRun::verdict() const {
    Verdict v;
    v.outcome = outcome_;
    v.certificate = certificate_;
    v.budget_used = spent();
    return v;
}

Verdict decide_pattern(const ForbiddenPresentation& base, const RefuterSpec& refuter,
                       const Pattern& p, uint64_t budget, EngineOptions opts) {
    DecisionRun run(base, refuter, p, opts);
    run.advance(budget);
    return run.verdict();
}

// --- enumerate_language ------------------------------------------------------------

LanguageReport enumerate_language(const ForbiddenPresentation& base,
                                  const RefuterSpec& refuter, uint64_t budget,
                                  size_t max_candidates, int jobs,
                                  EngineOptions opts) {
    LanguageReport report;
    // stateful presentations materialize lazily and are not shareable
    // across workers; only finite lists run in parallel
    if (!base.is_sft()) jobs = 1;
    std::vector<std::unique_ptr<DecisionRun>> runs;
    grid::PatternEnumerator en(base.space);
    uint64_t remaining = budget;

    for (int round = 0; remaining > 0; ++round) {
        const size_t window =
            std::min<size_t>(max_candidates, size_t(8) << std::min(round, 20));
        while (runs.size() < window)
            runs.push_back(
                std::make_unique<DecisionRun>(base, refuter, en.next(), opts));
        const uint64_t cap = uint64_t(256) << std::min(round, 30);

        // allocate this round's budget serially, then advance
        std::vector<std::pair<DecisionRun*, uint64_t>> work;
        for (auto& run : runs) {
            if (run->outcome() != Verdict::Outcome::exhausted) continue;
            if (run->spent() >= cap) continue;
            const uint64_t alloc = std::min<uint64_t>(cap - run->spent(), remaining);
            if (alloc == 0) continue;
            remaining -= alloc;
            work.push_back({run.get(), alloc});
        }
        if (work.empty() && runs.size() == max_candidates) break;
        if (jobs > 1 && work.size() > 1) {
            std::vector<std::future<void>> futs;
            const size_t stride = size_t(jobs);
            for (size_t w = 0; w < std::min<size_t>(stride, work.size()); ++w) {
                futs.push_back(std::async(std::launch::async, [&work, w, stride] {
                    for (size_t i = w; i < work.size(); i += stride)
                        work[i].first->advance(work[i].second);
                }));
            }
            for (auto& f : futs) f.get();
        } else {
            for (auto& [run, alloc] : work) run->advance(alloc);
        }
        if (remaining == 0) break;
    }

    for (auto& run : runs) {
        report.entries.push_back(
            {run->pattern(), run->outcome(), run->spent()});
        report.budget_used += run->spent();
    }
    return report;
}

// --- product reduction ---------------------------------------------------------------

ProductCoLanguage::ProductCoLanguage(ForbiddenPresentation product,
                                     grid::AlphabetPtr left, grid::AlphabetPtr right,
                                     bool left_side, ProbeOptions opts)
    : left_(std::move(left)), right_(std::move(right)), left_side_(left_side) {
    if (product.space->alphabet->size() != left_->size() * right_->size())
        throw ConfigError("product alphabet does not match the factor alphabets");
    side_space_ = grid::make_space(product.space->group,
                                   left_side_ ? left_ : right_);
    base_ = std::make_unique<CoLanguage>(std::move(product), opts);
}

void ProductCoLanguage::run(uint64_t target) {
    const int rsize = right_->size();
    auto split = [&](const Pattern& pair, bool left_part) {
        std::vector<Pattern::Cell> cells;
        for (const auto& c : pair.cells())
            cells.push_back({c.key, left_part ? c.letter / rsize : c.letter % rsize});
        auto space = left_part ? grid::make_space(base_->presentation().space->group,
                                                  left_)
                               : grid::make_space(base_->presentation().space->group,
                                                  right_);
        return Pattern(space, std::move(cells));
    };
    while (meter_.spent() < target) {
        const uint64_t before = base_->spent();
        base_->step(std::min<uint64_t>(64, target - meter_.spent()));
        meter_.charge(base_->spent() - before);
        const auto& es = base_->emitted();
        while (consumed_ < es.size()) {
            const auto& e = es[consumed_++];
            meter_.charge(1);
            Pattern key = split(e.pattern, left_side_);
            if (done_.count(key)) continue;
            Pattern other = split(e.pattern, !left_side_);
            auto& seen = pairings_[key];
            seen.insert(other);
            const uint64_t need =
                pow_u64(uint64_t(left_side_ ? right_->size() : left_->size()),
                        size_t(key.size()), uint64_t{1} << 30);
            if (seen.size() >= need) {
                done_.insert(key);
                pairings_.erase(key);
                emissions_.push_back({key, 0, 0, meter_.spent()});
            }
        }
    }
}

// --- disjoint union -------------------------------------------------------------------

std::optional<int> disjoint_separation_radius(const PatternOracle& in_x,
                                              const PatternOracle& in_y,
                                              const SpacePtr& space, int n_max) {
    std::vector<bool> conflict(size_t(n_max) + 1, false);
    for (int n = 0; n <= n_max; ++n) {
        for (const auto& p : ball_patterns(space, n)) {
            if (in_x(p) && in_y(p)) {
                conflict[size_t(n)] = true;
                break;
            }
        }
    }
    if (conflict[size_t(n_max)]) return std::nullopt;
    int last = 0;
    for (int n = 0; n <= n_max; ++n)
        if (conflict[size_t(n)]) last = n;
    return last;
}

UnionEY::UnionEY(SpacePtr space, PatternOracle in_x, PatternOracle in_y, int radius)
    : space_(std::move(space)), in_x_(std::move(in_x)), in_y_(std::move(in_y)) {
    // lift to the first radius whose ball patterns never satisfy both
    // oracles; the membership test below is sound exactly then
    int r = radius;
    for (;; ++r) {
        if (r > radius + 8)
            throw ConfigError("no conflict-free radius near the separation radius");
        bool clash = false;
        for (const auto& p : ball_patterns(space_, r)) {
            if (in_x_(p) && in_y_(p)) {
                clash = true;
                break;
            }
        }
        if (!clash) break;
    }
    radius_ = r;
    ball_patterns_ = ball_patterns(space_, radius_);
    alive_y_.reserve(ball_patterns_.size());
    for (const auto& p : ball_patterns_) alive_y_.push_back(in_y_(p));
}

bool UnionEY::contains(const Pattern& p, BudgetMeter* meter) const {
    const auto& ball = space_->group->ball(radius_);
    auto inside = [&](const GroupElement& g) {
        return std::binary_search(ball.begin(), ball.end(), g);
    };
    bool small = true;
    for (const auto& c : p.cells()) small = small && inside(c.key);
    if (small) {
        if (meter) meter->charge(1);
        return !in_x_(p);
    }
    if (meter) meter->charge(ball_patterns_.size());
    for (size_t i = 0; i < ball_patterns_.size(); ++i) {
        const auto& q = ball_patterns_[i];
        bool consistent = true;
        for (const auto& c : p.cells()) {
            const auto letter = q.at(c.key);
            if (letter && *letter != c.letter) {
                consistent = false;
                break;
            }
        }
        if (consistent && !alive_y_[i]) return false;
    }
    return true;
}

// --- canonical union presentation ------------------------------------------------------

namespace {

class CandidateScanSource final : public streams::ForbiddenSource {
  public:
    CandidateScanSource(SpacePtr space, PatternOracle in_x, PatternOracle in_y,
                        json desc)
        : space_(std::move(space)),
          in_x_(std::move(in_x)),
          in_y_(std::move(in_y)),
          candidates_(space_),
          desc_(std::move(desc)) {}

    SpacePtr space() const override { return space_; }
    bool finite() const override { return false; }

    uint64_t ensure(uint64_t want) override {
        const size_t limit = size_t(4096 + 1024 * want);
        while (items_.size() < want && scanned_ < limit) {
            const Pattern& c = candidates_.at(scanned_++);
            if (!in_x_(c) && !in_y_(c)) {
                item_scan_index_.push_back(scanned_);
                items_.push_back(c);
            }
        }
        // the effective prefix is what a fresh scan bounded by `limit`
        // would have found
        const auto it = std::upper_bound(item_scan_index_.begin(),
                                         item_scan_index_.end(), limit);
        const uint64_t within = uint64_t(it - item_scan_index_.begin());
        return std::min(want, within);
    }

    const Pattern& at(uint64_t i) const override { return items_.at(i); }
    json describe() const override { return desc_; }

  private:
    SpacePtr space_;
    PatternOracle in_x_, in_y_;
    grid::CandidateStream candidates_;
    size_t scanned_ = 0;
    std::vector<Pattern> items_;
    std::vector<size_t> item_scan_index_;
    json desc_;
};

// A forbidden list that grows as the union derivation discovers patterns.
class DynamicListSource final : public streams::ForbiddenSource {
  public:
    DynamicListSource(SpacePtr space, std::shared_ptr<std::vector<Pattern>> items)
        : space_(std::move(space)), items_(std::move(items)) {}

    SpacePtr space() const override { return space_; }
    bool finite() const override { return false; }
    uint64_t ensure(uint64_t want) override {
        return std::min<uint64_t>(want, items_->size());
    }
    const Pattern& at(uint64_t i) const override { return items_->at(i); }
    json describe() const override { return json{{"kind", "derived-union"}}; }

    bool kills_row(const std::vector<int>& row, long long start,
                   uint64_t t) override {
        const uint64_t n = ensure(t);
        refresh(n);
        for (uint64_t i = 0; i < n; ++i) {
            if (!rows_[i]) {
                if (ForbiddenSource::kills_row(row, start, i + 1)) return true;
                continue;
            }
            const auto& f = *rows_[i];
            if (f.empty()) return true;
            if (f.size() > row.size()) continue;
            for (size_t s = 0; s + f.size() <= row.size(); ++s) {
                bool hit = true;
                for (size_t j = 0; j < f.size() && hit; ++j)
                    hit = f[j] < 0 || f[j] == row[s + j];
                if (hit) return true;
            }
        }
        return false;
    }

  private:
    void refresh(uint64_t n) {
        while (rows_.size() < n) {
            const auto& p = items_->at(rows_.size());
            std::optional<std::vector<int>> row;
            if (p.space()->group->family() == Family::integers) {
                if (p.empty_support()) {
                    row = std::vector<int>{};
                } else {
                    const auto hull = *p.z_hull();
                    if (hull.second - hull.first <= 1024) {
                        std::vector<int> r(size_t(hull.second - hull.first + 1), -1);
                        for (const auto& c : p.cells())
                            r[size_t(p.space()->group->z_value(c.key) - hull.first)] =
                                c.letter;
                        row = std::move(r);
                    }
                }
            }
            rows_.push_back(std::move(row));
        }
    }

    SpacePtr space_;
    std::shared_ptr<std::vector<Pattern>> items_;
    std::vector<std::optional<std::vector<int>>> rows_;
};

}  // namespace

ForbiddenPresentation canonical_union_presentation(const SpacePtr& space,
                                                   const PatternOracle& in_x,
                                                   const PatternOracle& in_y,
                                                   std::string label) {
    json desc{{"kind", "union-canonical"}, {"label", label}};
    return ForbiddenPresentation{
        space, std::make_shared<CandidateScanSource>(space, in_x, in_y, desc),
        std::move(label)};
}

// --- union co-language ------------------------------------------------------------------

UnionCoLanguage::UnionCoLanguage(ForbiddenPresentation union_pres,
                                 std::shared_ptr<UnionEY> ey, ProbeOptions opts)
    : space_(union_pres.space),
      ey_(std::move(ey)),
      opts_(opts),
      ey_candidates_(space_),
      derived_(std::make_shared<std::vector<Pattern>>()),
      derived_pres_{space_, std::make_shared<DynamicListSource>(space_, derived_),
                    "derived"} {
    base_ = std::make_unique<CoLanguage>(std::move(union_pres), opts_);
    closure_ = std::make_unique<CoLanguage>(derived_pres_, opts_);
}

void UnionCoLanguage::add_forbidden(const Pattern& p) {
    derived_->push_back(p);
}

void UnionCoLanguage::emit(const Pattern& p, int radius, uint64_t prefix) {
    if (!known_.insert(p).second) return;
    add_forbidden(p);
    emissions_.push_back({p, radius, prefix, meter_.spent()});
}

void UnionCoLanguage::run(uint64_t target) {
    constexpr uint64_t q = 64;
    while (meter_.spent() < target) {
        // 1) the given enumeration of the union's co-language
        {
            const uint64_t before = base_->spent();
            base_->step(std::min<uint64_t>(q, target - meter_.spent()));
            meter_.charge(base_->spent() - before);
            const auto& es = base_->emitted();
            while (base_seen_ < es.size()) {
                const auto& e = es[base_seen_++];
                emit(e.pattern, e.radius, e.prefix_len);
            }
        }
        if (meter_.spent() >= target) break;
        // 2) the decidable E_Y membership scan
        {
            const uint64_t stop = side_meter_.spent() +
                                  std::min<uint64_t>(q, target - meter_.spent());
            while (side_meter_.spent() < stop) {
                const uint64_t before = side_meter_.spent();
                const Pattern& c = ey_candidates_.at(ey_cursor_++);
                const bool hit = ey_->contains(c, &side_meter_);
                meter_.charge(side_meter_.spent() - before);
                if (hit) emit(c, 0, 0);
            }
        }
        if (meter_.spent() >= target) break;
        // 3) the exhaustion closure over everything derived so far
        {
            const uint64_t before = closure_->spent();
            closure_->step(std::min<uint64_t>(q, target - meter_.spent()));
            meter_.charge(closure_->spent() - before);
            const auto& es = closure_->emitted();
            while (closure_seen_ < es.size()) {
                const auto& e = es[closure_seen_++];
                emit(e.pattern, e.radius, e.prefix_len);
            }
        }
    }
}

}  // namespace shiftlab::engine
