#include "shiftlab/properties.hpp"

#include <algorithm>

namespace shiftlab::properties {

using grid::ConfigError;
using streams::compare_log_ratio;
using streams::Emission;
using streams::Rational;

namespace {

constexpr uint64_t kQuantum = 16;

json emission_list_json(const std::vector<Emission>& all, size_t count) {
    json out = json::array();
    for (size_t i = 0; i < count; ++i) {
        out.push_back(json{{"pattern", all[i].pattern.to_text()},
                           {"radius", all[i].radius},
                           {"prefixLen", all[i].prefix_len}});
    }
    return out;
}

std::optional<std::vector<int>> emission_row(const Pattern& p) {
    if (p.space()->group->family() != grid::Family::integers) return std::nullopt;
    if (p.empty_support()) return std::vector<int>{};
    const auto hull = *p.z_hull();
    if (hull.second - hull.first > 1024) return std::nullopt;
    std::vector<int> row(size_t(hull.second - hull.first + 1), -1);
    for (const auto& c : p.cells())
        row[size_t(p.space()->group->z_value(c.key) - hull.first)] = c.letter;
    return row;
}

// occurrence of a (possibly gapped) row in the periodic configuration u^inf
bool occurs_in_periodic(const std::vector<int>& row, const std::vector<int>& u) {
    const size_t d = u.size();
    for (size_t s = 0; s < d; ++s) {
        bool hit = true;
        for (size_t j = 0; j < row.size() && hit; ++j) {
            if (row[j] >= 0 && row[j] != u[(s + j) % d]) hit = false;
        }
        if (hit) return true;
    }
    return false;
}

uint64_t meter_target(const RefuterContext& ctx, uint64_t total_target) {
    const uint64_t total = ctx.total_spent();
    if (total_target <= total) return ctx.meter.spent();
    return ctx.meter.spent() + (total_target - total);
}

}  // namespace

std::vector<std::vector<int>> primitive_necklaces(int letters, int max_len) {
    std::vector<std::vector<int>> out;
    for (int d = 1; d <= max_len; ++d) {
        uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= uint64_t(letters);
        for (uint64_t v = 0; v < count; ++v) {
            std::vector<int> w(size_t(d), 0);
            uint64_t rest = v;
            for (int i = 0; i < d; ++i) {
                w[size_t(i)] = int(rest % uint64_t(letters));
                rest /= uint64_t(letters);
            }
            // primitive: no proper period dividing d
            bool primitive = true;
            for (int p = 1; p < d && primitive; ++p) {
                if (d % p) continue;
                bool periodic = true;
                for (int i = 0; i < d && periodic; ++i)
                    periodic = w[size_t(i)] == w[size_t(i % p)];
                primitive = !periodic;
            }
            if (!primitive) continue;
            // lex-least rotation representative
            bool least = true;
            for (int s = 1; s < d && least; ++s) {
                for (int i = 0; i < d; ++i) {
                    const int a = w[size_t((s + i) % d)];
                    if (a != w[size_t(i)]) {
                        least = a > w[size_t(i)];
                        break;
                    }
                }
            }
            if (least) out.push_back(std::move(w));
        }
    }
    return out;
}

uint64_t full_shift_periodic_count(int letters, int i) {
    uint64_t total = 0;
    for (const auto& u : primitive_necklaces(letters, i)) total += u.size();
    return total;
}

// --- base refuter -------------------------------------------------------------

std::optional<Refutation> Refuter::advance(RefuterContext& ctx, uint64_t target) {
    if (stuck_) return std::nullopt;
    if (!emptiness_)
        emptiness_ = std::make_unique<Certifier>(ctx.pres, Pattern(ctx.pres.space),
                                                 ctx.opts);
    auto wrap = [&](json detail) {
        return Refutation{json{{"kind", "refutation"},
                               {"refuter", describe()},
                               {"detail", std::move(detail)}}};
    };
    while (ctx.total_spent() < target) {
        const uint64_t before = ctx.total_spent();
        // one round splits its quantum between the emptiness arm and the
        // specific criterion, so nesting cannot starve either side
        const uint64_t half = std::max<uint64_t>(
            1, std::min<uint64_t>(kQuantum / 2, (target - before) / 2));
        if (auto cert = emptiness_->advance(ctx.meter, ctx.meter.spent() + half)) {
            return wrap(json{{"type", "empty"},
                             {"radius", cert->first},
                             {"prefixLen", cert->second}});
        }
        if (ctx.total_spent() >= target) break;
        const uint64_t s_target = std::min(target, before + kQuantum);
        if (auto detail = step_specific(ctx, s_target)) return wrap(*detail);
        if (ctx.total_spent() == before) {
            if (++idle_rounds_ >= 3) {
                stuck_ = true;
                break;
            }
        } else {
            idle_rounds_ = 0;
        }
    }
    return std::nullopt;
}

namespace {

// --- nonempty -------------------------------------------------------------------

class NonemptyRefuter final : public Refuter {
  public:
    NonemptyRefuter() : Refuter("nonempty") {}
    json describe() const override {
        return json{{"name", "nonempty"}, {"params", json::object()}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext&, uint64_t) override {
        return std::nullopt;  // the emptiness arm is the whole criterion
    }
};

// --- cylinder -------------------------------------------------------------------

class CylinderRefuter final : public Refuter {
  public:
    explicit CylinderRefuter(Pattern p)
        : Refuter("cylinder"), pattern_(std::move(p)) {}

    json describe() const override {
        return json{{"name", "cylinder"},
                    {"params", json{{"pattern", pattern_.to_text()}}}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext& ctx, uint64_t target) override {
        if (!cert_)
            cert_ = std::make_unique<Certifier>(ctx.pres, pattern_, ctx.opts);
        if (auto c = cert_->advance(ctx.meter, meter_target(ctx, target))) {
            return json{{"type", "witness"},
                        {"pattern", pattern_.to_text()},
                        {"radius", c->first},
                        {"prefixLen", c->second}};
        }
        return std::nullopt;
    }

  private:
    Pattern pattern_;
    std::unique_ptr<Certifier> cert_;
};

// --- contains-patterns ------------------------------------------------------------

class ContainsPatternsRefuter final : public Refuter {
  public:
    explicit ContainsPatternsRefuter(std::vector<Pattern> ps)
        : Refuter("contains"), patterns_(std::move(ps)) {
        if (patterns_.empty())
            throw ConfigError("contains refuter needs at least one pattern");
    }

    json describe() const override {
        json arr = json::array();
        for (const auto& p : patterns_) arr.push_back(p.to_text());
        return json{{"name", "contains"}, {"params", json{{"patterns", arr}}}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext& ctx, uint64_t target) override {
        if (certs_.empty()) {
            for (const auto& p : patterns_)
                certs_.push_back(std::make_unique<Certifier>(ctx.pres, p, ctx.opts));
        }
        while (ctx.total_spent() < target) {
            auto& cert = certs_[cursor_];
            const uint64_t slice = std::min<uint64_t>(
                kQuantum, target - ctx.total_spent());
            if (auto c = cert->advance(ctx.meter, ctx.meter.spent() + slice)) {
                return json{{"type", "witness"},
                            {"pattern", patterns_[cursor_].to_text()},
                            {"radius", c->first},
                            {"prefixLen", c->second}};
            }
            cursor_ = (cursor_ + 1) % certs_.size();
        }
        return std::nullopt;
    }

  private:
    std::vector<Pattern> patterns_;
    std::vector<std::unique_ptr<Certifier>> certs_;
    size_t cursor_ = 0;
};

// --- entropy ------------------------------------------------------------------------

class EntropyAtLeastRefuter final : public Refuter {
  public:
    explicit EntropyAtLeastRefuter(ApproxReal q) : Refuter("entropy"), q_(std::move(q)) {
        if (q_.direction() == ApproxReal::Direction::right)
            throw ConfigError("entropy refuter needs a left or two-sided bound");
    }

    json describe() const override {
        return json{{"name", "entropy"},
                    {"params", json{{"q", q_.describe()["real"]}}}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext& ctx, uint64_t target) override {
        if (ctx.pres.space->group->family() != grid::Family::integers)
            throw ConfigError("entropy refuter is defined for G = Z only");
        auto& stream = ctx.ensure_stream();
        while (ctx.total_spent() < target) {
            if (auto d = check(ctx)) return d;
            grow(ctx);
            stream.step(std::min<uint64_t>(kQuantum, target - ctx.total_spent()));
            fold(ctx);
            ++round_;
        }
        return check(ctx);
    }

  private:
    struct LengthState {
        int n = 0;
        std::vector<uint64_t> bits;
        uint64_t alive = 0;
        size_t folded = 0;
    };

    void grow(RefuterContext& ctx) {
        const size_t want = std::min<size_t>(1 + round_ / 4, 14);
        while (lengths_.size() < want) {
            LengthState st;
            st.n = int(lengths_.size()) + 1;
            const uint64_t total = uint64_t{1} << st.n;  // binary alphabets only
            if (ctx.pres.space->alphabet->size() != 2)
                throw ConfigError("entropy refuter currently needs a binary alphabet");
            st.bits.assign(size_t((total + 63) / 64), ~uint64_t{0});
            if (total < 64) st.bits[0] = (uint64_t{1} << total) - 1;
            st.alive = total;
            lengths_.push_back(std::move(st));
        }
    }

    void fold(RefuterContext& ctx) {
        const auto& es = ctx.stream->emitted();
        for (auto& st : lengths_) {
            while (st.folded < es.size()) {
                const auto row = emission_row(es[st.folded].pattern);
                ++st.folded;
                if (!row || int(row->size()) > st.n) continue;
                ctx.meter.charge(st.alive);
                kernels::PackedWord f;
                f.width = int(row->size());
                bool packable = f.width <= 32;
                for (size_t i = 0; packable && i < row->size(); ++i) {
                    if ((*row)[i] >= 0) {
                        f.mask |= 1u << i;
                        if ((*row)[i] == 1) f.bits |= 1u << i;
                    }
                }
                if (f.mask == 0) {  // empty pattern kills everything
                    for (auto& b : st.bits) b = 0;
                } else if (packable) {
                    kernels::kill_containing(st.bits.data(), st.n, f);
                }
                st.alive = 0;
                for (uint64_t b : st.bits) st.alive += uint64_t(__builtin_popcountll(b));
            }
        }
    }

    std::optional<json> check(RefuterContext& ctx) {
        const auto approx = q_.lower(round_ + 1);
        for (const auto& st : lengths_) {
            const bool zero = st.alive == 0;
            const bool below =
                approx && !zero &&
                compare_log_ratio(st.alive, uint64_t(st.n), *approx) < 0;
            if (zero || below) {
                return json{{"type", "entropy"},
                            {"n", st.n},
                            {"survivors", st.alive},
                            {"approx", approx ? streams::print_rational(*approx)
                                              : std::string("0")},
                            {"approxStep", round_ + 1},
                            {"emissions",
                             emission_list_json(ctx.stream->emitted(), st.folded)}};
            }
        }
        return std::nullopt;
    }

    ApproxReal q_;
    std::vector<LengthState> lengths_;
    size_t round_ = 0;
};

// --- periods -----------------------------------------------------------------------

class PeriodsAtLeastRefuter final : public Refuter {
  public:
    PeriodsAtLeastRefuter(const SpacePtr& space, std::vector<uint64_t> ref)
        : Refuter("periods"), ref_(std::move(ref)) {
        if (ref_.empty()) throw ConfigError("periods refuter needs a reference vector");
        for (size_t i = 1; i < ref_.size(); ++i) {
            if (ref_[i] < ref_[i - 1])
                throw ConfigError("periods reference must be nondecreasing");
        }
        const int letters = space->alphabet->size();
        const int imax = int(ref_.size());
        if (imax > 12) throw ConfigError("periods reference longer than supported");
        for (size_t i = 0; i < ref_.size(); ++i) {
            if (ref_[i] > full_shift_periodic_count(letters, int(i) + 1))
                throw ConfigError("periods reference exceeds the full-shift count");
        }
        necks_ = primitive_necklaces(letters, imax);
        alive_.assign(necks_.size(), true);
    }

    json describe() const override {
        json arr = json::array();
        for (uint64_t r : ref_) arr.push_back(r);
        return json{{"name", "periods"}, {"params", json{{"ref", arr}}}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext& ctx, uint64_t target) override {
        if (ctx.pres.space->group->family() != grid::Family::integers)
            throw ConfigError("periods refuter is defined for G = Z only");
        auto& stream = ctx.ensure_stream();
        while (ctx.total_spent() < target) {
            if (auto d = check(ctx)) return d;
            stream.step(std::min<uint64_t>(kQuantum, target - ctx.total_spent()));
            fold(ctx);
        }
        return check(ctx);
    }

  private:
    void fold(RefuterContext& ctx) {
        const auto& es = ctx.stream->emitted();
        while (folded_ < es.size()) {
            const auto row = emission_row(es[folded_].pattern);
            ++folded_;
            if (!row) continue;
            for (size_t k = 0; k < necks_.size(); ++k) {
                if (!alive_[k]) continue;
                ctx.meter.charge(1);
                if (row->empty() || occurs_in_periodic(*row, necks_[k]))
                    alive_[k] = false;
            }
        }
    }

    std::optional<json> check(RefuterContext& ctx) {
        for (size_t i = 1; i <= ref_.size(); ++i) {
            uint64_t survivors = 0;
            for (size_t k = 0; k < necks_.size(); ++k)
                if (alive_[k] && necks_[k].size() <= i) survivors += necks_[k].size();
            if (survivors < ref_[i - 1]) {
                return json{{"type", "periods"},
                            {"i", i},
                            {"survivors", survivors},
                            {"ref", ref_[i - 1]},
                            {"emissions",
                             emission_list_json(ctx.stream ? ctx.stream->emitted()
                                                           : std::vector<Emission>{},
                                                folded_)}};
            }
        }
        return std::nullopt;
    }

    std::vector<uint64_t> ref_;
    std::vector<std::vector<int>> necks_;
    std::vector<bool> alive_;
    size_t folded_ = 0;
};

// --- intersection ---------------------------------------------------------------------

class IntersectRefuter final : public Refuter {
  public:
    IntersectRefuter(std::unique_ptr<Refuter> a, std::unique_ptr<Refuter> b)
        : Refuter("intersect"), a_(std::move(a)), b_(std::move(b)) {}

    json describe() const override {
        return json{{"name", "intersect"},
                    {"params", json{{"a", a_->describe()}, {"b", b_->describe()}}}};
    }

  protected:
    std::optional<json> step_specific(RefuterContext& ctx, uint64_t target) override {
        while (ctx.total_spent() < target) {
            const uint64_t before = ctx.total_spent();
            if (auto r = a_->advance(ctx, std::min(target, before + kQuantum)))
                return json{{"type", "arm"}, {"arm", 0}, {"inner", r->certificate}};
            const uint64_t mid = ctx.total_spent();
            if (auto r = b_->advance(ctx, std::min(target, mid + kQuantum)))
                return json{{"type", "arm"}, {"arm", 1}, {"inner", r->certificate}};
            if (ctx.total_spent() == before) break;  // both arms stuck
        }
        return std::nullopt;
    }

  private:
    std::unique_ptr<Refuter> a_, b_;
};

}  // namespace

std::unique_ptr<Refuter> nonempty_refuter() {
    return std::make_unique<NonemptyRefuter>();
}

std::unique_ptr<Refuter> entropy_at_least_refuter(ApproxReal q) {
    return std::make_unique<EntropyAtLeastRefuter>(std::move(q));
}

std::unique_ptr<Refuter> periods_at_least_refuter(const SpacePtr& space,
                                                  std::vector<uint64_t> ref) {
    return std::make_unique<PeriodsAtLeastRefuter>(space, std::move(ref));
}

std::unique_ptr<Refuter> contains_patterns_refuter(std::vector<Pattern> ps) {
    return std::make_unique<ContainsPatternsRefuter>(std::move(ps));
}

std::unique_ptr<Refuter> cylinder_refuter(Pattern p) {
    return std::make_unique<CylinderRefuter>(std::move(p));
}

std::unique_ptr<Refuter> intersect_refuters(std::unique_ptr<Refuter> a,
                                            std::unique_ptr<Refuter> b) {
    return std::make_unique<IntersectRefuter>(std::move(a), std::move(b));
}

RefuterSpec RefuterSpec::from_json(const json& j) {
    RefuterSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.params = j.value("params", json::object());
    return spec;
}

std::unique_ptr<Refuter> make_refuter(const SpacePtr& space, const RefuterSpec& spec) {
    if (spec.name == "nonempty") return nonempty_refuter();
    if (spec.name == "entropy") {
        return entropy_at_least_refuter(
            ApproxReal::by_name(spec.params.at("q").get<std::string>()));
    }
    if (spec.name == "periods") {
        std::vector<uint64_t> ref;
        for (const auto& v : spec.params.at("ref")) ref.push_back(v.get<uint64_t>());
        return periods_at_least_refuter(space, std::move(ref));
    }
    if (spec.name == "contains") {
        std::vector<Pattern> ps;
        for (const auto& w : spec.params.at("patterns"))
            ps.push_back(Pattern::parse(space, w.get<std::string>()));
        return contains_patterns_refuter(std::move(ps));
    }
    if (spec.name == "cylinder") {
        return cylinder_refuter(
            Pattern::parse(space, spec.params.at("pattern").get<std::string>()));
    }
    if (spec.name == "intersect") {
        return intersect_refuters(
            make_refuter(space, RefuterSpec::from_json(spec.params.at("a"))),
            make_refuter(space, RefuterSpec::from_json(spec.params.at("b"))));
    }
    throw ConfigError("unknown refuter '" + spec.name + "'");
}

// --- replay ---------------------------------------------------------------------------

namespace {

bool verify_emissions(const ForbiddenPresentation& pres, const json& emissions,
                      const ProbeOptions& opts, std::vector<Pattern>& out) {
    for (const auto& e : emissions) {
        const auto p =
            Pattern::parse(pres.space, e.at("pattern").get<std::string>());
        if (!streams::verify_emission(pres, p, e.at("radius").get<int>(),
                                      e.at("prefixLen").get<uint64_t>(), opts))
            return false;
        out.push_back(p);
    }
    return true;
}

}  // namespace

bool verify_refutation(const ForbiddenPresentation& pres, const json& certificate,
                       const ProbeOptions& opts) {
    if (certificate.value("kind", "") != "refutation") return false;
    const json& detail = certificate.at("detail");
    const std::string type = detail.at("type").get<std::string>();
    if (type == "empty") {
        return streams::verify_emission(pres, Pattern(pres.space),
                                        detail.at("radius").get<int>(),
                                        detail.at("prefixLen").get<uint64_t>(), opts);
    }
    if (type == "witness") {
        const auto p =
            Pattern::parse(pres.space, detail.at("pattern").get<std::string>());
        return streams::verify_emission(pres, p, detail.at("radius").get<int>(),
                                        detail.at("prefixLen").get<uint64_t>(), opts);
    }
    if (type == "arm") {
        return verify_refutation(pres, detail.at("inner"), opts);
    }
    const auto spec = RefuterSpec::from_json(certificate.at("refuter"));
    if (type == "periods") {
        std::vector<Pattern> emitted;
        if (!verify_emissions(pres, detail.at("emissions"), opts, emitted))
            return false;
        std::vector<uint64_t> ref;
        for (const auto& v : spec.params.at("ref")) ref.push_back(v.get<uint64_t>());
        const size_t i = detail.at("i").get<size_t>();
        if (i == 0 || i > ref.size()) return false;
        auto necks = primitive_necklaces(pres.space->alphabet->size(), int(ref.size()));
        uint64_t survivors = 0;
        for (const auto& u : necks) {
            if (u.size() > i) continue;
            bool alive = true;
            for (const auto& p : emitted) {
                const auto row = emission_row(p);
                if (!row) continue;
                if (row->empty() || occurs_in_periodic(*row, u)) {
                    alive = false;
                    break;
                }
            }
            if (alive) survivors += u.size();
        }
        return survivors == detail.at("survivors").get<uint64_t>() &&
               survivors < ref[i - 1];
    }
    if (type == "entropy") {
        std::vector<Pattern> emitted;
        if (!verify_emissions(pres, detail.at("emissions"), opts, emitted))
            return false;
        const int n = detail.at("n").get<int>();
        if (n < 1 || n > 24) return false;
        const auto q = ApproxReal::by_name(spec.params.at("q").get<std::string>());
        const auto approx = q.lower(detail.at("approxStep").get<size_t>());
        // refold the survivor set at length n
        const uint64_t total = uint64_t{1} << n;
        std::vector<uint64_t> bits(size_t((total + 63) / 64), ~uint64_t{0});
        if (total < 64) bits[0] = (uint64_t{1} << total) - 1;
        for (const auto& p : emitted) {
            const auto row = emission_row(p);
            if (!row || int(row->size()) > n) continue;
            kernels::PackedWord f;
            f.width = int(row->size());
            for (size_t i = 0; i < row->size(); ++i) {
                if ((*row)[i] >= 0) {
                    f.mask |= 1u << i;
                    if ((*row)[i] == 1) f.bits |= 1u << i;
                }
            }
            if (f.mask == 0) {
                for (auto& b : bits) b = 0;
            } else if (f.width <= 32) {
                kernels::kill_containing(bits.data(), n, f);
            }
        }
        uint64_t alive = 0;
        for (uint64_t b : bits) alive += uint64_t(__builtin_popcountll(b));
        if (alive != detail.at("survivors").get<uint64_t>()) return false;
        if (alive == 0) return true;
        if (!approx) return false;
        if (streams::print_rational(*approx) != detail.at("approx").get<std::string>())
            return false;
        return compare_log_ratio(alive, uint64_t(n), *approx) < 0;
    }
    return false;
}

}  // namespace shiftlab::properties
