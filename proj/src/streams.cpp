#include "shiftlab/streams.hpp"

#include <algorithm>
#include <cstdlib>

namespace shiftlab::streams {

using grid::ConfigError;
using grid::GroupElement;
using grid::ParseError;

// --- exact arithmetic ---------------------------------------------------------

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
        BigInt num{std::string(text.substr(0, slash))};
        BigInt den{std::string(text.substr(slash + 1))};
        if (den == 0) throw ParseError("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw ParseError("bad rational '" + std::string(text) + "'");
    }
}

std::string print_rational(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

BigInt floor_div(const BigInt& num, const BigInt& den) {
    BigInt q = num / den;
    if ((num % den) != 0 && ((num < 0) != (den < 0))) --q;
    return q;
}

BigInt rational_floor(const Rational& r) {
    return floor_div(boost::multiprecision::numerator(r),
                     boost::multiprecision::denominator(r));
}

BigInt rational_ceil(const Rational& r) { return -rational_floor(-r); }

int compare_log_ratio(uint64_t N, uint64_t n, const Rational& q) {
    if (N == 0) throw ConfigError("compare_log_ratio needs N >= 1");
    if (n == 0) throw ConfigError("compare_log_ratio needs n >= 1");
    const BigInt a = boost::multiprecision::numerator(q);
    const BigInt b = boost::multiprecision::denominator(q);
    if (a <= 0) {
        if (N == 1) return a == 0 ? 0 : 1;  // log2(1)/n = 0
        return 1;  // positive vs nonpositive
    }
    if (b > 1'000'000 || a * n > 8'000'000)
        throw ConfigError("compare_log_ratio exponent out of supported range");
    const unsigned bu = b.convert_to<unsigned>();
    const BigInt lhs = boost::multiprecision::pow(BigInt(N), bu);
    const BigInt rhs = BigInt(1) << (a * n).convert_to<unsigned>();
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

// --- ApproxReal -----------------------------------------------------------------

void ApproxReal::materialize(size_t steps) const {
    auto& st = *state_;
    while (st.lows.size() < steps) {
        const size_t i = st.lows.size();
        std::optional<Rational> lo, hi;
        gen_(i, lo, hi);
        if (!st.lows.empty() && st.lows.back() && (!lo || *lo < *st.lows.back()))
            lo = st.lows.back();
        if (!st.highs.empty() && st.highs.back() && (!hi || *hi > *st.highs.back()))
            hi = st.highs.back();
        st.lows.push_back(lo);
        st.highs.push_back(hi);
    }
}

std::optional<Rational> ApproxReal::lower(size_t steps) const {
    if (steps == 0) return std::nullopt;
    materialize(steps);
    return state_->lows[steps - 1];
}

std::optional<Rational> ApproxReal::upper(size_t steps) const {
    if (steps == 0) return std::nullopt;
    materialize(steps);
    return state_->highs[steps - 1];
}

json ApproxReal::describe() const { return json{{"real", name_}}; }

ApproxReal ApproxReal::rational(const Rational& r) {
    ApproxReal out;
    out.direction_ = Direction::two_sided;
    out.exact_ = r;
    out.name_ = "rational:" + print_rational(r);
    out.gen_ = [r](size_t, std::optional<Rational>& lo, std::optional<Rational>& hi) {
        lo = r;
        hi = r;
    };
    return out;
}

ApproxReal ApproxReal::golden_ratio_conjugate() {
    ApproxReal out;
    out.direction_ = Direction::two_sided;
    out.name_ = "phi-conjugate";
    out.gen_ = [](size_t i, std::optional<Rational>& lo, std::optional<Rational>& hi) {
        // continued-fraction convergents of 1/phi: 1/2, 2/3, 3/5, 5/8, ...
        BigInt a = 1, b = 1;  // F(1), F(2)
        for (size_t k = 0; k < i + 1; ++k) {
            const BigInt next = a + b;
            a = b;
            b = next;
        }
        const Rational conv(a, b);
        if (i % 2 == 0)
            lo = conv;
        else
            hi = conv;
    };
    return out;
}

ApproxReal ApproxReal::log_golden_mean() {
    ApproxReal out;
    out.direction_ = Direction::left;
    out.name_ = "log-golden-mean";
    out.gen_ = [](size_t i, std::optional<Rational>& lo, std::optional<Rational>&) {
        // golden-mean word count N_n = F(n+2); with gluing gap 1 the shift
        // entropy is at least log2(N_n)/(n+1) >= floor(log2 N_n)/(n+1)
        const uint64_t n = i + 1;
        BigInt a = 1, b = 2;  // N_0 = 1, N_1 = 2
        for (uint64_t k = 0; k < n; ++k) {
            const BigInt next = a + b;
            a = b;
            b = next;
        }
        const unsigned bits = boost::multiprecision::msb(a);  // floor(log2 N_n)
        lo = Rational(BigInt(bits), BigInt(n + 1));
    };
    return out;
}

ApproxReal ApproxReal::by_name(std::string_view name) {
    if (name == "phi-conjugate" || name == "goldenRatioConjugate")
        return golden_ratio_conjugate();
    if (name == "log-golden-mean" || name == "logGoldenMean") return log_golden_mean();
    if (name.starts_with("rational:")) name.remove_prefix(9);
    return rational(parse_rational(name));
}

// --- forbidden sources -----------------------------------------------------------

bool ForbiddenSource::kills(const Pattern& q, uint64_t t) {
    const uint64_t n = ensure(t);
    for (uint64_t i = 0; i < n; ++i) {
        if (grid::occurs_in(at(i), q)) return true;
    }
    return false;
}

bool ForbiddenSource::kills_row(const std::vector<int>& row, long long start,
                                uint64_t t) {
    std::vector<Pattern::Cell> cells;
    const auto& group = space()->group;
    for (size_t i = 0; i < row.size(); ++i) {
        if (row[i] >= 0)
            cells.push_back({group->z_element(start + (long long)i), row[i]});
    }
    return kills(Pattern(space(), std::move(cells)), t);
}

namespace {

// Row forms with -1 holes; nullopt when the pattern is not a Z row.
std::optional<std::vector<int>> row_form(const Pattern& p) {
    if (p.space()->group->family() != grid::Family::integers) return std::nullopt;
    if (p.empty_support()) return std::vector<int>{};
    const auto hull = *p.z_hull();
    if (hull.second - hull.first > 4096) return std::nullopt;
    std::vector<int> row(size_t(hull.second - hull.first + 1), -1);
    for (const auto& c : p.cells())
        row[size_t(p.space()->group->z_value(c.key) - hull.first)] = c.letter;
    return row;
}

bool row_occurs(const std::vector<int>& needle, const std::vector<int>& hay) {
    if (needle.empty()) return true;
    if (needle.size() > hay.size()) return false;
    for (size_t s = 0; s + needle.size() <= hay.size(); ++s) {
        bool hit = true;
        for (size_t i = 0; i < needle.size() && hit; ++i)
            hit = needle[i] < 0 || needle[i] == hay[s + i];
        if (hit) return true;
    }
    return false;
}

}  // namespace

bool ForbiddenSource::packed(uint64_t, std::vector<kernels::PackedWord>&) {
    return false;
}

namespace {

std::optional<kernels::PackedWord> pack_pattern(const Pattern& p) {
    if (p.empty_support()) return std::nullopt;
    if (p.space()->group->family() != grid::Family::integers) return std::nullopt;
    if (p.space()->alphabet->size() != 2) return std::nullopt;
    const auto hull = p.z_hull();
    const long long width = hull->second - hull->first + 1;
    if (width > 32) return std::nullopt;
    kernels::PackedWord f;
    f.width = static_cast<int>(width);
    for (const auto& c : p.cells()) {
        const int bit = static_cast<int>(p.space()->group->z_value(c.key) - hull->first);
        f.mask |= 1u << bit;
        if (c.letter) f.bits |= 1u << bit;
    }
    return f;
}

class FiniteSource final : public ForbiddenSource {
  public:
    FiniteSource(SpacePtr space, std::vector<Pattern> patterns, json desc)
        : space_(std::move(space)),
          patterns_(std::move(patterns)),
          desc_(std::move(desc)) {
        rows_ok_ = true;
        for (const auto& p : patterns_) {
            auto r = row_form(p);
            if (!r) rows_ok_ = false;
            rows_.push_back(r.value_or(std::vector<int>{}));
        }
    }

    SpacePtr space() const override { return space_; }
    bool finite() const override { return true; }
    uint64_t ensure(uint64_t want) override {
        return std::min<uint64_t>(want, patterns_.size());
    }
    const Pattern& at(uint64_t i) const override { return patterns_.at(i); }
    json describe() const override { return desc_; }

    bool kills_row(const std::vector<int>& row, long long start,
                   uint64_t t) override {
        const uint64_t n = std::min<uint64_t>(t, patterns_.size());
        if (!rows_ok_) return ForbiddenSource::kills_row(row, start, t);
        for (uint64_t i = 0; i < n; ++i)
            if (row_occurs(rows_[i], row)) return true;
        return false;
    }

    bool packed(uint64_t t, std::vector<kernels::PackedWord>& out) override {
        const uint64_t n = std::min<uint64_t>(t, patterns_.size());
        out.clear();
        for (uint64_t i = 0; i < n; ++i) {
            auto f = pack_pattern(patterns_[i]);
            if (!f) return false;
            out.push_back(*f);
        }
        return true;
    }

  private:
    SpacePtr space_;
    std::vector<Pattern> patterns_;
    std::vector<std::vector<int>> rows_;
    bool rows_ok_ = false;
    json desc_;
};

// Every word the oracle rejects, in (length, lex) order. ensure() scans
// lengths with a deterministic effort bound so presentations with thin
// co-languages cannot stall a probe.
class RejectedWordsSource final : public ForbiddenSource {
  public:
    RejectedWordsSource(SpacePtr space,
                        std::function<bool(const std::vector<int>&)> in_language,
                        json desc)
        : space_(std::move(space)),
          in_language_(std::move(in_language)),
          desc_(std::move(desc)) {
        if (space_->group->family() != grid::Family::integers)
            throw ConfigError("rejected-word presentations require the group Z");
    }

    SpacePtr space() const override { return space_; }
    bool finite() const override { return false; }

    uint64_t ensure(uint64_t want) override {
        const int len_limit = length_limit(want);
        while (total() < want && next_len_ <= len_limit) census(next_len_++);
        uint64_t have = 0;
        for (int l = 1; l < next_len_ && l <= len_limit; ++l)
            have += by_length_[size_t(l)].size();
        return std::min(want, have);
    }

    const Pattern& at(uint64_t i) const override { return items_.at(i); }
    json describe() const override { return desc_; }

    bool kills(const Pattern& q, uint64_t t) override {
        const uint64_t n = ensure(t);
        if (n == 0) return false;
        if (q.space()->group->family() != grid::Family::integers)
            return ForbiddenSource::kills(q, t);
        // factors of the maximal contiguous runs of q, looked up by index
        std::vector<std::pair<long long, int>> rows;
        for (const auto& c : q.cells())
            rows.push_back({space_->group->z_value(c.key), c.letter});
        std::sort(rows.begin(), rows.end());
        size_t start = 0;
        for (size_t i = 1; i <= rows.size(); ++i) {
            if (i == rows.size() || rows[i].first != rows[i - 1].first + 1) {
                std::vector<int> run;
                for (size_t j = start; j < i; ++j) run.push_back(rows[j].second);
                if (run_has_hit(run, n)) return true;
                start = i;
            }
        }
        return false;
    }

    bool kills_row(const std::vector<int>& row, long long, uint64_t t) override {
        const uint64_t n = ensure(t);
        if (n == 0) return false;
        std::vector<int> run;
        for (size_t i = 0; i <= row.size(); ++i) {
            if (i == row.size() || row[i] < 0) {
                if (!run.empty() && run_has_hit(run, n)) return true;
                run.clear();
            } else {
                run.push_back(row[i]);
            }
        }
        return false;
    }

  private:
    static int length_limit(uint64_t want) {
        return static_cast<int>(std::min<uint64_t>(want + 6, 20));
    }

    uint64_t total() const {
        uint64_t s = 0;
        for (const auto& v : by_length_) s += v.size();
        return s;
    }

    void census(int len) {
        const uint64_t base = uint64_t(space_->alphabet->size());
        uint64_t count = 1;
        for (int i = 0; i < len; ++i) count *= base;
        while (static_cast<int>(by_length_.size()) <= len) by_length_.emplace_back();
        auto& bucket = by_length_[size_t(len)];
        for (uint64_t v = 0; v < count; ++v) {
            std::vector<int> w(size_t(len), 0);
            uint64_t rest = v;
            for (int i = len - 1; i >= 0; --i) {
                w[size_t(i)] = static_cast<int>(rest % base);
                rest /= base;
            }
            if (!in_language_(w)) {
                index_.emplace(w, items_.size());
                bucket.push_back(w);
                items_.push_back(Pattern::from_letter_row(space_, w, 0));
            }
        }
    }

    bool run_has_hit(const std::vector<int>& run, uint64_t n) const {
        const int max_len = std::min<int>(static_cast<int>(run.size()), next_len_ - 1);
        for (int len = 1; len <= max_len; ++len) {
            for (size_t s = 0; s + size_t(len) <= run.size(); ++s) {
                std::vector<int> v(run.begin() + long(s), run.begin() + long(s) + len);
                auto it = index_.find(v);
                if (it != index_.end() && it->second < n) return true;
            }
        }
        return false;
    }

    SpacePtr space_;
    std::function<bool(const std::vector<int>&)> in_language_;
    json desc_;
    int next_len_ = 1;
    std::vector<std::vector<std::vector<int>>> by_length_;
    std::vector<Pattern> items_;
    std::map<std::vector<int>, uint64_t> index_;
};

// Extra patterns first, then the base stream.
class ForbidExtraSource final : public ForbiddenSource {
  public:
    ForbidExtraSource(SourcePtr base, std::vector<Pattern> extra)
        : base_(std::move(base)), extra_(std::move(extra)) {
        rows_ok_ = true;
        for (const auto& p : extra_) {
            auto r = row_form(p);
            if (!r) rows_ok_ = false;
            extra_rows_.push_back(r.value_or(std::vector<int>{}));
        }
    }

    SpacePtr space() const override { return base_->space(); }
    bool finite() const override { return base_->finite(); }
    uint64_t ensure(uint64_t want) override {
        const uint64_t e = std::min<uint64_t>(want, extra_.size());
        return e + base_->ensure(want - e);
    }
    const Pattern& at(uint64_t i) const override {
        if (i < extra_.size()) return extra_[i];
        return base_->at(i - extra_.size());
    }
    json describe() const override {
        json extras = json::array();
        for (const auto& p : extra_) extras.push_back(p.to_text());
        return json{{"kind", "forbid"}, {"extra", extras}, {"base", base_->describe()}};
    }
    bool kills(const Pattern& q, uint64_t t) override {
        const uint64_t e = std::min<uint64_t>(t, extra_.size());
        for (uint64_t i = 0; i < e; ++i)
            if (grid::occurs_in(extra_[i], q)) return true;
        if (t <= e) return false;
        return base_->kills(q, t - e);
    }

    bool kills_row(const std::vector<int>& row, long long start,
                   uint64_t t) override {
        if (!rows_ok_) return ForbiddenSource::kills_row(row, start, t);
        const uint64_t e = std::min<uint64_t>(t, extra_.size());
        for (uint64_t i = 0; i < e; ++i)
            if (row_occurs(extra_rows_[i], row)) return true;
        if (t <= e) return false;
        return base_->kills_row(row, start, t - e);
    }
    bool packed(uint64_t t, std::vector<kernels::PackedWord>& out) override {
        const uint64_t e = std::min<uint64_t>(t, extra_.size());
        std::vector<kernels::PackedWord> head;
        for (uint64_t i = 0; i < e; ++i) {
            auto f = pack_pattern(extra_[i]);
            if (!f) return false;
            head.push_back(*f);
        }
        std::vector<kernels::PackedWord> tail;
        if (t > e && !base_->packed(t - e, tail)) return false;
        out = std::move(head);
        out.insert(out.end(), tail.begin(), tail.end());
        return true;
    }

  private:
    SourcePtr base_;
    std::vector<Pattern> extra_;
    std::vector<std::vector<int>> extra_rows_;
    bool rows_ok_ = false;
};

}  // namespace

json ForbiddenPresentation::describe() const {
    json j = source->describe();
    return j;
}

ForbiddenPresentation make_sft(const SpacePtr& space, std::vector<Pattern> forbidden,
                               std::string label) {
    json letters = json::array();
    for (int i = 0; i < space->alphabet->size(); ++i)
        letters.push_back(space->alphabet->letter(i));
    json words = json::array();
    for (const auto& p : forbidden) words.push_back(p.to_text());
    json desc{{"kind", "sft"}, {"alphabet", letters}, {"forbidden", words}};
    return ForbiddenPresentation{
        space, std::make_shared<FiniteSource>(space, std::move(forbidden), desc),
        std::move(label)};
}

ForbiddenPresentation make_rejected_words(
    const SpacePtr& space,
    std::function<bool(const std::vector<int>&)> word_in_language, std::string label,
    json description) {
    return ForbiddenPresentation{
        space,
        std::make_shared<RejectedWordsSource>(space, std::move(word_in_language),
                                              std::move(description)),
        std::move(label)};
}

ForbiddenPresentation forbid_pattern(const ForbiddenPresentation& base,
                                     const Pattern& p) {
    return forbid_patterns(base, {p});
}

ForbiddenPresentation forbid_patterns(const ForbiddenPresentation& base,
                                      const std::vector<Pattern>& ps) {
    for (const auto& p : ps) {
        if (!p.space()->same(*base.space))
            throw ConfigError("forbidden pattern lives over a different space");
    }
    return ForbiddenPresentation{
        base.space, std::make_shared<ForbidExtraSource>(base.source, ps),
        base.label + "+forbid"};
}

const char* Verdict::name(Outcome o) {
    switch (o) {
        case Outcome::yes:
            return "yes";
        case Outcome::no:
            return "no";
        default:
            return "exhausted";
    }
}

// --- Probe ----------------------------------------------------------------------

uint64_t ProbeOptions::default_cap_from_env() {
    if (const char* env = std::getenv("SHIFTLAB_EXTENSION_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return uint64_t{1} << 22;
}

Probe::Probe(const ForbiddenPresentation& pres, const Pattern& p, int radius,
             uint64_t prefix, const ProbeOptions& opts)
    : pres_(pres), pattern_(p) {
    prefix_ = pres_.source->ensure(prefix);
    const auto& space = p.space();
    const uint64_t base = uint64_t(space->alphabet->size());
    size_t free_count = 0;

    if (space->group->family() == grid::Family::integers) {
        z_mode_ = true;
        long long lo = -radius, hi = radius;
        for (const auto& c : p.cells()) {
            const long long v = space->group->z_value(c.key);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        row_start_ = lo;
        row_.assign(size_t(hi - lo + 1), -1);
        std::vector<bool> fixed(row_.size(), false);
        for (const auto& c : p.cells()) {
            const size_t i = size_t(space->group->z_value(c.key) - lo);
            row_[i] = c.letter;
            fixed[i] = true;
        }
        for (long long v = -radius; v <= radius; ++v) {
            const size_t i = size_t(v - lo);
            if (!fixed[i]) free_pos_.push_back(i);
        }
        free_count = free_pos_.size();
    } else {
        frame_ = grid::extension_frame(p, radius);
        free_count = frame_.free_cells.size();
    }

    uint64_t count = 1;
    bool huge = false;
    for (size_t i = 0; i < free_count; ++i) {
        if (count > (uint64_t{1} << 62) / base) {
            huge = true;
            break;
        }
        count *= base;
    }
    count_ = huge ? ~uint64_t{0} : count;

    // packed kernel path: Z, binary letters, gap-free hull <= 32 cells
    if (!huge && count_ <= kFlatLimit && z_mode_ && base == 2 && row_.size() <= 32) {
        bool contiguous = true;
        std::vector<bool> is_free(row_.size(), false);
        for (size_t i : free_pos_) is_free[i] = true;
        for (size_t i = 0; i < row_.size(); ++i)
            contiguous = contiguous && (row_[i] >= 0 || is_free[i]);
        if (contiguous && pres_.source->packed(prefix_, packed_)) {
            packed_ok_ = true;
            scan_.hull_len = static_cast<int>(row_.size());
            for (size_t i = 0; i < row_.size(); ++i) {
                if (is_free[i])
                    scan_.free_mask |= 1u << i;
                else if (row_[i] == 1)
                    scan_.fixed_bits |= 1u << i;
            }
            scan_.forbidden = packed_.data();
            scan_.forbidden_count = packed_.size();
        }
    }

    // flat when the sweep is cheap: kernels take any small frame, plain
    // sweeps only tiny ones; everything else runs the pruned search
    flat_ = !huge && (packed_ok_ ? count_ <= kFlatLimit : count_ <= kDfsLimit);
    if (flat_ && count_ > opts.extension_cap) {
        capped_ = true;
        return;
    }
    if (!flat_) {
        pos_ = -1;
        assigned_.assign(free_count, -1);
        digits_.assign(free_count + 1, 0);
    }
}

Probe::Status Probe::advance(BudgetMeter& meter, uint64_t unit_limit) {
    if (capped_) return Status::capped;
    if (flat_) return run_flat(meter, unit_limit);
    return run_dfs(meter, unit_limit);
}

Probe::Status Probe::run_flat(BudgetMeter& meter, uint64_t unit_limit) {
    uint64_t left = unit_limit;
    if (packed_ok_) {
        while (cursor_ < count_) {
            if (left == 0) return Status::running;
            const uint64_t block = std::min(count_ - cursor_, left);
            const uint64_t idx =
                kernels::first_survivor(scan_, cursor_, cursor_ + block);
            if (idx < cursor_ + block) {
                meter.charge(idx - cursor_ + 1);
                return Status::survivor;
            }
            meter.charge(block);
            left -= block;
            cursor_ += block;
        }
        return Status::certified;
    }
    const uint64_t base = uint64_t(pattern_.space()->alphabet->size());
    while (cursor_ < count_) {
        if (left == 0) return Status::running;
        meter.charge(1);
        --left;
        bool dies;
        if (z_mode_) {
            uint64_t rest = cursor_;
            for (size_t j = 0; j < free_pos_.size(); ++j) {
                row_[free_pos_[j]] = int(rest % base);
                rest /= base;
            }
            dies = pres_.source->kills_row(row_, row_start_, prefix_);
        } else {
            dies = pres_.source->kills(
                grid::fill_frame(pattern_.space(), frame_, cursor_), prefix_);
        }
        if (!dies) return Status::survivor;
        ++cursor_;
    }
    return Status::certified;
}

bool Probe::partial_dies() const {
    if (z_mode_) return pres_.source->kills_row(row_, row_start_, prefix_);
    std::vector<Pattern::Cell> cells;
    cells.reserve(frame_.cells.size());
    size_t free_idx = 0;
    for (size_t i = 0; i < frame_.cells.size(); ++i) {
        const int fixed = frame_.fixed_letters[i];
        if (fixed >= 0) {
            cells.push_back({frame_.cells[i], fixed});
        } else {
            if (assigned_[free_idx] >= 0)
                cells.push_back({frame_.cells[i], assigned_[free_idx]});
            ++free_idx;
        }
    }
    Pattern partial(pattern_.space(), std::move(cells));
    return pres_.source->kills(partial, prefix_);
}

Probe::Status Probe::run_dfs(BudgetMeter& meter, uint64_t unit_limit) {
    const int letters = pattern_.space()->alphabet->size();
    const int free_count =
        static_cast<int>(z_mode_ ? free_pos_.size() : frame_.free_cells.size());
    auto set = [&](int pos, int letter) {
        if (z_mode_)
            row_[free_pos_[size_t(pos)]] = letter;
        else
            assigned_[size_t(pos)] = letter;
    };
    uint64_t left = unit_limit;
    if (pos_ == -1) {
        // root: the pattern alone may already be certified
        if (left == 0) return Status::running;
        meter.charge(1);
        --left;
        if (partial_dies()) return Status::certified;
        pos_ = 0;
        digits_[0] = 0;
    }
    for (;;) {
        if (pos_ < 0) return Status::certified;
        if (digits_[pos_] == letters) {
            set(pos_, -1);
            --pos_;
            if (pos_ < 0) return Status::certified;
            ++digits_[pos_];
            continue;
        }
        if (left == 0) return Status::running;
        set(pos_, digits_[pos_]);
        meter.charge(1);
        --left;
        if (partial_dies()) {
            set(pos_, -1);
            ++digits_[pos_];
            continue;
        }
        if (pos_ + 1 == free_count) return Status::survivor;
        ++pos_;
        digits_[pos_] = 0;
    }
}

// --- PatternProber ----------------------------------------------------------------

PatternProber::PatternProber(const ForbiddenPresentation& pres, Pattern p,
                             const ProbeOptions& opts)
    : pres_(pres), pattern_(std::move(p)), opts_(opts) {}

PatternProber::Status PatternProber::advance(BudgetMeter& meter, uint64_t target,
                                             int pass) {
    for (;;) {
        if (cert_) return Status::certified;
        if (active_) {
            if (meter.spent() >= target) return Status::running;
            const auto st = active_->advance(meter, target - meter.spent());
            switch (st) {
                case Probe::Status::running:
                    return Status::running;
                case Probe::Status::certified:
                    cert_ = std::make_pair(active_radius_, active_->effective_prefix());
                    active_.reset();
                    return Status::certified;
                case Probe::Status::survivor: {
                    const uint64_t got = active_->effective_prefix();
                    if (static_cast<size_t>(active_radius_) >= fail_prefix_.size())
                        fail_prefix_.resize(size_t(active_radius_) + 1, 0);
                    fail_prefix_[size_t(active_radius_)] =
                        std::max(fail_prefix_[size_t(active_radius_)], got);
                    active_.reset();
                    continue;
                }
                case Probe::Status::capped:
                    if (!capped_radius_ || *capped_radius_ > active_radius_)
                        capped_radius_ = active_radius_;
                    active_.reset();
                    continue;
            }
        }
        // schedule the next (radius, prefix) probe
        const int current_pass = pass_done_ + 1;
        if (current_pass > pass) return Status::running;  // pass work complete
        if (next_radius_ > current_pass) {
            pass_done_ = current_pass;
            next_radius_ = 0;
            continue;
        }
        const int n = next_radius_++;
        if (capped_radius_ && n >= *capped_radius_) continue;
        const uint64_t t = Schedule::prefix_at(current_pass);
        if (static_cast<size_t>(n) < fail_prefix_.size() &&
            fail_prefix_[size_t(n)] >= pres_.source->ensure(t))
            continue;
        active_ = std::make_unique<Probe>(pres_, pattern_, n, t, opts_);
        active_radius_ = n;
    }
}

// --- Certifier ---------------------------------------------------------------------

Certifier::Certifier(ForbiddenPresentation pres, Pattern p, ProbeOptions opts)
    : pres_(std::move(pres)), pattern_(std::move(p)), opts_(opts) {
    prober_ = std::make_unique<PatternProber>(pres_, pattern_, opts_);
}

std::optional<std::pair<int, uint64_t>> Certifier::advance(BudgetMeter& meter,
                                                           uint64_t target) {
    int idle_passes = 0;
    while (meter.spent() < target) {
        if (prober_->certified()) return prober_->certificate();
        const uint64_t before = meter.spent();
        const auto st = prober_->advance(meter, target, pass_);
        if (st == PatternProber::Status::certified) return prober_->certificate();
        if (meter.spent() >= target) return std::nullopt;
        // the pass is complete; move on, but give up if probing is stuck
        idle_passes = (meter.spent() == before) ? idle_passes + 1 : 0;
        if (idle_passes >= 3) return std::nullopt;
        ++pass_;
    }
    return std::nullopt;
}

// --- Enumeration ---------------------------------------------------------------------

void Enumeration::step(uint64_t units) {
    const uint64_t target = meter_.spent() + units;
    run(target);
}

json Enumeration::trace() const {
    json out = json::array();
    for (const auto& e : emissions_) {
        out.push_back(json{{"pattern", e.pattern.to_text()},
                           {"radius", e.radius},
                           {"prefixLen", e.prefix_len},
                           {"unitsAtEmit", e.units_at_emit}});
    }
    return out;
}

CoLanguage::CoLanguage(ForbiddenPresentation pres, ProbeOptions opts)
    : pres_(std::move(pres)), opts_(opts), candidates_(pres_.space) {}

void CoLanguage::run(uint64_t target) {
    while (meter_.spent() < target) {
        const size_t window = Schedule::candidates_at(pass_);
        if (cand_idx_ >= window) {
            ++pass_;
            cand_idx_ = 0;
            continue;
        }
        while (probers_.size() <= cand_idx_) {
            const Pattern& p = candidates_.at(probers_.size());
            probers_.push_back(std::make_unique<PatternProber>(pres_, p, opts_));
        }
        auto& prober = *probers_[cand_idx_];
        if (prober.certified()) {
            ++cand_idx_;
            continue;
        }
        const auto st = prober.advance(meter_, target, pass_);
        if (st == PatternProber::Status::certified) {
            const auto& cert = *prober.certificate();
            emissions_.push_back(
                {candidates_.at(cand_idx_), cert.first, cert.second, meter_.spent()});
            ++cand_idx_;
            continue;
        }
        if (meter_.spent() >= target) return;
        ++cand_idx_;  // pass work complete for this candidate
    }
}

// --- emptiness -------------------------------------------------------------------------

Verdict emptiness_certificate(const ForbiddenPresentation& pres, uint64_t budget,
                              const ProbeOptions& opts) {
    BudgetMeter meter;
    Certifier cert(pres, Pattern(pres.space), opts);
    const auto res = cert.advance(meter, budget);
    Verdict v;
    v.budget_used = meter.spent();
    if (res) {
        v.outcome = Verdict::Outcome::yes;
        v.certificate = json{{"kind", "emptiness"},
                             {"radius", res->first},
                             {"prefixLen", res->second}};
    } else {
        v.outcome = Verdict::Outcome::exhausted;
    }
    return v;
}

bool verify_emission(const ForbiddenPresentation& pres, const Pattern& p, int radius,
                     uint64_t prefix, const ProbeOptions& opts) {
    Probe probe(pres, p, radius, prefix, opts);
    BudgetMeter meter;
    for (;;) {
        const auto st = probe.advance(meter, uint64_t{1} << 30);
        if (st == Probe::Status::running) continue;
        return st == Probe::Status::certified;
    }
}

json pattern_json(const Pattern& p) { return json(p.to_text()); }

Pattern pattern_from_json(const SpacePtr& space, const json& j) {
    return Pattern::parse(space, j.get<std::string>());
}

}  // namespace shiftlab::streams
