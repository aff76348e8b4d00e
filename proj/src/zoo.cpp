#include "shiftlab/zoo.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace shiftlab::zoo {

using grid::Alphabet;
using grid::ConfigError;
using grid::Family;
using grid::GroupSpec;
using streams::BigInt;
using streams::rational_ceil;
using streams::rational_floor;

namespace {

std::vector<int> row_of(const Pattern& p, long long lo, long long hi) {
    // letters by position; -1 marks a gap
    std::vector<int> row(size_t(hi - lo + 1), -1);
    for (const auto& c : p.cells())
        row[size_t(p.space()->group->z_value(c.key) - lo)] = c.letter;
    return row;
}

bool contains_row(const std::vector<int>& hay, const std::vector<int>& needle) {
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

std::function<bool(const Pattern&)> pattern_oracle_from_words(
    const SpacePtr& space, std::function<bool(const std::vector<int>&)> words,
    bool nonempty) {
    return [space, words = std::move(words), nonempty](const Pattern& p) -> bool {
        if (p.empty_support()) return nonempty;
        if (!nonempty) return false;
        const auto hull = p.z_hull();
        if (!hull) throw ConfigError("this oracle needs patterns over Z");
        const auto row = row_of(p, hull->first, hull->second);
        std::vector<size_t> gaps;
        for (size_t i = 0; i < row.size(); ++i)
            if (row[i] < 0) gaps.push_back(i);
        const uint64_t base = uint64_t(space->alphabet->size());
        uint64_t count = 1;
        for (size_t i = 0; i < gaps.size(); ++i) {
            if (count > (uint64_t{1} << 20))
                throw ConfigError("too many gaps to fill in an oracle call");
            count *= base;
        }
        std::vector<int> filled(row);
        for (uint64_t v = 0; v < count; ++v) {
            uint64_t rest = v;
            for (size_t g : gaps) {
                filled[g] = int(rest % base);
                rest /= base;
            }
            if (words(filled)) return true;
        }
        return false;
    };
}

// --- SFT via De Bruijn graph --------------------------------------------------

namespace {

struct DeBruijn {
    int m = 2;
    int asize = 2;
    std::vector<std::vector<int>> rows;  // expanded forbidden rows (no gaps)
    std::set<std::vector<int>> states;   // trimmed (m-1)-words
    bool kill_all = false;               // an empty-support pattern was forbidden

    bool window_ok(const std::vector<int>& win) const {
        for (const auto& r : rows)
            if (contains_row(win, r)) return false;
        return true;
    }

    bool word_in(const std::vector<int>& w) const {
        if (kill_all || states.empty()) return false;
        const size_t k = size_t(m - 1);
        if (w.size() < k) {
            for (const auto& s : states)
                if (contains_row(s, w)) return true;
            return false;
        }
        for (size_t i = 0; i + k <= w.size(); ++i) {
            std::vector<int> st(w.begin() + long(i), w.begin() + long(i + k));
            if (!states.count(st)) return false;
        }
        for (size_t i = 0; i + size_t(m) <= w.size(); ++i) {
            std::vector<int> win(w.begin() + long(i), w.begin() + long(i) + m);
            if (!window_ok(win)) return false;
        }
        return true;
    }
};

std::shared_ptr<DeBruijn> build_debruijn(const SpacePtr& space,
                                         const std::vector<Pattern>& forbidden) {
    auto db = std::make_shared<DeBruijn>();
    db->asize = space->alphabet->size();
    int max_width = 1;
    for (const auto& p : forbidden) {
        if (p.empty_support()) {
            db->kill_all = true;
            continue;
        }
        const auto hull = p.z_hull();
        if (!hull) throw ConfigError("sft forbidden patterns must live over Z");
        const long long width = hull->second - hull->first + 1;
        if (width > 12) throw ConfigError("sft window wider than the supported bound");
        max_width = std::max<int>(max_width, int(width));
        const auto row = row_of(p, hull->first, hull->second);
        // expand gaps into all completions
        std::vector<size_t> gaps;
        for (size_t i = 0; i < row.size(); ++i)
            if (row[i] < 0) gaps.push_back(i);
        uint64_t count = 1;
        for (size_t i = 0; i < gaps.size(); ++i) count *= uint64_t(db->asize);
        for (uint64_t v = 0; v < count; ++v) {
            auto filled = row;
            uint64_t rest = v;
            for (size_t g : gaps) {
                filled[g] = int(rest % uint64_t(db->asize));
                rest /= uint64_t(db->asize);
            }
            db->rows.push_back(filled);
        }
    }
    db->m = std::max(2, max_width);
    if (db->kill_all) return db;

    // states: locally allowed (m-1)-words
    const size_t k = size_t(db->m - 1);
    uint64_t nstates = 1;
    for (size_t i = 0; i < k; ++i) {
        nstates *= uint64_t(db->asize);
        if (nstates > (uint64_t{1} << 20))
            throw ConfigError("sft state space too large");
    }
    std::set<std::vector<int>> alive;
    for (uint64_t v = 0; v < nstates; ++v) {
        std::vector<int> st(k, 0);
        uint64_t rest = v;
        for (size_t i = 0; i < k; ++i) {
            st[k - 1 - i] = int(rest % uint64_t(db->asize));
            rest /= uint64_t(db->asize);
        }
        if (db->window_ok(st)) alive.insert(st);
    }
    // trim states without successors or predecessors until stable
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<std::vector<int>> keep;
        for (const auto& st : alive) {
            bool has_out = false, has_in = false;
            for (int c = 0; c < db->asize && !(has_out && has_in); ++c) {
                std::vector<int> win(st);
                win.push_back(c);
                std::vector<int> nxt(win.begin() + 1, win.end());
                if (!has_out && alive.count(nxt) && db->window_ok(win)) has_out = true;
                std::vector<int> pwin;
                pwin.push_back(c);
                pwin.insert(pwin.end(), st.begin(), st.end());
                std::vector<int> prv(pwin.begin(), pwin.end() - 1);
                if (!has_in && alive.count(prv) && db->window_ok(pwin)) has_in = true;
            }
            if (has_out && has_in) keep.insert(st);
        }
        if (keep.size() != alive.size()) {
            alive = std::move(keep);
            changed = true;
        }
    }
    db->states = std::move(alive);
    return db;
}

}  // namespace

ZooShift sft(const SpacePtr& space, std::vector<Pattern> forbidden) {
    if (space->group->family() != Family::integers)
        throw ConfigError("zoo SFTs live over Z");
    auto db = build_debruijn(space, forbidden);
    auto words = [db](const std::vector<int>& w) { return db->word_in(w); };
    ZooShift shift;
    shift.label = "sft";
    shift.space = space;
    shift.meta.tags = {"sft"};
    if (forbidden.empty()) shift.meta.tags.push_back("full");
    shift.presentation = streams::make_sft(space, std::move(forbidden), "sft");
    shift.has_oracle = true;
    shift.word_oracle = words;
    shift.oracle = pattern_oracle_from_words(space, words, !db->states.empty());
    return shift;
}

ZooShift full_shift(const std::vector<std::string>& letters) {
    auto space = grid::make_space(GroupSpec::integers(), Alphabet::of(letters));
    auto shift = sft(space, {});
    shift.label = "full";
    shift.meta.tags = {"sft", "full", "period-minimal"};
    if (letters.size() == 2) shift.meta.per_prefix = {2, 4, 10, 22};
    shift.meta.entropy = "log2(" + std::to_string(letters.size()) + ")";
    return shift;
}

ZooShift golden_mean() {
    auto space = grid::z_binary_space();
    auto shift = sft(space, {Pattern::word(space, "11")});
    shift.label = "golden-mean";
    shift.meta.tags = {"sft", "mixing", "period-minimal", "entropy-minimal"};
    shift.meta.per_prefix = {1, 3, 6, 10};
    shift.meta.entropy = "log2((1+sqrt(5))/2)";
    shift.meta.distinguishing = {"11"};
    return shift;
}

// --- Sturmian windows ------------------------------------------------------------

SturmianSource::SturmianSource(SpacePtr space, ApproxReal alpha_lo, ApproxReal beta_hi)
    : space_(std::move(space)),
      alpha_lo_(std::move(alpha_lo)),
      beta_hi_(std::move(beta_hi)) {
    if (space_->alphabet->size() != 2)
        throw ConfigError("sturmian windows use the binary alphabet");
}

void SturmianSource::round(int r) {
    const auto alo = alpha_lo_.lower(size_t(r));
    const auto bhi = beta_hi_.upper(size_t(r));
    for (int len = 1; len <= r; ++len) {
        for (uint64_t v = 0; v < (uint64_t{1} << len); ++v) {
            std::vector<int> w(size_t(len), 0);
            int ones = 0;
            uint64_t rest = v;
            for (int i = len - 1; i >= 0; --i) {
                w[size_t(i)] = int(rest % 2);
                ones += int(rest % 2);
                rest /= 2;
            }
            if (index_.count(w)) continue;
            bool too_few = false, too_many = false;
            if (alo) too_few = BigInt(ones) < rational_floor(*alo * len);
            if (bhi) too_many = BigInt(ones) > rational_ceil(*bhi * len);
            if (too_few || too_many) {
                index_.emplace(w, items_.size());
                items_.push_back(Pattern::from_letter_row(space_, w, 0));
                violations_.push_back({len, ones, too_many});
            }
        }
    }
    per_round_total_.push_back(items_.size());
}

uint64_t SturmianSource::ensure(uint64_t want) {
    const int limit = int(std::min<uint64_t>(want + 6, 20));
    while (uint64_t(items_.size()) < want && next_round_ <= limit) round(next_round_++);
    uint64_t have = 0;
    if (!per_round_total_.empty())
        have = per_round_total_[size_t(std::min(next_round_ - 2, limit - 1))];
    return std::min(want, have);
}

bool SturmianSource::kills_row(const std::vector<int>& row, long long,
                               uint64_t t) {
    const uint64_t n = ensure(t);
    if (n == 0) return false;
    std::vector<int> run;
    for (size_t i = 0; i <= row.size(); ++i) {
        if (i == row.size() || row[i] < 0) {
            for (size_t a = 0; a < run.size(); ++a) {
                for (size_t b = a + 1; b <= run.size(); ++b) {
                    std::vector<int> v(run.begin() + long(a), run.begin() + long(b));
                    auto it = index_.find(v);
                    if (it != index_.end() && it->second < n) return true;
                }
            }
            run.clear();
        } else {
            run.push_back(row[i]);
        }
    }
    return false;
}

bool SturmianSource::kills(const Pattern& q, uint64_t t) {
    const uint64_t n = ensure(t);
    if (n == 0) return false;
    std::vector<std::pair<long long, int>> rows;
    for (const auto& c : q.cells())
        rows.push_back({space_->group->z_value(c.key), c.letter});
    std::sort(rows.begin(), rows.end());
    size_t start = 0;
    for (size_t i = 1; i <= rows.size(); ++i) {
        if (i == rows.size() || rows[i].first != rows[i - 1].first + 1) {
            std::vector<int> run;
            for (size_t j = start; j < i; ++j) run.push_back(rows[j].second);
            for (size_t a = 0; a < run.size(); ++a) {
                for (size_t b = a + 1; b <= run.size(); ++b) {
                    std::vector<int> v(run.begin() + long(a), run.begin() + long(b));
                    auto it = index_.find(v);
                    if (it != index_.end() && it->second < n) return true;
                }
            }
            start = i;
        }
    }
    return false;
}

json SturmianSource::describe() const {
    return json{{"kind", "sturmian"},
                {"alphaLo", alpha_lo_.describe()["real"]},
                {"betaHi", beta_hi_.describe()["real"]}};
}

ZooShift sturmian_window(const ApproxReal& alpha_lo, const ApproxReal& beta_hi) {
    auto space = grid::z_binary_space();
    auto source = std::make_shared<SturmianSource>(space, alpha_lo, beta_hi);
    ZooShift shift;
    shift.space = space;
    shift.label = "sturmian";
    shift.presentation = ForbiddenPresentation{space, source, "sturmian"};
    shift.meta.tags = {"sturmian-window", "effectively-closed"};
    if (alpha_lo.exact() && beta_hi.exact()) {
        const Rational a = *alpha_lo.exact();
        const Rational b = *beta_hi.exact();
        if (a > b) throw ConfigError("sturmian window needs alpha <= beta");
        auto words = [a, b](const std::vector<int>& w) {
            std::vector<int> ones(w.size() + 1, 0);
            for (size_t i = 0; i < w.size(); ++i) ones[i + 1] = ones[i] + w[i];
            for (size_t i = 0; i < w.size(); ++i) {
                for (size_t j = i + 1; j <= w.size(); ++j) {
                    const long long len = (long long)(j - i);
                    const BigInt c = ones[j] - ones[i];
                    if (c < rational_floor(a * len)) return false;
                    if (c > rational_ceil(b * len)) return false;
                }
            }
            return true;
        };
        shift.word_oracle = words;
        shift.has_oracle = true;
        shift.oracle = pattern_oracle_from_words(space, words, true);
        shift.meta.entropy = "0 when alpha = beta";
    }
    shift.label = "sturmian:" + alpha_lo.describe()["real"].get<std::string>() + "," +
                  beta_hi.describe()["real"].get<std::string>();
    return shift;
}

// --- substitution shifts -----------------------------------------------------------

namespace {

struct Substitution {
    std::vector<std::string> letters;
    std::vector<std::vector<int>> images;

    // factor sets of the fixed point, one per exact length, stabilized
    mutable std::map<int, std::set<std::vector<int>>> cache;

    const std::set<std::vector<int>>& factors(int len) const {
        auto it = cache.find(len);
        if (it != cache.end()) return it->second;

        auto collect = [&](const std::vector<int>& u) {
            std::set<std::vector<int>> out;
            for (int l = 1; l <= len; ++l)
                for (size_t s = 0; s + size_t(l) <= u.size(); ++s)
                    out.insert(std::vector<int>(u.begin() + long(s),
                                                u.begin() + long(s) + l));
            return out;
        };
        std::vector<int> u{0};
        auto prev = collect(u);
        for (int iter = 0; iter < 64; ++iter) {
            std::vector<int> next;
            for (int a : u) {
                next.insert(next.end(), images[size_t(a)].begin(),
                            images[size_t(a)].end());
                if (next.size() > 2'000'000)
                    throw ConfigError("substitution expansion too large");
            }
            auto cur = collect(next);
            if (cur == prev && u.size() >= size_t(len)) break;
            prev = std::move(cur);
            u = std::move(next);
        }
        auto& slot = cache[len];
        for (const auto& f : prev)
            if (int(f.size()) == len) slot.insert(f);
        return slot;
    }
};

}  // namespace

ZooShift substitution_shift(
    const std::vector<std::pair<std::string, std::string>>& rules) {
    std::vector<std::string> letters;
    for (const auto& [l, _] : rules) letters.push_back(l);
    auto alphabet = Alphabet::of(letters);
    auto space = grid::make_space(GroupSpec::integers(), alphabet);

    auto sub = std::make_shared<Substitution>();
    sub->letters = letters;
    for (const auto& [_, image] : rules) {
        std::vector<int> img = alphabet->parse_letters(image);
        if (img.empty()) throw ConfigError("substitution images must be nonempty");
        sub->images.push_back(std::move(img));
    }
    if (sub->images[0][0] != 0 || sub->images[0].size() < 2)
        throw ConfigError(
            "substitution needs a prolongable first letter (sigma(a0) = a0...)");
    // bounded primitivity check: every letter eventually reaches every letter
    const size_t k = letters.size();
    std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
    for (size_t a = 0; a < k; ++a)
        for (int b : sub->images[a]) reach[a][size_t(b)] = true;
    for (size_t step = 0; step < 2 * k; ++step) {
        auto next = reach;
        for (size_t a = 0; a < k; ++a)
            for (size_t b = 0; b < k; ++b)
                if (reach[a][b])
                    for (size_t c = 0; c < k; ++c)
                        next[a][c] = next[a][c] || reach[b][c];
        reach = std::move(next);
    }
    for (size_t a = 0; a < k; ++a)
        for (size_t b = 0; b < k; ++b)
            if (!reach[a][b])
                throw ConfigError("substitution is not primitive within the bound");

    auto words = [sub](const std::vector<int>& w) {
        if (w.empty()) return true;
        return sub->factors(int(w.size())).count(w) > 0;
    };

    json jrules = json::object();
    for (const auto& [l, image] : rules) jrules[l] = image;

    ZooShift shift;
    shift.space = space;
    shift.label = "substitution";
    shift.presentation = streams::make_rejected_words(
        space, words, "substitution", json{{"kind", "substitution"}, {"rules", jrules}});
    shift.has_oracle = true;
    shift.word_oracle = words;
    shift.oracle = pattern_oracle_from_words(space, words, true);
    shift.meta.tags = {"substitution", "minimal"};
    shift.meta.per_prefix = {0, 0, 0, 0};
    shift.meta.entropy = "0";
    return shift;
}

ZooShift fibonacci() {
    auto shift = substitution_shift({{"0", "01"}, {"1", "0"}});
    shift.label = "fibonacci";
    shift.meta.distinguishing = {"11", "000"};
    return shift;
}

// --- periodic orbits ---------------------------------------------------------------

ZooShift periodic_orbit(const std::string& word) {
    auto space = grid::z_binary_space();
    auto base = space->alphabet->parse_letters(word);
    if (base.empty()) throw ConfigError("orbit word must be nonempty");

    auto words = [base](const std::vector<int>& v) {
        if (v.empty()) return true;
        const size_t reps = (v.size() + 2 * base.size()) / base.size();
        std::vector<int> rep;
        for (size_t i = 0; i < reps; ++i)
            rep.insert(rep.end(), base.begin(), base.end());
        return contains_row(rep, v);
    };

    // primitive period of the repeated word
    size_t period = base.size();
    for (size_t d = 1; d < base.size(); ++d) {
        if (base.size() % d) continue;
        bool ok = true;
        for (size_t i = 0; ok && i < base.size(); ++i) ok = base[i] == base[i % d];
        if (ok) {
            period = d;
            break;
        }
    }

    ZooShift shift;
    shift.space = space;
    shift.label = "orbit:" + word;
    shift.presentation = streams::make_rejected_words(
        space, words, shift.label, json{{"kind", "orbit"}, {"word", word}});
    shift.has_oracle = true;
    shift.word_oracle = words;
    shift.oracle = pattern_oracle_from_words(space, words, true);
    shift.meta.tags = {"finite-orbit", "period-minimal"};
    for (size_t i = 1; i <= 4; ++i)
        shift.meta.per_prefix.push_back(i >= period ? uint64_t(period) : 0);
    shift.meta.entropy = "0";
    return shift;
}

// --- products ------------------------------------------------------------------------

namespace {

struct PairAlphabet {
    grid::AlphabetPtr left, right, pair;

    int pair_index(int ia, int ib) const { return ia * right->size() + ib; }
    int left_of(int ip) const { return ip / right->size(); }
    int right_of(int ip) const { return ip % right->size(); }
};

PairAlphabet make_pair_alphabet(const grid::AlphabetPtr& a, const grid::AlphabetPtr& b) {
    if (a->uniform_width() == 0 || b->uniform_width() == 0)
        throw ConfigError("product factors need uniform-width alphabets");
    std::vector<std::string> letters;
    for (int i = 0; i < a->size(); ++i)
        for (int j = 0; j < b->size(); ++j) letters.push_back(a->letter(i) + b->letter(j));
    return PairAlphabet{a, b, Alphabet::of(letters)};
}

Pattern project(const Pattern& p, const SpacePtr& target, const PairAlphabet& pa,
                bool left) {
    std::vector<Pattern::Cell> cells;
    for (const auto& c : p.cells())
        cells.push_back({c.key, left ? pa.left_of(c.letter) : pa.right_of(c.letter)});
    return Pattern(target, std::move(cells));
}

// Lifts both factor streams: each forbidden pattern of one side expands to
// every completion over the other side's letters on the same support.
class LiftedProductSource final : public streams::ForbiddenSource {
  public:
    LiftedProductSource(SpacePtr pair_space, PairAlphabet pa,
                        streams::SourcePtr left, streams::SourcePtr right,
                        json desc)
        : space_(std::move(pair_space)),
          pa_(std::move(pa)),
          left_(std::move(left)),
          right_(std::move(right)),
          desc_(std::move(desc)) {}

    SpacePtr space() const override { return space_; }
    bool finite() const override { return left_->finite() && right_->finite(); }

    uint64_t ensure(uint64_t want) override {
        const uint64_t block_limit = want + 8;
        while (uint64_t(items_.size()) < want && next_block_ < block_limit) {
            const uint64_t b = next_block_++;
            expand(true, b);
            expand(false, b);
            per_block_total_.push_back(items_.size());
        }
        uint64_t have = 0;
        if (!per_block_total_.empty())
            have = per_block_total_[size_t(
                std::min<uint64_t>(next_block_, block_limit) - 1)];
        return std::min(want, have);
    }

    const Pattern& at(uint64_t i) const override { return items_.at(i); }
    json describe() const override { return desc_; }

  private:
    void expand(bool from_left, uint64_t idx) {
        auto& src = from_left ? left_ : right_;
        if (src->ensure(idx + 1) <= idx) return;
        const Pattern& f = src->at(idx);
        const auto other = from_left ? pa_.right : pa_.left;
        const uint64_t base = uint64_t(other->size());
        uint64_t count = 1;
        for (int i = 0; i < f.size(); ++i) {
            if (count > (uint64_t{1} << 16))
                throw ConfigError("product lift: forbidden support too large");
            count *= base;
        }
        for (uint64_t v = 0; v < count; ++v) {
            std::vector<Pattern::Cell> cells;
            uint64_t rest = v;
            for (const auto& c : f.cells()) {
                const int q = int(rest % base);
                rest /= base;
                cells.push_back(
                    {c.key, from_left ? pa_.pair_index(c.letter, q)
                                      : pa_.pair_index(q, c.letter)});
            }
            items_.push_back(Pattern(space_, std::move(cells)));
        }
    }

    SpacePtr space_;
    PairAlphabet pa_;
    streams::SourcePtr left_, right_;
    json desc_;
    uint64_t next_block_ = 0;
    std::vector<uint64_t> per_block_total_;
    std::vector<Pattern> items_;
};

}  // namespace

ZooShift product_shift(const ZooShift& x, const ZooShift& y) {
    if (x.space->group->family() != Family::integers ||
        y.space->group->family() != Family::integers)
        throw ConfigError("products are built over Z factors");
    auto pa = make_pair_alphabet(x.space->alphabet, y.space->alphabet);
    auto space = grid::make_space(GroupSpec::integers(), pa.pair);
    json desc{{"kind", "product"},
              {"left", x.presentation.describe()},
              {"right", y.presentation.describe()}};
    auto source = std::make_shared<LiftedProductSource>(
        space, pa, x.presentation.source, y.presentation.source, desc);

    ZooShift shift;
    shift.space = space;
    shift.label = "product:" + x.label + "," + y.label;
    shift.presentation = ForbiddenPresentation{space, source, shift.label};
    if (x.has_oracle && y.has_oracle) {
        shift.has_oracle = true;
        auto xs = x.space;
        auto ys = y.space;
        auto xo = x.oracle;
        auto yo = y.oracle;
        shift.oracle = [=](const Pattern& p) {
            return xo(project(p, xs, pa, true)) && yo(project(p, ys, pa, false));
        };
        if (x.word_oracle && y.word_oracle) {
            auto xw = x.word_oracle;
            auto yw = y.word_oracle;
            shift.word_oracle = [=](const std::vector<int>& w) {
                std::vector<int> a(w.size()), b(w.size());
                for (size_t i = 0; i < w.size(); ++i) {
                    a[i] = pa.left_of(w[i]);
                    b[i] = pa.right_of(w[i]);
                }
                return xw(a) && yw(b);
            };
        }
    }
    shift.meta.tags = {"product"};
    return shift;
}

// --- single one ------------------------------------------------------------------------

namespace {

class SingleOneSource final : public streams::ForbiddenSource {
  public:
    explicit SingleOneSource(SpacePtr space) : space_(std::move(space)) {}

    SpacePtr space() const override { return space_; }
    bool finite() const override { return false; }
    uint64_t ensure(uint64_t want) override {
        const uint64_t have = std::min<uint64_t>(want, 2048);
        while (items_.size() < have) {
            const size_t k = items_.size();
            std::vector<int> w(k + 2, 0);
            w.front() = 1;
            w.back() = 1;
            items_.push_back(Pattern::from_letter_row(space_, w, 0));
        }
        return have;
    }
    const Pattern& at(uint64_t i) const override { return items_.at(i); }
    json describe() const override { return json{{"kind", "single-one"}}; }

    bool kills_row(const std::vector<int>& row, long long, uint64_t t) override {
        // 1 0^k 1 occurs iff two specified ones are separated by k < t
        // specified zeros
        const uint64_t n = ensure(t);
        for (size_t i = 0; i < row.size(); ++i) {
            if (row[i] != 1) continue;
            for (size_t j = i + 1; j < row.size() && j - i - 1 < n; ++j) {
                if (row[j] == 1) return true;
                if (row[j] != 0) break;
            }
        }
        return false;
    }

    bool packed(uint64_t t, std::vector<kernels::PackedWord>& out) override {
        if (t > 30) return false;
        ensure(t);
        out.clear();
        for (uint64_t i = 0; i < std::min<uint64_t>(t, items_.size()); ++i) {
            kernels::PackedWord f;
            f.width = int(i + 2);
            f.mask = (1u << f.width) - 1u;
            f.bits = 1u | (1u << (f.width - 1));
            out.push_back(f);
        }
        return true;
    }

  private:
    SpacePtr space_;
    std::vector<Pattern> items_;
};

}  // namespace

ZooShift single_one() {
    auto space = grid::z_binary_space();
    ZooShift shift;
    shift.space = space;
    shift.label = "single-one";
    shift.presentation = ForbiddenPresentation{
        space, std::make_shared<SingleOneSource>(space), "single-one"};
    shift.has_oracle = true;
    shift.oracle = [](const Pattern& p) {
        int ones = 0;
        for (const auto& c : p.cells()) ones += c.letter;
        return ones <= 1;
    };
    shift.word_oracle = [](const std::vector<int>& w) {
        int ones = 0;
        for (int l : w) ones += l;
        return ones <= 1;
    };
    shift.meta.tags = {"quasi-minimal", "countable"};
    shift.meta.per_prefix = {1, 1, 1, 1};
    shift.meta.entropy = "0";
    shift.meta.distinguishing = {"1"};
    return shift;
}

// --- registry -----------------------------------------------------------------------------

ZooShift by_selector(const std::string& selector) {
    const auto colon = selector.find(':');
    const std::string head = selector.substr(0, colon);
    const std::string rest =
        colon == std::string::npos ? "" : selector.substr(colon + 1);

    if (head == "full") {
        if (rest.empty()) return full_shift({"0", "1"});
        std::vector<std::string> letters;
        for (char c : rest) letters.push_back(std::string(1, c));
        return full_shift(letters);
    }
    if (head == "golden-mean") return golden_mean();
    if (head == "fibonacci") return fibonacci();
    if (head == "single-one") return single_one();
    if (head == "orbit") return periodic_orbit(rest);
    if (head == "sturmian") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ConfigError("sturmian selector needs two endpoints");
        return sturmian_window(ApproxReal::by_name(rest.substr(0, comma)),
                               ApproxReal::by_name(rest.substr(comma + 1)));
    }
    if (head == "product") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ConfigError("product selector needs two factors");
        return product_shift(by_selector(rest.substr(0, comma)),
                             by_selector(rest.substr(comma + 1)));
    }
    if (head == "sft") {
        std::ifstream in(rest);
        if (!in) throw ConfigError("cannot open sft file '" + rest + "'");
        json j = json::parse(in);
        std::vector<std::string> letters;
        for (const auto& l : j.at("alphabet")) letters.push_back(l.get<std::string>());
        auto space = grid::make_space(GroupSpec::integers(), Alphabet::of(letters));
        std::vector<Pattern> forbidden;
        for (const auto& w : j.at("forbidden"))
            forbidden.push_back(Pattern::parse(space, w.get<std::string>()));
        auto shift = sft(space, std::move(forbidden));
        shift.label = "sft:" + rest;
        return shift;
    }
    throw ConfigError("unknown shift selector '" + selector + "'");
}

std::vector<std::string> registry_names() {
    return {"full",      "full:<letters>",       "golden-mean",
            "fibonacci", "single-one",           "orbit:<word>",
            "sturmian:<alo>,<bhi>", "product:<a>,<b>", "sft:<file.json>"};
}

ForbiddenPresentation presentation_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sft") {
        std::vector<std::string> letters;
        for (const auto& l : j.at("alphabet")) letters.push_back(l.get<std::string>());
        auto space = grid::make_space(GroupSpec::integers(), Alphabet::of(letters));
        std::vector<Pattern> forbidden;
        for (const auto& w : j.at("forbidden"))
            forbidden.push_back(Pattern::parse(space, w.get<std::string>()));
        return streams::make_sft(space, std::move(forbidden), "sft");
    }
    if (kind == "substitution") {
        std::vector<std::pair<std::string, std::string>> rules;
        for (const auto& [k, v] : j.at("rules").items())
            rules.push_back({k, v.get<std::string>()});
        return substitution_shift(rules).presentation;
    }
    if (kind == "orbit")
        return periodic_orbit(j.at("word").get<std::string>()).presentation;
    if (kind == "sturmian")
        return sturmian_window(
                   ApproxReal::by_name(j.at("alphaLo").get<std::string>()),
                   ApproxReal::by_name(j.at("betaHi").get<std::string>()))
            .presentation;
    if (kind == "single-one") return single_one().presentation;
    if (kind == "product") {
        auto left = presentation_from_json(j.at("left"));
        auto right = presentation_from_json(j.at("right"));
        auto pa = make_pair_alphabet(left.space->alphabet, right.space->alphabet);
        auto space = grid::make_space(GroupSpec::integers(), pa.pair);
        auto source = std::make_shared<LiftedProductSource>(space, pa, left.source,
                                                            right.source, j);
        return ForbiddenPresentation{space, source, "product"};
    }
    if (kind == "forbid") {
        auto base = presentation_from_json(j.at("base"));
        std::vector<Pattern> extra;
        for (const auto& w : j.at("extra"))
            extra.push_back(Pattern::parse(base.space, w.get<std::string>()));
        return streams::forbid_patterns(base, extra);
    }
    throw ConfigError("unknown presentation kind '" + kind + "'");
}

}  // namespace shiftlab::zoo
