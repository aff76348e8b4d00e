#include "shiftlab/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace shiftlab::grid {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

bool parse_int(std::string_view s, long long& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace

// --- GroupSpec -------------------------------------------------------------

GroupSpec::GroupSpec(Family f, int rank, std::string name)
    : family_(f), rank_(rank), name_(std::move(name)) {
    auto base_name = [&](int axis) -> std::string {
        switch (family_) {
            case Family::integers:
                return "+1";
            case Family::lattice: {
                static const char* axes[] = {"x", "y", "z", "w"};
                if (rank_ <= 4) return axes[axis];
                return "x" + std::to_string(axis + 1);
            }
            case Family::free_group:
                return std::string(1, static_cast<char>('a' + axis));
        }
        return "?";
    };
    for (int axis = 0; axis < rank_; ++axis) {
        std::string pos = base_name(axis);
        std::string neg;
        if (family_ == Family::integers) {
            neg = "-1";
        } else {
            neg = pos + "'";
        }
        symbol_names_.push_back(pos);
        symbol_names_.push_back(neg);
    }
    for (int sym = 0; sym < symbol_count(); ++sym) {
        const std::string& n = symbol_names_[sym];
        token_to_symbol_[n] = sym;
        token_to_symbol_[n + "'"] = inverse_symbol(sym);
        token_to_symbol_[n + "^-1"] = inverse_symbol(sym);
        token_to_symbol_[n + "⁻¹"] = inverse_symbol(sym);
    }
}

std::shared_ptr<const GroupSpec> GroupSpec::integers() {
    static std::shared_ptr<const GroupSpec> inst(
        new GroupSpec(Family::integers, 1, "Z"));
    return inst;
}

std::shared_ptr<const GroupSpec> GroupSpec::lattice(int dim) {
    if (dim < 1 || dim > 8) throw ConfigError("lattice dimension must be in 1..8");
    if (dim == 1) return integers();
    return std::shared_ptr<const GroupSpec>(
        new GroupSpec(Family::lattice, dim, "Z^" + std::to_string(dim)));
}

std::shared_ptr<const GroupSpec> GroupSpec::free_group(int rank) {
    if (rank < 1 || rank > 26) throw ConfigError("free group rank must be in 1..26");
    return std::shared_ptr<const GroupSpec>(
        new GroupSpec(Family::free_group, rank, "F" + std::to_string(rank)));
}

GroupElement GroupSpec::normalize(std::span<const int> symbols) const {
    for (int s : symbols) {
        if (s < 0 || s >= symbol_count())
            throw ConfigError("unknown generator symbol index");
    }
    if (family_ == Family::free_group) {
        std::vector<uint8_t> stack;
        for (int s : symbols) {
            if (!stack.empty() && stack.back() == uint8_t(inverse_symbol(s)))
                stack.pop_back();
            else
                stack.push_back(uint8_t(s));
        }
        return GroupElement(std::move(stack));
    }
    std::vector<long long> coords(rank_, 0);
    for (int s : symbols) coords[s / 2] += (s % 2) ? -1 : 1;
    std::vector<uint8_t> word;
    for (int axis = 0; axis < rank_; ++axis) {
        const long long c = coords[axis];
        const uint8_t sym = uint8_t(2 * axis + (c < 0 ? 1 : 0));
        for (long long i = 0; i < std::llabs(c); ++i) word.push_back(sym);
    }
    return GroupElement(std::move(word));
}

GroupElement GroupSpec::multiply(const GroupElement& a, const GroupElement& b) const {
    std::vector<int> joined;
    joined.reserve(a.word().size() + b.word().size());
    for (uint8_t s : a.word()) joined.push_back(s);
    for (uint8_t s : b.word()) joined.push_back(s);
    return normalize(joined);
}

GroupElement GroupSpec::inverse(const GroupElement& g) const {
    std::vector<uint8_t> word(g.word());
    if (family_ == Family::free_group) std::reverse(word.begin(), word.end());
    for (auto& s : word) s = uint8_t(inverse_symbol(s));
    if (family_ != Family::free_group) {
        // canonical form keeps axis blocks in order; flipping signs preserves it
        return GroupElement(std::move(word));
    }
    return GroupElement(std::move(word));
}

GroupElement GroupSpec::parse_word(std::string_view text) const {
    text = trim(text);
    if (text.empty() || text == "e") return identity();
    if (family_ == Family::integers) {
        long long v = 0;
        if (parse_int(text, v)) return z_element(v);
    }
    std::vector<int> symbols;
    std::istringstream iss{std::string(text)};
    std::string tok;
    while (iss >> tok) {
        if (tok == "e") continue;
        long long v = 0;
        if (family_ == Family::integers && parse_int(tok, v)) {
            const int sym = v < 0 ? 1 : 0;
            for (long long i = 0; i < std::llabs(v); ++i) symbols.push_back(sym);
            continue;
        }
        auto it = token_to_symbol_.find(tok);
        if (it == token_to_symbol_.end())
            throw ParseError("unknown generator token '" + tok + "' in group " + name_);
        symbols.push_back(it->second);
    }
    return normalize(symbols);
}

std::string GroupSpec::print_word(const GroupElement& g) const {
    if (family_ == Family::integers) return std::to_string(z_value(g));
    if (g.is_identity()) return "e";
    std::string out;
    for (size_t i = 0; i < g.word().size(); ++i) {
        if (i) out += ' ';
        out += symbol_names_[g.word()[i]];
    }
    return out;
}

long long GroupSpec::z_value(const GroupElement& g) const {
    long long v = 0;
    for (uint8_t s : g.word()) v += (s % 2) ? -1 : 1;
    return v;
}

GroupElement GroupSpec::z_element(long long v) const {
    std::vector<uint8_t> word(size_t(std::llabs(v)), uint8_t(v < 0 ? 1 : 0));
    return GroupElement(std::move(word));
}

std::vector<long long> GroupSpec::coordinates(const GroupElement& g) const {
    std::vector<long long> coords(rank_, 0);
    for (uint8_t s : g.word()) coords[s / 2] += (s % 2) ? -1 : 1;
    return coords;
}

const std::vector<GroupElement>& GroupSpec::ball(int n) const {
    if (n < 0) throw ConfigError("ball radius must be nonnegative");
    std::lock_guard<std::mutex> lock(ball_mutex_);
    while (static_cast<int>(balls_.size()) <= n) {
        const int radius = static_cast<int>(balls_.size());
        std::vector<GroupElement> elems;
        if (family_ == Family::free_group) {
            std::vector<std::vector<uint8_t>> level{{}};
            elems.push_back(GroupElement{});
            for (int len = 1; len <= radius; ++len) {
                std::vector<std::vector<uint8_t>> next;
                for (const auto& w : level) {
                    for (int s = 0; s < symbol_count(); ++s) {
                        if (!w.empty() && w.back() == uint8_t(inverse_symbol(s)))
                            continue;
                        auto ext = w;
                        ext.push_back(uint8_t(s));
                        next.push_back(std::move(ext));
                    }
                }
                for (auto& w : next) elems.emplace_back(w);
                level = std::move(next);
            }
        } else {
            // all coordinate vectors with l1 norm <= radius
            std::vector<long long> coords(rank_, 0);
            std::vector<int> symbols;
            auto emit = [&]() {
                symbols.clear();
                for (int axis = 0; axis < rank_; ++axis) {
                    const long long c = coords[axis];
                    for (long long i = 0; i < std::llabs(c); ++i)
                        symbols.push_back(2 * axis + (c < 0 ? 1 : 0));
                }
                elems.push_back(normalize(symbols));
            };
            auto rec = [&](auto&& self, int axis, int budget) -> void {
                if (axis == rank_) {
                    emit();
                    return;
                }
                for (long long c = -budget; c <= budget; ++c) {
                    coords[axis] = c;
                    self(self, axis + 1, budget - static_cast<int>(std::llabs(c)));
                }
                coords[axis] = 0;
            };
            rec(rec, 0, radius);
        }
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        balls_.push_back(std::move(elems));
    }
    return balls_[n];
}

// --- Alphabet ---------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) throw ConfigError("alphabet must be nonempty");
    uniform_width_ = static_cast<int>(letters_.front().size());
    for (size_t i = 0; i < letters_.size(); ++i) {
        const auto& l = letters_[i];
        if (l.empty()) throw ConfigError("alphabet letters must be nonempty");
        if (static_cast<int>(l.size()) != uniform_width_) uniform_width_ = 0;
        if (!index_.emplace(l, static_cast<int>(i)).second)
            throw ConfigError("duplicate alphabet letter '" + l + "'");
    }
}

std::shared_ptr<const Alphabet> Alphabet::of(std::vector<std::string> letters) {
    return std::shared_ptr<const Alphabet>(new Alphabet(std::move(letters)));
}

std::shared_ptr<const Alphabet> Alphabet::binary() {
    static std::shared_ptr<const Alphabet> inst = of({"0", "1"});
    return inst;
}

std::optional<int> Alphabet::index(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string Alphabet::print_letters(std::span<const int> idx) const {
    std::string out;
    for (int i : idx) out += letter(i);
    return out;
}

std::vector<int> Alphabet::parse_letters(std::string_view text) const {
    if (uniform_width_ == 0)
        throw ParseError("word form needs a uniform-width alphabet");
    if (text.size() % size_t(uniform_width_) != 0)
        throw ParseError("word length is not a multiple of the letter width");
    std::vector<int> out;
    for (size_t i = 0; i < text.size(); i += size_t(uniform_width_)) {
        auto idx = index(text.substr(i, size_t(uniform_width_)));
        if (!idx)
            throw ParseError("unknown letter '" +
                             std::string(text.substr(i, size_t(uniform_width_))) + "'");
        out.push_back(*idx);
    }
    return out;
}

SpacePtr make_space(GroupPtr group, AlphabetPtr alphabet) {
    return std::make_shared<Space>(Space{std::move(group), std::move(alphabet)});
}

SpacePtr z_binary_space() {
    static SpacePtr inst = make_space(GroupSpec::integers(), Alphabet::binary());
    return inst;
}

// --- Pattern ----------------------------------------------------------------

Pattern::Pattern(SpacePtr space, std::vector<Cell> cells)
    : space_(std::move(space)), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(),
              [](const Cell& a, const Cell& b) { return a.key < b.key; });
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (i > 0 && cells_[i].key == cells_[i - 1].key)
            throw ConfigError("pattern has a duplicate cell");
        if (cells_[i].letter < 0 || cells_[i].letter >= space_->alphabet->size())
            throw ConfigError("pattern letter out of range");
    }
}

Pattern Pattern::word(const SpacePtr& space, std::string_view letters) {
    return word_at(space, letters, 0);
}

Pattern Pattern::word_at(const SpacePtr& space, std::string_view letters,
                         long long start) {
    auto idx = space->alphabet->parse_letters(letters);
    return from_letter_row(space, idx, start);
}

Pattern Pattern::from_letter_row(const SpacePtr& space, std::span<const int> letters,
                                 long long start) {
    if (space->group->family() != Family::integers)
        throw ConfigError("word patterns require the group Z");
    std::vector<Cell> cells;
    cells.reserve(letters.size());
    for (size_t i = 0; i < letters.size(); ++i)
        cells.push_back({space->group->z_element(start + (long long)i), letters[i]});
    return Pattern(space, std::move(cells));
}

std::optional<int> Pattern::at(const GroupElement& g) const {
    auto it = std::lower_bound(
        cells_.begin(), cells_.end(), g,
        [](const Cell& c, const GroupElement& k) { return c.key < k; });
    if (it != cells_.end() && it->key == g) return it->letter;
    return std::nullopt;
}

std::optional<std::vector<int>> Pattern::word_letters() const {
    if (space_->group->family() != Family::integers) return std::nullopt;
    if (cells_.empty()) return std::vector<int>{};
    std::vector<std::pair<long long, int>> rows;
    rows.reserve(cells_.size());
    for (const auto& c : cells_)
        rows.push_back({space_->group->z_value(c.key), c.letter});
    std::sort(rows.begin(), rows.end());
    if (rows.front().first != 0) return std::nullopt;
    std::vector<int> out;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<long long>(i)) return std::nullopt;
        out.push_back(rows[i].second);
    }
    return out;
}

std::optional<std::pair<long long, long long>> Pattern::z_hull() const {
    if (space_->group->family() != Family::integers || cells_.empty())
        return std::nullopt;
    long long lo = 0, hi = 0;
    bool first = true;
    for (const auto& c : cells_) {
        const long long v = space_->group->z_value(c.key);
        if (first) {
            lo = hi = v;
            first = false;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return std::make_pair(lo, hi);
}

std::string Pattern::to_text() const {
    if (cells_.empty()) return "";
    if (auto w = word_letters(); w && space_->alphabet->uniform_width() > 0)
        return space_->alphabet->print_letters(*w);
    std::string out;
    bool first = true;
    for (const auto& c : cells_) {
        if (!first) out += ",";
        first = false;
        out += space_->group->print_word(c.key);
        out += ":";
        out += space_->alphabet->letter(c.letter);
    }
    return out;
}

Pattern Pattern::parse(const SpacePtr& space, std::string_view text) {
    text = trim(text);
    if (text.empty()) return Pattern(space);
    if (text.find(':') == std::string_view::npos) {
        auto letters = space->alphabet->parse_letters(text);
        return from_letter_row(space, letters, 0);
    }
    std::vector<Cell> cells;
    for (auto entry : split(text, ',')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        const size_t colon = entry.rfind(':');
        if (colon == std::string_view::npos)
            throw ParseError("pattern entry needs the form word:letter");
        const auto key = space->group->parse_word(entry.substr(0, colon));
        const auto letter_text = trim(entry.substr(colon + 1));
        auto idx = space->alphabet->index(letter_text);
        if (!idx) throw ParseError("unknown letter '" + std::string(letter_text) + "'");
        cells.push_back({key, *idx});
    }
    return Pattern(space, std::move(cells));
}

bool Pattern::operator==(const Pattern& other) const {
    return space_->same(*other.space_) && cells_ == other.cells_;
}

std::strong_ordering Pattern::operator<=>(const Pattern& other) const {
    if (cells_.size() != other.cells_.size())
        return cells_.size() <=> other.cells_.size();
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (auto c = cells_[i].key <=> other.cells_[i].key; c != 0) return c;
        if (auto c = cells_[i].letter <=> other.cells_[i].letter; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

Pattern translate(const GroupElement& g, const Pattern& p) {
    const auto& group = p.space()->group;
    std::vector<Pattern::Cell> cells;
    cells.reserve(p.cells().size());
    for (const auto& c : p.cells())
        cells.push_back({group->multiply(g, c.key), c.letter});
    return Pattern(p.space(), std::move(cells));
}

bool occurs_in(const Pattern& p, const Pattern& q) {
    if (p.empty_support()) return true;
    if (p.size() > q.size()) return false;
    const auto& group = p.space()->group;
    if (group->family() == Family::integers) {
        // integer arithmetic path: shift p's offsets over q's cells
        const auto phull = *p.z_hull();
        const auto qhull = *q.z_hull();
        if (qhull.second - qhull.first <= 1 << 16) {
            std::vector<int> row(size_t(qhull.second - qhull.first + 1), -1);
            for (const auto& c : q.cells())
                row[size_t(group->z_value(c.key) - qhull.first)] = c.letter;
            std::vector<std::pair<long long, int>> cells;
            for (const auto& c : p.cells())
                cells.push_back({group->z_value(c.key) - phull.first, c.letter});
            const long long max_shift =
                (qhull.second - qhull.first) - (phull.second - phull.first);
            for (long long s = 0; s <= max_shift; ++s) {
                bool hit = true;
                for (const auto& [off, letter] : cells) {
                    if (row[size_t(s + off)] != letter) {
                        hit = false;
                        break;
                    }
                }
                if (hit) return true;
            }
            return false;
        }
    }
    const GroupElement anchor_inv = group->inverse(p.cells().front().key);
    for (const auto& qc : q.cells()) {
        const GroupElement g = group->multiply(qc.key, anchor_inv);
        bool ok = true;
        for (const auto& pc : p.cells()) {
            const auto letter = q.at(group->multiply(g, pc.key));
            if (!letter || *letter != pc.letter) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

uint64_t extension_count(const SpacePtr& space, size_t free_cells, uint64_t cap) {
    const uint64_t base = uint64_t(space->alphabet->size());
    uint64_t count = 1;
    for (size_t i = 0; i < free_cells; ++i) {
        if (count > cap / base)
            throw CapExceeded("extension cap exceeded: " + std::to_string(free_cells) +
                              " free cells over alphabet size " + std::to_string(base));
        count *= base;
    }
    if (count > cap) throw CapExceeded("extension cap exceeded");
    return count;
}

ExtensionFrame extension_frame(const Pattern& p, int n) {
    const auto& space = p.space();
    const auto& ball = space->group->ball(n);
    std::vector<GroupElement> cells;
    for (const auto& c : p.cells()) cells.push_back(c.key);
    for (const auto& g : ball) cells.push_back(g);
    if (space->group->family() == Family::integers) {
        std::sort(cells.begin(), cells.end(),
                  [&](const GroupElement& a, const GroupElement& b) {
                      return space->group->z_value(a) < space->group->z_value(b);
                  });
    } else {
        std::sort(cells.begin(), cells.end());
    }
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    ExtensionFrame frame;
    frame.cells = std::move(cells);
    for (const auto& g : frame.cells) {
        const auto fixed = p.at(g);
        frame.fixed_letters.push_back(fixed ? *fixed : -1);
        if (!fixed) frame.free_cells.push_back(g);
    }
    return frame;
}

Pattern fill_frame(const SpacePtr& space, const ExtensionFrame& frame, uint64_t v) {
    const uint64_t base = uint64_t(space->alphabet->size());
    std::vector<Pattern::Cell> cells;
    cells.reserve(frame.cells.size());
    size_t free_idx = 0;
    uint64_t rest = v;
    for (size_t i = 0; i < frame.cells.size(); ++i) {
        int letter = frame.fixed_letters[i];
        if (letter < 0) {
            letter = static_cast<int>(rest % base);
            rest /= base;
            ++free_idx;
        }
        cells.push_back({frame.cells[i], letter});
    }
    (void)free_idx;
    return Pattern(space, std::move(cells));
}

std::vector<Pattern> extensions(const Pattern& p, int n, uint64_t cap) {
    const auto frame = extension_frame(p, n);
    const uint64_t count = extension_count(p.space(), frame.free_cells.size(), cap);
    std::vector<Pattern> out;
    out.reserve(count);
    for (uint64_t v = 0; v < count; ++v) out.push_back(fill_frame(p.space(), frame, v));
    return out;
}

// --- PatternEnumerator -------------------------------------------------------

PatternEnumerator::PatternEnumerator(SpacePtr space) : space_(std::move(space)) {
    const uint64_t base = uint64_t(space_->alphabet->size());
    assignment_count_ = 1;
    for (size_t i = 0; i < space_->group->ball(0).size(); ++i) assignment_count_ *= base;
}

Pattern PatternEnumerator::next() {
    if (assignment_ == assignment_count_) {
        ++n_;
        assignment_ = 0;
        const uint64_t base = uint64_t(space_->alphabet->size());
        assignment_count_ = 1;
        for (size_t i = 0; i < space_->group->ball(n_).size(); ++i) {
            if (assignment_count_ > (uint64_t(1) << 62) / base)
                throw CapExceeded("pattern enumeration stage too large");
            assignment_count_ *= base;
        }
    }
    const auto& ball = space_->group->ball(n_);
    const uint64_t base = uint64_t(space_->alphabet->size());
    std::vector<Pattern::Cell> cells;
    cells.reserve(ball.size());
    // first ball cell carries the most significant digit: (n, lex) order
    uint64_t rest = assignment_;
    for (size_t i = 0; i < ball.size(); ++i) {
        uint64_t place = 1;
        for (size_t j = i + 1; j < ball.size(); ++j) place *= base;
        const int letter = static_cast<int>((rest / place) % base);
        rest %= place;
        cells.push_back({ball[i], letter});
    }
    ++assignment_;
    return Pattern(space_, std::move(cells));
}

// --- CandidateStream ---------------------------------------------------------

CandidateStream::CandidateStream(SpacePtr space)
    : space_(std::move(space)),
      use_words_(space_->group->family() == Family::integers) {}

const Pattern& CandidateStream::at(size_t i) {
    while (items_.size() <= i) grow();
    return items_[i];
}

void CandidateStream::grow() {
    Pattern out{space_};
    if (use_words_) {
        if (words_turn_) {
            words_turn_ = false;
            if (next_word(out)) {
                items_.push_back(std::move(out));
                return;
            }
        }
        words_turn_ = true;
        if (next_subset(out)) {
            items_.push_back(std::move(out));
            return;
        }
        throw CapExceeded("candidate stream stage overflow");
    }
    if (!next_subset(out)) throw CapExceeded("candidate stream stage overflow");
    items_.push_back(std::move(out));
}

bool CandidateStream::next_word(Pattern& out) {
    const uint64_t base = uint64_t(space_->alphabet->size());
    uint64_t count = 1;
    for (int i = 0; i < word_len_; ++i) count *= base;
    if (word_val_ == count) {
        ++word_len_;
        word_val_ = 0;
        if (word_len_ > 62) return false;
        count *= base;
    }
    // most significant letter first: lexicographic within a length
    std::vector<int> letters(static_cast<size_t>(word_len_), 0);
    uint64_t rest = word_val_;
    for (int i = word_len_ - 1; i >= 0; --i) {
        letters[size_t(i)] = static_cast<int>(rest % base);
        rest /= base;
    }
    ++word_val_;
    out = Pattern::from_letter_row(space_, letters, 0);
    return true;
}

bool CandidateStream::next_subset(Pattern& out) {
    const uint64_t base = uint64_t(space_->alphabet->size());
    for (;;) {
        const auto& ball = space_->group->ball(sub_n_);
        const size_t m = ball.size();
        if (m > 30) return false;
        const uint64_t mask_end = uint64_t(1) << m;
        if (sub_mask_ >= mask_end) {
            sub_prev_size_ = m;
            ++sub_n_;
            sub_mask_ = 1;
            sub_assign_ = 0;
            sub_assign_count_ = 0;
            continue;
        }
        if (sub_assign_count_ == 0) {
            // validate the support this mask selects
            bool touches_shell = false;
            for (size_t b = sub_prev_size_; b < m; ++b)
                if (sub_mask_ & (uint64_t(1) << b)) touches_shell = true;
            bool skip = !touches_shell && sub_n_ > 0;
            if (!skip && use_words_) {
                // skip word-shaped supports {0..k-1}; the word source owns them
                std::vector<long long> vals;
                for (size_t b = 0; b < m; ++b)
                    if (sub_mask_ & (uint64_t(1) << b))
                        vals.push_back(space_->group->z_value(ball[b]));
                std::sort(vals.begin(), vals.end());
                bool word_shaped = vals.front() == 0;
                for (size_t i = 0; word_shaped && i < vals.size(); ++i)
                    word_shaped = vals[i] == (long long)i;
                skip = word_shaped;
            }
            if (skip) {
                ++sub_mask_;
                continue;
            }
            sub_assign_count_ = 1;
            for (size_t b = 0; b < m; ++b)
                if (sub_mask_ & (uint64_t(1) << b)) sub_assign_count_ *= base;
            sub_assign_ = 0;
        }
        if (sub_assign_ == sub_assign_count_) {
            ++sub_mask_;
            sub_assign_count_ = 0;
            continue;
        }
        std::vector<GroupElement> support;
        for (size_t b = 0; b < m; ++b)
            if (sub_mask_ & (uint64_t(1) << b)) support.push_back(ball[b]);
        std::vector<Pattern::Cell> cells;
        uint64_t rest = sub_assign_;
        for (size_t i = 0; i < support.size(); ++i) {
            uint64_t place = 1;
            for (size_t j = i + 1; j < support.size(); ++j) place *= base;
            cells.push_back({support[i], static_cast<int>((rest / place) % base)});
            rest %= place;
        }
        ++sub_assign_;
        out = Pattern(space_, std::move(cells));
        return true;
    }
}

}  // namespace shiftlab::grid
