#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shiftlab::grid {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown when an exhaustion would enumerate more fillings than the cap allows.
class CapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Family { integers, lattice, free_group };

// A group element in canonical (geodesic) normal form: a word of generator
// symbols. Symbol 2i is the i-th basic generator, symbol 2i+1 its inverse.
// |g|_S is the canonical word length. Elements order by (length, lex).
class GroupElement {
  public:
    GroupElement() = default;
    explicit GroupElement(std::vector<uint8_t> symbols) : word_(std::move(symbols)) {}

    const std::vector<uint8_t>& word() const { return word_; }
    int length() const { return static_cast<int>(word_.size()); }
    bool is_identity() const { return word_.empty(); }

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.word_ == b.word_;
    }
    friend std::strong_ordering operator<=>(const GroupElement& a,
                                            const GroupElement& b) {
        if (a.word_.size() != b.word_.size())
            return a.word_.size() <=> b.word_.size();
        return a.word_ <=> b.word_;
    }

  private:
    std::vector<uint8_t> word_;
};

// One of the built-in families: Z, Z^d, or the free group F_k. All three use
// geodesic normal forms, so |g|_S is read off the canonical word. New
// families would plug in here (normal form + ball generation).
class GroupSpec {
  public:
    static std::shared_ptr<const GroupSpec> integers();
    static std::shared_ptr<const GroupSpec> lattice(int dim);
    static std::shared_ptr<const GroupSpec> free_group(int rank);

    Family family() const { return family_; }
    int rank() const { return rank_; }
    const std::string& name() const { return name_; }
    int symbol_count() const { return 2 * rank_; }
    const std::string& symbol_name(int sym) const { return symbol_names_.at(sym); }
    static int inverse_symbol(int sym) { return sym ^ 1; }

    bool same(const GroupSpec& other) const {
        return family_ == other.family_ && rank_ == other.rank_;
    }

    GroupElement identity() const { return GroupElement{}; }
    GroupElement normalize(std::span<const int> symbols) const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& g) const;

    // Whitespace-separated generator tokens; "e" is the identity, and for Z
    // a signed integer is accepted as shorthand.
    GroupElement parse_word(std::string_view text) const;
    std::string print_word(const GroupElement& g) const;

    // All elements with |g|_S <= n, ordered by (length, lex); ball(n) is a
    // prefix of ball(n+1).
    const std::vector<GroupElement>& ball(int n) const;

    // Z helpers.
    long long z_value(const GroupElement& g) const;
    GroupElement z_element(long long v) const;
    std::vector<long long> coordinates(const GroupElement& g) const;

  private:
    GroupSpec(Family f, int rank, std::string name);

    Family family_;
    int rank_;
    std::string name_;
    std::vector<std::string> symbol_names_;
    std::unordered_map<std::string, int> token_to_symbol_;

    mutable std::mutex ball_mutex_;
    mutable std::deque<std::vector<GroupElement>> balls_;  // balls_[n]; deque keeps references stable
};

using GroupPtr = std::shared_ptr<const GroupSpec>;

// Finite letter set. Letters are short strings ("0", "1", "0a", ...). When
// all letters share one character width, words print as plain
// concatenations and parse back unambiguously.
class Alphabet {
  public:
    static std::shared_ptr<const Alphabet> of(std::vector<std::string> letters);
    static std::shared_ptr<const Alphabet> binary();

    int size() const { return static_cast<int>(letters_.size()); }
    const std::string& letter(int i) const { return letters_.at(i); }
    std::optional<int> index(std::string_view s) const;
    int uniform_width() const { return uniform_width_; }  // 0 when mixed
    bool same(const Alphabet& other) const { return letters_ == other.letters_; }

    std::string print_letters(std::span<const int> idx) const;
    std::vector<int> parse_letters(std::string_view text) const;

  private:
    explicit Alphabet(std::vector<std::string> letters);
    std::vector<std::string> letters_;
    std::unordered_map<std::string, int> index_;
    int uniform_width_ = 0;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

// The (group, alphabet) pair every pattern lives over.
struct Space {
    GroupPtr group;
    AlphabetPtr alphabet;

    bool same(const Space& other) const {
        return group->same(*other.group) && alphabet->same(*other.alphabet);
    }
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(GroupPtr group, AlphabetPtr alphabet);
SpacePtr z_binary_space();

// A finite mapping from canonical group elements to letters. Cells are kept
// sorted by element order, which makes equality, ordering and printing
// canonical. The empty pattern denotes the whole space.
class Pattern {
  public:
    struct Cell {
        GroupElement key;
        int letter;

        friend bool operator==(const Cell&, const Cell&) = default;
    };

    explicit Pattern(SpacePtr space) : space_(std::move(space)) {}
    Pattern(SpacePtr space, std::vector<Cell> cells);

    // Word pattern on Z with support {0, ..., L-1}.
    static Pattern word(const SpacePtr& space, std::string_view letters);
    static Pattern word_at(const SpacePtr& space, std::string_view letters,
                           long long start);
    static Pattern from_letter_row(const SpacePtr& space,
                                   std::span<const int> letters, long long start);

    const SpacePtr& space() const { return space_; }
    const std::vector<Cell>& cells() const { return cells_; }
    bool empty_support() const { return cells_.empty(); }
    int size() const { return static_cast<int>(cells_.size()); }
    std::optional<int> at(const GroupElement& g) const;

    // Letter row when the support is exactly {0,...,L-1} on Z.
    std::optional<std::vector<int>> word_letters() const;
    // Hull [lo, hi] of the support on Z.
    std::optional<std::pair<long long, long long>> z_hull() const;

    std::string to_text() const;
    static Pattern parse(const SpacePtr& space, std::string_view text);

    bool operator==(const Pattern& other) const;
    std::strong_ordering operator<=>(const Pattern& other) const;

  private:
    SpacePtr space_;
    std::vector<Cell> cells_;
};

// Left translation: support g*supp(p), value at g*h equals p(h); the
// cylinder of the result is g[p].
Pattern translate(const GroupElement& g, const Pattern& p);

// True when some g has g*supp(p) inside supp(q) with matching letters.
// The empty pattern occurs in everything.
bool occurs_in(const Pattern& p, const Pattern& q);

// All patterns with support supp(p) ∪ ball(n) that agree with p. Refuses
// with CapExceeded when the filling count exceeds `cap`.
std::vector<Pattern> extensions(const Pattern& p, int n, uint64_t cap);

uint64_t extension_count(const SpacePtr& space, size_t free_cells, uint64_t cap);

// Cells of supp(p) ∪ ball(n) and the free sub-list, both in exhaustion
// order (Z: ascending position; otherwise canonical element order).
struct ExtensionFrame {
    std::vector<GroupElement> cells;       // full support, exhaustion order
    std::vector<GroupElement> free_cells;  // cells not fixed by p
    std::vector<int> fixed_letters;        // letter or -1 per cell
};
ExtensionFrame extension_frame(const Pattern& p, int n);

// Fill the frame's free cells with the digits of `v` (cell 0 is the least
// significant digit) and return the resulting pattern.
Pattern fill_frame(const SpacePtr& space, const ExtensionFrame& frame, uint64_t v);

// Deterministic enumeration of every pattern whose support is some ball(n),
// each exactly once, ordered by (n, lexicographic content).
class PatternEnumerator {
  public:
    explicit PatternEnumerator(SpacePtr space);
    Pattern next();

  private:
    SpacePtr space_;
    int n_ = 0;
    uint64_t assignment_ = 0;
    uint64_t assignment_count_ = 0;
};

// Candidate feed for the co-language prober: word patterns (Z only)
// interleaved one-for-one with ball-subset patterns, every finite-support
// pattern eventually, the empty pattern skipped, no duplicates.
class CandidateStream {
  public:
    explicit CandidateStream(SpacePtr space);
    const Pattern& at(size_t i);
    size_t materialized() const { return items_.size(); }

  private:
    void grow();
    bool next_word(Pattern& out);
    bool next_subset(Pattern& out);

    SpacePtr space_;
    std::vector<Pattern> items_;
    bool use_words_;
    bool words_turn_ = true;

    // word source
    int word_len_ = 1;
    uint64_t word_val_ = 0;

    // ball-subset source
    int sub_n_ = 0;
    size_t sub_prev_size_ = 0;
    uint64_t sub_mask_ = 1;
    uint64_t sub_assign_ = 0;
    uint64_t sub_assign_count_ = 0;
};

}  // namespace shiftlab::grid
