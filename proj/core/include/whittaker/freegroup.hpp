#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "whittaker/projline.hpp"

namespace whittaker {

// Element of the free product of g+1 groups of order two.
class ReducedWord {
public:
    ReducedWord() = default;
    explicit ReducedWord(std::vector<std::uint8_t> letters);
    static ReducedWord parse(const std::string& digits);

    const std::vector<std::uint8_t>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return letters_[i]; }

    // Free-product multiplication (cancels doubled letters at the seam).
    ReducedWord operator*(const ReducedWord& o) const;
    ReducedWord inverse() const;
    std::string str() const;

    friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
    friend auto operator<=>(const ReducedWord&, const ReducedWord&) = default;

private:
    std::vector<std::uint8_t> letters_;
};

enum class SchottkyParity { InW, NotInW };
SchottkyParity schottky_parity(const ReducedWord& w);

// All reduced words of length <= max_len, ordered by length then lexicographically.
std::vector<ReducedWord> enumerate_words(int g, int max_len);

// Enumeration plus, for each word i·w', the index of its suffix w'.
struct WordTable {
    int g = 0;
    int max_len = 0;
    std::vector<ReducedWord> words;
    std::vector<std::int64_t> suffix;  // -1 for the empty word
    std::vector<std::size_t> length_start;  // index of the first word of each length
};
// Throws UnsupportedError("word_budget") beyond kWordBudget words.
inline constexpr std::uint64_t kWordBudget = 2'000'000;
WordTable make_word_table(int g, int max_len);

std::uint64_t count_words_of_length(int g, int len);

Mobius word_to_mobius(const ReducedWord& w, const std::vector<Mobius>& gens);

// Candidate relations: distinct words whose canonical matrices agree at
// absolute precision `prec` (uniformizer units) and for which w2^-1 w1 is
// scalar to the same relative precision.
std::vector<std::pair<ReducedWord, ReducedWord>> find_relations(const std::vector<Mobius>& gens,
                                                                int max_len, std::int64_t prec);

}  // namespace whittaker
