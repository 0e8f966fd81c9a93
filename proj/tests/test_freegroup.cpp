#include <doctest.h>

#include <algorithm>
#include <functional>

#include "support.hpp"
#include "whittaker/freegroup.hpp"
#include "whittaker/theta.hpp"

using namespace whittaker;
using testing::field;
using testing::pt;

namespace {

// every string over {0..g} of length <= n, filtered to reduced words
std::vector<std::vector<std::uint8_t>> brute_force_words(int g, int n) {
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> cur;
    std::function<void()> rec = [&] {
        bool reduced = true;
        for (std::size_t i = 1; i < cur.size(); ++i) reduced = reduced && cur[i] != cur[i - 1];
        if (reduced) out.push_back(cur);
        if (static_cast<int>(cur.size()) == n) return;
        for (int a = 0; a <= g; ++a) {
            cur.push_back(static_cast<std::uint8_t>(a));
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

std::vector<Mobius> generators(const std::vector<FixedPair>& pairs) {
    std::vector<Mobius> g;
    for (const auto& [a, b] : pairs) g.push_back(involution_from_pair(a, b));
    return g;
}

}  // namespace

TEST_CASE("enumerate_words") {
    const auto w1 = enumerate_words(2, 1);
    REQUIRE(w1.size() == 4);
    CHECK(w1[0].empty());
    CHECK(w1[1].str() == "0");
    CHECK(w1[2].str() == "1");
    CHECK(w1[3].str() == "2");
    CHECK(enumerate_words(2, 2).size() == brute_force_words(2, 2).size());
    CHECK(enumerate_words(2, 2).size() == 10);
    CHECK(count_words_of_length(3, 3) == 36);
}

TEST_CASE("property: word counts match brute force") {
    for (int g = 1; g <= 4; ++g) {
        const int n = 8;
        const auto brute = brute_force_words(g, n);
        const auto words = enumerate_words(g, n);
        CHECK(words.size() == brute.size());
        for (int len = 1; len <= n; ++len) {
            const auto c = std::count_if(words.begin(), words.end(),
                                         [len](const ReducedWord& w) { return static_cast<int>(w.length()) == len; });
            CHECK(static_cast<std::uint64_t>(c) == count_words_of_length(g, len));
        }
        // length, then lexicographic
        std::vector<std::vector<std::uint8_t>> sorted = brute;
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        bool same = true;
        for (std::size_t i = 0; i < words.size(); ++i) same = same && words[i].letters() == sorted[i];
        CHECK(same);
    }
}

TEST_CASE("reduced words") {
    const auto w = ReducedWord::parse("0121");
    CHECK(w.str() == "0121");
    CHECK((w * ReducedWord::parse("12")).str() == "01");
    CHECK((w * w.inverse()).empty());
    CHECK_THROWS_AS(ReducedWord::parse("011"), DomainError);
    CHECK(schottky_parity(ReducedWord()) == SchottkyParity::InW);
    CHECK(schottky_parity(ReducedWord::parse("01")) == SchottkyParity::InW);
    CHECK(schottky_parity(ReducedWord::parse("0")) == SchottkyParity::NotInW);
}

TEST_CASE("word_to_mobius and the bad-position relation") {
    const Field f = field("5", 20);
    const std::vector<FixedPair> bad = {{pt("0", f), pt("5", f)}, {pt("1", f), pt("-1", f)},
                                        {pt("1/5", f), ProjPoint::infinity()}};
    const auto gens = generators(bad);
    CHECK(word_to_mobius(ReducedWord(), gens).equal_at(Mobius::identity(f), Rational(20)));
    CHECK(word_to_mobius(ReducedWord::parse("2"), gens).equal_at(gens[2], Rational(20)));
    CHECK(word_to_mobius(ReducedWord::parse("121"), gens).equal_at(gens[0], Rational(18)));
    const auto rel = find_relations(gens, 3, 10);
    const bool found = std::any_of(rel.begin(), rel.end(), [](const auto& r) {
        return (r.first.str() == "121" && r.second.str() == "0") || (r.first.str() == "0" && r.second.str() == "121");
    });
    CHECK(found);
    CHECK_THROWS_AS(find_relations({gens[0]}, 3, 10), DomainError);
}

TEST_CASE("closed-disk sample has no relations up to length 8") {
    std::mt19937_64 rng(31);
    const Field f = field("5", 20);
    const Chart& ch = chart("g2a");
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    CHECK(find_relations(generators(fix.pairs()), 8, 10).empty());
}

TEST_CASE("property: w times its reverse is the identity") {
    std::mt19937_64 rng(32);
    const Field f = field("7", 48);
    const Chart& ch = chart("g2b");
    const auto gens = generators(FixTuple{ch.name, sample_fix_coords(ch, f, rng)}.pairs());
    const auto words = enumerate_words(2, 6);
    for (int i = 0; i < 100; ++i) {
        const ReducedWord& w = words[rng() % words.size()];
        auto rev = w.letters();
        std::reverse(rev.begin(), rev.end());
        const Mobius m = word_to_mobius(w, gens).compose(word_to_mobius(ReducedWord(rev), gens));
        CHECK(m.equal_at(Mobius::identity(f), Rational(10)));
    }
}

TEST_CASE("word budget") {
    CHECK_THROWS_AS(make_word_table(3, 20), UnsupportedError);
    CHECK_NOTHROW(make_word_table(3, 8));
}
