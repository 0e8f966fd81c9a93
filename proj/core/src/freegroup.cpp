#include "whittaker/freegroup.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace whittaker {

ReducedWord::ReducedWord(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
    for (std::size_t i = 1; i < letters_.size(); ++i)
        if (letters_[i] == letters_[i - 1])
            throw DomainError("not_reduced", "word has two equal adjacent letters");
}

ReducedWord ReducedWord::parse(const std::string& digits) {
    std::vector<std::uint8_t> l;
    for (char c : digits) {
        if (c < '0' || c > '9') throw DomainError("parse_error", "word letters must be digits: " + digits);
        l.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return ReducedWord(std::move(l));
}

ReducedWord ReducedWord::operator*(const ReducedWord& o) const {
    std::vector<std::uint8_t> out = letters_;
    for (std::uint8_t c : o.letters_) {
        if (!out.empty() && out.back() == c) out.pop_back();
        else out.push_back(c);
    }
    ReducedWord r;
    r.letters_ = std::move(out);
    return r;
}

ReducedWord ReducedWord::inverse() const {
    ReducedWord r;
    r.letters_.assign(letters_.rbegin(), letters_.rend());
    return r;
}

std::string ReducedWord::str() const {
    std::string s;
    for (auto c : letters_) s += static_cast<char>('0' + c);
    return s;
}

SchottkyParity schottky_parity(const ReducedWord& w) {
    return w.length() % 2 == 0 ? SchottkyParity::InW : SchottkyParity::NotInW;
}

std::uint64_t count_words_of_length(int g, int len) {
    if (len == 0) return 1;
    std::uint64_t c = static_cast<std::uint64_t>(g + 1);
    for (int i = 1; i < len; ++i) c *= static_cast<std::uint64_t>(g);
    return c;
}

WordTable make_word_table(int g, int max_len) {
    if (g < 1) throw DomainError("bad_genus", "need at least two generators");
    if (max_len < 0) throw DomainError("bad_length", "negative word length");
    std::uint64_t total = 0;
    for (int len = 0; len <= max_len; ++len) total += count_words_of_length(g, len);
    if (total > kWordBudget)
        throw UnsupportedError("word_budget", std::to_string(total) + " words up to length " +
                                                  std::to_string(max_len) + " exceed the budget of " +
                                                  std::to_string(kWordBudget));
    WordTable t;
    t.g = g;
    t.max_len = max_len;
    t.words.emplace_back();
    t.suffix.push_back(-1);
    t.length_start.push_back(0);
    std::map<std::vector<std::uint8_t>, std::int64_t> prev{{{}, 0}};
    for (int len = 1; len <= max_len; ++len) {
        t.length_start.push_back(t.words.size());
        std::map<std::vector<std::uint8_t>, std::int64_t> cur;
        // lexicographic order within a length: prepend letters to sorted suffixes
        std::vector<std::vector<std::uint8_t>> layer;
        for (const auto& [w, idx] : prev) {
            for (int i = 0; i <= g; ++i) {
                if (!w.empty() && w.front() == i) continue;
                std::vector<std::uint8_t> nw;
                nw.reserve(w.size() + 1);
                nw.push_back(static_cast<std::uint8_t>(i));
                nw.insert(nw.end(), w.begin(), w.end());
                layer.push_back(std::move(nw));
            }
        }
        std::sort(layer.begin(), layer.end());
        for (auto& w : layer) {
            std::vector<std::uint8_t> suf(w.begin() + 1, w.end());
            t.suffix.push_back(prev.at(suf));
            cur.emplace(w, static_cast<std::int64_t>(t.words.size()));
            t.words.emplace_back(std::move(w));
        }
        prev = std::move(cur);
    }
    t.length_start.push_back(t.words.size());
    return t;
}

std::vector<ReducedWord> enumerate_words(int g, int max_len) { return make_word_table(g, max_len).words; }

Mobius word_to_mobius(const ReducedWord& w, const std::vector<Mobius>& gens) {
    if (gens.empty()) throw DomainError("no_generators", "empty generator list");
    Mobius m = Mobius::identity(gens[0].field());
    for (auto c : w.letters()) {
        if (c >= gens.size()) throw DomainError("bad_letter", "letter exceeds generator count");
        m = m.compose(gens[c]).canonical();
    }
    return m.canonical();
}

namespace {

// B^-1 A is scalar to relative precision prec
bool same_map(const Mobius& A, const Mobius& B, std::int64_t prec) {
    const FieldElement m11 = B.d() * A.a() - B.b() * A.c();
    const FieldElement m12 = B.d() * A.b() - B.b() * A.d();
    const FieldElement m21 = B.a() * A.c() - B.c() * A.a();
    const FieldElement m22 = B.a() * A.d() - B.c() * A.b();
    if (m11.is_zero()) return false;
    const Rational need = m11.valuation() + Rational(prec, descriptor(A.field()).ramification());
    auto small = [&need](const FieldElement& x) { return x.is_exact_zero() || x.valuation() >= need; };
    return small(m12) && small(m21) && small(m11 - m22);
}

}  // namespace

std::vector<std::pair<ReducedWord, ReducedWord>> find_relations(const std::vector<Mobius>& gens,
                                                                int max_len, std::int64_t prec) {
    if (gens.size() < 2) throw DomainError("bad_genus", "relation search needs at least two generators");
    WordTable t = make_word_table(static_cast<int>(gens.size()) - 1, max_len);
    std::vector<Mobius> mats(t.words.size());
    mats[0] = Mobius::identity(gens[0].field());
    std::unordered_map<std::string, std::vector<std::size_t>> buckets;
    std::vector<std::pair<ReducedWord, ReducedWord>> out;
    for (std::size_t i = 0; i < t.words.size(); ++i) {
        if (i > 0) {
            const auto s = static_cast<std::size_t>(t.suffix[i]);
            mats[i] = gens[t.words[i][0]].compose(mats[s]).canonical();
        }
        std::string k;
        try {
            k = mats[i].key(prec);
        } catch (const PrecisionError&) {
            continue;
        }
        auto& b = buckets[k];
        for (std::size_t j : b)
            if (same_map(mats[i], mats[j], prec)) out.emplace_back(t.words[i], t.words[j]);
        b.push_back(i);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        std::size_t lx = x.first.length() + x.second.length(), ly = y.first.length() + y.second.length();
        if (lx != ly) return lx < ly;
        return x < y;
    });
    return out;
}

}  // namespace whittaker
