#pragma once

#include "novikov/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace novikov {

enum class GroupKind { free, free_abelian };

class GroupSpec;
using GroupHandle = std::shared_ptr<const GroupSpec>;

/// A finitely generated free or free-abelian group, described by its
/// generator names in declaration order.
class GroupSpec : public std::enable_shared_from_this<GroupSpec> {
    struct Token {};

public:
    GroupSpec(Token, GroupKind kind, std::vector<std::string> names)
        : kind_(kind), names_(std::move(names)) {}

    static GroupHandle make(GroupKind kind, std::vector<std::string> names) {
        if (names.empty()) throw InputError("group must have at least one generator");
        std::unordered_set<std::string> seen;
        for (const auto& n : names) {
            if (n.empty()) throw InputError("empty generator name");
            for (char c : n) {
                if (c == ' ' || c == '^' || c == '\t' || c == '\n') {
                    throw InputError("invalid character in generator name '" + n + "'");
                }
            }
            if (!seen.insert(n).second) throw InputError("duplicate generator name '" + n + "'");
        }
        auto spec = std::make_shared<GroupSpec>(Token{}, kind, names);
        if (kind == GroupKind::free) {
            spec->abelian_ = std::make_shared<GroupSpec>(Token{}, GroupKind::free_abelian, names);
        }
        return spec;
    }

    static GroupHandle free(std::vector<std::string> names) {
        return make(GroupKind::free, std::move(names));
    }
    static GroupHandle free_abelian(std::vector<std::string> names) {
        return make(GroupKind::free_abelian, std::move(names));
    }

    GroupKind kind() const noexcept { return kind_; }
    bool is_abelian() const noexcept { return kind_ == GroupKind::free_abelian; }
    std::size_t rank() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return i;
        }
        return std::nullopt;
    }

    /// H = G/[G,G] with the same generator names.
    GroupHandle abelianization() const {
        if (abelian_) return abelian_;
        return shared_from_this();
    }

    friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
        return &a == &b || (a.kind_ == b.kind_ && a.names_ == b.names_);
    }

private:
    GroupKind kind_;
    std::vector<std::string> names_;
    GroupHandle abelian_;
};

inline bool same_group(const GroupHandle& a, const GroupHandle& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_group(const GroupHandle& a, const GroupHandle& b) {
    if (!same_group(a, b)) throw InputError("group spec mismatch");
}

struct Syllable {
    std::uint32_t gen = 0;
    std::int64_t exp = 0;
    friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

/// Letter code of the expanded word: generator g gives 2g for g and 2g+1
/// for g^-1, so declaration order holds and g < g^-1.
inline int letter_code(std::uint32_t gen, bool inverse) {
    return static_cast<int>(2 * gen + (inverse ? 1 : 0));
}

/// An element of a free group (freely reduced syllable list) or of a
/// free-abelian group (exponent vector).
class GroupElement {
public:
    GroupElement() = default;

    static GroupElement identity(GroupHandle spec) {
        GroupElement g;
        if (spec->is_abelian()) g.expo_.assign(spec->rank(), 0);
        g.spec_ = std::move(spec);
        return g;
    }

    static GroupElement generator(GroupHandle spec, std::size_t gen, std::int64_t exp = 1) {
        Syllable s{static_cast<std::uint32_t>(gen), exp};
        return reduce(std::move(spec), std::span<const Syllable>(&s, 1));
    }

    static GroupElement from_exponents(GroupHandle spec, std::vector<std::int64_t> exps) {
        if (!spec->is_abelian()) throw InputError("exponent vectors require a free-abelian group");
        if (exps.size() != spec->rank()) throw InputError("exponent vector has wrong length");
        GroupElement g;
        g.spec_ = std::move(spec);
        g.expo_ = std::move(exps);
        return g;
    }

    /// Free reduction of a raw syllable list; the abelian case sums exponents.
    static GroupElement reduce(GroupHandle spec, std::span<const Syllable> raw) {
        GroupElement g = identity(spec);
        for (const auto& s : raw) {
            if (s.gen >= spec->rank()) {
                throw InputError("unknown generator index " + std::to_string(s.gen));
            }
            if (s.exp == 0) continue;
            if (spec->is_abelian()) {
                g.expo_[s.gen] += s.exp;
            } else {
                g.push_syllable(s);
            }
        }
        return g;
    }

    const GroupHandle& spec() const noexcept { return spec_; }
    const std::vector<Syllable>& syllables() const noexcept { return word_; }
    const std::vector<std::int64_t>& exponents() const noexcept { return expo_; }

    bool is_identity() const noexcept {
        if (!word_.empty()) return false;
        return std::all_of(expo_.begin(), expo_.end(), [](auto e) { return e == 0; });
    }

    GroupElement inverse() const {
        GroupElement g;
        g.spec_ = spec_;
        if (spec_->is_abelian()) {
            g.expo_.reserve(expo_.size());
            for (auto e : expo_) g.expo_.push_back(-e);
        } else {
            g.word_.assign(word_.rbegin(), word_.rend());
            for (auto& s : g.word_) s.exp = -s.exp;
        }
        return g;
    }

    friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
        require_same_group(a.spec_, b.spec_);
        GroupElement g = a;
        if (a.spec_->is_abelian()) {
            for (std::size_t i = 0; i < g.expo_.size(); ++i) g.expo_[i] += b.expo_[i];
        } else {
            g.word_.reserve(a.word_.size() + b.word_.size());
            for (const auto& s : b.word_) g.push_syllable(s);
        }
        return g;
    }

    /// Syllable-expanded word as letter codes (free groups only).
    std::vector<int> letters() const {
        std::vector<int> out;
        for (const auto& s : word_) {
            int c = letter_code(s.gen, s.exp < 0);
            for (std::int64_t k = 0; k < (s.exp < 0 ? -s.exp : s.exp); ++k) out.push_back(c);
        }
        return out;
    }

    std::size_t length() const noexcept {
        std::size_t n = 0;
        for (const auto& s : word_) n += static_cast<std::size_t>(s.exp < 0 ? -s.exp : s.exp);
        for (auto e : expo_) n += static_cast<std::size_t>(e < 0 ? -e : e);
        return n;
    }

    /// Storage order used for term maps; it ignores the spec pointer.
    friend bool operator<(const GroupElement& a, const GroupElement& b) {
        if (a.word_ != b.word_) return a.word_ < b.word_;
        return a.expo_ < b.expo_;
    }
    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.word_ == b.word_ && a.expo_ == b.expo_ && same_group(a.spec_, b.spec_);
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        auto emit = [&](std::size_t gen, std::int64_t e) {
            if (!first) os << ' ';
            first = false;
            os << spec_->names()[gen];
            if (e != 1) os << '^' << e;
        };
        for (const auto& s : word_) emit(s.gen, s.exp);
        for (std::size_t i = 0; i < expo_.size(); ++i) {
            if (expo_[i] != 0) emit(i, expo_[i]);
        }
        return os.str();
    }

private:
    void push_syllable(const Syllable& s) {
        if (!word_.empty() && word_.back().gen == s.gen) {
            word_.back().exp += s.exp;
            if (word_.back().exp == 0) word_.pop_back();
        } else {
            word_.push_back(s);
        }
    }

    GroupHandle spec_;
    std::vector<Syllable> word_;
    std::vector<std::int64_t> expo_;
};

/// Lexicographic comparison of expanded words (declaration order, g < g^-1);
/// abelian elements compare exponent vectors. Used for canonical output.
inline bool word_lex_less(const GroupElement& a, const GroupElement& b) {
    if (a.spec()->is_abelian()) return a.exponents() < b.exponents();
    auto la = a.letters();
    auto lb = b.letters();
    return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
}

/// Parses whitespace-separated tokens `name` or `name^k`; empty is identity.
inline GroupElement parse_word(const GroupHandle& spec, std::string_view text) {
    std::vector<Syllable> raw;
    std::istringstream is{std::string(text)};
    std::string tok;
    while (is >> tok) {
        std::string name = tok;
        std::int64_t exp = 1;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            name = tok.substr(0, caret);
            std::string e = tok.substr(caret + 1);
            std::size_t used = 0;
            try {
                exp = std::stoll(e, &used);
            } catch (const std::exception&) {
                throw InputError("bad exponent in token '" + tok + "'");
            }
            if (used != e.size() || exp == 0) throw InputError("bad exponent in token '" + tok + "'");
        }
        auto idx = spec->index_of(name);
        if (!idx) throw InputError("unknown generator '" + name + "'");
        raw.push_back({static_cast<std::uint32_t>(*idx), exp});
    }
    return GroupElement::reduce(spec, raw);
}

/// A homomorphism xi: G -> Q given on generators.
class Weighting {
public:
    Weighting(GroupHandle spec, std::vector<Rational> weights)
        : spec_(std::move(spec)), weights_(std::move(weights)) {
        if (weights_.size() != spec_->rank()) throw InputError("weighting has wrong number of entries");
    }

    const GroupHandle& spec() const noexcept { return spec_; }
    const std::vector<Rational>& weights() const noexcept { return weights_; }

    Rational operator()(const GroupElement& g) const {
        require_same_group(spec_, g.spec());
        Rational w = 0;
        for (const auto& s : g.syllables()) w += weights_[s.gen] * Rational(static_cast<long>(s.exp));
        const auto& ex = g.exponents();
        for (std::size_t i = 0; i < ex.size(); ++i) {
            if (ex[i] != 0) w += weights_[i] * Rational(static_cast<long>(ex[i]));
        }
        return w;
    }

    /// The induced weighting on the abelianization.
    Weighting abelianized() const { return Weighting(spec_->abelianization(), weights_); }

    friend bool operator==(const Weighting& a, const Weighting& b) {
        return same_group(a.spec_, b.spec_) && a.weights_ == b.weights_;
    }

private:
    GroupHandle spec_;
    std::vector<Rational> weights_;
};

using WeightingHandle = std::shared_ptr<const Weighting>;

inline WeightingHandle make_weighting(GroupHandle spec, std::vector<Rational> weights) {
    return std::make_shared<const Weighting>(std::move(spec), std::move(weights));
}

inline Rational weight(const Weighting& xi, const GroupElement& g) { return xi(g); }

inline bool same_weighting(const WeightingHandle& a, const WeightingHandle& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_weighting(const WeightingHandle& a, const WeightingHandle& b) {
    if (!same_weighting(a, b)) throw InputError("weighting mismatch");
}

namespace detail {

// Booth's least-rotation algorithm, O(n).
inline std::size_t least_rotation(const std::vector<int>& word) {
    const long n = static_cast<long>(word.size());
    if (n == 0) return 0;
    std::vector<int> s(word);
    s.insert(s.end(), word.begin(), word.end());
    std::vector<long> f(static_cast<std::size_t>(2 * n), -1);
    auto at = [&](long idx) { return s[static_cast<std::size_t>(idx)]; };
    long k = 0;
    for (long j = 1; j < 2 * n; ++j) {
        int sj = at(j);
        long i = f[static_cast<std::size_t>(j - k - 1)];
        while (i != -1 && sj != at(k + i + 1)) {
            if (sj < at(k + i + 1)) k = j - i - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (sj != at(k + i + 1)) {
            if (sj < at(k)) k = j;
            f[static_cast<std::size_t>(j - k)] = -1;
        } else {
            f[static_cast<std::size_t>(j - k)] = i + 1;
        }
    }
    return static_cast<std::size_t>(k % n);
}

}  // namespace detail

/// Canonical representative of a conjugacy class.
class ConjClass {
public:
    ConjClass() = default;
    explicit ConjClass(GroupElement canonical) : rep_(std::move(canonical)) {}

    const GroupElement& canonical_word() const noexcept { return rep_; }

    friend bool operator<(const ConjClass& a, const ConjClass& b) { return a.rep_ < b.rep_; }
    friend bool operator==(const ConjClass& a, const ConjClass& b) { return a.rep_ == b.rep_; }

    std::string str() const { return rep_.str(); }

private:
    GroupElement rep_;
};

/// Free case: cyclic reduction followed by the least rotation of the
/// expanded word. Abelian case: the element itself.
inline ConjClass conjugacy_canonical(const GroupElement& g) {
    if (g.spec()->is_abelian()) return ConjClass(g);
    std::vector<Syllable> w = g.syllables();
    std::size_t lo = 0;
    std::size_t hi = w.size();
    while (hi - lo >= 2 && w[lo].gen == w[hi - 1].gen) {
        w[lo].exp += w[hi - 1].exp;
        --hi;
        if (w[lo].exp == 0) ++lo;
    }
    std::vector<int> letters;
    for (std::size_t i = lo; i < hi; ++i) {
        int c = letter_code(w[i].gen, w[i].exp < 0);
        for (std::int64_t k = 0; k < (w[i].exp < 0 ? -w[i].exp : w[i].exp); ++k) letters.push_back(c);
    }
    std::size_t r = detail::least_rotation(letters);
    std::vector<Syllable> raw;
    raw.reserve(letters.size());
    for (std::size_t i = 0; i < letters.size(); ++i) {
        int c = letters[(r + i) % letters.size()];
        raw.push_back({static_cast<std::uint32_t>(c / 2), (c % 2) ? -1 : 1});
    }
    return ConjClass(GroupElement::reduce(g.spec(), raw));
}

inline Rational weight(const Weighting& xi, const ConjClass& c) { return xi(c.canonical_word()); }

}  // namespace novikov
