#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace novikov {

using Rational = mpq_class;

/// Thrown when a mathematical precondition fails (non-regular matrix,
/// uncertified norm, weight violation). The CLI maps this to exit code 2.
class MathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for malformed input (bad words, bad rationals, shape errors).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && (s.front() == ' ' || s.front() == '+')) {
        s.erase(s.begin());
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    if (s.empty()) throw InputError("empty rational literal");
    std::size_t start = (s[0] == '-') ? 1 : 0;
    bool slash = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] == '/' && !slash && i > start && i + 1 < s.size()) {
            slash = true;
        } else if (s[i] < '0' || s[i] > '9') {
            throw InputError("invalid rational literal '" + std::string(text) + "'");
        }
    }
    Rational q;
    if (q.set_str(s, 10) != 0) {
        throw InputError("invalid rational literal '" + std::string(text) + "'");
    }
    if (q.get_den() == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    q.canonicalize();
    return q;
}

inline std::string format_rational(const Rational& q) { return q.get_str(10); }

/// An element of Q ∪ {-inf}. Used for log-norms and truncation cutoffs.
class Level {
public:
    Level() = default;  // -inf
    Level(const Rational& v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Level(long v) : value_(Rational(v)) {}   // NOLINT(google-explicit-constructor)

    static Level neg_inf() { return Level(); }

    bool is_neg_inf() const noexcept { return !value_.has_value(); }
    bool is_finite() const noexcept { return value_.has_value(); }

    const Rational& value() const {
        if (!value_) throw std::logic_error("Level::value on -inf");
        return *value_;
    }

    friend Level operator+(const Level& a, const Level& b) {
        if (a.is_neg_inf() || b.is_neg_inf()) return Level();
        return Level(*a.value_ + *b.value_);
    }

    friend bool operator==(const Level& a, const Level& b) {
        if (a.is_neg_inf() || b.is_neg_inf()) return a.is_neg_inf() == b.is_neg_inf();
        return *a.value_ == *b.value_;
    }

    friend std::strong_ordering operator<=>(const Level& a, const Level& b) {
        if (a.is_neg_inf()) {
            return b.is_neg_inf() ? std::strong_ordering::equal : std::strong_ordering::less;
        }
        if (b.is_neg_inf()) return std::strong_ordering::greater;
        int c = cmp(*a.value_, *b.value_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const { return is_neg_inf() ? "-inf" : format_rational(*value_); }

private:
    std::optional<Rational> value_;
};

inline Level max(const Level& a, const Level& b) { return a < b ? b : a; }

inline Level parse_level(std::string_view text) {
    if (text == "-inf") return Level::neg_inf();
    return Level(parse_rational(text));
}

}  // namespace novikov
