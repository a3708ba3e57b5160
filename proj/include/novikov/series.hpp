#pragma once

#include "novikov/groups.hpp"
#include "novikov/rational.hpp"

#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace novikov {

inline const GroupElement& key_element(const GroupElement& g) { return g; }
inline const GroupElement& key_element(const ConjClass& c) { return c.canonical_word(); }

/// A sparse truncated series indexed by group elements or conjugacy classes.
///
/// The represented element agrees with `terms()` on every key of weight
/// strictly greater than `cutoff()`; coefficients at or below the cutoff
/// are unknown. A cutoff of -inf means the series is an exact finite sum.
/// Every stored term has weight > cutoff and a nonzero coefficient.
template <class Key>
class SparseSeries {
public:
    using TermMap = std::map<Key, Rational>;

    struct Term {
        Key key;
        Rational coeff;
        Rational weight;
    };

    SparseSeries() = default;
    explicit SparseSeries(WeightingHandle xi, Level cutoff = Level::neg_inf())
        : xi_(std::move(xi)), cutoff_(std::move(cutoff)) {}

    /// Validating constructor: every term must lie strictly above the cutoff.
    static SparseSeries from_terms(WeightingHandle xi, const std::vector<std::pair<Key, Rational>>& terms,
                                   Level cutoff = Level::neg_inf()) {
        SparseSeries s(std::move(xi), std::move(cutoff));
        for (const auto& [k, q] : terms) {
            if (Level(s.weight_of(k)) <= s.cutoff_) {
                throw InputError("term '" + key_element(k).str() + "' lies at or below the cutoff " +
                                 s.cutoff_.str());
            }
            s.add_term(k, q);
        }
        return s;
    }

    static SparseSeries monomial(WeightingHandle xi, const Rational& q, Key key,
                                 Level cutoff = Level::neg_inf()) {
        SparseSeries s(std::move(xi), std::move(cutoff));
        s.add_term(key, q);
        return s;
    }

    const WeightingHandle& weighting() const noexcept { return xi_; }
    const TermMap& terms() const noexcept { return terms_; }
    const Level& cutoff() const noexcept { return cutoff_; }
    bool exact() const noexcept { return cutoff_.is_neg_inf(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    Rational weight_of(const Key& k) const { return (*xi_)(key_element(k)); }

    Rational coeff(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Accumulates q into the coefficient of k. Terms at or below the cutoff
    /// are discarded since they carry no certified information.
    void add_term(const Key& k, const Rational& q) {
        if (q == 0) return;
        if (!cutoff_.is_neg_inf() && weight_of(k) <= cutoff_.value()) return;
        auto [it, inserted] = terms_.try_emplace(k, q);
        if (!inserted) {
            it->second += q;
            if (it->second == 0) terms_.erase(it);
        }
    }

    /// Maximum weight over stored terms, -inf when there are none.
    Level max_stored_weight() const {
        Level m = Level::neg_inf();
        for (const auto& [k, q] : terms_) m = max(m, Level(weight_of(k)));
        return m;
    }

    /// log of the norm: the maximal weight in the support.
    Level lognorm() const {
        if (terms_.empty()) {
            if (exact()) return Level::neg_inf();
            throw MathError("log-norm not certified: no terms above cutoff " + cutoff_.str());
        }
        return max_stored_weight();
    }

    /// An upper bound for the log-norm that is always certified.
    Level lognorm_bound() const { return terms_.empty() ? cutoff_ : max_stored_weight(); }

    /// Terms sorted by descending weight, then lexicographic word.
    std::vector<Term> sorted_terms() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [k, q] : terms_) out.push_back({k, q, weight_of(k)});
        std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return word_lex_less(key_element(a.key), key_element(b.key));
        });
        return out;
    }

    /// Drops terms of weight <= t and raises the cutoff to t.
    SparseSeries truncated(const Level& t) const {
        if (t < cutoff_) {
            throw MathError("cannot truncate at " + t.str() + " below the certified cutoff " + cutoff_.str());
        }
        SparseSeries out(xi_, t);
        for (const auto& [k, q] : terms_) out.add_term(k, q);
        return out;
    }

    SparseSeries operator-() const {
        SparseSeries out = *this;
        for (auto& [k, q] : out.terms_) q = -q;
        return out;
    }

    friend SparseSeries operator+(const SparseSeries& a, const SparseSeries& b) {
        require_same_weighting(a.xi_, b.xi_);
        SparseSeries out(a.xi_, max(a.cutoff_, b.cutoff_));
        for (const auto& [k, q] : a.terms_) out.add_term(k, q);
        for (const auto& [k, q] : b.terms_) out.add_term(k, q);
        return out;
    }

    friend SparseSeries operator-(const SparseSeries& a, const SparseSeries& b) { return a + (-b); }

    friend SparseSeries operator*(const Rational& q, const SparseSeries& s) {
        SparseSeries out(s.xi_, s.cutoff_);
        if (q == 0) return out;
        for (const auto& [k, c] : s.terms_) out.terms_.emplace_hint(out.terms_.end(), k, q * c);
        return out;
    }

    SparseSeries& operator+=(const SparseSeries& b) {
        require_same_weighting(xi_, b.xi_);
        if (cutoff_ < b.cutoff_) *this = truncated(b.cutoff_);
        for (const auto& [k, q] : b.terms_) add_term(k, q);
        return *this;
    }

    /// Exact equality of the stored data (weighting, cutoff and terms).
    friend bool operator==(const SparseSeries& a, const SparseSeries& b) {
        return same_weighting(a.xi_, b.xi_) && a.cutoff_ == b.cutoff_ && a.terms_ == b.terms_;
    }

private:
    WeightingHandle xi_;
    TermMap terms_;
    Level cutoff_;
};

using NovikovSeries = SparseSeries<GroupElement>;
using ConjClassSeries = SparseSeries<ConjClass>;
/// A Novikov series over a free-abelian group.
using AbelianSeries = SparseSeries<GroupElement>;

/// True when both series are certified above t and have the same terms there.
template <class Key>
bool agree_above(const SparseSeries<Key>& a, const SparseSeries<Key>& b, const Level& t) {
    if (!same_weighting(a.weighting(), b.weighting())) return false;
    if (t < a.cutoff() || t < b.cutoff()) return false;
    return a.truncated(t).terms() == b.truncated(t).terms();
}

inline NovikovSeries series_one(const WeightingHandle& xi) {
    return NovikovSeries::monomial(xi, 1, GroupElement::identity(xi->spec()));
}

inline NovikovSeries series_zero(const WeightingHandle& xi) { return NovikovSeries(xi); }

inline NovikovSeries series_monomial(const WeightingHandle& xi, const Rational& q, std::string_view word) {
    return NovikovSeries::monomial(xi, q, parse_word(xi->spec(), word));
}

inline Level lognorm(const NovikovSeries& s) { return s.lognorm(); }

/// Certified cutoff of a product: the only unknown contributions come from
/// pairing an unknown part of one factor with any part of the other.
inline Level product_cutoff(const Level& ca, const Level& na, const Level& cb, const Level& nb) {
    return max(max(ca + nb, cb + na), ca + cb);
}

/// Convolution product. The result cutoff is the certified product cutoff,
/// raised to `floor` when that is higher; terms at or below it are skipped.
inline NovikovSeries mul(const NovikovSeries& a, const NovikovSeries& b, const Level& floor = Level::neg_inf()) {
    require_same_weighting(a.weighting(), b.weighting());
    Level cut = max(product_cutoff(a.cutoff(), a.lognorm_bound(), b.cutoff(), b.lognorm_bound()), floor);
    NovikovSeries out(a.weighting(), cut);
    if (a.is_zero() || b.is_zero()) return out;
    std::vector<std::tuple<const GroupElement*, const Rational*, Rational>> rhs;
    rhs.reserve(b.size());
    for (const auto& [k, q] : b.terms()) rhs.emplace_back(&k, &q, b.weight_of(k));
    std::map<GroupElement, Rational> acc;
    for (const auto& [ka, qa] : a.terms()) {
        Rational wa = a.weight_of(ka);
        for (const auto& [kb, qb, wb] : rhs) {
            if (cut.is_finite() && wa + wb <= cut.value()) continue;
            auto [it, inserted] = acc.try_emplace(ka * *kb, qa * *qb);
            if (!inserted) it->second += qa * *qb;
        }
    }
    for (auto& [k, q] : acc) out.add_term(k, q);
    return out;
}

inline NovikovSeries operator*(const NovikovSeries& a, const NovikovSeries& b) { return mul(a, b); }

inline NovikovSeries truncate(const NovikovSeries& s, const Rational& t) { return s.truncated(Level(t)); }

namespace detail {

/// Largest m >= 0 with m * ell > t, i.e. the last power of an element of
/// log-norm ell that can still contribute above t.
inline long last_contributing_power(const Level& ell, const Rational& t) {
    if (ell.is_neg_inf()) return 0;
    // ell < 0 and t < 0 here.
    Rational ratio = t / ell.value();  // m*ell > t  <=>  m < t/ell
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    long m = fl.get_si();
    if (Rational(m) == ratio) --m;
    return m < 0 ? 0 : m;
}

inline Level require_small(const NovikovSeries& a, const char* op) {
    Level ell = a.lognorm_bound();
    if (!(ell < Level(0))) {
        throw MathError(std::string(op) + ": log-norm " + ell.str() + " is not negative");
    }
    return ell;
}

inline NovikovSeries certify(const NovikovSeries& s, const Rational& t, const char* op) {
    if (Level(t) < s.cutoff()) {
        throw MathError(std::string(op) + ": result only certified above " + s.cutoff().str());
    }
    return s.truncated(Level(t));
}

}  // namespace detail

/// (1 - a)^-1 = sum a^n, truncated at t.
inline NovikovSeries invert_one_minus(const NovikovSeries& a, const Rational& t) {
    Level ell = detail::require_small(a, "invert_one_minus");
    if (!(t < 0)) throw MathError("invert_one_minus: cutoff must be negative");
    long last = detail::last_contributing_power(ell, t);
    NovikovSeries sum = series_one(a.weighting()).truncated(Level(t));
    NovikovSeries power = series_one(a.weighting());
    for (long n = 1; n <= last; ++n) {
        power = mul(power, a, Level(t));
        sum += power;
    }
    return detail::certify(sum, t, "invert_one_minus");
}

/// log(1 + a) = sum_{m>=1} (-1)^{m+1} a^m / m, truncated at t.
inline NovikovSeries log_one_plus(const NovikovSeries& a, const Rational& t) {
    Level ell = detail::require_small(a, "log_one_plus");
    long last = detail::last_contributing_power(ell, t);
    NovikovSeries sum = NovikovSeries(a.weighting(), Level(t));
    NovikovSeries power = series_one(a.weighting());
    for (long m = 1; m <= last; ++m) {
        power = mul(power, a, Level(t));
        Rational c(m % 2 == 1 ? 1 : -1, m);
        sum += c * power;
    }
    return detail::certify(sum, t, "log_one_plus");
}

/// exp(a) = sum_{m>=0} a^m / m!, truncated at t.
inline NovikovSeries exp_series(const NovikovSeries& a, const Rational& t) {
    Level ell = detail::require_small(a, "exp");
    long last = detail::last_contributing_power(ell, t);
    NovikovSeries sum = series_one(a.weighting()).truncated(Level(t));
    NovikovSeries power = series_one(a.weighting());
    Rational factorial = 1;
    for (long m = 1; m <= last; ++m) {
        power = mul(power, a, Level(t));
        factorial *= m;
        sum += Rational(1) / factorial * power;
    }
    return detail::certify(sum, t, "exp");
}

/// Projection to conjugacy-class series: sums coefficients per class.
inline ConjClassSeries epsilon_conj(const NovikovSeries& s) {
    ConjClassSeries out(s.weighting(), s.cutoff());
    for (const auto& [k, q] : s.terms()) out.add_term(conjugacy_canonical(k), q);
    return out;
}

inline WeightingHandle abelian_weighting(const WeightingHandle& xi) {
    return std::make_shared<const Weighting>(xi->abelianized());
}

inline GroupElement abelianize(const GroupElement& g) {
    const GroupHandle& spec = g.spec();
    if (spec->is_abelian()) return g;
    std::vector<std::int64_t> ex(spec->rank(), 0);
    for (const auto& s : g.syllables()) ex[s.gen] += s.exp;
    return GroupElement::from_exponents(spec->abelianization(), std::move(ex));
}

/// Ring homomorphism to the Novikov ring of H = G/[G,G].
inline AbelianSeries abelianize(const NovikovSeries& s) {
    AbelianSeries out(abelian_weighting(s.weighting()), s.cutoff());
    for (const auto& [k, q] : s.terms()) out.add_term(abelianize(k), q);
    return out;
}

/// Further projection of a class series to the abelianization.
inline AbelianSeries abelianize(const ConjClassSeries& s) {
    AbelianSeries out(abelian_weighting(s.weighting()), s.cutoff());
    for (const auto& [k, q] : s.terms()) out.add_term(abelianize(k.canonical_word()), q);
    return out;
}

}  // namespace novikov
