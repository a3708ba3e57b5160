#pragma once

#include "novikov/series.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace novikov {

/// Matrix of Novikov series sharing one weighting. Rectangular shapes are
/// allowed (chain complex boundaries); most operations require square input.
class RingMatrix {
public:
    RingMatrix() = default;
    RingMatrix(WeightingHandle xi, std::size_t rows, std::size_t cols)
        : xi_(std::move(xi)), rows_(rows), cols_(cols), entries_(rows * cols, NovikovSeries(xi_)) {}

    static RingMatrix zero(const WeightingHandle& xi, std::size_t n) { return RingMatrix(xi, n, n); }

    static RingMatrix identity(const WeightingHandle& xi, std::size_t n) {
        RingMatrix m(xi, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = series_one(xi);
        return m;
    }

    /// Builds a matrix from nested rows; all entries must share the weighting.
    static RingMatrix from_rows(const WeightingHandle& xi, const std::vector<std::vector<NovikovSeries>>& rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows[0].size();
        RingMatrix m(xi, r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw InputError("ragged matrix rows");
            for (std::size_t j = 0; j < c; ++j) {
                require_same_weighting(xi, rows[i][j].weighting());
                m.at(i, j) = rows[i][j];
            }
        }
        return m;
    }

    const WeightingHandle& weighting() const noexcept { return xi_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    std::size_t n() const {
        if (!is_square()) throw InputError("matrix is not square");
        return rows_;
    }

    NovikovSeries& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const NovikovSeries& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    bool exact() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.exact(); });
    }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
    }

    /// Largest entry cutoff; the matrix is certified strictly above it.
    Level cutoff() const {
        Level c = Level::neg_inf();
        for (const auto& e : entries_) c = max(c, e.cutoff());
        return c;
    }

    /// Largest certified upper bound of entry log-norms.
    Level max_lognorm() const {
        Level m = Level::neg_inf();
        for (const auto& e : entries_) m = max(m, e.lognorm_bound());
        return m;
    }

    bool integral() const {
        for (const auto& e : entries_) {
            for (const auto& [k, q] : e.terms()) {
                if (q.get_den() != 1) return false;
            }
        }
        return true;
    }

    RingMatrix truncated(const Level& t) const {
        RingMatrix out = *this;
        for (auto& e : out.entries_) e = e.truncated(t);
        return out;
    }

    /// Entrywise transformation preserving the shape.
    RingMatrix map(const std::function<NovikovSeries(const NovikovSeries&)>& f) const {
        RingMatrix out = *this;
        for (auto& e : out.entries_) e = f(e);
        if (!out.entries_.empty()) out.xi_ = out.entries_.front().weighting();
        return out;
    }

    RingMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw InputError("matrix block out of range");
        RingMatrix out(xi_, nr, nc);
        for (std::size_t i = 0; i < nr; ++i) {
            for (std::size_t j = 0; j < nc; ++j) out.at(i, j) = at(r0 + i, c0 + j);
        }
        return out;
    }

    friend bool operator==(const RingMatrix& a, const RingMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    WeightingHandle xi_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<NovikovSeries> entries_;
};

inline RingMatrix mat_identity(const WeightingHandle& xi, std::size_t n) { return RingMatrix::identity(xi, n); }

inline RingMatrix mat_add(const RingMatrix& a, const RingMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix dimension mismatch in add");
    require_same_weighting(a.weighting(), b.weighting());
    RingMatrix out(a.weighting(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
    }
    return out;
}

inline RingMatrix mat_neg(const RingMatrix& a) {
    return a.map([](const NovikovSeries& s) { return -s; });
}

inline RingMatrix mat_sub(const RingMatrix& a, const RingMatrix& b) { return mat_add(a, mat_neg(b)); }

inline RingMatrix mat_mul(const RingMatrix& a, const RingMatrix& b, const Level& floor = Level::neg_inf()) {
    if (a.cols() != b.rows()) throw InputError("matrix dimension mismatch in multiply");
    require_same_weighting(a.weighting(), b.weighting());
    RingMatrix out(a.weighting(), a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            NovikovSeries acc(a.weighting(), floor);
            for (std::size_t k = 0; k < a.cols(); ++k) {
                if (a.at(i, k).is_zero() && a.at(i, k).exact()) continue;
                if (b.at(k, j).is_zero() && b.at(k, j).exact()) continue;
                acc += mul(a.at(i, k), b.at(k, j), floor);
            }
            out.at(i, j) = std::move(acc);
        }
    }
    return out;
}

inline NovikovSeries trace(const RingMatrix& a) {
    NovikovSeries t(a.weighting());
    for (std::size_t i = 0; i < a.n(); ++i) t += a.at(i, i);
    return t;
}

inline RingMatrix abelianize(const RingMatrix& a) {
    RingMatrix out(abelian_weighting(a.weighting()), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = abelianize(a.at(i, j));
    }
    return out;
}

/// Result of the xi-regularity decision.
struct RegularityCertificate {
    bool regular = false;
    /// Maximum cycle mean of entry log-norms; -inf iff the support digraph is acyclic.
    Level K;
    /// A cycle (0-based indices, i0 -> i1 -> ... -> i0) whose mean equals K.
    std::vector<std::size_t> witness;
};

/// Raised when a matrix that must be xi-regular is not.
class NotRegularError : public MathError {
public:
    NotRegularError(const std::string& what, RegularityCertificate cert, std::optional<std::size_t> index = {})
        : MathError(what), cert_(std::move(cert)), index_(index) {}

    const RegularityCertificate& certificate() const noexcept { return cert_; }
    /// Position of the offending matrix in a list (dimension), when known.
    const std::optional<std::size_t>& index() const noexcept { return index_; }

private:
    RegularityCertificate cert_;
    std::optional<std::size_t> index_;
};

/// Edge weights of a digraph on n vertices; -inf marks a missing edge.
using WeightGrid = std::vector<std::vector<Level>>;

struct CycleMean {
    Level mean;
    std::vector<std::size_t> cycle;
};

/// Karp's maximum cycle mean, with a critical cycle extracted from the
/// tight-edge subgraph of the reweighted graph.
inline CycleMean max_cycle_mean(const WeightGrid& w) {
    const std::size_t n = w.size();
    CycleMean result;
    if (n == 0) return result;
    // best[k][v]: maximal weight of a walk with exactly k edges ending at v.
    std::vector<std::vector<Level>> best(n + 1, std::vector<Level>(n, Level::neg_inf()));
    for (std::size_t v = 0; v < n; ++v) best[0][v] = Level(0);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t u = 0; u < n; ++u) {
            if (best[k - 1][u].is_neg_inf()) continue;
            for (std::size_t v = 0; v < n; ++v) {
                if (w[u][v].is_neg_inf()) continue;
                best[k][v] = max(best[k][v], best[k - 1][u] + w[u][v]);
            }
        }
    }
    Level lambda = Level::neg_inf();
    for (std::size_t v = 0; v < n; ++v) {
        if (best[n][v].is_neg_inf()) continue;
        std::optional<Rational> worst;
        for (std::size_t k = 0; k < n; ++k) {
            if (best[k][v].is_neg_inf()) continue;
            Rational m = (best[n][v].value() - best[k][v].value()) / Rational(static_cast<long>(n - k));
            if (!worst || m < *worst) worst = m;
        }
        if (worst) lambda = max(lambda, Level(*worst));
    }
    result.mean = lambda;
    if (lambda.is_neg_inf()) return result;

    // Longest-path potentials for weights w - lambda (no positive cycles).
    const Rational& lam = lambda.value();
    std::vector<Rational> pot(n, Rational(0));
    for (std::size_t iter = 0; iter < n; ++iter) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (w[u][v].is_neg_inf()) continue;
                Rational cand = pot[u] + w[u][v].value() - lam;
                if (cand > pot[v]) {
                    pot[v] = cand;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    // Every edge of a zero-weight cycle is tight; find a cycle among tight edges.
    auto tight = [&](std::size_t u, std::size_t v) {
        return w[u][v].is_finite() && pot[u] + w[u][v].value() - lam == pot[v];
    };
    std::vector<int> color(n, 0);
    std::vector<std::size_t> stack;
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) -> bool {
        color[u] = 1;
        stack.push_back(u);
        for (std::size_t v = 0; v < n; ++v) {
            if (!tight(u, v)) continue;
            if (color[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                result.cycle.assign(it, stack.end());
                return true;
            }
            if (color[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        color[u] = 2;
        return false;
    };
    for (std::size_t s = 0; s < n && result.cycle.empty(); ++s) {
        if (color[s] == 0) dfs(s);
    }
    return result;
}

/// Edge weights log-norm(A_ij) on the support digraph of A.
inline WeightGrid lognorm_grid(const RingMatrix& a) {
    const std::size_t n = a.n();
    WeightGrid w(n, std::vector<Level>(n, Level::neg_inf()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!a.at(i, j).is_zero()) w[i][j] = a.at(i, j).lognorm();
        }
    }
    return w;
}

/// Decides xi-regularity: A is regular iff the maximum cycle mean K of its
/// entry log-norms is negative, and then K is a valid regularity constant.
inline RegularityCertificate xi_regularity(const RingMatrix& a) {
    if (!a.exact()) throw InputError("xi_regularity requires exact matrix entries");
    CycleMean cm = max_cycle_mean(lognorm_grid(a));
    RegularityCertificate cert;
    cert.K = cm.mean;
    cert.regular = cm.mean < Level(0);
    cert.witness = std::move(cm.cycle);
    return cert;
}

inline std::string format_cycle(const std::vector<std::size_t>& cycle) {
    std::string s = "[";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(cycle[i] + 1);
    }
    return s + "]";
}

inline RegularityCertificate require_regular(const RingMatrix& a, std::optional<std::size_t> index = {}) {
    RegularityCertificate cert = xi_regularity(a);
    if (!cert.regular) {
        std::string where = index ? " (matrix " + std::to_string(*index) + ")" : "";
        throw NotRegularError("matrix is not xi-regular" + where + ": cycle " + format_cycle(cert.witness) +
                                  " has mean " + cert.K.str(),
                              cert, index);
    }
    return cert;
}

/// Bounds for entries of powers of a regular matrix: every product of p
/// entries has log-norm at most K(p - n) + n M, where M bounds the entry
/// log-norms. For nilpotent support the bound is p M for p < n and -inf beyond.
class PowerBound {
public:
    PowerBound(const RegularityCertificate& cert, Level max_entry, std::size_t n)
        : K_(cert.K), M_(std::move(max_entry)), n_(n) {}

    Level operator()(long p) const {
        if (p == 0) return Level(0);
        if (M_.is_neg_inf()) return Level::neg_inf();
        if (K_.is_neg_inf()) {
            if (p >= static_cast<long>(n_)) return Level::neg_inf();
            return Level(M_.value() * Rational(p));
        }
        return Level(K_.value() * Rational(p - static_cast<long>(n_)) + Rational(static_cast<long>(n_)) * M_.value());
    }

    /// Largest p whose entries may still have terms above t.
    long depth(const Rational& t) const {
        if (M_.is_neg_inf()) return 0;
        if (K_.is_neg_inf()) {
            long last = 0;
            for (long p = 1; p < static_cast<long>(n_); ++p) {
                if (Level(t) < (*this)(p)) last = p;
            }
            return last;
        }
        // K(p - n) + nM > t  <=>  p < n + (t - nM)/K
        Rational limit = Rational(static_cast<long>(n_)) + (t - Rational(static_cast<long>(n_)) * M_.value()) / K_.value();
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), limit.get_num_mpz_t(), limit.get_den_mpz_t());
        long p = fl.get_si();
        if (Rational(p) == limit) --p;
        return p < 0 ? 0 : p;
    }

    /// Supremum of the bound over all p >= 0.
    Level slack() const {
        Level s(0);
        if (M_.is_neg_inf()) return s;
        if (K_.is_neg_inf()) {
            for (long p = 1; p < static_cast<long>(n_); ++p) s = max(s, (*this)(p));
            return s;
        }
        return max(s, (*this)(1));
    }

private:
    Level K_;
    Level M_;
    std::size_t n_;
};

namespace detail {

inline NovikovSeries relabel_exact(const NovikovSeries& s) {
    NovikovSeries out(s.weighting());
    for (const auto& [k, q] : s.terms()) out.add_term(k, q);
    return out;
}

}  // namespace detail

/// Powers A^1..A^N of a regular exact matrix, each certified above t.
///
/// Products are formed with every term of weight at most t - slack dropped;
/// by the power bound the dropped mass never propagates above t, so the
/// returned powers (truncated at t) are exact there. Stops early once a
/// power vanishes entirely after dropping.
struct PowerSequence {
    std::vector<RingMatrix> powers;  // powers[p-1] = A^p truncated at t
    long certified_depth = 0;        // depth needed for certification
    long depth = 0;                  // depth actually used
};

inline PowerSequence regular_powers(const RingMatrix& a, const RegularityCertificate& cert, const Rational& t,
                                    std::optional<long> depth_override = {}) {
    const std::size_t n = a.n();
    PowerBound bound(cert, a.max_lognorm(), n);
    long depth = bound.depth(t);
    Level slack = bound.slack();
    Level drop(Rational(t) - slack.value());

    PowerSequence seq;
    RingMatrix exact_power = a.map(detail::relabel_exact);
    long limit = depth_override ? std::max(*depth_override, depth) : depth;
    for (long p = 1; p <= limit; ++p) {
        if (p > 1) {
            exact_power = mat_mul(exact_power, a, drop).map(detail::relabel_exact);
        } else {
            exact_power = exact_power.map([&](const NovikovSeries& s) {
                return detail::relabel_exact(s.truncated(drop));
            });
        }
        if (exact_power.is_zero()) {
            if (p <= depth) depth = p - 1;
            break;
        }
        seq.powers.push_back(exact_power.map([&](const NovikovSeries& s) { return s.truncated(Level(t)); }));
    }
    seq.certified_depth = depth;
    if (depth_override) {
        if (*depth_override < depth) {
            throw InputError("depth override " + std::to_string(*depth_override) +
                             " is below the certified depth " + std::to_string(depth));
        }
        seq.depth = *depth_override;
    } else {
        seq.depth = depth;
    }
    // Powers beyond the certified depth carry nothing above t.
    while (static_cast<long>(seq.powers.size()) > seq.depth) seq.powers.pop_back();
    return seq;
}

struct NeumannInverse {
    RingMatrix inverse;
    RegularityCertificate certificate;
    long depth = 0;
};

/// (I - A)^-1 = I + A + A^2 + ..., truncated at t.
inline NeumannInverse neumann_inverse_with_depth(const RingMatrix& a, const Rational& t,
                                                 std::optional<long> depth_override = {}) {
    RegularityCertificate cert = require_regular(a);
    PowerSequence seq = regular_powers(a, cert, t, depth_override);
    RingMatrix sum = mat_identity(a.weighting(), a.n()).truncated(Level(t));
    for (const auto& p : seq.powers) sum = mat_add(sum, p);
    return {std::move(sum), std::move(cert), seq.depth};
}

inline RingMatrix neumann_inverse(const RingMatrix& a, const Rational& t) {
    return neumann_inverse_with_depth(a, t).inverse;
}

/// One summand sign * tau(I - A) of a torsion class.
struct TorsionSummand {
    int sign = 1;
    RingMatrix a;
    RegularityCertificate certificate;

    RingMatrix unit_matrix() const { return mat_sub(mat_identity(a.weighting(), a.n()), a); }
};

/// Formal signed sum of classes tau(I - A) in the reduced K1 group. No
/// normal form is attempted; classes are compared through their images.
class TorsionClass {
public:
    TorsionClass() = default;
    explicit TorsionClass(std::vector<TorsionSummand> summands) : summands_(std::move(summands)) {}

    const std::vector<TorsionSummand>& summands() const noexcept { return summands_; }
    bool empty() const noexcept { return summands_.empty(); }

    friend TorsionClass operator-(const TorsionClass& t) {
        TorsionClass out = t;
        for (auto& s : out.summands_) s.sign = -s.sign;
        return out;
    }

    friend TorsionClass operator+(const TorsionClass& a, const TorsionClass& b) {
        TorsionClass out = a;
        out.summands_.insert(out.summands_.end(), b.summands_.begin(), b.summands_.end());
        return out;
    }

private:
    std::vector<TorsionSummand> summands_;
};

inline TorsionClass torsion_unit(const RingMatrix& a, int sign = 1) {
    if (sign != 1 && sign != -1) throw InputError("torsion sign must be +1 or -1");
    RegularityCertificate cert = require_regular(a);
    return TorsionClass({TorsionSummand{sign, a, std::move(cert)}});
}

inline TorsionClass torsion_negate(const TorsionClass& t) { return -t; }
inline TorsionClass torsion_add(const TorsionClass& a, const TorsionClass& b) { return a + b; }

/// Determinant over a commutative series ring by cofactor expansion.
inline AbelianSeries commutative_det(const RingMatrix& m, const Level& floor = Level::neg_inf()) {
    const std::size_t n = m.n();
    if (!m.weighting()->spec()->is_abelian()) throw InputError("determinant requires a free-abelian group");
    if (n == 0) return series_one(m.weighting());
    if (n == 1) return m.at(0, 0);
    AbelianSeries det(m.weighting(), floor);
    for (std::size_t j = 0; j < n; ++j) {
        if (m.at(0, j).is_zero() && m.at(0, j).exact()) continue;
        RingMatrix minor(m.weighting(), n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor.at(r - 1, cc++) = m.at(r, c);
            }
        }
        AbelianSeries term = mul(m.at(0, j), commutative_det(minor, floor), floor);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

/// Leading term of an abelian series: maximal weight, ties broken by the
/// lexicographically least exponent vector.
inline std::optional<AbelianSeries::Term> leading_term(const AbelianSeries& s) {
    auto sorted = s.sorted_terms();
    if (sorted.empty()) return std::nullopt;
    return sorted.front();
}

/// Representative modulo +-H: multiply by the unique +-h turning the
/// leading term into a positive multiple of the identity.
inline AbelianSeries canonical_mod_units(const AbelianSeries& s) {
    auto lead = leading_term(s);
    if (!lead) throw MathError("cannot normalize a series with no certified terms");
    Rational unit_sign = lead->coeff > 0 ? Rational(1) : Rational(-1);
    AbelianSeries unit = AbelianSeries::monomial(s.weighting(), unit_sign, lead->key.inverse());
    return mul(unit, s);
}

namespace detail {

/// Inverse of an abelian series whose leading term c*1 is the unique term
/// of maximal weight: (c(1 - a))^-1 = c^-1 (1 - a)^-1.
inline AbelianSeries invert_normalized(const AbelianSeries& u, const Rational& t) {
    auto lead = leading_term(u);
    if (!lead || !lead->key.is_identity()) throw MathError("series is not normalized");
    Rational c = lead->coeff;
    AbelianSeries a = series_one(u.weighting()) - (Rational(1) / c) * u;
    if (!(a.lognorm_bound() < Level(0))) {
        throw MathError("determinant has several terms of maximal weight; not invertible by this route");
    }
    return (Rational(1) / c) * invert_one_minus(a, t);
}

}  // namespace detail

/// Product of det(abelianized(I - A_i))^{sign_i}, as a canonical
/// representative modulo +-H truncated at t.
inline AbelianSeries det_abelian(const TorsionClass& tc, const WeightingHandle& xi, const Rational& t) {
    WeightingHandle hxi = abelian_weighting(xi);
    AbelianSeries result = series_one(hxi).truncated(Level(t));
    for (const auto& s : tc.summands()) {
        AbelianSeries d = canonical_mod_units(commutative_det(abelianize(s.unit_matrix())));
        if (s.sign < 0) {
            d = detail::invert_normalized(d, t);
        } else {
            d = d.truncated(Level(t));
        }
        result = mul(result, d, Level(t));
    }
    if (Level(t) < result.cutoff()) {
        throw MathError("determinant only certified above " + result.cutoff().str());
    }
    return canonical_mod_units(result).truncated(Level(t));
}

}  // namespace novikov
