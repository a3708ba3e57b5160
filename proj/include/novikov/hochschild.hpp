#pragma once

#include "novikov/regmat.hpp"
#include "novikov/series.hpp"

#include <map>
#include <utility>
#include <vector>

namespace novikov {

/// A Hochschild 1-chain: a finite formal sum of tensors s (x) m.
class HHChain1 {
public:
    struct Tensor {
        NovikovSeries left;
        NovikovSeries right;
    };

    HHChain1() = default;
    explicit HHChain1(WeightingHandle xi) : xi_(std::move(xi)) {}

    const WeightingHandle& weighting() const noexcept { return xi_; }
    const std::vector<Tensor>& tensors() const noexcept { return tensors_; }
    bool empty() const noexcept { return tensors_.empty(); }

    /// Appends s (x) m; tensors with an exactly vanishing factor are purged.
    void add(NovikovSeries left, NovikovSeries right) {
        require_same_weighting(xi_, left.weighting());
        require_same_weighting(xi_, right.weighting());
        if ((left.exact() && left.is_zero()) || (right.exact() && right.is_zero())) return;
        tensors_.push_back({std::move(left), std::move(right)});
    }

    friend HHChain1 operator+(const HHChain1& a, const HHChain1& b) {
        HHChain1 out = a;
        for (const auto& t : b.tensors_) out.add(t.left, t.right);
        return out;
    }

    friend HHChain1 operator-(const HHChain1& a) {
        HHChain1 out(a.xi_);
        for (const auto& t : a.tensors_) out.add(-t.left, t.right);
        return out;
    }

private:
    WeightingHandle xi_;
    std::vector<Tensor> tensors_;
};

/// A Hochschild 2-chain: a finite formal sum of tensors s1 (x) s2 (x) m.
class HHChain2 {
public:
    struct Tensor {
        NovikovSeries s1;
        NovikovSeries s2;
        NovikovSeries m;
    };

    HHChain2() = default;
    explicit HHChain2(WeightingHandle xi) : xi_(std::move(xi)) {}

    const WeightingHandle& weighting() const noexcept { return xi_; }
    const std::vector<Tensor>& tensors() const noexcept { return tensors_; }

    void add(NovikovSeries s1, NovikovSeries s2, NovikovSeries m) {
        for (const auto* s : {&s1, &s2, &m}) {
            require_same_weighting(xi_, s->weighting());
            if (s->exact() && s->is_zero()) return;
        }
        tensors_.push_back({std::move(s1), std::move(s2), std::move(m)});
    }

private:
    WeightingHandle xi_;
    std::vector<Tensor> tensors_;
};

/// d(s (x) m) = m s - s m.
inline NovikovSeries d1(const HHChain1& c) {
    NovikovSeries out(c.weighting());
    for (const auto& t : c.tensors()) {
        out += mul(t.right, t.left);
        out += -mul(t.left, t.right);
    }
    return out;
}

/// d(l1 (x) l2 (x) l3) = l2 (x) l3 l1 - l1 l2 (x) l3 + l1 (x) l2 l3.
inline HHChain1 d2(const HHChain2& c) {
    HHChain1 out(c.weighting());
    for (const auto& t : c.tensors()) {
        out.add(t.s2, mul(t.m, t.s1));
        out.add(-mul(t.s1, t.s2), t.m);
        out.add(t.s1, mul(t.s2, t.m));
    }
    return out;
}

/// Coefficients of an exact 1-chain in the basis g (x) h of ZG (x) ZG.
inline std::map<std::pair<GroupElement, GroupElement>, Rational> expand(const HHChain1& c) {
    std::map<std::pair<GroupElement, GroupElement>, Rational> out;
    for (const auto& t : c.tensors()) {
        if (!t.left.exact() || !t.right.exact()) throw InputError("expand requires exact chains");
        for (const auto& [g, p] : t.left.terms()) {
            for (const auto& [h, q] : t.right.terms()) {
                auto key = std::make_pair(g, h);
                auto [it, inserted] = out.try_emplace(key, p * q);
                if (!inserted) {
                    it->second += p * q;
                    if (it->second == 0) out.erase(it);
                }
            }
        }
    }
    return out;
}

/// m(l1 (x) l2)(gamma) = sum over {h1 h2} = gamma of xi(h1)/xi(gamma) l1(h1) l2(h2)
/// on classes of negative weight, and 0 elsewhere.
inline ConjClassSeries m_map(const NovikovSeries& l1, const NovikovSeries& l2, const Level& floor = Level::neg_inf()) {
    require_same_weighting(l1.weighting(), l2.weighting());
    const Weighting& xi = *l1.weighting();
    Level cut = max(product_cutoff(l1.cutoff(), l1.lognorm_bound(), l2.cutoff(), l2.lognorm_bound()), floor);
    ConjClassSeries out(l1.weighting(), cut);
    std::vector<std::pair<const NovikovSeries::TermMap::value_type*, Rational>> rhs;
    for (const auto& kv : l2.terms()) rhs.emplace_back(&kv, xi(kv.first));
    std::map<ConjClass, Rational> acc;
    for (const auto& [h1, q1] : l1.terms()) {
        Rational w1 = xi(h1);
        if (w1 == 0) continue;
        for (const auto& [kv, w2] : rhs) {
            Rational wg = w1 + w2;
            if (!(wg < 0)) continue;
            if (cut.is_finite() && wg <= cut.value()) continue;
            Rational c = w1 / wg * q1 * kv->second;
            auto [it, inserted] = acc.try_emplace(conjugacy_canonical(h1 * kv->first), c);
            if (!inserted) it->second += c;
        }
    }
    for (const auto& [k, q] : acc) out.add_term(k, q);
    return out;
}

/// Thrown when mu is applied to a chain that is not a cycle.
class NotCycleError : public MathError {
public:
    NotCycleError(const std::string& what, NovikovSeries boundary)
        : MathError(what), boundary_(std::move(boundary)) {}
    const NovikovSeries& boundary() const noexcept { return boundary_; }

private:
    NovikovSeries boundary_;
};

/// The map induced by m on Hochschild 1-cycles, truncated at t.
inline ConjClassSeries mu(const HHChain1& c, const Rational& t) {
    NovikovSeries boundary = d1(c);
    if (!boundary.is_zero()) {
        std::string msg = "chain is not a cycle: d1 has " + std::to_string(boundary.size()) +
                          " term(s) above " + boundary.cutoff().str();
        throw NotCycleError(msg, boundary);
    }
    ConjClassSeries out(c.weighting(), Level(t));
    for (const auto& ten : c.tensors()) out += m_map(ten.left, ten.right, Level(t));
    if (Level(t) < out.cutoff()) throw MathError("mu only certified above " + out.cutoff().str());
    return out.truncated(Level(t));
}

/// Dennis trace representative trace(U (x) U^-1) = sum_{l,m} U_lm (x) (U^-1)_ml.
inline HHChain1 dennis_trace(const RingMatrix& u, const RingMatrix& uinv) {
    const std::size_t n = u.n();
    if (uinv.n() != n) throw InputError("dennis_trace: dimension mismatch");
    RingMatrix defect = mat_sub(mat_mul(u, uinv), mat_identity(u.weighting(), n));
    if (!defect.is_zero()) throw MathError("dennis_trace: U * Uinv is not the identity above its cutoff");
    HHChain1 out(u.weighting());
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t m = 0; m < n; ++m) out.add(u.at(l, m), uinv.at(m, l));
    }
    return out;
}

struct ClassSeriesWithDepth {
    ConjClassSeries series;
    long depth = 0;
};

/// sum_{m=1}^{N} epsilon(trace A^m)/m truncated at t, with N certified by
/// the power bound of the regular matrix A.
inline ClassSeriesWithDepth trace_log_sum(const RingMatrix& a, const Rational& t,
                                          std::optional<long> depth_override = {},
                                          std::optional<std::size_t> index = {}) {
    RegularityCertificate cert = require_regular(a, index);
    PowerSequence seq = regular_powers(a, cert, t, depth_override);
    ConjClassSeries sum(a.weighting(), Level(t));
    for (std::size_t p = 0; p < seq.powers.size(); ++p) {
        Rational inv(1, static_cast<long>(p + 1));
        sum += inv * epsilon_conj(trace(seq.powers[p]));
    }
    return {sum.truncated(Level(t)), seq.depth};
}

/// Both sides of sum_{i,k} m(A_ik (x) (A^m)_ki) = epsilon(trace A^{m+1})/(m+1)
/// for an exact square matrix, evaluated exactly.
struct CyclicIdentity {
    ConjClassSeries lhs;
    ConjClassSeries rhs;
    bool holds() const { return lhs == rhs; }
};

inline CyclicIdentity cyclic_identity(const RingMatrix& a, const RingMatrix& a_pow_m, long m) {
    if (!a.exact() || !a_pow_m.exact()) throw InputError("cyclic identity needs exact matrices");
    const std::size_t n = a.n();
    CyclicIdentity out{ConjClassSeries(a.weighting()), ConjClassSeries(a.weighting())};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) out.lhs += m_map(a.at(i, k), a_pow_m.at(k, i));
    }
    out.rhs = Rational(1, m + 1) * epsilon_conj(trace(mat_mul(a, a_pow_m)));
    return out;
}

/// L(tau(I - A)) = -epsilon(sum_m trace A^m / m).
inline ConjClassSeries L_direct(const RingMatrix& a, const Rational& t) { return -trace_log_sum(a, t).series; }

/// L(tau(I - A)) = mu(DT(I - A)) with the inverse from the Neumann series.
inline ConjClassSeries L_via_DT(const RingMatrix& a, const Rational& t) {
    RegularityCertificate cert = require_regular(a);
    Level m = a.max_lognorm();
    Rational shift = (m.is_finite() && m.value() > 0) ? m.value() : Rational(0);
    Rational inner = t - shift;
    RingMatrix u = mat_sub(mat_identity(a.weighting(), a.n()), a);
    RingMatrix uinv = neumann_inverse(a, inner);
    return mu(dennis_trace(u, uinv), t);
}

/// The homomorphism on W-bar: sum_i sign_i L(tau(I - A_i)).
inline ConjClassSeries L_of_torsion(const TorsionClass& tc, const WeightingHandle& xi, const Rational& t) {
    ConjClassSeries out(xi, Level(t));
    for (const auto& s : tc.summands()) {
        ConjClassSeries l = L_direct(s.a, t);
        out += s.sign > 0 ? l : -l;
    }
    return out;
}

}  // namespace novikov
