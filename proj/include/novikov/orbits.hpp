#pragma once

#include "novikov/hochschild.hpp"
#include "novikov/regmat.hpp"
#include "novikov/series.hpp"

#include <optional>
#include <vector>

namespace novikov {

/// Homological gradient descent matrices A_0 .. A_{n-1} over ZG, indexed by
/// dimension. This is where geometric input enters the library.
struct DescentData {
    WeightingHandle xi;
    std::vector<RingMatrix> matrices;

    /// Checks exactness, integrality and xi-regularity of every A_i.
    void validate() const {
        for (std::size_t i = 0; i < matrices.size(); ++i) {
            const RingMatrix& a = matrices[i];
            require_same_weighting(xi, a.weighting());
            if (!a.exact()) throw InputError("descent matrix " + std::to_string(i) + " is not exact");
            if (!a.integral()) throw InputError("descent matrix " + std::to_string(i) + " has non-integer coefficients");
            require_regular(a, i);
        }
    }
};

struct EtaFunction {
    ConjClassSeries series;
    long depth = 0;
};

struct ZetaFunction {
    AbelianSeries series;
    long depth = 0;
};

/// eta(-v) = sum_i (-1)^i sum_{m>=1} epsilon(trace A_i^m)/m, truncated at t.
inline EtaFunction eta_from_descent(const DescentData& d, const Rational& t,
                                    std::optional<long> depth_override = {}) {
    d.validate();
    EtaFunction eta{ConjClassSeries(d.xi, Level(t)), 0};
    for (std::size_t i = 0; i < d.matrices.size(); ++i) {
        auto part = trace_log_sum(d.matrices[i], t, depth_override, i);
        eta.series += (i % 2 == 0) ? part.series : -part.series;
        eta.depth = std::max(eta.depth, part.depth);
    }
    return eta;
}

/// zeta(-v) = exp(epsilon(eta(-v))) in the Novikov ring of the abelianization.
inline ZetaFunction zeta_from_eta(const EtaFunction& eta, const Rational& t) {
    for (const auto& [cls, q] : eta.series.terms()) {
        if (!(eta.series.weight_of(cls) < 0)) {
            throw MathError("eta has a term of non-negative weight: {" + cls.str() + "}");
        }
    }
    AbelianSeries ab = abelianize(eta.series);
    return {exp_series(ab, t), eta.depth};
}

/// tau = sum_i (-1)^{i+1} tau(I - A_i).
inline TorsionClass torsion_from_descent(const DescentData& d) {
    d.validate();
    std::vector<TorsionSummand> summands;
    for (std::size_t i = 0; i < d.matrices.size(); ++i) {
        const RingMatrix& a = d.matrices[i];
        if (a.n() == 0) continue;
        summands.push_back({(i % 2 == 0) ? -1 : 1, a, xi_regularity(a)});
    }
    return TorsionClass(std::move(summands));
}

}  // namespace novikov
