#pragma once

#include "novikov/chains.hpp"
#include "novikov/orbits.hpp"

namespace novikov::genus2 {

/// Free group on a1 b1 a2 b2. The surface relator is not imposed.
inline GroupHandle group() { return GroupSpec::free({"a1", "b1", "a2", "b2"}); }

/// xi(a1) = -1, all other generators weigh 0.
inline WeightingHandle weighting() {
    static const WeightingHandle xi = make_weighting(group(), {Rational(-1), Rational(0), Rational(0), Rational(0)});
    return xi;
}

inline RingMatrix scalar(const WeightingHandle& xi, std::string_view word) {
    return RingMatrix::from_rows(xi, {{series_monomial(xi, 1, word)}});
}

/// A_0 = (a2 a1), A_1 = (a1); swapped exchanges the two.
inline DescentData descent(bool swapped = false) {
    WeightingHandle xi = weighting();
    RingMatrix a0 = scalar(xi, "a2 a1");
    RingMatrix a1 = scalar(xi, "a1");
    if (swapped) std::swap(a0, a1);
    return {xi, {a0, a1}};
}

/// Cone data realizing the descent matrices. D is a circle (one 0-cell,
/// one 1-cell with boundary b1 - 1); E adds two 1-cells x, y standing for
/// the two index-1 critical points. k restricted to D is A_0, A_1 and sends
/// the 1-cell of D to A_1 + x; the boundary of x is then forced by the
/// chain-map identity.
inline ConeData cone(bool swapped = false) {
    WeightingHandle xi = weighting();
    GroupHandle g = xi->spec();
    DescentData d = descent(swapped);
    const NovikovSeries& alpha = d.matrices[0].at(0, 0);
    const NovikovSeries& beta = d.matrices[1].at(0, 0);
    NovikovSeries one = series_one(xi);
    NovikovSeries u = series_monomial(xi, 1, "b1") - one;

    FreeChainComplex dcx(xi, {1, 1}, {RingMatrix::from_rows(xi, {{u}})});
    NovikovSeries x = u * alpha - beta * u;
    NovikovSeries y = one - series_monomial(xi, 1, "a2");
    FreeChainComplex ecx(xi, {1, 3}, {RingMatrix::from_rows(xi, {{u}, {x}, {y}})});

    ConeData cd;
    cd.D = dcx;
    cd.E = ecx;
    cd.i_map = ConeData::standard_inclusion(dcx, ecx);
    cd.k_map = {RingMatrix::from_rows(xi, {{alpha}}), RingMatrix::from_rows(xi, {{beta, one, series_zero(xi)}})};
    return cd;
}

}  // namespace novikov::genus2
