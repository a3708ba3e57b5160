#include "support.hpp"

#include <gtest/gtest.h>

using namespace novikov;
using novikov::testing::brute_max_cycle_mean;
using novikov::testing::cycle_mean;
using novikov::testing::exact_powers;
using novikov::testing::f2_weights;
using novikov::testing::regular_pool;
using novikov::testing::term;

namespace {

RingMatrix m2(const WeightingHandle& xi, NovikovSeries a, NovikovSeries b, NovikovSeries c, NovikovSeries d) {
    return RingMatrix::from_rows(xi, {{a, b}, {c, d}});
}

/// Random matrices over F2 with weights of both signs, for regularity decisions.
RingMatrix random_mixed(std::mt19937_64& rng, const WeightingHandle& xi, std::size_t n, double density) {
    std::bernoulli_distribution dense(density);
    RingMatrix a(xi, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dense(rng)) a.at(i, j) = novikov::testing::random_entry(rng, xi, 2, 3, Rational(2));
        }
    }
    return a;
}

/// Regular matrices whose entries may have positive log-norm.
RingMatrix random_regular_mixed(std::mt19937_64& rng, const WeightingHandle& xi, std::size_t n) {
    for (;;) {
        RingMatrix a = random_mixed(rng, xi, n, 0.5);
        if (xi_regularity(a).regular && !(a.max_lognorm() <= Level(0))) return a;
    }
}

}  // namespace

TEST(MatrixOps, UnitAndProducts) {
    auto xi = f2_weights(-1, -1);
    RingMatrix a = m2(xi, term(xi, 1, "a"), term(xi, 2, "b"), NovikovSeries(xi), term(xi, -1, "a b"));
    RingMatrix i2 = mat_identity(xi, 2);
    EXPECT_EQ(mat_mul(a, i2), a);
    EXPECT_EQ(mat_mul(i2, i2), i2);
    RingMatrix x = RingMatrix::from_rows(xi, {{term(xi, 1, "a")}});
    RingMatrix y = RingMatrix::from_rows(xi, {{term(xi, 1, "b")}});
    EXPECT_EQ(mat_mul(x, y), RingMatrix::from_rows(xi, {{term(xi, 1, "a b")}}));
    EXPECT_THROW(mat_mul(a, x), InputError);
    EXPECT_THROW(mat_add(a, x), InputError);
    EXPECT_EQ(trace(a), term(xi, 1, "a") - term(xi, 1, "a b"));
}

TEST(Regularity, ScalarLoop) {
    auto xi = genus2::weighting();
    RegularityCertificate c = xi_regularity(genus2::scalar(xi, "a1"));
    EXPECT_TRUE(c.regular);
    EXPECT_EQ(c.K, Level(-1));
}

TEST(Regularity, ZeroWeightLoopIsWitness) {
    auto xi = f2_weights(-1, 0);
    RingMatrix a = m2(xi, term(xi, 1, "a"), term(xi, 1, "a"), NovikovSeries(xi), term(xi, 3, "b a b^-1 a^-1"));
    RegularityCertificate c = xi_regularity(a);
    EXPECT_FALSE(c.regular);
    EXPECT_EQ(c.K, Level(0));
    EXPECT_EQ(c.witness, (std::vector<std::size_t>{1}));
    EXPECT_EQ(format_cycle(c.witness), "[2]");
    try {
        require_regular(a, 4);
        FAIL() << "expected NotRegularError";
    } catch (const NotRegularError& e) {
        EXPECT_EQ(e.index(), std::optional<std::size_t>(4));
        EXPECT_EQ(e.certificate().witness, c.witness);
    }
}

TEST(Regularity, NilpotentSupport) {
    auto xi = f2_weights(-1, 0);
    RingMatrix a(xi, 3, 3);
    a.at(0, 1) = term(xi, 1, "b^5");
    a.at(0, 2) = term(xi, 1, "a^-2");
    a.at(1, 2) = term(xi, 2, "b");
    RegularityCertificate c = xi_regularity(a);
    EXPECT_TRUE(c.regular);
    EXPECT_TRUE(c.K.is_neg_inf());
    EXPECT_TRUE(c.witness.empty());
    // The inverse is the finite sum I + A + A^2.
    RingMatrix inv = neumann_inverse(a, Rational(-10));
    RingMatrix expected = mat_add(mat_add(mat_identity(xi, 3), a), mat_mul(a, a));
    EXPECT_EQ(inv, expected.truncated(Level(-10)));
}

TEST(Regularity, RequiresExactEntries) {
    auto xi = genus2::weighting();
    RingMatrix a = genus2::scalar(xi, "a1").truncated(Level(-3));
    EXPECT_THROW(xi_regularity(a), InputError);
}

TEST(Regularity, KarpAgreesWithCycleEnumeration) {
    auto xi = f2_weights(-1, 1);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    std::uniform_real_distribution<double> dens(0.15, 0.7);
    for (int trial = 0; trial < 300; ++trial) {
        RingMatrix a = random_mixed(rng, xi, dim(rng), dens(rng));
        RegularityCertificate c = xi_regularity(a);
        WeightGrid grid = lognorm_grid(a);
        EXPECT_EQ(c.K, brute_max_cycle_mean(grid));
        EXPECT_EQ(c.regular, c.K < Level(0));
        if (c.K.is_finite()) {
            ASSERT_FALSE(c.witness.empty());
            EXPECT_EQ(cycle_mean(grid, c.witness), c.K.value());
        }
    }
}

TEST(Regularity, NegativeEntriesAlwaysRegular) {
    for (const auto& a : regular_pool(100, 99)) EXPECT_TRUE(xi_regularity(a).regular);
}

TEST(Neumann, SmallCases) {
    auto xi = genus2::weighting();
    RingMatrix z = RingMatrix::zero(xi, 2);
    EXPECT_EQ(neumann_inverse(z, Rational(-3)), mat_identity(xi, 2).truncated(Level(-3)));
    RingMatrix inv = neumann_inverse(genus2::scalar(xi, "a1"), Rational(-5, 2));
    EXPECT_EQ(inv.at(0, 0), (term(xi, 1, "") + term(xi, 1, "a1") + term(xi, 1, "a1^2")).truncated(Level(Rational(-5, 2))));
}

TEST(Neumann, TwoByTwoAgainstPowerSum) {
    auto xi = f2_weights(-1, -1);
    RingMatrix a = m2(xi, NovikovSeries(xi), term(xi, 1, "a"), term(xi, 1, "b"), NovikovSeries(xi));
    Rational t(-3);
    RingMatrix inv = neumann_inverse(a, t);
    RingMatrix brute = mat_identity(xi, 2);
    for (const auto& p : exact_powers(a, 3)) brute = mat_add(brute, p);
    EXPECT_EQ(inv, brute.truncated(Level(t)));
    EXPECT_EQ(inv.at(0, 0), (term(xi, 1, "") + term(xi, 1, "a b")).truncated(Level(t)));
    RingMatrix u = mat_sub(mat_identity(xi, 2), a);
    EXPECT_EQ(mat_mul(u, inv).truncated(Level(t)), mat_identity(xi, 2).truncated(Level(t)));
}

TEST(Neumann, NotRegularIsError) {
    auto xi = f2_weights(-1, 0);
    RingMatrix a = RingMatrix::from_rows(xi, {{term(xi, 1, "b")}});
    EXPECT_THROW(neumann_inverse(a, Rational(-2)), NotRegularError);
}

TEST(Neumann, RandomPoolTwoSidedInverse) {
    for (const auto& a : regular_pool(120, 5)) {
        Rational t(-5);
        RingMatrix inv = neumann_inverse(a, t);
        RingMatrix u = mat_sub(mat_identity(a.weighting(), a.n()), a);
        RingMatrix left = mat_mul(u, inv);
        RingMatrix right = mat_mul(inv, u);
        EXPECT_LE(left.cutoff(), Level(t));
        EXPECT_EQ(left.truncated(Level(t)), mat_identity(a.weighting(), a.n()).truncated(Level(t)));
        EXPECT_EQ(right.truncated(Level(t)), mat_identity(a.weighting(), a.n()).truncated(Level(t)));
        // Certified against the exact power sum.
        NeumannInverse full = neumann_inverse_with_depth(a, t);
        RingMatrix brute = mat_identity(a.weighting(), a.n());
        for (const auto& p : exact_powers(a, full.depth + 2)) brute = mat_add(brute, p);
        EXPECT_EQ(inv, brute.truncated(Level(t)));
    }
}

TEST(Neumann, PositiveEntryNorms) {
    auto xi = f2_weights(-1, 1);
    std::mt19937_64 rng(23);
    Rational t(-4);
    for (int accepted = 0; accepted < 40;) {
        RingMatrix a = random_regular_mixed(rng, xi, 2);
        // Keep the exact oracle affordable.
        if (PowerBound(xi_regularity(a), a.max_lognorm(), 2).depth(t) > 10) continue;
        ++accepted;
        NeumannInverse inv = neumann_inverse_with_depth(a, t);
        RingMatrix brute = mat_identity(xi, a.n());
        for (const auto& p : exact_powers(a, inv.depth + 3)) brute = mat_add(brute, p);
        EXPECT_EQ(inv.inverse, brute.truncated(Level(t)));
        RingMatrix u = mat_sub(mat_identity(xi, a.n()), a);
        RingMatrix left = mat_mul(u, inv.inverse);
        EXPECT_EQ(left.truncated(left.cutoff()), mat_identity(xi, a.n()).truncated(left.cutoff()));
    }
}

TEST(Neumann, DepthOverride) {
    auto xi = genus2::weighting();
    RingMatrix a = genus2::scalar(xi, "a1");
    NeumannInverse base = neumann_inverse_with_depth(a, Rational(-4));
    EXPECT_EQ(base.depth, 3);
    NeumannInverse more = neumann_inverse_with_depth(a, Rational(-4), 6);
    EXPECT_EQ(more.depth, 6);
    EXPECT_EQ(more.inverse, base.inverse);
    EXPECT_THROW(neumann_inverse_with_depth(a, Rational(-4), 2), InputError);
}

TEST(PowerBound, HoldsForComputedPowers) {
    std::mt19937_64 rng(41);
    auto xi = f2_weights(-1, 1);
    std::vector<RingMatrix> mats = regular_pool(60, 3);
    for (int i = 0; i < 30; ++i) mats.push_back(random_regular_mixed(rng, xi, 2 + i % 2));
    for (const auto& a : mats) {
        RegularityCertificate c = xi_regularity(a);
        PowerBound bound(c, a.max_lognorm(), a.n());
        auto powers = exact_powers(a, 6);
        for (std::size_t p = 0; p < powers.size(); ++p) {
            EXPECT_LE(powers[p].max_lognorm(), bound(static_cast<long>(p + 1)));
        }
    }
}

TEST(RowReduction, EliminatedBlockStaysRegular) {
    std::mt19937_64 rng(77);
    auto xi = f2_weights(-1, 1);
    for (int trial = 0; trial < 40; ++trial) {
        RingMatrix a = random_regular_mixed(rng, xi, 3);
        RegularityCertificate c = xi_regularity(a);
        // A' = A11 + A12 (1 - a33)^-1 A21.
        Rational t(-8);
        NovikovSeries inv = a.at(2, 2).is_zero() ? series_one(xi).truncated(Level(t))
                                                 : invert_one_minus(a.at(2, 2), t);
        RingMatrix reduced(xi, 2, 2);
        WeightGrid grid(2, std::vector<Level>(2, Level::neg_inf()));
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                NovikovSeries e = a.at(i, j) + mul(mul(a.at(i, 2), inv), a.at(2, j));
                if (!e.is_zero()) grid[i][j] = e.lognorm_bound();
            }
        }
        EXPECT_LE(max_cycle_mean(grid).mean, c.K);
    }
}

TEST(Torsion, UnitsAndSigns) {
    auto xi = genus2::weighting();
    TorsionClass t = torsion_unit(genus2::scalar(xi, "a1"));
    EXPECT_EQ(t.summands().size(), 1u);
    EXPECT_EQ(torsion_negate(t).summands()[0].sign, -1);
    EXPECT_EQ(torsion_add(t, t).summands().size(), 2u);
    EXPECT_THROW(torsion_unit(genus2::scalar(xi, "b1")), NotRegularError);
    EXPECT_THROW(torsion_unit(genus2::scalar(xi, "a1"), 2), InputError);
}

TEST(DetAbelian, EmptyIsOne) {
    auto xi = genus2::weighting();
    EXPECT_EQ(det_abelian(TorsionClass(), xi, Rational(-3)), series_one(abelian_weighting(xi)).truncated(Level(-3)));
}

TEST(DetAbelian, CancellingClassIsOne) {
    for (const auto& a : regular_pool(30, 8)) {
        TorsionClass t = torsion_unit(a);
        EXPECT_EQ(det_abelian(torsion_add(t, torsion_negate(t)), a.weighting(), Rational(-5)),
                  series_one(abelian_weighting(a.weighting())).truncated(Level(-5)));
    }
}

TEST(DetAbelian, InverseOfScalarUnit) {
    auto xi = make_weighting(GroupSpec::free({"t"}), {Rational(-1)});
    TorsionClass tc = torsion_unit(RingMatrix::from_rows(xi, {{term(xi, 1, "t")}}), -1);
    AbelianSeries d = det_abelian(tc, xi, Rational(-7, 2));
    auto hxi = abelian_weighting(xi);
    AbelianSeries expected(hxi);
    for (long k = 0; k <= 3; ++k) {
        expected += NovikovSeries::monomial(hxi, 1, GroupElement::from_exponents(hxi->spec(), {k}));
    }
    EXPECT_EQ(d, expected.truncated(Level(Rational(-7, 2))));
}

TEST(DetAbelian, Genus2Class) {
    auto xi = genus2::weighting();
    auto hxi = abelian_weighting(xi);
    Rational t(-4);
    TorsionClass tau =
        torsion_add(torsion_unit(genus2::scalar(xi, "a1")), torsion_negate(torsion_unit(genus2::scalar(xi, "a2 a1"))));
    AbelianSeries one = series_one(hxi);
    AbelianSeries x = abelianize(term(xi, 1, "a1"));
    AbelianSeries y = abelianize(term(xi, 1, "a2 a1"));
    AbelianSeries expected = mul(one - x, invert_one_minus(y, t)).truncated(Level(t));
    EXPECT_EQ(det_abelian(tau, xi, t), expected);
    AbelianSeries swapped = mul(invert_one_minus(x, t), one - y).truncated(Level(t));
    EXPECT_EQ(det_abelian(torsion_negate(tau), xi, t), swapped);
}

TEST(DetAbelian, Multiplicative) {
    auto pool = regular_pool(40, 13);
    Rational t(-5);
    for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
        if (!same_weighting(pool[i].weighting(), pool[i + 1].weighting())) continue;
        auto xi = pool[i].weighting();
        TorsionClass t1 = torsion_unit(pool[i], 1);
        TorsionClass t2 = torsion_unit(pool[i + 1], i % 4 == 0 ? -1 : 1);
        AbelianSeries prod = canonical_mod_units(mul(det_abelian(t1, xi, t), det_abelian(t2, xi, t)));
        EXPECT_EQ(det_abelian(torsion_add(t1, t2), xi, t), prod.truncated(Level(t)));
    }
}

TEST(DetAbelian, CommutativeDeterminant) {
    auto z2 = GroupSpec::free_abelian({"s", "t"});
    auto xi = make_weighting(z2, {Rational(-1), Rational(-1)});
    RingMatrix m = m2(xi, term(xi, 1, "s"), term(xi, 2, "t"), term(xi, 1, ""), term(xi, 1, "s t"));
    // s * st - 2t * 1
    EXPECT_EQ(commutative_det(m), term(xi, 1, "s^2 t") - term(xi, 2, "t"));
    EXPECT_THROW(commutative_det(RingMatrix::identity(f2_weights(-1, -1), 2)), InputError);
}

TEST(DetAbelian, CanonicalRepresentative) {
    auto z2 = GroupSpec::free_abelian({"s", "t"});
    auto xi = make_weighting(z2, {Rational(-1), Rational(-1)});
    AbelianSeries s = term(xi, -3, "s") + term(xi, 1, "s^2");
    AbelianSeries c = canonical_mod_units(s);
    EXPECT_EQ(c, term(xi, 3, "") - term(xi, 1, "s"));
    // Tie at the maximal weight: the lexicographically least exponent vector leads.
    AbelianSeries tie = term(xi, 2, "s") + term(xi, -1, "t");
    EXPECT_EQ(canonical_mod_units(tie), term(xi, 1, "") - term(xi, 2, "s t^-1"));
}
