#pragma once

#include "novikov/orbits.hpp"
#include "novikov/regmat.hpp"

#include <string>
#include <vector>

namespace novikov {

/// A finite free based complex over ZG (or over truncated Novikov series).
///
/// Row-vector convention: boundary(i) is a rank(i) x rank(i-1) matrix whose
/// row j is the image of the j-th basis element of C_i, so the composite
/// C_i -> C_{i-1} -> C_{i-2} is the product boundary(i) * boundary(i-1).
class FreeChainComplex {
public:
    FreeChainComplex() = default;
    FreeChainComplex(WeightingHandle xi, std::vector<std::size_t> ranks, std::vector<RingMatrix> boundaries)
        : xi_(std::move(xi)), ranks_(std::move(ranks)), boundaries_(std::move(boundaries)) {
        if (ranks_.empty()) {
            if (!boundaries_.empty()) throw InputError("boundaries given for an empty complex");
            return;
        }
        if (boundaries_.size() + 1 != ranks_.size()) {
            throw InputError("a complex with " + std::to_string(ranks_.size()) + " dimensions needs " +
                             std::to_string(ranks_.size() - 1) + " boundary matrices");
        }
        for (std::size_t i = 1; i < ranks_.size(); ++i) {
            const RingMatrix& d = boundaries_[i - 1];
            if (d.rows() != ranks_[i] || d.cols() != ranks_[i - 1]) {
                throw InputError("boundary " + std::to_string(i) + " has shape " + std::to_string(d.rows()) + "x" +
                                 std::to_string(d.cols()) + ", expected " + std::to_string(ranks_[i]) + "x" +
                                 std::to_string(ranks_[i - 1]));
            }
            require_same_weighting(xi_, d.weighting());
        }
    }

    const WeightingHandle& weighting() const noexcept { return xi_; }
    const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }
    const std::vector<RingMatrix>& boundaries() const noexcept { return boundaries_; }

    std::size_t dims() const noexcept { return ranks_.size(); }
    std::size_t rank(std::size_t i) const noexcept { return i < ranks_.size() ? ranks_[i] : 0; }

    /// d_i : C_i -> C_{i-1}, a zero matrix of the right shape outside the stored range.
    RingMatrix boundary(std::size_t i) const {
        if (i >= 1 && i < ranks_.size()) return boundaries_[i - 1];
        return RingMatrix(xi_, rank(i), i == 0 ? 0 : rank(i - 1));
    }

    /// Copy padded with zero modules up to `dims` dimensions.
    FreeChainComplex padded(std::size_t dims) const {
        if (dims <= ranks_.size()) return *this;
        std::vector<std::size_t> r = ranks_;
        r.resize(dims, 0);
        std::vector<RingMatrix> b = boundaries_;
        for (std::size_t i = std::max<std::size_t>(ranks_.size(), 1); i < dims; ++i) {
            b.emplace_back(xi_, r[i], r[i - 1]);
        }
        return FreeChainComplex(xi_, std::move(r), std::move(b));
    }

private:
    WeightingHandle xi_;
    std::vector<std::size_t> ranks_;
    std::vector<RingMatrix> boundaries_;
};

struct ComplexOffense {
    std::size_t dim = 0;  // d_dim * d_{dim-1} is nonzero
    std::size_t row = 0;
    std::size_t col = 0;
    NovikovSeries entry;
};

struct ComplexReport {
    bool ok = true;
    /// Level above which the composites are known; -inf for exact complexes.
    Level certified;
    std::vector<ComplexOffense> offenses;
};

/// Checks d_{i-1} o d_i = 0 (above the certified level for truncated complexes).
inline ComplexReport verify_complex(const FreeChainComplex& c) {
    ComplexReport report;
    for (std::size_t i = 2; i < c.dims(); ++i) {
        RingMatrix comp = mat_mul(c.boundary(i), c.boundary(i - 1));
        report.certified = max(report.certified, comp.cutoff());
        for (std::size_t r = 0; r < comp.rows(); ++r) {
            for (std::size_t col = 0; col < comp.cols(); ++col) {
                if (!comp.at(r, col).is_zero()) {
                    report.ok = false;
                    report.offenses.push_back({i, r, col, comp.at(r, col)});
                }
            }
        }
    }
    return report;
}

/// Chain maps D -> E given per dimension as rank_D(q) x rank_E(q) matrices.
using ChainMap = std::vector<RingMatrix>;

/// Input of the mapping-cone construction: a subcomplex D of E (included
/// as the first rank_D(q) basis elements in each dimension) and a second
/// chain map k : D -> E.
struct ConeData {
    FreeChainComplex D;
    FreeChainComplex E;
    ChainMap i_map;
    ChainMap k_map;

    std::size_t dims() const { return std::max(D.dims(), E.dims()); }

    static ChainMap standard_inclusion(const FreeChainComplex& d, const FreeChainComplex& e) {
        std::size_t dims = std::max(d.dims(), e.dims());
        ChainMap inc;
        for (std::size_t q = 0; q < dims; ++q) {
            RingMatrix m(e.weighting(), d.rank(q), e.rank(q));
            for (std::size_t j = 0; j < d.rank(q); ++j) m.at(j, j) = series_one(e.weighting());
            inc.push_back(std::move(m));
        }
        return inc;
    }

    /// Shapes, the split marker, and the chain-map identities d f = f d.
    void validate() const {
        std::size_t n = dims();
        require_same_weighting(D.weighting(), E.weighting());
        if (i_map.size() != n || k_map.size() != n) throw InputError("chain maps need one matrix per dimension");
        for (std::size_t q = 0; q < n; ++q) {
            if (D.rank(q) > E.rank(q)) throw InputError("D is larger than E in dimension " + std::to_string(q));
            for (const auto* f : {&i_map[q], &k_map[q]}) {
                if (f->rows() != D.rank(q) || f->cols() != E.rank(q)) {
                    throw InputError("chain map has wrong shape in dimension " + std::to_string(q));
                }
            }
        }
        ChainMap inc = standard_inclusion(D, E);
        for (std::size_t q = 0; q < n; ++q) {
            if (!(mat_sub(i_map[q], inc[q]).is_zero())) {
                throw InputError("i is not the standard split inclusion in dimension " + std::to_string(q));
            }
        }
        for (const ChainMap* f : {&i_map, &k_map}) {
            for (std::size_t q = 1; q < n; ++q) {
                // d^D_q f_{q-1} = f_q d^E_q
                RingMatrix lhs = mat_mul(D.boundary(q), (*f)[q - 1]);
                RingMatrix rhs = mat_mul((*f)[q], E.boundary(q));
                if (!mat_sub(lhs, rhs).is_zero()) {
                    throw MathError(std::string(f == &i_map ? "i" : "k") + " is not a chain map in dimension " +
                                    std::to_string(q));
                }
            }
        }
    }
};

/// The mapping cone of f = i - k : D -> E, with C_q = E_q (+) D_{q-1} and
/// d(e, x) = (d e + f x, -d x).
inline FreeChainComplex mapping_cone(const ConeData& cd) {
    cd.validate();
    const WeightingHandle& xi = cd.E.weighting();
    std::size_t n = cd.dims();
    auto rank_d = [&](long q) -> std::size_t { return q < 0 ? 0 : cd.D.rank(static_cast<std::size_t>(q)); };
    auto rank_e = [&](long q) -> std::size_t { return q < 0 ? 0 : cd.E.rank(static_cast<std::size_t>(q)); };
    std::vector<std::size_t> ranks;
    for (std::size_t q = 0; q <= n; ++q) ranks.push_back(rank_e(static_cast<long>(q)) + rank_d(static_cast<long>(q) - 1));
    std::vector<RingMatrix> bounds;
    for (std::size_t q = 1; q <= n; ++q) {
        RingMatrix b(xi, ranks[q], ranks[q - 1]);
        std::size_t eq = rank_e(static_cast<long>(q));
        std::size_t eq1 = rank_e(static_cast<long>(q) - 1);
        std::size_t dq1 = rank_d(static_cast<long>(q) - 1);
        std::size_t dq2 = rank_d(static_cast<long>(q) - 2);
        if (q < cd.E.dims()) {
            RingMatrix de = cd.E.boundary(q);
            for (std::size_t r = 0; r < eq; ++r) {
                for (std::size_t c = 0; c < eq1; ++c) b.at(r, c) = de.at(r, c);
            }
        }
        if (dq1 > 0) {
            RingMatrix f = mat_sub(cd.i_map[q - 1], cd.k_map[q - 1]);
            for (std::size_t r = 0; r < dq1; ++r) {
                for (std::size_t c = 0; c < eq1; ++c) b.at(eq + r, c) = f.at(r, c);
            }
            if (dq2 > 0) {
                RingMatrix dd = cd.D.boundary(q - 1);
                for (std::size_t r = 0; r < dq1; ++r) {
                    for (std::size_t c = 0; c < dq2; ++c) b.at(eq + r, eq1 + c) = -dd.at(r, c);
                }
            }
        }
        bounds.push_back(std::move(b));
    }
    // Drop a trailing zero module.
    while (ranks.size() > 1 && ranks.back() == 0) {
        ranks.pop_back();
        bounds.pop_back();
    }
    return FreeChainComplex(xi, std::move(ranks), std::move(bounds));
}

struct Cokernel {
    /// coker(id (x) (i - k)) over the Novikov ring, truncated at the cutoff.
    FreeChainComplex complex;
    /// sum_q (-1)^{q+1} tau(I - A_q).
    TorsionClass torsion;
    /// The D-blocks A_q = proj_D k_q, as descent data.
    DescentData descent;
};

/// Eliminates the D-summand in each dimension with the certified inverse
/// of I - A_q. The cokernel is free on the complementary basis X_q and its
/// boundary is (X-rows of d^E_q) * P_{q-1}, where P = [(I - A)^-1 B ; I]
/// projects E onto the quotient and B = the X-columns of k.
inline Cokernel novikov_coker(const ConeData& cd, const Rational& t) {
    cd.validate();
    const WeightingHandle& xi = cd.E.weighting();
    std::size_t n = cd.dims();
    Cokernel out;
    out.descent.xi = xi;
    std::vector<RingMatrix> a_blocks;
    std::vector<RingMatrix> b_blocks;
    for (std::size_t q = 0; q < n; ++q) {
        std::size_t dq = cd.D.rank(q);
        std::size_t xq = cd.E.rank(q) - dq;
        a_blocks.push_back(cd.k_map[q].block(0, 0, dq, dq));
        b_blocks.push_back(cd.k_map[q].block(0, dq, dq, xq));
        out.descent.matrices.push_back(a_blocks.back());
    }
    std::vector<TorsionSummand> summands;
    std::vector<RegularityCertificate> certs;
    for (std::size_t q = 0; q < n; ++q) {
        certs.push_back(require_regular(a_blocks[q], q));
        if (a_blocks[q].n() > 0) summands.push_back({(q % 2 == 0) ? -1 : 1, a_blocks[q], certs.back()});
    }
    out.torsion = TorsionClass(std::move(summands));

    auto positive_part = [](const Level& l) {
        return (l.is_finite() && l.value() > 0) ? l.value() : Rational(0);
    };
    // Projections P_q : E_q -> X_q.
    std::vector<RingMatrix> proj;
    for (std::size_t q = 0; q < n; ++q) {
        std::size_t dq = cd.D.rank(q);
        std::size_t xq = cd.E.rank(q) - dq;
        RingMatrix p(xi, dq + xq, xq);
        for (std::size_t j = 0; j < xq; ++j) p.at(dq + j, j) = series_one(xi);
        if (dq > 0 && xq > 0) {
            // Room for the growth of log-norms in the two products that follow.
            Rational slack = positive_part(b_blocks[q].max_lognorm());
            if (q + 1 < cd.E.dims()) slack += positive_part(cd.E.boundary(q + 1).max_lognorm());
            RingMatrix top = mat_mul(neumann_inverse(a_blocks[q], t - slack), b_blocks[q]);
            for (std::size_t r = 0; r < dq; ++r) {
                for (std::size_t c = 0; c < xq; ++c) p.at(r, c) = top.at(r, c);
            }
        }
        proj.push_back(std::move(p));
    }
    std::vector<std::size_t> ranks;
    for (std::size_t q = 0; q < n; ++q) ranks.push_back(cd.E.rank(q) - cd.D.rank(q));
    std::vector<RingMatrix> bounds;
    for (std::size_t q = 1; q < n; ++q) {
        std::size_t dq = cd.D.rank(q);
        RingMatrix rows = cd.E.boundary(q).block(dq, 0, ranks[q], cd.E.rank(q - 1));
        RingMatrix b = mat_mul(rows, proj[q - 1], Level(t));
        if (Level(t) < b.cutoff()) {
            throw MathError("cokernel boundary " + std::to_string(q) + " only certified above " + b.cutoff().str());
        }
        bounds.push_back(b.truncated(Level(t)));
    }
    out.complex = FreeChainComplex(xi, std::move(ranks), std::move(bounds));
    return out;
}

}  // namespace novikov
