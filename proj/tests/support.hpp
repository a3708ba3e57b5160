#pragma once

#include "novikov/novikov.hpp"

#include <random>
#include <vector>

namespace novikov::testing {

inline GroupHandle f2() { return GroupSpec::free({"a", "b"}); }

inline WeightingHandle f2_weights(long wa, long wb) { return make_weighting(f2(), {Rational(wa), Rational(wb)}); }

inline NovikovSeries term(const WeightingHandle& xi, const Rational& q, std::string_view word) {
    return series_monomial(xi, q, word);
}

/// Uniform random freely reduced word with between min_len and max_len letters
/// drawn before reduction.
inline GroupElement random_word(std::mt19937_64& rng, const GroupHandle& g, int min_len, int max_len) {
    std::uniform_int_distribution<int> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> gen(0, g->rank() - 1);
    std::bernoulli_distribution inv(0.5);
    std::vector<Syllable> raw;
    int l = len(rng);
    for (int i = 0; i < l; ++i) raw.push_back({static_cast<std::uint32_t>(gen(rng)), inv(rng) ? -1 : 1});
    return GroupElement::reduce(g, raw);
}

inline Rational random_coeff(std::mt19937_64& rng, int bound) {
    std::uniform_int_distribution<int> c(-bound, bound - 1);
    int v = c(rng);
    return Rational(v >= 0 ? v + 1 : v);
}

/// Sum of up to max_terms random words of weight at most max_weight.
inline NovikovSeries random_entry(std::mt19937_64& rng, const WeightingHandle& xi, int max_terms, int max_len,
                                  const Rational& max_weight, int coeff_bound = 3) {
    std::uniform_int_distribution<int> count(1, max_terms);
    NovikovSeries s(xi);
    int k = count(rng);
    for (int attempts = 0; static_cast<int>(s.size()) < k && attempts < 200; ++attempts) {
        GroupElement g = random_word(rng, xi->spec(), 1, max_len);
        if ((*xi)(g) > max_weight) continue;
        s += NovikovSeries::monomial(xi, random_coeff(rng, coeff_bound), g);
    }
    return s;
}

/// Random n x n matrix with entries of negative weight (hence xi-regular).
inline RingMatrix random_small_matrix(std::mt19937_64& rng, const WeightingHandle& xi, std::size_t n,
                                      double density = 0.6, int max_terms = 3, int max_len = 3) {
    std::bernoulli_distribution dense(density);
    RingMatrix a(xi, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dense(rng)) a.at(i, j) = random_entry(rng, xi, max_terms, max_len, Rational(-1));
        }
    }
    return a;
}

/// The fixed pool of random regular matrices over F2 used by the identity checks:
/// n <= 3, entries combine at most 3 words of length <= 3, all entry weights < 0.
inline std::vector<RingMatrix> regular_pool(std::size_t count, std::uint64_t seed = 20261014) {
    std::mt19937_64 rng(seed);
    std::vector<WeightingHandle> weightings = {f2_weights(-1, -1), f2_weights(-1, 0)};
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    std::vector<RingMatrix> pool;
    for (std::size_t i = 0; i < count; ++i) {
        pool.push_back(random_small_matrix(rng, weightings[i % 2], dim(rng)));
    }
    return pool;
}

/// Random element of the weight-0 subring Z[b, b^-1] (nonzero).
inline NovikovSeries random_b_poly(std::mt19937_64& rng, const WeightingHandle& xi, int terms = 2) {
    std::uniform_int_distribution<int> exp(-2, 2);
    std::uniform_int_distribution<int> count(1, terms);
    GroupHandle g = xi->spec();
    for (;;) {
        NovikovSeries s(xi);
        int k = count(rng);
        for (int i = 0; i < k; ++i) {
            int e = exp(rng);
            GroupElement x = e == 0 ? GroupElement::identity(g) : GroupElement::generator(g, 1, e);
            s += NovikovSeries::monomial(xi, random_coeff(rng, 2), x);
        }
        if (!s.is_zero()) return s;
    }
}

/// Random matrix with entries a * (b-polynomial), all of weight xi(a) < 0.
inline RingMatrix random_a_matrix(std::mt19937_64& rng, const WeightingHandle& xi, std::size_t rows,
                                  std::size_t cols, double density = 0.5) {
    std::bernoulli_distribution dense(density);
    RingMatrix m(xi, rows, cols);
    NovikovSeries a = NovikovSeries::monomial(xi, 1, GroupElement::generator(xi->spec(), 0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (dense(rng)) m.at(i, j) = random_b_poly(rng, xi) * a * random_b_poly(rng, xi, 1);
        }
    }
    return m;
}

/// A product of elementary matrices over Z[b, b^-1] and its inverse.
inline std::pair<RingMatrix, RingMatrix> random_basis_change(std::mt19937_64& rng, const WeightingHandle& xi,
                                                             std::size_t r) {
    RingMatrix s = mat_identity(xi, r);
    RingMatrix sinv = mat_identity(xi, r);
    if (r < 2) return {s, sinv};
    std::uniform_int_distribution<std::size_t> idx(0, r - 1);
    for (int step = 0; step < 3; ++step) {
        std::size_t i = idx(rng);
        std::size_t j = idx(rng);
        if (i == j) continue;
        NovikovSeries x = random_b_poly(rng, xi, 1);
        RingMatrix e = mat_identity(xi, r);
        RingMatrix einv = mat_identity(xi, r);
        e.at(i, j) = x;
        einv.at(i, j) = -x;
        s = mat_mul(s, e);
        sinv = mat_mul(einv, sinv);
    }
    return {s, sinv};
}

/// Random exact complex over Z[b, b^-1] with the given ranks: a direct sum of
/// pieces e -> u f followed by elementary changes of basis.
inline FreeChainComplex random_complex(std::mt19937_64& rng, const WeightingHandle& xi,
                                       const std::vector<std::size_t>& ranks) {
    std::bernoulli_distribution use(0.7);
    std::vector<RingMatrix> base;
    std::vector<std::vector<bool>> source(ranks.size());
    for (std::size_t q = 0; q < ranks.size(); ++q) source[q].assign(ranks[q], false);
    for (std::size_t q = 1; q < ranks.size(); ++q) {
        RingMatrix d(xi, ranks[q], ranks[q - 1]);
        std::vector<bool> target(ranks[q - 1], false);
        for (std::size_t e = 0; e < ranks[q]; ++e) {
            if (!use(rng)) continue;
            for (std::size_t f = 0; f < ranks[q - 1]; ++f) {
                if (source[q - 1][f] || target[f]) continue;
                d.at(e, f) = random_b_poly(rng, xi);
                target[f] = true;
                source[q][e] = true;
                break;
            }
        }
        base.push_back(std::move(d));
    }
    std::vector<std::pair<RingMatrix, RingMatrix>> change;
    for (std::size_t r : ranks) change.push_back(random_basis_change(rng, xi, r));
    std::vector<RingMatrix> bounds;
    for (std::size_t q = 1; q < ranks.size(); ++q) {
        bounds.push_back(mat_mul(mat_mul(change[q].first, base[q - 1]), change[q - 1].second));
    }
    return FreeChainComplex(xi, ranks, std::move(bounds));
}

/// Random cone data over F2 with xi(a) = -1, xi(b) = 0. E extends D by a
/// random complex X along a twisting G; k is null-homotopic through a
/// homotopy with entries of weight -1, so every D-block of k is xi-regular.
inline ConeData random_cone(std::mt19937_64& rng, const WeightingHandle& xi) {
    std::uniform_int_distribution<std::size_t> dims(2, 3);
    std::uniform_int_distribution<std::size_t> rank(0, 2);
    std::size_t n = dims(rng);
    std::vector<std::size_t> rd, rx, re;
    for (std::size_t q = 0; q < n; ++q) {
        rd.push_back(rank(rng));
        rx.push_back(rank(rng));
        re.push_back(rd.back() + rx.back());
    }
    FreeChainComplex d = random_complex(rng, xi, rd);
    FreeChainComplex x = random_complex(rng, xi, rx);
    std::vector<RingMatrix> g;
    for (std::size_t q = 0; q < n; ++q) {
        RingMatrix m(xi, rx[q], rd[q]);
        for (std::size_t i = 0; i < rx[q]; ++i) {
            for (std::size_t j = 0; j < rd[q]; ++j) {
                if (std::bernoulli_distribution(0.5)(rng)) m.at(i, j) = random_b_poly(rng, xi, 1);
            }
        }
        g.push_back(std::move(m));
    }
    std::vector<RingMatrix> eb;
    for (std::size_t q = 1; q < n; ++q) {
        RingMatrix p = mat_sub(mat_mul(g[q], d.boundary(q)), mat_mul(x.boundary(q), g[q - 1]));
        RingMatrix b(xi, re[q], re[q - 1]);
        for (std::size_t i = 0; i < rd[q]; ++i) {
            for (std::size_t j = 0; j < rd[q - 1]; ++j) b.at(i, j) = d.boundary(q).at(i, j);
        }
        for (std::size_t i = 0; i < rx[q]; ++i) {
            for (std::size_t j = 0; j < rd[q - 1]; ++j) b.at(rd[q] + i, j) = p.at(i, j);
            for (std::size_t j = 0; j < rx[q - 1]; ++j) b.at(rd[q] + i, rd[q - 1] + j) = x.boundary(q).at(i, j);
        }
        eb.push_back(std::move(b));
    }
    ConeData cd;
    cd.D = d;
    cd.E = FreeChainComplex(xi, re, std::move(eb));
    cd.i_map = ConeData::standard_inclusion(cd.D, cd.E);
    // k_q = d^D_q H_{q-1} + H_q d^E_{q+1}
    std::vector<RingMatrix> h;
    for (std::size_t q = 0; q < n; ++q) h.push_back(random_a_matrix(rng, xi, rd[q], q + 1 < n ? re[q + 1] : 0));
    for (std::size_t q = 0; q < n; ++q) {
        RingMatrix k(xi, rd[q], re[q]);
        if (q >= 1) k = mat_add(k, mat_mul(cd.D.boundary(q), h[q - 1]));
        if (q + 1 < n) k = mat_add(k, mat_mul(h[q], cd.E.boundary(q + 1)));
        cd.k_map.push_back(std::move(k));
    }
    return cd;
}

/// Maximum mean over all simple cycles, by exhaustive enumeration.
inline Level brute_max_cycle_mean(const WeightGrid& w) {
    const std::size_t n = w.size();
    Level best = Level::neg_inf();
    std::vector<bool> used(n, false);
    // Cycles are enumerated from their smallest vertex.
    std::function<void(std::size_t, std::size_t, Rational, std::size_t)> walk = [&](std::size_t start, std::size_t u,
                                                                                     Rational sum, std::size_t len) {
        for (std::size_t v = start; v < n; ++v) {
            if (w[u][v].is_neg_inf()) continue;
            if (v == start) {
                best = max(best, Level((sum + w[u][v].value()) / Rational(static_cast<long>(len + 1))));
            } else if (!used[v]) {
                used[v] = true;
                walk(start, v, sum + w[u][v].value(), len + 1);
                used[v] = false;
            }
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
        used[s] = true;
        walk(s, s, Rational(0), 0);
        used[s] = false;
    }
    return best;
}

/// Mean of a cycle given as a vertex list.
inline Rational cycle_mean(const WeightGrid& w, const std::vector<std::size_t>& cycle) {
    Rational sum = 0;
    for (std::size_t i = 0; i < cycle.size(); ++i) sum += w[cycle[i]][cycle[(i + 1) % cycle.size()]].value();
    return sum / Rational(static_cast<long>(cycle.size()));
}

/// Exact powers A^1..A^m.
inline std::vector<RingMatrix> exact_powers(const RingMatrix& a, long m) {
    std::vector<RingMatrix> out{a};
    for (long p = 2; p <= m; ++p) out.push_back(mat_mul(out.back(), a));
    return out;
}

/// Truncation of an exact class series, for comparing with certified output.
template <class Key>
SparseSeries<Key> cut(const SparseSeries<Key>& s, const Rational& t) {
    return s.truncated(Level(t));
}

}  // namespace novikov::testing
