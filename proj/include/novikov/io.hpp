#pragma once

#include "novikov/chains.hpp"
#include "novikov/orbits.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace novikov::io {

using json = nlohmann::json;

/// Group and weighting read from an input document, plus any warnings
/// produced while reading them.
struct Context {
    GroupHandle group;
    WeightingHandle xi;
    std::vector<std::string> warnings;
};

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline std::string as_string(const json& j, const char* what) {
    if (!j.is_string()) throw InputError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

/// Exact rationals are strings "p/q"; plain JSON integers are accepted too.
inline Rational as_rational(const json& j, const char* what) {
    if (j.is_number_integer()) return parse_rational(j.dump());
    return parse_rational(as_string(j, what));
}

inline std::size_t as_size(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        throw InputError(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

}  // namespace detail

/// {"kind": "free" | "free_abelian", "generators": [...], "surface_relator": "..."}.
/// A relator is recorded but not applied.
inline GroupHandle parse_group(const json& j, std::vector<std::string>* warnings = nullptr) {
    std::string kind = detail::as_string(detail::field(j, "kind"), "group kind");
    GroupKind k;
    if (kind == "free") {
        k = GroupKind::free;
    } else if (kind == "free_abelian") {
        k = GroupKind::free_abelian;
    } else {
        throw InputError("unknown group kind '" + kind + "'");
    }
    const json& gens = detail::field(j, "generators");
    if (!gens.is_array()) throw InputError("generators must be an array");
    std::vector<std::string> names;
    for (const auto& g : gens) names.push_back(detail::as_string(g, "generator name"));
    if (j.contains("surface_relator") && warnings) {
        warnings->push_back("surface relator '" + detail::as_string(j.at("surface_relator"), "relator") +
                            "' is not applied; computing in the free group");
    }
    return GroupSpec::make(k, std::move(names));
}

/// Weights as an object name -> "p/q" (missing generators weigh 0) or as an array.
inline WeightingHandle parse_weighting(const json& j, const GroupHandle& g) {
    std::vector<Rational> w(g->rank(), Rational(0));
    if (j.is_array()) {
        if (j.size() != g->rank()) throw InputError("weights array has wrong length");
        for (std::size_t i = 0; i < j.size(); ++i) w[i] = detail::as_rational(j[i], "weight");
    } else if (j.is_object()) {
        for (const auto& [name, v] : j.items()) {
            auto idx = g->index_of(name);
            if (!idx) throw InputError("weight for unknown generator '" + name + "'");
            w[*idx] = detail::as_rational(v, "weight");
        }
    } else {
        throw InputError("weights must be an object or an array");
    }
    return make_weighting(g, std::move(w));
}

inline Context parse_context(const json& doc) {
    Context ctx;
    ctx.group = parse_group(detail::field(doc, "group"), &ctx.warnings);
    ctx.xi = doc.contains("weights") ? parse_weighting(doc.at("weights"), ctx.group)
                                     : make_weighting(ctx.group, std::vector<Rational>(ctx.group->rank(), 0));
    return ctx;
}

inline GroupElement parse_element(const json& term, const GroupHandle& g) {
    std::optional<GroupElement> from_word;
    if (term.contains("word")) from_word = parse_word(g, detail::as_string(term.at("word"), "word"));
    if (term.contains("exponents")) {
        const json& e = term.at("exponents");
        if (!e.is_array()) throw InputError("exponents must be an array");
        std::vector<std::int64_t> v;
        for (const auto& x : e) {
            if (!x.is_number_integer()) throw InputError("exponents must be integers");
            v.push_back(x.get<std::int64_t>());
        }
        GroupElement h = GroupElement::from_exponents(g, std::move(v));
        if (from_word && !(*from_word == h)) throw InputError("word and exponents disagree");
        return h;
    }
    if (!from_word) throw InputError("term needs a 'word' or 'exponents'");
    return *from_word;
}

/// A series is an array of {"coeff", "word"} terms, or {"terms": [...], "cutoff": ...}.
inline NovikovSeries parse_series(const json& j, const WeightingHandle& xi, bool integral = false) {
    const json* terms = &j;
    Level cutoff = Level::neg_inf();
    if (j.is_object()) {
        terms = &detail::field(j, "terms");
        if (j.contains("cutoff")) cutoff = parse_level(detail::as_string(j.at("cutoff"), "cutoff"));
    }
    if (!terms->is_array()) throw InputError("series terms must be an array");
    std::vector<std::pair<GroupElement, Rational>> parsed;
    for (const auto& t : *terms) {
        Rational q = detail::as_rational(detail::field(t, "coeff"), "coeff");
        if (integral && q.get_den() != 1) throw InputError("coefficient " + format_rational(q) + " is not an integer");
        parsed.emplace_back(parse_element(t, xi->spec()), q);
    }
    return NovikovSeries::from_terms(xi, parsed, cutoff);
}

inline ConjClassSeries parse_class_series(const json& j, const WeightingHandle& xi) {
    Level cutoff = Level::neg_inf();
    if (j.contains("cutoff")) cutoff = parse_level(detail::as_string(j.at("cutoff"), "cutoff"));
    const json& cls = detail::field(j, "classes");
    if (!cls.is_array()) throw InputError("classes must be an array");
    std::vector<std::pair<ConjClass, Rational>> parsed;
    for (const auto& t : cls) {
        GroupElement g = parse_word(xi->spec(), detail::as_string(detail::field(t, "class"), "class"));
        ConjClass c = conjugacy_canonical(g);
        if (!(c.canonical_word() == g)) throw InputError("class word '" + g.str() + "' is not in canonical form");
        parsed.emplace_back(c, detail::as_rational(detail::field(t, "coeff"), "coeff"));
    }
    return ConjClassSeries::from_terms(xi, parsed, cutoff);
}

/// {"n": k, "entries": [[series, ...], ...]} or {"rows": r, "cols": c, "entries": ...}.
inline RingMatrix parse_matrix(const json& j, const WeightingHandle& xi, bool integral = false) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (j.contains("n")) {
        rows = cols = detail::as_size(j.at("n"), "n");
    } else {
        rows = detail::as_size(detail::field(j, "rows"), "rows");
        cols = detail::as_size(detail::field(j, "cols"), "cols");
    }
    const json& e = detail::field(j, "entries");
    if (!e.is_array() || e.size() != rows) throw InputError("matrix entries must have " + std::to_string(rows) + " rows");
    RingMatrix m(xi, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!e[r].is_array() || e[r].size() != cols) {
            throw InputError("matrix row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
        }
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = parse_series(e[r][c], xi, integral);
    }
    return m;
}

/// {"matrices": [{"dim": 0, "matrix": ...}, ...]}, dims 0..n-1 each once.
inline DescentData parse_descent(const json& doc, const WeightingHandle& xi) {
    const json& ms = detail::field(doc, "matrices");
    if (!ms.is_array()) throw InputError("matrices must be an array");
    std::vector<std::optional<RingMatrix>> slots(ms.size());
    for (const auto& entry : ms) {
        std::size_t dim = detail::as_size(detail::field(entry, "dim"), "dim");
        if (dim >= slots.size()) throw InputError("dimension " + std::to_string(dim) + " out of range");
        if (slots[dim]) throw InputError("dimension " + std::to_string(dim) + " given twice");
        slots[dim] = parse_matrix(detail::field(entry, "matrix"), xi, true);
    }
    DescentData d{xi, {}};
    for (auto& s : slots) d.matrices.push_back(std::move(*s));
    return d;
}

/// {"ranks": [...], "boundaries": [matrix for d_1, d_2, ...]}.
inline FreeChainComplex parse_complex(const json& j, const WeightingHandle& xi) {
    const json& r = detail::field(j, "ranks");
    if (!r.is_array()) throw InputError("ranks must be an array");
    std::vector<std::size_t> ranks;
    for (const auto& x : r) ranks.push_back(detail::as_size(x, "rank"));
    std::vector<RingMatrix> bounds;
    if (j.contains("boundaries")) {
        for (const auto& b : j.at("boundaries")) bounds.push_back(parse_matrix(b, xi, true));
    }
    return FreeChainComplex(xi, std::move(ranks), std::move(bounds));
}

/// {"D": complex, "E": complex, "k": [matrix per dim], "i": optional}.
/// Without "i" the standard inclusion is used.
inline ConeData parse_cone(const json& doc, const WeightingHandle& xi) {
    ConeData cd;
    cd.D = parse_complex(detail::field(doc, "D"), xi);
    cd.E = parse_complex(detail::field(doc, "E"), xi);
    for (const auto& m : detail::field(doc, "k")) cd.k_map.push_back(parse_matrix(m, xi, true));
    if (doc.contains("i")) {
        for (const auto& m : doc.at("i")) cd.i_map.push_back(parse_matrix(m, xi, true));
    } else {
        cd.i_map = ConeData::standard_inclusion(cd.D, cd.E);
    }
    return cd;
}

// ---- output ----

inline std::string element_text(const GroupElement& g) { return g.is_identity() ? "1" : g.str(); }

template <class Key>
json series_terms_json(const SparseSeries<Key>& s, const char* key_name) {
    json terms = json::array();
    for (const auto& t : s.sorted_terms()) {
        const GroupElement& g = key_element(t.key);
        json term = {{"coeff", format_rational(t.coeff)}, {key_name, g.str()}};
        if (g.spec()->is_abelian()) term["exponents"] = g.exponents();
        terms.push_back(std::move(term));
    }
    return terms;
}

/// Exact series are written as bare term arrays, truncated ones with their cutoff.
inline json to_json(const NovikovSeries& s) {
    if (s.exact()) return series_terms_json(s, "word");
    return {{"cutoff", s.cutoff().str()}, {"terms", series_terms_json(s, "word")}};
}

inline json to_json(const ConjClassSeries& s) {
    return {{"cutoff", s.cutoff().str()}, {"classes", series_terms_json(s, "class")}};
}

inline json to_json(const RingMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    if (m.is_square()) return {{"n", m.rows()}, {"entries", std::move(rows)}};
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

/// Witness cycles are written 1-based.
inline json cycle_json(const std::vector<std::size_t>& cycle) {
    json c = json::array();
    for (auto v : cycle) c.push_back(v + 1);
    return c;
}

inline json to_json(const RegularityCertificate& cert) {
    json j = {{"regular", cert.regular}, {"K", cert.K.str()}};
    if (!cert.witness.empty()) j["witness_cycle"] = cycle_json(cert.witness);
    return j;
}

inline json to_json(const TorsionClass& tc) {
    json s = json::array();
    for (const auto& t : tc.summands()) s.push_back({{"sign", t.sign}, {"A", to_json(t.a)}, {"K", t.certificate.K.str()}});
    return {{"summands", std::move(s)}};
}

inline json to_json(const FreeChainComplex& c) {
    json b = json::array();
    for (const auto& m : c.boundaries()) b.push_back(to_json(m));
    return {{"ranks", c.ranks()}, {"boundaries", std::move(b)}};
}

inline json to_json(const ComplexReport& r) {
    json off = json::array();
    for (const auto& o : r.offenses) {
        off.push_back({{"dim", o.dim}, {"row", o.row + 1}, {"col", o.col + 1}, {"entry", to_json(o.entry)}});
    }
    return {{"ok", r.ok}, {"certified_above", r.certified.str()}, {"offenses", std::move(off)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// One `coeff · word` line per term, then the guarantee stamp.
template <class Key>
std::string series_text(const SparseSeries<Key>& s, std::optional<long> depth = {}) {
    std::string stamp = "(cutoff: " + s.cutoff().str();
    if (depth) stamp += ", depth: " + std::to_string(*depth);
    stamp += ")";
    if (s.is_zero()) return "0 " + stamp + "\n";
    std::string out;
    for (const auto& t : s.sorted_terms()) {
        out += format_rational(t.coeff) + " · " + element_text(key_element(t.key)) + "\n";
    }
    return out + stamp + "\n";
}

inline std::string matrix_text(const RingMatrix& m) {
    std::ostringstream os;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            os << "[" << r + 1 << "," << c + 1 << "]\n";
            std::istringstream lines(series_text(m.at(r, c)));
            for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
        }
    }
    return os.str();
}

inline std::string certificate_text(const RegularityCertificate& cert) {
    std::string s = std::string("regular: ") + (cert.regular ? "yes" : "no") + "\nK: " + cert.K.str() + "\n";
    if (!cert.witness.empty()) s += "witness cycle: " + format_cycle(cert.witness) + "\n";
    return s;
}

inline std::string torsion_text(const TorsionClass& tc) {
    if (tc.empty()) return "0 (trivial class)\n";
    std::string s;
    for (const auto& t : tc.summands()) {
        s += std::string(t.sign > 0 ? "+" : "-") + " tau(I - A), A of size " + std::to_string(t.a.n()) +
             ", K = " + t.certificate.K.str() + "\n";
        std::istringstream lines(matrix_text(t.a));
        for (std::string line; std::getline(lines, line);) s += "  " + line + "\n";
    }
    return s;
}

}  // namespace novikov::io
