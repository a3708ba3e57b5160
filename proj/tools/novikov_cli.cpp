// Command-line front end: reads JSON documents, runs one library operation,
// prints canonical JSON or text. Exit codes: 0 ok, 1 input/IO, 2 math.

#include "novikov/genus2.hpp"
#include "novikov/io.hpp"
#include "novikov/novikov.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace novikov;
using io::json;

struct Job {
    std::string command;
    std::string input;
    std::optional<std::string> cutoff_text;
    std::optional<long> depth;
    std::string format = "json";
    std::string what = "all";
};

struct Output {
    json doc = json::object();
    std::string text;
};

const char* kFreeClassWarning =
    "conjugacy classes are computed in the free group; whether distinct classes merge in the surface group is not "
    "decided";

Rational require_cutoff(const Job& job) {
    if (!job.cutoff_text) throw InputError("--cutoff is required for " + job.command);
    Rational t = parse_rational(*job.cutoff_text);
    if (!(t < 0)) throw InputError("--cutoff must be negative");
    return t;
}

void attach_warnings(Output& out, const std::vector<std::string>& warnings) {
    if (warnings.empty()) return;
    out.doc["warnings"] = warnings;
    for (const auto& w : warnings) out.text += "warning: " + w + "\n";
}

struct Loaded {
    io::Context ctx;
    json doc;
};

Loaded load(const Job& job) {
    Loaded l;
    l.doc = io::read_json_file(job.input);
    l.ctx = io::parse_context(l.doc);
    return l;
}

Output run_check_regular(const Job& job) {
    Loaded l = load(job);
    RingMatrix a = io::parse_matrix(io::detail::field(l.doc, "matrix"), l.ctx.xi);
    RegularityCertificate cert = xi_regularity(a);
    if (!cert.regular) throw NotRegularError("matrix is not xi-regular: cycle " + format_cycle(cert.witness) +
                                                 " has mean " + cert.K.str(), cert);
    Output out;
    out.doc["certificate"] = io::to_json(cert);
    out.text = io::certificate_text(cert);
    attach_warnings(out, l.ctx.warnings);
    return out;
}

Output run_invert(const Job& job) {
    Rational t = require_cutoff(job);
    Loaded l = load(job);
    RingMatrix a = io::parse_matrix(io::detail::field(l.doc, "matrix"), l.ctx.xi);
    NeumannInverse inv = neumann_inverse_with_depth(a, t, job.depth);
    Output out;
    out.doc["certificate"] = io::to_json(inv.certificate);
    out.doc["depth"] = inv.depth;
    out.doc["inverse"] = io::to_json(inv.inverse);
    out.text = "(I - A)^-1 (cutoff: " + Level(t).str() + ", depth: " + std::to_string(inv.depth) + ")\n" +
               io::matrix_text(inv.inverse);
    attach_warnings(out, l.ctx.warnings);
    return out;
}

/// Shared body of the descent-based commands and the built-in example.
Output report_descent(const Job& job, const DescentData& d, std::vector<std::string> warnings,
                      const std::string& what) {
    Output out;
    bool all = what == "all";
    if (what != "all" && what != "eta" && what != "zeta" && what != "torsion") {
        throw InputError("--what must be eta, zeta, torsion or all");
    }
    if (what == "torsion" || all) {
        TorsionClass tc = torsion_from_descent(d);
        out.doc["torsion"] = io::to_json(tc);
        out.text += "torsion:\n" + io::torsion_text(tc);
        if (job.cutoff_text) {
            Rational t = require_cutoff(job);
            AbelianSeries det = det_abelian(tc, d.xi, t);
            out.doc["det"] = io::to_json(det);
            out.text += "det (mod +-H):\n" + io::series_text(det);
        }
    }
    if (what == "eta" || what == "zeta" || all) {
        Rational t = require_cutoff(job);
        EtaFunction eta = eta_from_descent(d, t, job.depth);
        out.doc["depth"] = eta.depth;
        if (what != "zeta") {
            out.doc["eta"] = io::to_json(eta.series);
            out.text += "eta:\n" + io::series_text(eta.series, eta.depth);
        }
        if (what != "eta") {
            ZetaFunction z = zeta_from_eta(eta, t);
            out.doc["zeta"] = io::to_json(z.series);
            out.text += "zeta:\n" + io::series_text(z.series, z.depth);
        }
    }
    attach_warnings(out, warnings);
    return out;
}

Output run_descent_command(const Job& job) {
    Loaded l = load(job);
    DescentData d = io::parse_descent(l.doc, l.ctx.xi);
    std::vector<std::string> warnings = l.ctx.warnings;
    bool relator = l.doc.at("group").contains("surface_relator");
    if (relator && job.command != "torsion") warnings.push_back(kFreeClassWarning);
    return report_descent(job, d, warnings, job.command);
}

Output run_hochschild_check(const Job& job) {
    Rational t = require_cutoff(job);
    Loaded l = load(job);
    Output out;
    bool ok = true;
    if (l.doc.contains("matrix")) {
        RingMatrix a = io::parse_matrix(l.doc.at("matrix"), l.ctx.xi);
        ConjClassSeries direct = L_direct(a, t);
        ConjClassSeries via = L_via_DT(a, t);
        bool agree = direct == via;
        ok = ok && agree;
        out.doc["L_direct"] = io::to_json(direct);
        out.doc["L_via_DT"] = io::to_json(via);
        out.doc["routes_agree"] = agree;
        out.text += "L (trace formula):\n" + io::series_text(direct) + "L (Dennis trace):\n" + io::series_text(via) +
                    "routes agree: " + (agree ? "yes" : "no") + "\n";
        json cyc = json::array();
        RingMatrix power = a;
        for (long m = 1; m <= 5; ++m) {
            bool holds = cyclic_identity(a, power, m).holds();
            ok = ok && holds;
            cyc.push_back({{"m", m}, {"holds", holds}});
            out.text += "cyclic identity m=" + std::to_string(m) + ": " + (holds ? "holds" : "FAILS") + "\n";
            power = mat_mul(power, a);
        }
        out.doc["cyclic_identity"] = cyc;
    }
    if (l.doc.contains("chain")) {
        HHChain1 c(l.ctx.xi);
        for (const auto& ten : l.doc.at("chain")) {
            c.add(io::parse_series(io::detail::field(ten, "left"), l.ctx.xi),
                  io::parse_series(io::detail::field(ten, "right"), l.ctx.xi));
        }
        ConjClassSeries m = mu(c, t);
        out.doc["mu"] = io::to_json(m);
        out.text += "mu:\n" + io::series_text(m);
    }
    if (!l.doc.contains("matrix") && !l.doc.contains("chain")) throw InputError("expected 'matrix' or 'chain'");
    attach_warnings(out, l.ctx.warnings);
    if (!ok) throw MathError("Hochschild identities failed:\n" + out.text);
    return out;
}

Output report_cone(const Job& job, const ConeData& cd) {
    Output out;
    FreeChainComplex cone = mapping_cone(cd);
    ComplexReport rep = verify_complex(cone);
    out.doc["cone"] = io::to_json(cone);
    out.doc["cone_check"] = io::to_json(rep);
    auto ranks_text = [](const std::vector<std::size_t>& r) {
        std::string s = "(";
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? ", " : "") + std::to_string(r[i]);
        return s + ")";
    };
    out.text += "cone ranks: " + ranks_text(cone.ranks()) + "\ncone d^2 = 0: " + (rep.ok ? "yes" : "no") + "\n";
    if (!rep.ok) throw MathError("mapping cone is not a complex");
    if (job.cutoff_text) {
        Rational t = require_cutoff(job);
        Cokernel ck = novikov_coker(cd, t);
        ConjClassSeries l_tau = L_of_torsion(ck.torsion, cd.E.weighting(), t);
        EtaFunction eta = eta_from_descent(ck.descent, t);
        bool agree = l_tau == eta.series;
        out.doc["cokernel"] = io::to_json(ck.complex);
        out.doc["torsion"] = io::to_json(ck.torsion);
        out.doc["L_of_torsion"] = io::to_json(l_tau);
        out.doc["eta"] = io::to_json(eta.series);
        out.doc["torsion_matches_eta"] = agree;
        out.text += "cokernel ranks: " + ranks_text(ck.complex.ranks()) + "\ntorsion:\n" + io::torsion_text(ck.torsion) +
                    "L(torsion):\n" + io::series_text(l_tau) + "eta of the D-blocks:\n" +
                    io::series_text(eta.series, eta.depth) + "L(torsion) = eta: " + (agree ? "yes" : "no") + "\n";
        if (!agree) throw MathError("torsion image disagrees with eta");
    }
    return out;
}

Output run_cone(const Job& job) {
    Loaded l = load(job);
    ConeData cd = io::parse_cone(l.doc, l.ctx.xi);
    Output out = report_cone(job, cd);
    attach_warnings(out, l.ctx.warnings);
    return out;
}

Output run_example(const Job& job) {
    bool swapped;
    if (job.input == "genus2") {
        swapped = false;
    } else if (job.input == "genus2-swapped") {
        swapped = true;
    } else {
        throw InputError("unknown example '" + job.input + "' (expected genus2 or genus2-swapped)");
    }
    std::vector<std::string> warnings = {kFreeClassWarning};
    Output out = report_descent(job, genus2::descent(swapped), warnings, job.what);
    out.doc["example"] = job.input;
    if (job.what == "all") {
        Output cone = report_cone(job, genus2::cone(swapped));
        out.doc["cone"] = cone.doc;
        out.text += cone.text;
        if (job.cutoff_text) {
            Rational t = require_cutoff(job);
            bool match = det_abelian(torsion_from_descent(genus2::descent(swapped)), genus2::weighting(), t) ==
                         zeta_from_eta(eta_from_descent(genus2::descent(swapped), t, job.depth), t).series;
            out.doc["det_matches_zeta"] = match;
            out.text += std::string("det = zeta: ") + (match ? "yes" : "no") + "\n";
        }
    }
    return out;
}

Output dispatch(const Job& job) {
    if (job.command == "check-regular") return run_check_regular(job);
    if (job.command == "invert") return run_invert(job);
    if (job.command == "torsion" || job.command == "eta" || job.command == "zeta") return run_descent_command(job);
    if (job.command == "hochschild-check") return run_hochschild_check(job);
    if (job.command == "cone") return run_cone(job);
    if (job.command == "example") return run_example(job);
    throw InputError("unknown command '" + job.command + "'");
}

int fail(const Job& job, int code, const std::string& kind, const std::string& message, json extra = json::object()) {
    std::cerr << "error: " << message << "\n";
    if (job.format == "json") {
        extra["kind"] = kind;
        extra["message"] = message;
        std::cout << io::dump({{"error", extra}});
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Novikov-ring computations: regularity, inverses, torsion, eta and zeta functions"};
    app.fallthrough();
    app.require_subcommand(1);
    Job job;
    std::string cutoff;
    long depth = 0;
    auto* cutoff_opt = app.add_option("--cutoff", cutoff, "truncation level p/q; output is exact strictly above it");
    auto* depth_opt = app.add_option("--depth", depth, "power depth override; must be at least the certified depth");
    app.add_option("--format", job.format, "output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--what", job.what, "what the example reports")->check(CLI::IsMember({"eta", "zeta", "torsion", "all"}));

    struct Sub {
        const char* name;
        const char* help;
        const char* arg;
    };
    const Sub subs[] = {
        {"check-regular", "decide xi-regularity of a matrix", "input"},
        {"invert", "certified (I - A)^-1", "input"},
        {"torsion", "torsion class of descent data", "input"},
        {"eta", "eta function of descent data", "input"},
        {"zeta", "zeta function of descent data", "input"},
        {"hochschild-check", "compare the two routes to L and the cyclic identity", "input"},
        {"cone", "mapping cone and Novikov cokernel", "input"},
        {"example", "built-in example: genus2 or genus2-swapped", "name"},
    };
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option(s.arg, job.input, s.arg)->required();
        sub->callback([&job, name = s.name] { job.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (*cutoff_opt) job.cutoff_text = cutoff;
    if (*depth_opt) job.depth = depth;

    try {
        Output out = dispatch(job);
        std::cout << (job.format == "json" ? io::dump(out.doc) : out.text);
        return 0;
    } catch (const NotRegularError& e) {
        json extra = {{"K", e.certificate().K.str()}, {"witness_cycle", io::cycle_json(e.certificate().witness)}};
        if (e.index()) extra["matrix_index"] = *e.index();
        return fail(job, 2, "not_regular", e.what(), extra);
    } catch (const MathError& e) {
        return fail(job, 2, "math", e.what());
    } catch (const InputError& e) {
        return fail(job, 1, "input", e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(job, 1, "input", e.what());
    } catch (const std::exception& e) {
        return fail(job, 1, "io", e.what());
    }
}
