// Batch front end: every command prints one JSON document carrying the run
// configuration and the tool version next to its result.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "drcycle/calculus.hpp"
#include "drcycle/enumerate.hpp"
#include "drcycle/parallel.hpp"
#include "drcycle/pixton.hpp"
#include "drcycle/verify.hpp"
#include "drcycle/version.hpp"

using namespace drc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::invalid_argument {
    std::string param;
    UsageError(std::string p, const std::string& msg) : std::invalid_argument(msg), param(std::move(p)) {}
};

std::vector<int> parse_list(const std::string& s, const std::string& param) {
    std::vector<int> out;
    if (s.empty() || s == "-" || s == "[]") return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(param, "expected comma-separated integers, got '" + s + "'");
        }
    }
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("file", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("file", path + ": " + e.what());
    }
}

// Output documents wrap the class under "result"; plain class files work too.
QClass read_class(const std::string& path) {
    json j = read_json_file(path);
    if (j.is_object() && j.contains("result")) j = j.at("result");
    if (j.is_object() && j.contains("terms") && !j.at("terms").empty()) {
        const json& c = j.at("terms").front().at("coeff");
        if (c.is_object()) throw UsageError("file", path + ": class has polynomial coefficients; use --const");
    }
    return qclass_from_json(j);
}

struct Globals {
    std::string out;
    int threads = 0;
};

struct Emitter {
    Globals& gl;
    std::string command;
    json params = json::object();

    json config() const {
        return json{{"command", command},
                    {"params", params},
                    {"output", gl.out.empty() ? json(nullptr) : json(gl.out)},
                    {"threads", thread_count()}};
    }

    void write(const json& doc) const {
        const std::string text = doc.dump(2) + "\n";
        if (gl.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(gl.out);
            if (!f) throw UsageError("out", "cannot write " + gl.out);
            f << text;
        }
    }

    void result(const json& r) const { write(json{{"version", kVersion}, {"config", config()}, {"result", r}}); }

    void error(const std::string& kind, const std::string& msg, const std::string& param,
               const json& witness = nullptr) const {
        json e{{"kind", kind}, {"message", msg}, {"parameter", param.empty() ? json(nullptr) : json(param)}};
        if (!witness.is_null()) e["witness"] = witness;
        write(json{{"version", kVersion}, {"config", config()}, {"error", e}});
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact graph sums and tautological classes on moduli of curves"};
    app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
    app.require_subcommand(1);
    Globals gl;
    app.add_option("--out", gl.out, "write the JSON document here instead of stdout");
    app.add_option("--threads", gl.threads, "worker threads (default: DRCYCLE_THREADS or 1)");
    app.set_version_flag("--version", std::string(kVersion));

    // graphs
    auto* graphs = app.add_subcommand("graphs", "enumerate graphs up to isomorphism");
    int gg = 0, gn = 0, gmax = -1, gdeg = 0, gbound = -1;
    bool gstable = false;
    std::optional<int> gdegree;
    graphs->add_option("g", gg)->required();
    graphs->add_option("n", gn)->required();
    graphs->add_flag("--stable", gstable);
    graphs->add_option("--max-edges", gmax);
    graphs->add_option("--degree", gdegree, "total degree d (prestable graphs with multidegree)");
    graphs->add_option("--bound", gbound, "|delta(v)| bound, default max(1,|d|)");

    // pixton
    auto* pix = app.add_subcommand("pixton", "codimension-c part of the graph sum");
    int pg = 0, pn = 0, pc = 0, pk = 0, pmax = -1, pbound = -1, pR = -1, pD = -1, phold = 3;
    std::optional<int> pd, pr;
    std::string pA, pmode = "pic";
    bool ppoly = false, pconst = false;
    pix->add_option("g", pg)->required();
    pix->add_option("n", pn)->required();
    pix->add_option("A", pA, "comma-separated weights")->required();
    pix->add_option("c", pc)->required();
    pix->add_option("--mode", pmode)->check(CLI::IsMember({"pic", "moduli", "target"}));
    pix->add_option("--k", pk);
    pix->add_option("--d", pd, "total degree (target mode: target degree)");
    auto* ropt = pix->add_option("--r", pr, "evaluate at this r");
    auto* polyf = pix->add_flag("--poly", ppoly, "coefficients as polynomials in r");
    auto* constf = pix->add_flag("--const", pconst, "constant term in r (default)");
    ropt->excludes(polyf)->excludes(constf);
    polyf->excludes(constf);
    pix->add_option("--max-edges", pmax);
    pix->add_option("--bound", pbound);
    pix->add_option("--R", pR, "first sample point");
    pix->add_option("--D", pD, "polynomial degree bound");
    pix->add_option("--holdouts", phold);

    // dr
    auto* dr = app.add_subcommand("dr", "double ramification cycle on the moduli space");
    int dg = 0, dk = 0;
    std::string dA;
    dr->add_option("g", dg)->required();
    dr->add_option("A", dA)->required();
    dr->add_option("k", dk)->required();

    // integrate / pair
    auto* integ = app.add_subcommand("integrate", "integral of a class over the moduli space");
    std::string ifile;
    integ->add_option("class", ifile)->required();
    auto* pr2 = app.add_subcommand("pair", "intersection pairing of two classes");
    std::string xfile, yfile;
    pr2->add_option("x", xfile)->required();
    pr2->add_option("y", yfile)->required();

    // check
    auto* chk = app.add_subcommand("check", "run a named verification");
    std::string cname, cA, cshift, cmode = "pic", cwhich;
    std::optional<int> cd, ck, cn;
    int cg = 0, cc = 0, cmax = -1, cbound = -1, cR = -1, cD = -1, chold = 3;
    bool cperturb = false, ctable = false;
    chk->add_option("name", cname)->required()->check(CLI::IsMember(check_names()));
    chk->add_option("--g", cg);
    chk->add_option("--n", cn);
    chk->add_option("--A", cA);
    chk->add_option("--d", cd);
    chk->add_option("--k", ck);
    chk->add_option("--c", cc);
    chk->add_option("--mode", cmode)->check(CLI::IsMember({"pic", "moduli", "target"}));
    chk->add_option("--max-edges", cmax);
    chk->add_option("--bound", cbound);
    chk->add_option("--R", cR);
    chk->add_option("--D", cD);
    chk->add_option("--holdouts", chold);
    chk->add_option("--which", cwhich, "invariance: I, II, III, IV, V or VI");
    chk->add_option("--shift", cshift, "invariance III: comma-separated b_i");
    chk->add_flag("--perturb", cperturb, "add 1 to one stratum (sensitivity control)");
    chk->add_flag("--table", ctable, "print a plain-text line instead of JSON");

    Emitter em{gl, ""};
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        em.command = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
        em.error("usage", e.what(), "");
        return kExitUsage;
    }
    if (gl.threads > 0) set_thread_count(gl.threads);

    try {
        if (*graphs) {
            em.command = "graphs";
            EnumOptions opts;
            opts.stable_only = gstable;
            if (gdegree) {
                int B = gbound >= 0 ? gbound : std::max(1, std::abs(*gdegree));
                opts.degree = DegreeSpec{*gdegree, B};
            }
            if (gmax < 0) {
                if (!gstable) throw UsageError("max-edges", "prestable enumeration needs --max-edges");
                gmax = std::max(0, 3 * gg - 3 + gn);
            }
            em.params = json{{"g", gg}, {"n", gn}, {"stable", gstable}, {"max_edges", gmax}};
            if (opts.degree) em.params["degree"] = json{{"d", opts.degree->d}, {"bound", opts.degree->bound}};
            if (gg < 0 || gn < 0) throw UsageError("g", "g and n must be nonnegative");
            if (gstable && 2 * gg - 2 + gn <= 0) throw UsageError("n", "no stable graphs: need 2g-2+n > 0");
            json list = json::array();
            for (auto& G : enumerate_graphs(gg, gn, gmax, opts)) {
                auto [key, aut] = canonical_key_aut(Stratum(G));
                list.push_back(json{{"graph", graph_to_json(G)}, {"key", key_to_string(key)}, {"automorphisms", aut}});
            }
            em.result(json{{"count", list.size()}, {"graphs", list}});
            return kExitPass;
        }
        if (*pix) {
            em.command = "pixton";
            PixtonRequest req;
            req.g = pg;
            req.n = pn;
            req.A = parse_list(pA, "A");
            if (static_cast<int>(req.A.size()) != pn) throw UsageError("A", "A must have n entries");
            req.c = pc;
            req.variant = parse_variant(pmode);
            req.k = pk;
            req.d = pd ? *pd : std::accumulate(req.A.begin(), req.A.end(), 0);
            req.max_edges = pmax;
            req.degree_bound = pbound;
            SampleSpec spec{pR, pD, phold};
            em.params = req.to_json();
            const std::string out = pr ? "value_at_r" : ppoly ? "polynomial" : "constant_term";
            em.params["output"] = out;
            em.params["sampling"] = json{{"R", pR}, {"D", pD}, {"holdouts", phold}};
            if (pr) em.params["r"] = *pr;
            req.validate();
            json res;
            if (pr) {
                res = class_to_json(pixton_raw(req, *pr));
            } else if (ppoly) {
                auto rep = pixton_polynomial_report(req, spec);
                res = class_to_json(rep.cls);
                res["certification"] =
                    json{{"R", rep.R}, {"D", rep.D}, {"fit_points", rep.fit_points}, {"holdouts", rep.holdout_points}};
            } else {
                auto rep = pixton_polynomial_report(req, spec);
                res = class_to_json(constant_term(rep.cls));
                res["certification"] =
                    json{{"R", rep.R}, {"D", rep.D}, {"fit_points", rep.fit_points}, {"holdouts", rep.holdout_points}};
            }
            em.result(res);
            return kExitPass;
        }
        if (*dr) {
            em.command = "dr";
            auto A = parse_list(dA, "A");
            em.params = json{{"g", dg}, {"A", A}, {"k", dk}};
            em.result(class_to_json(dr_cycle(dg, A, dk)));
            return kExitPass;
        }
        if (*integ) {
            em.command = "integrate";
            em.params = json{{"class", ifile}};
            em.result(json{{"value", to_string(integrate(read_class(ifile)))}});
            return kExitPass;
        }
        if (*pr2) {
            em.command = "pair";
            em.params = json{{"x", xfile}, {"y", yfile}};
            em.result(json{{"value", to_string(pair(read_class(xfile), read_class(yfile)))}});
            return kExitPass;
        }
        if (*chk) {
            em.command = "check";
            json pj{{"g", cg}, {"c", cc}, {"mode", cmode}, {"max_edges", cmax}, {"bound", cbound},
                    {"R", cR}, {"D", cD}, {"holdouts", chold}, {"perturb", cperturb}};
            pj["A"] = parse_list(cA, "A");
            if (cn) {
                if (cA.empty())
                    pj["A"] = std::vector<int>(*cn, 0);
                else if (static_cast<int>(pj["A"].size()) != *cn)
                    throw UsageError("A", "A must have n entries");
            }
            if (cd) pj["d"] = *cd;
            if (ck) pj["k"] = *ck;
            if (!cwhich.empty()) pj["which"] = cwhich;
            if (!cshift.empty()) pj["shift"] = parse_list(cshift, "shift");
            auto params = CheckParams::from_json(pj);
            em.params = json{{"name", cname}, {"check", params.to_json()}};
            auto rep = run_check(cname, params);
            if (ctable) {
                std::cout << report_table({rep});
            } else {
                em.result(rep.to_json());
            }
            switch (rep.verdict) {
                case Verdict::Pass: return kExitPass;
                case Verdict::Fail: return kExitFail;
                case Verdict::Inconclusive: return kExitInconclusive;
            }
        }
    } catch (const UsageError& e) {
        em.error("usage", e.what(), e.param);
        return kExitUsage;
    } catch (const CertificationError& e) {
        em.error("certification", e.what(), "", e.witness());
        return kExitFail;
    } catch (const std::invalid_argument& e) {
        em.error("precondition", e.what(), "");
        return kExitUsage;
    } catch (const std::exception& e) {
        em.error("internal", e.what(), "");
        return kExitFail;
    }
    return kExitUsage;
}
