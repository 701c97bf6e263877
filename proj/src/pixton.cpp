#include "drcycle/pixton.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "drcycle/enumerate.hpp"
#include "drcycle/parallel.hpp"
#include "drcycle/weightings.hpp"

namespace drc {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::Pic: return "pic";
        case Variant::Moduli: return "moduli";
        case Variant::Target: return "target";
    }
    return "pic";
}

Variant parse_variant(const std::string& s) {
    if (s == "pic") return Variant::Pic;
    if (s == "moduli") return Variant::Moduli;
    if (s == "target") return Variant::Target;
    throw std::invalid_argument("unknown mode '" + s + "' (expected pic, moduli or target)");
}

int PixtonRequest::bound() const { return degree_bound >= 0 ? degree_bound : std::max(1, std::abs(d)); }

int PixtonRequest::class_degree() const { return variant == Variant::Moduli ? k * (2 * g - 2) : d; }

void PixtonRequest::validate() const {
    if (g < 0 || n < 0) throw std::invalid_argument("g and n must be nonnegative");
    if (static_cast<int>(A.size()) != n) throw std::invalid_argument("A must have n entries");
    if (c < 0) throw std::invalid_argument("codimension must be nonnegative");
    if (max_edges >= 0 && max_edges < c && !allow_truncation)
        throw std::invalid_argument("truncation insufficient: max_edges < c drops contributing graphs");
    const long sum = std::accumulate(A.begin(), A.end(), 0L);
    switch (variant) {
        case Variant::Pic:
            if (sum != d) throw std::invalid_argument("sum of A must equal d");
            break;
        case Variant::Moduli:
            if (2 * g - 2 + n <= 0) throw std::invalid_argument("moduli mode needs 2g-2+n > 0");
            if (sum != static_cast<long>(k) * (2 * g - 2)) throw std::invalid_argument("sum of A must equal k(2g-2)");
            break;
        case Variant::Target:
            if (sum != d + static_cast<long>(k) * (2 * g - 2 + n))
                throw std::invalid_argument("sum of A must equal d + k(2g-2+n)");
            break;
    }
}

json PixtonRequest::to_json() const {
    return json{{"g", g}, {"n", n}, {"A", A}, {"d", class_degree()}, {"c", c}, {"mode", variant_name(variant)},
                {"k", k}, {"max_edges", edges()}, {"degree_bound", variant == Variant::Moduli ? 0 : bound()}};
}

PixtonRequest pixton_request_from_json(const json& j) {
    PixtonRequest r;
    r.g = j.at("g");
    r.A = j.at("A").get<std::vector<int>>();
    r.n = j.value("n", static_cast<int>(r.A.size()));
    r.c = j.at("c");
    r.variant = parse_variant(j.value("mode", "pic"));
    r.k = j.value("k", 0);
    r.d = j.value("d", std::accumulate(r.A.begin(), r.A.end(), 0));
    r.max_edges = j.value("max_edges", -1);
    r.degree_bound = j.value("degree_bound", -1);
    return r;
}

std::vector<Q> edge_series(const Q& a, int order) {
    if (order < 0) throw std::invalid_argument("edge_series: negative order");
    std::vector<Q> out;
    Q half = a / 2;
    Q p = half;
    for (int m = 0; m <= order; ++m) {
        Q c = p / factorial(m + 1);
        out.push_back(m % 2 ? Q(-c) : c);
        p *= half;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Graph-sum templates

namespace {

// One graph of the sum with its expanded decorations. Each term is
// const * M_m(r), where M_m(r) = r^{-h1} sum_w prod_e (w(h) w(h'))^{m_e+1}.
struct GraphTemplate {
    Graph G;
    std::vector<long long> targets;
    std::vector<std::vector<int>> moments;  // m-vectors
    struct Term {
        Key key;
        Q coeff;
        int moment;
    };
    std::vector<Term> terms;
};

struct SumSpec {
    std::vector<int> codims;
    bool vertex_leg_factors = true;
    bool nse_only = false;
    int bound = 0;
};

bool all_nonseparating(const Graph& G) {
    for (int e = 0; e < G.ne(); ++e)
        if (G.edge_separating(e)) return false;
    return true;
}

struct Option {
    int deg;
    Q coeff;
    int p = 0, q = 0;                  // legs: psi, xi
    int x = 0, y = 0, z = 0;           // vertices: eta, eta_{1,1}, kappa_1
};

std::vector<Option> leg_options(const PixtonRequest& req, int i, int budget) {
    std::vector<Option> out;
    const bool mod = req.variant == Variant::Moduli;
    const Q a = mod ? Q(req.A[i] + req.k) : Q(req.A[i]);
    const Q half_sq = a * a / 2;
    for (int p = 0; p <= budget; ++p)
        for (int q = 0; p + q <= budget; ++q) {
            if (mod && q > 0) continue;
            Q c = power(half_sq, p) / factorial(p) * power(a, q) / factorial(q);
            if (is_zero(c)) continue;
            Option o{p + q, c};
            o.p = p;
            o.q = q;
            out.push_back(o);
        }
    return out;
}

std::vector<Option> vertex_options(const PixtonRequest& req, int budget) {
    std::vector<Option> out;
    const Q k(req.k);
    for (int x = 0; x <= budget; ++x)
        for (int y = 0; x + y <= budget; ++y)
            for (int z = 0; x + y + z <= budget; ++z) {
                Q c;
                switch (req.variant) {
                    case Variant::Pic:
                        if (y || z) continue;
                        c = power(Q(-1, 2), x) / factorial(x);
                        break;
                    case Variant::Moduli:
                        if (x || y) continue;
                        c = power(-k * k / 2, z) / factorial(z);
                        break;
                    case Variant::Target:
                        c = power(Q(-1, 2), x) / factorial(x) * power(-k, y) / factorial(y) *
                            power(-k * k / 2, z) / factorial(z);
                        break;
                }
                if (is_zero(c)) continue;
                Option o{x + y + z, c};
                o.x = x;
                o.y = y;
                o.z = z;
                out.push_back(o);
            }
    return out;
}

std::vector<long long> vertex_targets(const PixtonRequest& req, const Graph& G) {
    switch (req.variant) {
        case Variant::Pic: return degree_targets(G);
        case Variant::Moduli: return canonical_multidegree(G, req.k);
        case Variant::Target: return target_vertex_values(G, req.k);
    }
    return {};
}

std::vector<Graph> sum_graphs(const PixtonRequest& req, int max_edges, int bound) {
    if (req.variant == Variant::Moduli) return enumerate_graphs_cached(req.g, req.n, max_edges, {.stable_only = true});
    return enumerate_graphs_cached(req.g, req.n, max_edges,
                                   {.stable_only = false, .degree = DegreeSpec{req.d, bound}});
}

GraphTemplate build_template(const PixtonRequest& req, const Graph& G, const SumSpec& spec) {
    GraphTemplate T;
    T.G = G;
    T.targets = vertex_targets(req, G);
    const Q inv_aut = Q(1) / Q(static_cast<long>(canonical_key_aut(Stratum(G)).second));
    const int n = G.nl(), V = G.nv(), E = G.ne();
    std::map<std::vector<int>, int> moment_index;
    std::map<Key, std::map<int, Q>> acc;

    for (int c : spec.codims) {
        const int budget = c - E;
        if (budget < 0) continue;
        std::vector<std::vector<Option>> legs(n), verts(V);
        for (int i = 0; i < n; ++i) {
            if (spec.vertex_leg_factors)
                legs[i] = leg_options(req, i, budget);
            else
                legs[i] = {Option{0, Q(1)}};
        }
        for (int v = 0; v < V; ++v) {
            if (spec.vertex_leg_factors)
                verts[v] = vertex_options(req, budget);
            else
                verts[v] = {Option{0, Q(1)}};
        }
        std::vector<int> leg_pick(n), vert_pick(V), m(E);
        std::function<void(int, int, const Q&)> pick_edges;
        auto emit = [&](const Q& base) {
            auto [it, fresh] = moment_index.emplace(m, static_cast<int>(T.moments.size()));
            if (fresh) T.moments.push_back(m);
            const int mi = it->second;
            Decoration d = Decoration::zero(G);
            for (int i = 0; i < n; ++i) {
                d.psi[i] = legs[i][leg_pick[i]].p;
                d.xi[i] = legs[i][leg_pick[i]].q;
            }
            for (int v = 0; v < V; ++v) {
                const Option& o = verts[v][vert_pick[v]];
                VertexMono mono;
                for (int t = 0; t < o.x; ++t) mono.push_back({0, 2});
                for (int t = 0; t < o.y; ++t) mono.push_back({1, 1});
                for (int t = 0; t < o.z; ++t) mono.push_back({2, 0});
                std::sort(mono.begin(), mono.end());
                d.vmono[v] = mono;
            }
            // (psi_h + psi_h')^{m_e}, expanded
            std::function<void(int, Decoration&, const Q&)> split = [&](int e, Decoration& dd, const Q& cc) {
                if (e == E) {
                    acc[canonical_key(Stratum(G, dd))][mi] += cc;
                    return;
                }
                const int h = G.edge_half(e, 0), h2 = G.edge_half(e, 1);
                for (int j = 0; j <= m[e]; ++j) {
                    dd.psi[h] = j;
                    dd.psi[h2] = m[e] - j;
                    split(e + 1, dd, cc * binomial(m[e], j));
                }
                dd.psi[h] = dd.psi[h2] = 0;
            };
            split(0, d, base);
        };
        pick_edges = [&](int e, int left, const Q& cc) {
            if (e == E) {
                if (left == 0) emit(cc);
                return;
            }
            for (int me = 0; me <= left; ++me) {
                m[e] = me;
                Q ec = Q(me % 2 ? -1 : 1) / (power(Q(2), me + 1) * factorial(me + 1));
                pick_edges(e + 1, left - me, cc * ec);
            }
            m[e] = 0;
        };
        std::function<void(int, int, const Q&)> pick_verts = [&](int v, int left, const Q& cc) {
            if (v == V) {
                pick_edges(0, left, cc);
                return;
            }
            for (size_t o = 0; o < verts[v].size(); ++o) {
                if (verts[v][o].deg > left) continue;
                vert_pick[v] = static_cast<int>(o);
                pick_verts(v + 1, left - verts[v][o].deg, cc * verts[v][o].coeff);
            }
        };
        std::function<void(int, int, const Q&)> pick_legs = [&](int i, int left, const Q& cc) {
            if (i == n) {
                pick_verts(0, left, cc);
                return;
            }
            for (size_t o = 0; o < legs[i].size(); ++o) {
                if (legs[i][o].deg > left) continue;
                leg_pick[i] = static_cast<int>(o);
                pick_legs(i + 1, left - legs[i][o].deg, cc * legs[i][o].coeff);
            }
        };
        pick_legs(0, budget, inv_aut);
    }
    for (auto& [k, per] : acc)
        for (auto& [mi, c] : per)
            if (!is_zero(c)) T.terms.push_back({k, c, mi});
    return T;
}

std::vector<GraphTemplate> build_templates(const PixtonRequest& req, const SumSpec& spec) {
    int maxc = 0;
    for (int c : spec.codims) maxc = std::max(maxc, c);
    const int max_edges = std::min(maxc, req.edges());
    auto graphs = sum_graphs(req, max_edges, spec.bound);
    if (spec.nse_only) {
        std::vector<Graph> keep;
        for (auto& G : graphs)
            if (all_nonseparating(G)) keep.push_back(G);
        graphs = std::move(keep);
    }
    std::vector<GraphTemplate> out(graphs.size());
    parallel_for(graphs.size(), [&](std::size_t i) { out[i] = build_template(req, graphs[i], spec); });
    return out;
}

// M_m(r) for every moment of the template.
std::vector<Q> moments_at(const PixtonRequest& req, const GraphTemplate& T, int r) {
    std::vector<Q> out(T.moments.size(), 0);
    if (T.moments.empty()) return out;
    HalfEdgeSystem sys(T.G, T.targets, req.A);
    const int E = T.G.ne(), n = T.G.nl();
    int maxm = 0;
    for (auto& m : T.moments)
        for (int x : m) maxm = std::max(maxm, x);
    std::vector<Z> sums(T.moments.size(), 0);
    std::vector<std::vector<Z>> pw(E, std::vector<Z>(maxm + 2));
    for_each_weighting(sys, r, [&](const std::vector<long long>& w) {
        for (int e = 0; e < E; ++e) {
            Z p = Z(static_cast<long>(w[n + 2 * e])) * Z(static_cast<long>(w[n + 2 * e + 1]));
            pw[e][0] = 1;
            for (int t = 1; t <= maxm + 1; ++t) pw[e][t] = pw[e][t - 1] * p;
        }
        for (size_t i = 0; i < T.moments.size(); ++i) {
            Z prod = 1;
            for (int e = 0; e < E; ++e) prod *= pw[e][T.moments[i][e] + 1];
            sums[i] += prod;
        }
    });
    Z denom = ipow(Z(r), T.G.h1());
    for (size_t i = 0; i < sums.size(); ++i) {
        out[i] = Q(sums[i]) / Q(denom);
        out[i].canonicalize();
    }
    return out;
}

// Coefficient per key at one r.
std::map<Key, Q> evaluate(const PixtonRequest& req, const std::vector<GraphTemplate>& Ts, int r) {
    std::vector<std::vector<Q>> mom(Ts.size());
    parallel_for(Ts.size(), [&](std::size_t i) { mom[i] = moments_at(req, Ts[i], r); });
    std::map<Key, Q> out;
    for (size_t i = 0; i < Ts.size(); ++i)
        for (auto& t : Ts[i].terms) {
            Q v = t.coeff * mom[i][t.moment];
            if (is_zero(v)) continue;
            auto [it, fresh] = out.emplace(t.key, v);
            if (!fresh) it->second += v;
        }
    for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
    return out;
}

// Past this point every edge flow forced by the leg weights and vertex
// targets is smaller than r, so no residue wraps around as r grows.
int base_point(const PixtonRequest& req, const std::vector<GraphTemplate>& Ts) {
    long long legs = 0, worst = 0;
    for (int a : req.A) legs += std::abs(a);
    for (auto& T : Ts) {
        long long s = legs;
        for (auto t : T.targets) s += std::llabs(t);
        worst = std::max(worst, s);
    }
    return static_cast<int>(std::max<long long>(2, 1 + std::max(worst, legs)));
}

PolyReport certify(const PixtonRequest& req, const std::vector<GraphTemplate>& Ts, const SampleSpec& spec,
                   int c_for_degree) {
    PolyReport rep;
    rep.D = spec.D >= 0 ? spec.D : 2 * c_for_degree;
    rep.R = spec.R >= 1 ? spec.R : base_point(req, Ts);
    for (int i = 0; i <= rep.D + 1; ++i) rep.fit_points.push_back(rep.R + i);
    for (int i = 1; i <= spec.holdouts; ++i) rep.holdout_points.push_back(rep.R + rep.D + 1 + 2 * i);
    std::vector<int> pts = rep.fit_points;
    pts.insert(pts.end(), rep.holdout_points.begin(), rep.holdout_points.end());
    std::vector<std::map<Key, Q>> vals;
    for (int r : pts) vals.push_back(evaluate(req, Ts, r));
    if (spec.perturb != 0) {
        auto& last = vals.back();
        if (last.empty()) {
            last[canonical_key(Stratum(Graph({req.g}, {}, std::vector<int>(req.n, 0))))] = spec.perturb;
        } else {
            last.begin()->second += spec.perturb;
        }
    }
    std::set<Key> keys;
    for (auto& m : vals)
        for (auto& [k, v] : m) keys.insert(k);
    rep.cls = PolyClass(req.g, req.n, req.class_degree(), req.mode());
    const size_t nfit = static_cast<size_t>(rep.D + 1);
    for (auto& k : keys) {
        std::vector<Q> xs, ys;
        for (size_t i = 0; i < nfit; ++i) {
            xs.push_back(pts[i]);
            auto it = vals[i].find(k);
            ys.push_back(it == vals[i].end() ? Q(0) : it->second);
        }
        RPoly p = interpolate(xs, ys);
        for (size_t i = nfit; i < pts.size(); ++i) {
            auto it = vals[i].find(k);
            Q sample = it == vals[i].end() ? Q(0) : it->second;
            Q pred = p.eval(pts[i]);
            if (pred != sample) {
                Stratum s = decode_key(k);
                json w{{"graph", graph_to_json(s.graph)},
                       {"decoration", deco_to_json(s.deco)},
                       {"r", pts[i]},
                       {"sample", to_string(sample)},
                       {"predicted", to_string(pred)},
                       {"fit_degree_bound", rep.D},
                       {"base_point", rep.R}};
                throw CertificationError("polynomial fit missed a held-out sample", w);
            }
        }
        rep.cls.add_key(k, p);
    }
    return rep;
}

SumSpec full_spec(const PixtonRequest& req) {
    SumSpec s;
    s.codims = {req.c};
    s.bound = req.bound();
    return s;
}

}  // namespace

QClass pixton_raw(const PixtonRequest& req, int r) {
    req.validate();
    if (r < 1) throw std::invalid_argument("r must be a positive integer");
    auto Ts = build_templates(req, full_spec(req));
    QClass out(req.g, req.n, req.class_degree(), req.mode());
    for (auto& [k, v] : evaluate(req, Ts, r)) out.add_key(k, v);
    return out;
}

int default_base_point(const PixtonRequest& req) {
    req.validate();
    return base_point(req, build_templates(req, full_spec(req)));
}

PolyReport pixton_polynomial_report(const PixtonRequest& req, const SampleSpec& spec) {
    req.validate();
    auto Ts = build_templates(req, full_spec(req));
    return certify(req, Ts, spec, req.c);
}

PolyClass pixton_polynomial(const PixtonRequest& req, const SampleSpec& spec) {
    return pixton_polynomial_report(req, spec).cls;
}

QClass pixton_class(const PixtonRequest& req, const SampleSpec& spec) {
    return constant_term(pixton_polynomial(req, spec));
}

// ---------------------------------------------------------------------------
// Factorized form

Q separating_coefficient(const Graph& G, const std::vector<int>& A) {
    if (G.ne() != 1 || G.nv() != 2) throw std::invalid_argument("separating_coefficient: need a one-edge tree");
    Q s = G.degree[0];
    for (int i = 0; i < G.nl(); ++i)
        if (G.legs[i] == 0) s -= A[i];
    return -s * s;
}

QClass exponent_divisor(const PixtonRequest& req, int bound) {
    req.validate();
    const bool mod = req.variant == Variant::Moduli;
    if (req.variant == Variant::Target) throw std::invalid_argument("exponent_divisor: target variant not supported");
    QClass out(req.g, req.n, req.class_degree(), req.mode());
    Graph G0({req.g}, {}, std::vector<int>(req.n, 0), {mod ? 0 : req.d});
    {
        Stratum s(G0);
        if (mod) {
            s.deco.vmono[0] = {{2, 0}};
            out.add_term(s, Q(-req.k * req.k, 2));
        } else {
            s.deco.vmono[0] = {{0, 2}};
            out.add_term(s, Q(-1, 2));
        }
    }
    for (int i = 0; i < req.n; ++i) {
        const Q a = mod ? Q(req.A[i] + req.k) : Q(req.A[i]);
        Stratum s(G0);
        s.deco.psi[i] = 1;
        out.add_term(s, a * a / 2);
        if (!mod) {
            Stratum t(G0);
            t.deco.xi[i] = 1;
            out.add_term(t, a);
        }
    }
    for (auto& G : sum_graphs(req, 1, bound)) {
        if (G.ne() != 1 || G.nv() != 2) continue;
        Graph H = G;
        if (mod) H.degree = {static_cast<int>(canonical_multidegree(G, req.k)[0]), 0};
        Q cA = separating_coefficient(H, req.A);
        const Q inv_aut = Q(1) / Q(static_cast<long>(canonical_key_aut(Stratum(G)).second));
        out.add_term(Stratum(G), cA / 2 * inv_aut);
    }
    return out;
}

PolyClass pixton_factorized(const PixtonRequest& req, const SampleSpec& spec) {
    req.validate();
    if (req.variant == Variant::Target) throw std::invalid_argument("pixton_factorized: target variant not supported");
    const bool mod = req.variant == Variant::Moduli;
    const int B = req.bound();
    const int wide = mod ? 0 : (req.c + 1) * B;
    PixtonRequest wreq = req;
    wreq.degree_bound = wide;
    ProductOptions opts{.degree_bound = wide, .max_codim = req.c};
    QClass e = exp_truncated(exponent_divisor(wreq, wide), req.c, opts);

    SumSpec s;
    for (int c = 0; c <= req.c; ++c) s.codims.push_back(c);
    s.vertex_leg_factors = false;
    s.nse_only = true;
    s.bound = wide;
    auto Ts = build_templates(wreq, s);
    PolyClass nse = certify(wreq, Ts, spec, req.c).cls;
    PolyClass prod = multiply(to_poly(e), nse, opts).grade(req.c);
    return mod ? prod : degree_window(prod, B);
}

// ---------------------------------------------------------------------------
// Specialization to M_{g,n}bar

template <class R>
TautClass<R> specialize_to_moduli(const TautClass<R>& x, int k) {
    if (x.mode != Mode::Pic) throw std::invalid_argument("specialize_to_moduli expects a pic-mode class");
    TautClass<R> out(x.g, x.n, x.d, Mode::Moduli);
    for (auto& [key, c] : x.terms) {
        Stratum s = decode_key(key);
        const Graph& G = s.graph;
        if (!G.stable()) continue;
        auto cd = canonical_multidegree(G, k);
        bool match = true;
        for (int v = 0; v < G.nv(); ++v) match = match && cd[v] == G.degree[v];
        if (!match) continue;
        bool edge_xi = false;
        for (int x2 : s.deco.exi) edge_xi = edge_xi || x2 > 0;
        if (edge_xi) continue;  // omega_log is trivial at the nodes
        Graph H = G;
        std::fill(H.degree.begin(), H.degree.end(), 0);
        Decoration base = Decoration::zero(H);
        base.psi = s.deco.psi;
        Q scal = 1;
        for (int i = 0; i < G.nl(); ++i) {
            base.psi[i] += s.deco.xi[i];
            scal *= power(Q(k), s.deco.xi[i]);
        }
        std::vector<std::pair<Decoration, Q>> sum{{base, scal}};
        auto at = G.half_edges_at();
        for (int v = 0; v < G.nv(); ++v) {
            for (auto [a, b] : s.deco.vmono[v]) {
                const Q kb = power(Q(k), b);
                std::vector<std::pair<Decoration, Q>> next;
                for (auto& [d, cc] : sum) {
                    if (is_zero(kb)) continue;
                    Decoration d2 = d;
                    mono_multiply(d2.vmono[v], {{a + b, 0}});
                    next.emplace_back(d2, cc * kb);
                    if (a == 0) {
                        for (int h : at[v]) {
                            if (h >= G.nl()) continue;
                            Decoration d3 = d;
                            d3.psi[h] += b - 1;
                            next.emplace_back(d3, -cc * kb);
                        }
                    }
                }
                sum = std::move(next);
            }
        }
        for (auto& [d, cc] : sum) out.add_term(Stratum(H, d), c * R(cc));
    }
    return out;
}

template QClass specialize_to_moduli(const QClass&, int);
template PolyClass specialize_to_moduli(const PolyClass&, int);

QClass dr_cycle(int g, const std::vector<int>& A, int k) {
    PixtonRequest req;
    req.g = g;
    req.n = static_cast<int>(A.size());
    req.A = A;
    req.c = g;
    req.k = k;
    req.variant = Variant::Moduli;
    return pixton_class(req);
}

QClass compact_type_theta(int g, const std::vector<int>& A, int d, int bound) {
    PixtonRequest req;
    req.g = g;
    req.n = static_cast<int>(A.size());
    req.A = A;
    req.d = d;
    req.c = g;
    const int wide = (g + 1) * bound;
    req.degree_bound = wide;
    ProductOptions opts{.degree_bound = wide, .max_codim = g};
    QClass th = exp_truncated(exponent_divisor(req, wide), g, opts).grade(g);
    return degree_window(trees_only(th), bound);
}

}  // namespace drc
