#include "drcycle/calculus.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "drcycle/enumerate.hpp"

namespace drc {

namespace {

// n!! for odd n >= -1.
Q odd_dfact(int n) {
    Q out = 1;
    for (int k = n; k > 1; k -= 2) out *= k;
    return out;
}

bool stable_type(int g, int n) { return 2 * g - 2 + n > 0; }

}  // namespace

// ---------------------------------------------------------------------------
// IntegralTable

IntegralTable& IntegralTable::global() {
    static IntegralTable t;
    return t;
}

Q IntegralTable::psi(int g, std::vector<int> e) {
    const int n = static_cast<int>(e.size());
    if (g < 0 || !stable_type(g, n)) return 0;
    int s = 0;
    for (int x : e) {
        if (x < 0) return 0;
        s += x;
    }
    const int dim = 3 * g - 3 + n;
    if (s != dim) return 0;
    if (dim > max_dim_) throw std::out_of_range("psi integral beyond the configured dimension budget");
    std::sort(e.begin(), e.end(), std::greater<int>());
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = psi_.find({g, e});
        if (it != psi_.end()) return it->second;
    }
    Q v = compute(g, e);
    std::lock_guard<std::mutex> lk(mu_);
    psi_.emplace(std::make_pair(g, e), v);
    return v;
}

Q IntegralTable::compute(int g, const std::vector<int>& e) {
    const int n = static_cast<int>(e.size());
    if (g == 0 && n == 3) return 1;
    if (g == 1 && n == 1) return Q(1, 24);
    if (e.back() == 0) return step(g, e, n - 1);
    for (int i = 0; i < n; ++i)
        if (e[i] == 1) return step(g, e, i);
    return step(g, e, 0);
}

Q IntegralTable::psi_via(int g, const std::vector<int>& e, int marking) {
    const int n = static_cast<int>(e.size());
    if (marking < 0 || marking >= n) throw std::invalid_argument("psi_via: marking out of range");
    int s = std::accumulate(e.begin(), e.end(), 0);
    if (g < 0 || !stable_type(g, n) || s != 3 * g - 3 + n) return 0;
    return step(g, e, marking);
}

Q IntegralTable::step(int g, const std::vector<int>& e, int m) {
    const int n = static_cast<int>(e.size());
    if (g == 0 && n == 3) return 1;
    if (g == 1 && n == 1) return Q(1, 24);
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (i != m) rest.push_back(e[i]);
    if (e[m] == 0) {
        Q out = 0;
        for (size_t j = 0; j < rest.size(); ++j) {
            if (rest[j] == 0) continue;
            auto r2 = rest;
            --r2[j];
            out += psi(g, r2);
        }
        return out;
    }
    if (e[m] == 1) return Q(2 * g - 2 + n - 1) * psi(g, rest);

    // DVV: <tau_{k+1} tau_S>_g
    const int k = e[m] - 1;
    const int s = static_cast<int>(rest.size());
    Q t1 = 0;
    for (int j = 0; j < s; ++j) {
        auto r2 = rest;
        r2[j] += k;
        t1 += odd_dfact(2 * k + 2 * rest[j] + 1) / odd_dfact(2 * rest[j] - 1) * psi(g, r2);
    }
    Q t2 = 0, t3 = 0;
    for (int a = 0; a <= k - 1; ++a) {
        int b = k - 1 - a;
        Q w = odd_dfact(2 * a + 1) * odd_dfact(2 * b + 1);
        if (g >= 1) {
            auto r2 = rest;
            r2.push_back(a);
            r2.push_back(b);
            t2 += w * psi(g - 1, r2);
        }
        for (int g1 = 0; g1 <= g; ++g1)
            for (int mask = 0; mask < (1 << s); ++mask) {
                std::vector<int> I{a}, J{b};
                for (int j = 0; j < s; ++j) ((mask >> j) & 1 ? I : J).push_back(rest[j]);
                Q x = psi(g1, I);
                if (x == 0) continue;
                t3 += w * x * psi(g - g1, J);
            }
    }
    return (t1 + (t2 + t3) / 2) / odd_dfact(2 * k + 3);
}

Q IntegralTable::psi_kappa(int g, std::vector<int> e, std::vector<int> kappa) {
    if (kappa.empty()) return psi(g, std::move(e));
    const int n = static_cast<int>(e.size());
    if (g < 0 || !stable_type(g, n)) return 0;
    int s = std::accumulate(e.begin(), e.end(), 0) + std::accumulate(kappa.begin(), kappa.end(), 0);
    if (s != 3 * g - 3 + n) return 0;
    std::sort(e.begin(), e.end());
    std::sort(kappa.begin(), kappa.end());
    auto key = std::make_tuple(g, e, kappa);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = kappa_.find(key);
        if (it != kappa_.end()) return it->second;
    }
    // int psi^e kappa_{b_1..b_m} = int_{n+1} psi^e psi_{n+1}^{b_m+1} prod_{j<m} (kappa_{b_j} - psi_{n+1}^{b_j})
    const int b = kappa.back();
    std::vector<int> rest(kappa.begin(), kappa.end() - 1);
    const int m = static_cast<int>(rest.size());
    Q out = 0;
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> keep;
        int extra = 0, cnt = 0;
        for (int j = 0; j < m; ++j) {
            if ((mask >> j) & 1) {
                extra += rest[j];
                ++cnt;
            } else {
                keep.push_back(rest[j]);
            }
        }
        auto e2 = e;
        e2.push_back(b + 1 + extra);
        Q v = psi_kappa(g, e2, keep);
        out += (cnt % 2 ? -v : v);
    }
    std::lock_guard<std::mutex> lk(mu_);
    kappa_.emplace(key, out);
    return out;
}

std::map<std::pair<int, std::vector<int>>, Q> IntegralTable::entries() const {
    std::lock_guard<std::mutex> lk(mu_);
    return psi_;
}

json IntegralTable::to_json() const {
    json arr = json::array();
    for (auto& [k, v] : entries()) arr.push_back({{"g", k.first}, {"psi", k.second}, {"value", to_string(v)}});
    return arr;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

std::vector<int> kappa_list(const VertexMono& m) {
    std::vector<int> out;
    for (auto& [a, b] : m) {
        if (b != 0) throw std::invalid_argument("unsupported decoration: eta_{a,b} with b > 0 in moduli mode");
        out.push_back(a - 1);
    }
    return out;
}

void require_moduli_deco(const Decoration& d) {
    if (d.has_pic_symbols()) throw std::invalid_argument("unsupported decoration: xi/eta symbols in moduli mode");
}

}  // namespace

Q integrate_stratum(const Stratum& s) {
    const Graph& G = s.graph;
    require_moduli_deco(s.deco);
    auto at = G.half_edges_at();
    Q out = 1;
    for (int v = 0; v < G.nv() && out != 0; ++v) {
        std::vector<int> e;
        for (int h : at[v]) e.push_back(s.deco.psi[h]);
        out *= IntegralTable::global().psi_kappa(G.genus[v], e, kappa_list(s.deco.vmono[v]));
    }
    return out;
}

Q integrate(const QClass& x) {
    if (x.mode != Mode::Moduli) throw std::invalid_argument("integration needs a moduli-mode class");
    Q out = 0;
    const int dim = 3 * x.g - 3 + x.n;
    for (auto& [k, c] : x.terms) {
        Stratum s = decode_key(k);
        if (s.codim() != dim) continue;
        out += c * integrate_stratum(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Common degenerations

namespace {

using DecoSum = std::vector<std::pair<Decoration, Q>>;

void spread_symbol(DecoSum& sum, std::pair<int, int> sym, const std::vector<int>& fiber) {
    DecoSum out;
    out.reserve(sum.size() * fiber.size());
    for (auto& [d, c] : sum)
        for (int x : fiber) {
            Decoration d2 = d;
            mono_multiply(d2.vmono[x], {sym});
            out.emplace_back(std::move(d2), c);
        }
    sum = std::move(out);
}

// A refinement of B: vertex v of B replaced by the graph G_v, whose legs
// are the half-edges at v in sorted order.
struct Assembly {
    Graph G;
    std::vector<const Graph*> parts;
    std::vector<std::vector<int>> vmap;  // per B vertex: part vertex -> G vertex
    std::vector<std::vector<int>> hmap;  // per B vertex: part half-edge -> G half-edge
    std::vector<std::vector<int>> fiber; // per B vertex: G vertices
    int new_edges = 0;
};

Assembly assemble(const Graph& B, const std::vector<const Graph*>& parts) {
    Assembly a;
    a.parts = parts;
    const int n = B.nl(), VB = B.nv(), EB = B.ne();
    auto at = B.half_edges_at();
    std::vector<int> offset(VB);
    int nv = 0;
    for (int v = 0; v < VB; ++v) {
        offset[v] = nv;
        nv += parts[v]->nv();
        a.new_edges += parts[v]->ne();
    }
    Graph& G = a.G;
    G.genus.resize(nv);
    G.degree.resize(nv);
    a.vmap.resize(VB);
    a.fiber.resize(VB);
    a.hmap.resize(VB);
    for (int v = 0; v < VB; ++v) {
        const Graph& P = *parts[v];
        for (int x = 0; x < P.nv(); ++x) {
            G.genus[offset[v] + x] = P.genus[x];
            G.degree[offset[v] + x] = P.degree[x];
            a.vmap[v].push_back(offset[v] + x);
            a.fiber[v].push_back(offset[v] + x);
        }
    }
    // position of each B half-edge among the half-edges at its vertex
    std::vector<int> pos(B.nh());
    for (int v = 0; v < VB; ++v)
        for (size_t j = 0; j < at[v].size(); ++j) pos[at[v][j]] = static_cast<int>(j);
    auto target = [&](int h) {
        int v = B.he_vertex(h);
        return offset[v] + parts[v]->legs[pos[h]];
    };
    G.legs.resize(n);
    for (int i = 0; i < n; ++i) G.legs[i] = target(i);
    for (int e = 0; e < EB; ++e) G.edges.push_back({target(B.edge_half(e, 0)), target(B.edge_half(e, 1))});
    for (int v = 0; v < VB; ++v) {
        const Graph& P = *parts[v];
        auto& hm = a.hmap[v];
        hm.assign(P.nh(), -1);
        for (size_t j = 0; j < at[v].size(); ++j) hm[j] = at[v][j];
        for (int f = 0; f < P.ne(); ++f) {
            int k = G.ne();
            G.edges.push_back({offset[v] + P.edges[f][0], offset[v] + P.edges[f][1]});
            hm[P.edge_half(f, 0)] = n + 2 * k;
            hm[P.edge_half(f, 1)] = n + 2 * k + 1;
        }
    }
    return a;
}

struct PartList {
    std::vector<Graph> graphs;
    std::vector<std::int64_t> aut;
};

const PartList& parts_for(int g, int n, int degree, Mode mode, int max_edges, int bound) {
    using K = std::tuple<int, int, int, int, int, int>;
    static std::mutex mu;
    static std::map<K, PartList> cache;
    K key{g, n, degree, mode == Mode::Pic ? 1 : 0, max_edges, bound};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    PartList pl;
    EnumOptions opts;
    opts.stable_only = mode == Mode::Moduli;
    if (mode == Mode::Pic) opts.degree = DegreeSpec{degree, std::max(bound, std::abs(degree))};
    for (auto& G : enumerate_graphs(g, n, max_edges, opts)) {
        pl.aut.push_back(canonical_key_aut(Stratum(G)).second);
        pl.graphs.push_back(G);
    }
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(key, std::move(pl)).first->second;
}

// Visit every generic (A,B)-structure: B is refined vertexwise, A is
// matched by contracting the old edges outside a chosen set S. The
// callback gets the assembly, the decoration sum (pullbacks of both
// decorations and the excess factors) and the weight 1/prod |Aut(G_v)|.
template <class F>
void for_each_generic(const Stratum& A, const Stratum& B, Mode mode, int bound, F&& emit) {
    const Graph& GA = A.graph;
    const Graph& GB = B.graph;
    const int m = GA.ne();
    const int VB = GB.nv(), EB = GB.ne();
    auto at = GB.half_edges_at();
    std::vector<const PartList*> cand(VB);
    for (int v = 0; v < VB; ++v)
        cand[v] = &parts_for(GB.genus[v], static_cast<int>(at[v].size()), GB.degree[v], mode, m, bound);

    std::vector<const Graph*> chosen(VB);
    std::vector<std::int64_t> chosen_aut(VB);

    auto process = [&]() {
        Assembly as = assemble(GB, chosen);
        const Graph& G2 = as.G;
        const int keep_old = m - as.new_edges;
        if (keep_old < 0 || keep_old > EB) return;
        std::int64_t autprod = 1;
        for (auto x : chosen_aut) autprod *= x;
        const Q weight = Q(1) / Q(static_cast<long>(autprod));

        // beta^* gamma_B
        DecoSum base{{Decoration::zero(G2), Q(1)}};
        {
            Decoration& d0 = base[0].first;
            for (int h = 0; h < GB.nh(); ++h) d0.psi[h] = B.deco.psi[h];
            for (int i = 0; i < GB.nl(); ++i) d0.xi[i] = B.deco.xi[i];
            for (int e = 0; e < EB; ++e) d0.exi[e] = B.deco.exi[e];
            for (int v = 0; v < VB; ++v)
                for (auto& sym : B.deco.vmono[v]) spread_symbol(base, sym, as.fiber[v]);
        }

        std::vector<int> sel(EB, 0);
        std::fill(sel.begin(), sel.begin() + keep_old, 1);
        std::sort(sel.begin(), sel.end());
        do {
            std::vector<int> contract;
            for (int e = 0; e < EB; ++e)
                if (!sel[e]) contract.push_back(e);
            Contraction C = contract_edges(G2, contract);
            for_each_isomorphism(C.graph, GA, [&](const std::vector<int>& vm, const std::vector<int>& hm) {
                std::vector<std::vector<int>> afiber(GA.nv());
                for (int x = 0; x < G2.nv(); ++x) afiber[vm[C.vertex_map[x]]].push_back(x);
                std::vector<int> ainv(GA.nh(), -1);
                for (int h = 0; h < G2.nh(); ++h) {
                    int c = C.half_edge_map[h];
                    if (c >= 0) ainv[hm[c]] = h;
                }
                DecoSum sum = base;
                for (auto& [d, c] : sum) {
                    for (int h = 0; h < GA.nh(); ++h) d.psi[ainv[h]] += A.deco.psi[h];
                    for (int i = 0; i < GA.nl(); ++i) d.xi[i] += A.deco.xi[i];
                    for (int e = 0; e < GA.ne(); ++e) d.exi[G2.he_edge(ainv[GA.edge_half(e, 0)])] += A.deco.exi[e];
                }
                for (int a = 0; a < GA.nv(); ++a)
                    for (auto& sym : A.deco.vmono[a]) spread_symbol(sum, sym, afiber[a]);
                // excess: -(psi_h + psi_h') on edges common to A and B
                for (int e = 0; e < EB; ++e) {
                    if (!sel[e]) continue;
                    DecoSum out;
                    out.reserve(sum.size() * 2);
                    for (auto& [d, c] : sum)
                        for (int side = 0; side < 2; ++side) {
                            Decoration d2 = d;
                            ++d2.psi[G2.edge_half(e, side)];
                            out.emplace_back(std::move(d2), -c);
                        }
                    sum = std::move(out);
                }
                emit(as, sum, weight);
                return true;
            });
        } while (std::next_permutation(sel.begin(), sel.end()));
    };

    std::function<void(int, int)> rec = [&](int v, int budget) {
        if (v == VB) {
            process();
            return;
        }
        for (size_t i = 0; i < cand[v]->graphs.size(); ++i) {
            const Graph& P = cand[v]->graphs[i];
            if (P.ne() > budget) continue;
            chosen[v] = &P;
            chosen_aut[v] = cand[v]->aut[i];
            rec(v + 1, budget - P.ne());
        }
    };
    rec(0, m);
}

void check_mode(const Stratum& s, Mode mode) {
    if (mode == Mode::Moduli) {
        require_moduli_deco(s.deco);
        if (!s.graph.stable()) throw std::invalid_argument("moduli-mode stratum on an unstable graph");
    }
}

}  // namespace

const std::map<Key, Q>& multiply_strata(const Key& ka, const Key& kb, Mode mode, const ProductOptions& opts) {
    using K = std::tuple<Key, Key, int, int, int>;
    static std::mutex mu;
    static std::map<K, std::map<Key, Q>> cache;
    const Key& k1 = ka < kb ? ka : kb;
    const Key& k2 = ka < kb ? kb : ka;
    K key{k1, k2, mode == Mode::Pic ? 1 : 0, mode == Mode::Pic ? opts.degree_bound : 0, opts.max_codim};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Stratum A = decode_key(k1), B = decode_key(k2);
    check_mode(A, mode);
    check_mode(B, mode);
    if (A.graph.ne() > B.graph.ne()) std::swap(A, B);
    std::map<Key, Q> out;
    const int g = B.graph.total_genus(), n = B.graph.nl();
    int cap = mode == Mode::Moduli ? 3 * g - 3 + n : -1;
    if (opts.max_codim >= 0) cap = cap < 0 ? opts.max_codim : std::min(cap, opts.max_codim);
    if (cap < 0 || A.codim() + B.codim() <= cap) {
        for_each_generic(A, B, mode, opts.degree_bound, [&](const Assembly& as, const DecoSum& sum, const Q& w) {
            for (auto& [d, c] : sum) {
                Key k = canonical_key(Stratum(as.G, d));
                auto [it, fresh] = out.emplace(k, c * w);
                if (!fresh) {
                    it->second += c * w;
                    if (it->second == 0) out.erase(it);
                }
            }
        });
    }
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(key, std::move(out)).first->second;
}

namespace {

template <class R>
TautClass<R> multiply_impl(const TautClass<R>& x, const TautClass<R>& y, const ProductOptions& opts) {
    x.require_same_space(y);
    TautClass<R> out(x.g, x.n, x.d, x.mode);
    for (auto& [ka, ca] : x.terms)
        for (auto& [kb, cb] : y.terms) {
            R cc = ca * cb;
            for (auto& [k, c] : multiply_strata(ka, kb, x.mode, opts)) out.add_key(k, cc * c);
        }
    return out;
}

}  // namespace

QClass multiply(const QClass& x, const QClass& y, const ProductOptions& opts) { return multiply_impl(x, y, opts); }
PolyClass multiply(const PolyClass& x, const PolyClass& y, const ProductOptions& opts) {
    return multiply_impl(x, y, opts);
}

Q pair(const QClass& x, const QClass& y) { return integrate(multiply(x, y)); }

QClass power(const QClass& x, int k, const ProductOptions& opts) {
    QClass out = QClass::unit(x.g, x.n, x.d, x.mode);
    for (int i = 0; i < k; ++i) out = multiply(out, x, opts);
    return out;
}

QClass exp_truncated(const QClass& x, int max_codim, const ProductOptions& opts) {
    for (auto& [k, c] : x.terms)
        if (QClass::key_codim(k) == 0) throw std::invalid_argument("exp_truncated: argument has a codimension 0 part");
    ProductOptions o = opts;
    o.max_codim = max_codim;
    QClass out = QClass::unit(x.g, x.n, x.d, x.mode);
    QClass term = out;
    for (int k = 1; k <= max_codim; ++k) {
        term = multiply(term, x, o).scaled(Q(1, k));
        if (term.is_zero()) break;
        out += term;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gluing pullback

GluingPullback pullback_gluing(const QClass& x, const Graph& gamma) {
    if (x.mode != Mode::Moduli) throw std::invalid_argument("pullback_gluing needs a moduli-mode class");
    if (!gamma.stable() || gamma.total_genus() != x.g || gamma.nl() != x.n)
        throw std::invalid_argument("pullback_gluing: graph is not a stable graph of the class type");
    GluingPullback out;
    Stratum B(gamma);
    for (auto& [ka, ca] : x.terms) {
        Stratum A = decode_key(ka);
        check_mode(A, Mode::Moduli);
        for_each_generic(A, B, Mode::Moduli, 0, [&](const Assembly& as, const DecoSum& sum, const Q& w) {
            for (auto& [d, c] : sum) {
                std::vector<Key> keys;
                for (int v = 0; v < gamma.nv(); ++v) {
                    const Graph& P = *as.parts[v];
                    Decoration pd = Decoration::zero(P);
                    for (int h = 0; h < P.nh(); ++h) pd.psi[h] = d.psi[as.hmap[v][h]];
                    for (int x2 = 0; x2 < P.nv(); ++x2) pd.vmono[x2] = d.vmono[as.vmap[v][x2]];
                    keys.push_back(canonical_key(Stratum(P, pd)));
                }
                Q val = ca * c * w;
                auto [it, fresh] = out.emplace(keys, val);
                if (!fresh) {
                    it->second += val;
                    if (it->second == 0) out.erase(it);
                }
            }
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forgetful maps

namespace {

// Copy of G with a new last leg at v; half-edge h of G becomes h or h+1.
Graph add_leg(const Graph& G, int v) {
    Graph H = G;
    H.legs.push_back(v);
    return H;
}

int shift_half(const Graph& G, int h) { return h < G.nl() ? h : h + 1; }

}  // namespace

Decoration deco_with_new_leg(const Decoration& d, const Graph& G, const Graph& H) {
    Decoration out = Decoration::zero(H);
    for (int h = 0; h < G.nh(); ++h) out.psi[shift_half(G, h)] = d.psi[h];
    for (int i = 0; i < G.nl(); ++i) out.xi[i] = d.xi[i];
    out.exi = d.exi;
    out.vmono = d.vmono;
    return out;
}

QClass pullback_forgetful(const QClass& x) {
    if (x.mode != Mode::Moduli) throw std::invalid_argument("pullback_forgetful needs a moduli-mode class");
    QClass out(x.g, x.n + 1, x.d, x.mode);
    const int nn = x.n;  // index of the new leg
    for (auto& [k, c] : x.terms) {
        Stratum s = decode_key(k);
        require_moduli_deco(s.deco);
        const Graph& G = s.graph;
        auto at = G.half_edges_at();
        for (int v = 0; v < G.nv(); ++v) {
            Graph H = add_leg(G, v);
            Decoration base = deco_with_new_leg(s.deco, G, H);
            // main term: kappa_a -> kappa_a - psi_{n+1}^a
            auto kap = kappa_list(s.deco.vmono[v]);
            const int m = static_cast<int>(kap.size());
            for (int mask = 0; mask < (1 << m); ++mask) {
                Decoration d = base;
                d.vmono[v].clear();
                int sign = 1;
                for (int j = 0; j < m; ++j) {
                    if ((mask >> j) & 1) {
                        d.psi[nn] += kap[j];
                        sign = -sign;
                    } else {
                        d.vmono[v].push_back({kap[j] + 1, 0});
                    }
                }
                std::sort(d.vmono[v].begin(), d.vmono[v].end());
                out.add_term(Stratum(H, d), c * sign);
            }
            // correction terms: psi_h^e -> -D_h[psi^{e-1}], h and n+1 on a bubble
            for (int h : at[v]) {
                int e = s.deco.psi[h];
                if (e == 0) continue;
                Graph K = G;
                K.genus.push_back(0);
                K.degree.push_back(0);
                const int w = K.nv() - 1;
                if (h < G.nl()) {
                    K.legs[h] = w;
                } else {
                    int ed = G.he_edge(h);
                    K.edges[ed][(h - G.nl()) % 2] = w;
                }
                K.legs.push_back(w);
                K.edges.push_back({v, w});
                Decoration d = Decoration::zero(K);
                for (int h2 = 0; h2 < G.nh(); ++h2) d.psi[shift_half(G, h2)] = s.deco.psi[h2];
                d.psi[shift_half(G, h)] = 0;
                d.psi[K.edge_half(K.ne() - 1, 0)] = e - 1;
                for (int u = 0; u < G.nv(); ++u) d.vmono[u] = s.deco.vmono[u];
                out.add_term(Stratum(K, d), -c);
            }
        }
    }
    return out;
}

QClass pushforward_forgetful(const QClass& x) {
    if (x.mode != Mode::Moduli) throw std::invalid_argument("pushforward_forgetful needs a moduli-mode class");
    if (x.n < 1) throw std::invalid_argument("pushforward_forgetful: no marking to forget");
    const int nn = x.n - 1;  // leg being forgotten
    if (!stable_type(x.g, nn)) throw std::invalid_argument("pushforward_forgetful: target space is unstable");
    QClass out(x.g, nn, x.d, x.mode);
    for (auto& [k, c] : x.terms) {
        Stratum s = decode_key(k);
        require_moduli_deco(s.deco);
        const Graph& G = s.graph;
        const int v = G.legs[nn];
        auto at = G.half_edges_at();
        // graph without the leg
        Graph H = G;
        H.legs.pop_back();
        auto unshift = [&](int h) { return h < nn ? h : h - 1; };
        Decoration base = Decoration::zero(H);
        for (int h = 0; h < G.nh(); ++h)
            if (h != nn) base.psi[unshift(h)] = s.deco.psi[h];
        base.vmono = s.deco.vmono;
        const int mexp = s.deco.psi[nn];
        const int val_after = static_cast<int>(at[v].size()) - 1;
        if (stable_type(G.genus[v], val_after)) {
            auto kap = kappa_list(s.deco.vmono[v]);
            const int m = static_cast<int>(kap.size());
            const Q kappa0 = 2 * G.genus[v] - 2 + val_after;
            auto emit = [&](Decoration d, const std::vector<int>& keep, int new_kappa, const Q& coeff) {
                d.vmono[v].clear();
                for (int b : keep) d.vmono[v].push_back({b + 1, 0});
                Q cc = coeff;
                if (new_kappa == 0)
                    cc *= kappa0;
                else if (new_kappa > 0)
                    d.vmono[v].push_back({new_kappa + 1, 0});
                std::sort(d.vmono[v].begin(), d.vmono[v].end());
                out.add_term(Stratum(H, d), cc);
            };
            for (int mask = 0; mask < (1 << m); ++mask) {
                std::vector<int> keep;
                int sumT = 0;
                for (int j = 0; j < m; ++j) {
                    if ((mask >> j) & 1)
                        sumT += kap[j];
                    else
                        keep.push_back(kap[j]);
                }
                if (mexp + sumT >= 1) {
                    emit(base, keep, mexp + sumT - 1, c);
                } else {
                    // no psi_{n+1} and no kappa moved: string equation
                    for (int h : at[v]) {
                        if (h == nn || s.deco.psi[h] == 0) continue;
                        Decoration d = base;
                        --d.psi[unshift(h)];
                        emit(d, keep, -1, c);
                    }
                }
            }
            continue;
        }
        // v is a genus 0 vertex with exactly two other half-edges: contract it
        bool trivial_here = mexp == 0 && s.deco.vmono[v].empty();
        for (int h : at[v]) trivial_here = trivial_here && s.deco.psi[h] == 0;
        if (!trivial_here) continue;
        std::vector<int> others;
        for (int h : at[v])
            if (h != nn) others.push_back(h);
        if (others.size() != 2) throw std::logic_error("pushforward_forgetful: unexpected unstable vertex");
        const int h1 = others[0], h2 = others[1];
        Graph K;
        std::vector<int> vnew(G.nv(), -1);
        for (int u = 0; u < G.nv(); ++u)
            if (u != v) {
                vnew[u] = K.nv();
                K.genus.push_back(G.genus[u]);
                K.degree.push_back(G.degree[u]);
            }
        // map old half-edges (other than h1, h2, nn and their replaced partners) to new ones
        std::vector<int> psi_new;
        K.legs.resize(nn);
        std::vector<int> leg_psi(nn, 0);
        std::vector<std::array<int, 2>> edges;
        std::vector<std::array<int, 2>> edge_psi;
        if (h1 < G.nl() && h2 < G.nl()) throw std::logic_error("pushforward_forgetful: (0,3) target");
        if (h1 < G.nl() || h2 < G.nl()) {
            int leg = h1 < G.nl() ? h1 : h2;
            int eh = h1 < G.nl() ? h2 : h1;
            int p = G.he_partner(eh);
            for (int i = 0; i < nn; ++i) {
                if (i == leg) {
                    K.legs[i] = vnew[G.he_vertex(p)];
                    leg_psi[i] = s.deco.psi[p];
                } else {
                    K.legs[i] = vnew[G.legs[i]];
                    leg_psi[i] = s.deco.psi[i];
                }
            }
            for (int e = 0; e < G.ne(); ++e) {
                if (e == G.he_edge(eh)) continue;
                edges.push_back({vnew[G.edges[e][0]], vnew[G.edges[e][1]]});
                edge_psi.push_back({s.deco.psi[G.edge_half(e, 0)], s.deco.psi[G.edge_half(e, 1)]});
            }
        } else {
            int e1 = G.he_edge(h1), e2 = G.he_edge(h2);
            int p1 = G.he_partner(h1), p2 = G.he_partner(h2);
            for (int i = 0; i < nn; ++i) {
                K.legs[i] = vnew[G.legs[i]];
                leg_psi[i] = s.deco.psi[i];
            }
            for (int e = 0; e < G.ne(); ++e) {
                if (e == e1 || e == e2) continue;
                edges.push_back({vnew[G.edges[e][0]], vnew[G.edges[e][1]]});
                edge_psi.push_back({s.deco.psi[G.edge_half(e, 0)], s.deco.psi[G.edge_half(e, 1)]});
            }
            edges.push_back({vnew[G.he_vertex(p1)], vnew[G.he_vertex(p2)]});
            edge_psi.push_back({s.deco.psi[p1], s.deco.psi[p2]});
        }
        K.edges = edges;
        Decoration d = Decoration::zero(K);
        for (int i = 0; i < nn; ++i) d.psi[i] = leg_psi[i];
        for (int e = 0; e < K.ne(); ++e) {
            d.psi[K.edge_half(e, 0)] = edge_psi[e][0];
            d.psi[K.edge_half(e, 1)] = edge_psi[e][1];
        }
        for (int u = 0; u < G.nv(); ++u)
            if (u != v) d.vmono[vnew[u]] = s.deco.vmono[u];
        out.add_term(Stratum(K, d), c);
    }
    return out;
}

template <class R>
TautClass<R> pic_append_marking(const TautClass<R>& x) {
    TautClass<R> out(x.g, x.n + 1, x.d, x.mode);
    for (auto& [k, c] : x.terms) {
        Stratum s = decode_key(k);
        for (int v = 0; v < s.graph.nv(); ++v) {
            Graph H = add_leg(s.graph, v);
            out.add_term(Stratum(H, deco_with_new_leg(s.deco, s.graph, H)), c);
        }
    }
    return out;
}

template QClass pic_append_marking(const QClass&);
template PolyClass pic_append_marking(const PolyClass&);

}  // namespace drc
