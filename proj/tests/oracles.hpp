#pragma once

// Brute-force reference implementations used by the tests. Nothing here
// calls the canonizer, the weighting solver or the recursion tables.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "drcycle/graph.hpp"
#include "drcycle/rational.hpp"

namespace oracle {

using drc::Graph;
using drc::Q;
using drc::Stratum;

// Lexicographically least relabeling over all vertex permutations.
inline std::vector<int> brute_form(const Graph& G) {
    const int V = G.nv();
    std::vector<int> p(V);
    std::iota(p.begin(), p.end(), 0);
    std::vector<int> best;
    do {
        std::vector<int> code;
        std::vector<int> inv(V);
        for (int v = 0; v < V; ++v) inv[p[v]] = v;
        for (int i = 0; i < V; ++i) {
            code.push_back(G.genus[inv[i]]);
            code.push_back(G.degree[inv[i]]);
        }
        for (int l : G.legs) code.push_back(p[l]);
        std::vector<std::pair<int, int>> es;
        for (auto& e : G.edges) es.push_back(std::minmax(p[e[0]], p[e[1]]));
        std::sort(es.begin(), es.end());
        for (auto& [a, b] : es) {
            code.push_back(a);
            code.push_back(b);
        }
        if (best.empty() || code < best) best = code;
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

// Connected stable graphs of genus g with n legs, one per class, found by
// listing every labeled configuration and identifying them by brute_form.
inline std::vector<Graph> brute_stable_graphs(int g, int n) {
    std::map<std::vector<int>, Graph> classes;
    const int max_e = 3 * g - 3 + n;
    for (int E = 0; E <= max_e; ++E) {
        for (int V = 1; V <= E + 1; ++V) {
            int g0 = g - (E - V + 1);
            if (g0 < 0) continue;
            std::vector<std::array<int, 2>> all_pairs;
            for (int a = 0; a < V; ++a)
                for (int b = 0; b < V; ++b) all_pairs.push_back({a, b});
            std::vector<int> eidx(E, 0);
            while (true) {
                std::vector<std::array<int, 2>> edges;
                for (int i : eidx) edges.push_back(all_pairs[i]);
                std::vector<int> gen(V, 0);
                while (true) {
                    int s = std::accumulate(gen.begin(), gen.end(), 0);
                    if (s == g0) {
                        std::vector<int> legs(n, 0);
                        while (true) {
                            Graph G(gen, edges, legs);
                            if (G.connected() && G.stable()) classes.emplace(brute_form(G), G);
                            int i = 0;
                            while (i < n && ++legs[i] == V) legs[i++] = 0;
                            if (i == n) break;
                        }
                    }
                    int i = 0;
                    while (i < V && ++gen[i] > g0) gen[i++] = 0;
                    if (i == V) break;
                }
                int i = 0;
                while (i < E && ++eidx[i] == static_cast<int>(all_pairs.size())) eidx[i++] = 0;
                if (i == E) break;
            }
        }
    }
    std::vector<Graph> out;
    for (auto& [k, G] : classes) out.push_back(G);
    return out;
}

// |Aut| as the number of half-edge permutations fixing legs, commuting with
// the involution and preserving genus, degree and all decorations.
inline std::int64_t brute_aut(const Stratum& s) {
    const Graph& G = s.graph;
    const auto& d = s.deco;
    const int V = G.nv(), E = G.ne(), n = G.nl();
    std::vector<int> sigma(V);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::int64_t count = 0;
    do {
        bool ok = true;
        for (int v = 0; v < V && ok; ++v)
            ok = G.genus[v] == G.genus[sigma[v]] && G.degree[v] == G.degree[sigma[v]] &&
                 d.vmono[v] == d.vmono[sigma[v]];
        for (int i = 0; i < n && ok; ++i) ok = sigma[G.legs[i]] == G.legs[i];
        if (!ok) continue;
        std::vector<int> pi(E);
        std::iota(pi.begin(), pi.end(), 0);
        do {
            for (int mask = 0; mask < (1 << E); ++mask) {
                bool good = true;
                for (int e = 0; e < E && good; ++e) {
                    int f = pi[e];
                    int flip = (mask >> e) & 1;
                    for (int side = 0; side < 2 && good; ++side) {
                        int h = G.edge_half(e, side), h2 = G.edge_half(f, side ^ flip);
                        good = sigma[G.he_vertex(h)] == G.he_vertex(h2) && d.psi[h] == d.psi[h2];
                    }
                    good = good && d.exi[e] == d.exi[f];
                }
                if (good) ++count;
            }
        } while (std::next_permutation(pi.begin(), pi.end()));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return count;
}

// Strict cycle: directed cycle along half-edges h (from v(h) to v(h'))
// with I(h) >= 0, at least one of them positive. Decided by reachability.
inline bool has_strict_cycle(const Graph& G, const std::vector<int>& I) {
    const int V = G.nv();
    std::vector<std::vector<int>> adj(V);
    for (int h = G.nl(); h < G.nh(); ++h)
        if (I[h] >= 0) adj[G.he_vertex(h)].push_back(G.he_vertex(G.he_partner(h)));
    auto reach = [&](int from, int to) {
        std::vector<char> seen(V, 0);
        std::vector<int> st{from};
        seen[from] = 1;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            if (x == to) return true;
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    st.push_back(y);
                }
        }
        return false;
    };
    for (int h = G.nl(); h < G.nh(); ++h)
        if (I[h] > 0 && reach(G.he_vertex(G.he_partner(h)), G.he_vertex(h))) return true;
    return false;
}

// All integer twists with |I| <= bound on edges and no strict cycle.
inline std::vector<std::vector<int>> brute_twists(const Graph& G, const std::vector<int>& A, int bound) {
    const int E = G.ne(), n = G.nl();
    std::vector<std::vector<int>> out;
    std::vector<int> x(E, -bound);
    while (true) {
        std::vector<int> I(G.nh());
        for (int i = 0; i < n; ++i) I[i] = A[i];
        for (int e = 0; e < E; ++e) {
            I[G.edge_half(e, 0)] = x[e];
            I[G.edge_half(e, 1)] = -x[e];
        }
        std::vector<int> sum(G.nv(), 0);
        for (int h = 0; h < G.nh(); ++h) sum[G.he_vertex(h)] += I[h];
        if (sum == G.degree && !has_strict_cycle(G, I)) out.push_back(I);
        int i = 0;
        while (i < E && ++x[i] > bound) x[i++] = -bound;
        if (i == E) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Weightings mod r by exhausting all values on edge half-edges.
inline std::vector<std::vector<int>> brute_weightings(const Graph& G, const std::vector<int>& A,
                                                      const std::vector<long long>& target, int r) {
    const int E = G.ne(), n = G.nl();
    std::vector<std::vector<int>> out;
    std::vector<int> x(2 * E, 0);
    auto md = [r](long long v) { return static_cast<int>(((v % r) + r) % r); };
    while (true) {
        std::vector<int> w(G.nh());
        for (int i = 0; i < n; ++i) w[i] = md(A[i]);
        for (int j = 0; j < 2 * E; ++j) w[n + j] = x[j];
        bool ok = true;
        for (int e = 0; e < E && ok; ++e) ok = md(w[G.edge_half(e, 0)] + w[G.edge_half(e, 1)]) == 0;
        if (ok) {
            std::vector<long long> sum(G.nv(), 0);
            for (int h = 0; h < G.nh(); ++h) sum[G.he_vertex(h)] += w[h];
            for (int v = 0; v < G.nv() && ok; ++v) ok = md(sum[v] - target[v]) == 0;
        }
        if (ok) out.push_back(w);
        int i = 0;
        while (i < 2 * E && ++x[i] == r) x[i++] = 0;
        if (i == 2 * E) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Genus-0 psi integrals: <tau_{k_1} ... tau_{k_n}>_0 = (n-3)! / prod k_i!.
inline Q genus0_psi(const std::vector<int>& k) {
    int n = static_cast<int>(k.size());
    int s = std::accumulate(k.begin(), k.end(), 0);
    if (n < 3 || s != n - 3) return 0;
    Q out = drc::factorial(n - 3);
    for (int x : k) out /= drc::factorial(x);
    return out;
}

// Witten-Kontsevich values from the literature.
inline Q wk_tau1_g1() { return Q(1, 24); }
inline Q wk_tau4_g2() { return Q(1, 1152); }
inline Q wk_tau2tau3_g2() { return Q(29, 5760); }
inline Q wk_tau2cubed_g2() { return Q(7, 240); }

// int over M_{1,2} of DR_1(a,-a) psi_1, from DR = a^2/2 (psi_1 + psi_2) - lambda_1
// and int psi_1^2 = int psi_1 psi_2 = int lambda_1 psi_1 = 1/24.
inline Q dr_psi_g1(int a) { return Q(a * a - 1) / 24; }

// int DR_g(A) psi_1^{2g-3+n} = [z^{2g}] prod_{i>=2} S(a_i z) / S(z), with
// S(z) = sinh(z/2)/(z/2). Series are kept in even powers only.
inline Q dr_top_psi(int g, const std::vector<int>& A) {
    auto S = [&](const Q& a) {
        std::vector<Q> c(g + 1);
        for (int j = 0; j <= g; ++j) c[j] = drc::power(a * a / 4, j) / drc::factorial(2 * j + 1);
        return c;
    };
    auto mul = [&](const std::vector<Q>& x, const std::vector<Q>& y) {
        std::vector<Q> z(g + 1, 0);
        for (int i = 0; i <= g; ++i)
            for (int j = 0; i + j <= g; ++j) z[i + j] += x[i] * y[j];
        return z;
    };
    std::vector<Q> num(g + 1, 0);
    num[0] = 1;
    for (size_t i = 1; i < A.size(); ++i) num = mul(num, S(Q(A[i])));
    // 1/S(z) by inversion of the leading-1 series
    std::vector<Q> s = S(Q(1)), inv(g + 1, 0);
    inv[0] = 1;
    for (int j = 1; j <= g; ++j)
        for (int i = 1; i <= j; ++i) inv[j] -= s[i] * inv[j - i];
    return mul(num, inv)[g];
}

}  // namespace oracle
