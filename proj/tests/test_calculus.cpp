#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "drcycle/calculus.hpp"
#include "drcycle/enumerate.hpp"
#include "oracles.hpp"

using namespace drc;

namespace {

IntegralTable& T() { return IntegralTable::global(); }

Stratum trivial(int g, int n) { return Stratum(Graph({g}, {}, std::vector<int>(n, 0))); }

QClass one(const Stratum& s, const Q& c = 1) {
    QClass x(s.graph.total_genus(), s.graph.nl(), 0, Mode::Moduli);
    x.add_term(s, c);
    return x;
}

QClass psi_class(int g, int n, std::vector<int> e) {
    Stratum s = trivial(g, n);
    for (int i = 0; i < n; ++i) s.deco.psi[i] = e[i];
    return one(s);
}

QClass kappa_class(int g, int n, int m) {
    Stratum s = trivial(g, n);
    s.deco.vmono[0] = {{m + 1, 0}};
    return one(s);
}

// Separating divisor with genus split (g1, g-g1) and legs S on the first side.
QClass sep_divisor(int g, int n, int g1, const std::vector<int>& S) {
    std::vector<int> legs(n, 1);
    for (int i : S) legs[i] = 0;
    return one(Stratum(Graph({g1, g - g1}, {{0, 1}}, legs)));
}

// Irreducible divisor as a class: half the pushforward from the loop graph.
QClass irr_divisor(int g, int n) { return one(Stratum(Graph({g - 1}, {{0, 0}}, std::vector<int>(n, 0))), Q(1, 2)); }

QClass random_class(int g, int n, int codim, std::mt19937& rng) {
    QClass x(g, n, 0, Mode::Moduli);
    for (auto& G : enumerate_graphs(g, n, codim, {.stable_only = true})) {
        if (G.ne() > codim) continue;
        Stratum s(G);
        int left = codim - G.ne();
        auto at = G.half_edges_at();
        while (left > 0) {
            int v = static_cast<int>(rng() % G.nv());
            if (rng() % 3 == 0) {
                mono_multiply(s.deco.vmono[v], {{2, 0}});
            } else {
                s.deco.psi[at[v][rng() % at[v].size()]]++;
            }
            --left;
        }
        x.add_term(s, Q(static_cast<long>(rng() % 7) - 3) / (1 + static_cast<long>(rng() % 3)));
    }
    return x;
}

}  // namespace

TEST_CASE("Witten-Kontsevich values") {
    CHECK(T().psi(1, {1}) == oracle::wk_tau1_g1());
    CHECK(T().psi(2, {4}) == oracle::wk_tau4_g2());
    CHECK(T().psi(2, {2, 3}) == oracle::wk_tau2tau3_g2());
    CHECK(T().psi(2, {2, 2, 2}) == oracle::wk_tau2cubed_g2());
    CHECK(T().psi(1, {1, 1}) == Q(1, 24));
    CHECK(T().psi(3, {7}) == Q(1, 82944));
    CHECK(T().psi(2, {3}) == 0);
    CHECK(T().psi(1, {}) == 0);
}

TEST_CASE("genus zero multinomials") {
    for (int n = 3; n <= 8; ++n) {
        std::vector<int> e(n, 0);
        // every composition of n-3 into n parts with small entries
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == n - 1) {
                e[i] = left;
                CHECK(T().psi(0, e) == oracle::genus0_psi(e));
                return;
            }
            for (int k = 0; k <= left; ++k) {
                e[i] = k;
                rec(i + 1, left - k);
            }
        };
        rec(0, n - 3);
    }
}

TEST_CASE("recursion is independent of the marking used") {
    T().psi(3, {2, 2, 2, 2});
    T().psi(2, {1, 1, 1, 1, 1});
    T().psi(4, {9});
    int checked = 0;
    for (auto& [k, v] : T().entries()) {
        int g = k.first;
        auto e = k.second;
        if (3 * g - 3 + static_cast<int>(e.size()) > 9) continue;
        for (size_t m = 0; m < e.size(); ++m) {
            CHECK(T().psi_via(g, e, static_cast<int>(m)) == v);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("kappa integrals") {
    CHECK(T().psi_kappa(1, {0}, {1}) == Q(1, 24));
    CHECK(T().psi_kappa(0, {0, 0, 0, 0}, {1}) == 1);
    CHECK(T().psi_kappa(0, {0, 0, 0, 0, 0}, {1, 1}) == 5);
    CHECK(T().psi_kappa(0, {0, 0, 0, 0, 0, 0}, {1, 1, 1}) == 61);
    CHECK(T().psi_kappa(0, {0, 0, 0, 0, 0}, {2}) == 1);
    // kappa_{3g-3} on M_g equals <tau_{3g-2}>_g
    CHECK(T().psi_kappa(2, {}, {3}) == T().psi(2, {4}));
    CHECK(integrate(kappa_class(1, 1, 1)) == Q(1, 24));
}

TEST_CASE("boundary integrals") {
    CHECK(integrate(psi_class(0, 4, {1, 0, 0, 0})) == 1);
    CHECK(integrate(psi_class(1, 1, {1})) == Q(1, 24));
    CHECK(integrate(irr_divisor(1, 1)) == Q(1, 2));
    CHECK(integrate(sep_divisor(0, 4, 0, {0, 1})) == 1);
}

TEST_CASE("self-intersection of a separating divisor") {
    // D_{12} on M_{0,5}: normal bundle -psi_h - psi_h'
    auto D = sep_divisor(0, 5, 0, {0, 1});
    CHECK(pair(D, D) == -1);
    // kappa_1 restricts to the sum over the two vertices
    CHECK(pair(kappa_class(0, 5, 1), D) == 1);
    CHECK(pair(psi_class(0, 5, {1, 0, 0, 0, 0}), D) == 0);
    CHECK(pair(psi_class(0, 5, {0, 0, 1, 0, 0}), D) == 1);
}

TEST_CASE("psi_1 on M_{0,5} as a sum of boundary divisors") {
    // psi_1 = sum of D_S with 1 in S and 2, 3 outside
    QClass rel = psi_class(0, 5, {1, 0, 0, 0, 0});
    for (auto S : std::vector<std::vector<int>>{{0, 3}, {0, 4}, {0, 3, 4}}) rel -= sep_divisor(0, 5, 0, S);
    std::vector<QClass> tests{psi_class(0, 5, {1, 0, 0, 0, 0}), psi_class(0, 5, {0, 0, 0, 0, 1}),
                              kappa_class(0, 5, 1), sep_divisor(0, 5, 0, {0, 1}),
                              sep_divisor(0, 5, 0, {1, 2}), sep_divisor(0, 5, 0, {3, 4})};
    for (auto& y : tests) CHECK(pair(rel, y) == 0);
}

TEST_CASE("psi_1 on M_{1,2} in terms of boundary") {
    // psi_1 = delta_irr / 12 + delta_{0,{1,2}}
    QClass rel = psi_class(1, 2, {1, 0});
    rel -= irr_divisor(1, 2).scaled(Q(1, 12));
    rel -= sep_divisor(1, 2, 0, {0, 1});
    std::vector<QClass> tests{psi_class(1, 2, {1, 0}), psi_class(1, 2, {0, 1}), kappa_class(1, 2, 1),
                              irr_divisor(1, 2), sep_divisor(1, 2, 0, {0, 1})};
    for (auto& y : tests) CHECK(pair(rel, y) == 0);
    CHECK(pair(irr_divisor(1, 2), irr_divisor(1, 2)) == 0);
    CHECK(pair(sep_divisor(1, 2, 0, {0, 1}), sep_divisor(1, 2, 0, {0, 1})) == Q(-1, 24));
}

TEST_CASE("product is commutative and associative") {
    std::mt19937 rng(3);
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 6}, {1, 3}, {2, 1}}) {
        auto x = random_class(g, n, 1, rng);
        auto y = random_class(g, n, 1, rng);
        auto z = random_class(g, n, 1, rng);
        CHECK(multiply(x, y) == multiply(y, x));
        CHECK(multiply(multiply(x, y), z) == multiply(x, multiply(y, z)));
        auto u = QClass::unit(g, n, 0, Mode::Moduli);
        CHECK(multiply(u, x) == x);
    }
}

TEST_CASE("projection formula for the forgetful map") {
    std::mt19937 rng(11);
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 4}, {1, 1}, {1, 2}, {0, 5}}) {
        const int dim = 3 * g - 3 + n;
        for (int c = 0; c <= dim; ++c) {
            auto x = random_class(g, n, c, rng);
            auto y = random_class(g, n + 1, dim + 1 - c, rng);
            CHECK(pair(pullback_forgetful(x), y) == pair(x, pushforward_forgetful(y)));
        }
    }
}

TEST_CASE("forgetful pushforward basics") {
    // psi_{n+1}^2 pushes to kappa_1
    CHECK(pushforward_forgetful(psi_class(1, 2, {0, 2})) == kappa_class(1, 1, 1));
    // dilaton
    CHECK(pushforward_forgetful(psi_class(1, 2, {0, 1})) == QClass::unit(1, 1, 0, Mode::Moduli));
    // pullback of psi_1 corrects by the divisor D_{1,n+1}
    auto p = pullback_forgetful(psi_class(1, 1, {1}));
    auto expect = psi_class(1, 2, {1, 0}) - sep_divisor(1, 2, 0, {0, 1});
    CHECK(p == expect);
}

TEST_CASE("gluing pullback agrees with pairing") {
    std::mt19937 rng(23);
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 5}, {1, 2}, {1, 3}, {2, 1}}) {
        const int dim = 3 * g - 3 + n;
        for (auto& G : enumerate_graphs(g, n, dim, {.stable_only = true})) {
            auto x = random_class(g, n, dim - G.ne(), rng);
            auto pb = pullback_gluing(x, G);
            auto at = G.half_edges_at();
            Q total = 0;
            for (auto& [keys, c] : pb) {
                Q prod = c;
                for (auto& k : keys) prod *= integrate_stratum(decode_key(k));
                total += prod;
            }
            CHECK(total == pair(x, one(Stratum(G))));
        }
    }
}

TEST_CASE("exp and power") {
    auto D = sep_divisor(0, 5, 0, {0, 1});
    auto e = exp_truncated(D, 2);
    CHECK(e.grade(0) == QClass::unit(0, 5, 0, Mode::Moduli));
    CHECK(e.grade(1) == D);
    CHECK(integrate(e) == Q(-1, 2));
    CHECK(integrate(power(D, 2)) == -1);
    CHECK_THROWS(exp_truncated(QClass::unit(0, 5, 0, Mode::Moduli), 2));
}

TEST_CASE("pic products keep the degree") {
    QClass x(1, 1, 0, Mode::Pic);
    Stratum s(Graph({1}, {}, {0}, {0}));
    s.deco.xi[0] = 1;
    x.add_term(s, 1);
    Stratum t(Graph({0}, {{0, 0}}, {0}, {0}));
    QClass y(1, 1, 0, Mode::Pic);
    y.add_term(t, 1);
    ProductOptions o{.degree_bound = 1};
    auto p = multiply(x, y, o);
    CHECK(p == multiply(y, x, o));
    for (auto& [k, c] : p.terms) CHECK(decode_key(k).graph.total_degree() == 0);
    CHECK_THROWS(integrate(p));
    CHECK(pic_append_marking(x).n == 2);
}

TEST_CASE("moduli mode rejects pic symbols") {
    Stratum s = trivial(1, 1);
    s.deco.xi[0] = 1;
    QClass x(1, 1, 0, Mode::Moduli);
    x.terms[canonical_key(s)] = 1;
    CHECK_THROWS(integrate(x));
}
