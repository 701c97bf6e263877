#pragma once

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "drcycle/tautclass.hpp"

namespace drc {

// ---------------------------------------------------------------------------
// Intersection numbers

// Memoized <tau_{e_1} ... tau_{e_n}>_g and mixed psi/kappa integrals on
// M_{g,n}bar. Pure psi values come from string, dilaton and the DVV form of
// the Virasoro recursion; kappa classes are removed by adding a marking.
class IntegralTable {
public:
    static IntegralTable& global();

    // Zero unless sum e_i = 3g - 3 + n and 2g - 2 + n > 0.
    Q psi(int g, std::vector<int> e);

    // One recursion step applied at the given marking (string if e_m = 0,
    // dilaton if e_m = 1, DVV otherwise), finishing with the table.
    Q psi_via(int g, const std::vector<int>& e, int marking);

    // int psi_1^{e_1} ... psi_n^{e_n} kappa_{b_1} ... kappa_{b_m}.
    Q psi_kappa(int g, std::vector<int> e, std::vector<int> kappa);

    int max_dim() const { return max_dim_; }
    void set_max_dim(int d) { max_dim_ = d; }

    // Snapshot of stored pure psi entries, keyed by (g, sorted exponents).
    std::map<std::pair<int, std::vector<int>>, Q> entries() const;
    json to_json() const;

private:
    Q compute(int g, const std::vector<int>& sorted_desc);
    Q step(int g, const std::vector<int>& e, int m);

    mutable std::mutex mu_;
    std::map<std::pair<int, std::vector<int>>, Q> psi_;
    std::map<std::tuple<int, std::vector<int>, std::vector<int>>, Q> kappa_;
    int max_dim_ = 12;
};

// Integral of one decorated stratum over M_{g,n}bar (moduli mode; the
// coefficient convention means no automorphism factor appears here).
Q integrate_stratum(const Stratum& s);
Q integrate(const QClass& x);

// ---------------------------------------------------------------------------
// Products

struct ProductOptions {
    // Pic mode only: |delta(v)| bound for vertices of common degenerations.
    int degree_bound = 0;
    // Drop products whose codimension would exceed this (negative: no cap).
    int max_codim = -1;
};

QClass multiply(const QClass& x, const QClass& y, const ProductOptions& opts = {});
PolyClass multiply(const PolyClass& x, const PolyClass& y, const ProductOptions& opts = {});

// Product of two decorated strata with unit coefficients (memoized).
const std::map<Key, Q>& multiply_strata(const Key& a, const Key& b, Mode mode, const ProductOptions& opts = {});

Q pair(const QClass& x, const QClass& y);

// x^k / k! truncated to codimension <= max_codim.
QClass exp_truncated(const QClass& x, int max_codim, const ProductOptions& opts = {});
QClass power(const QClass& x, int k, const ProductOptions& opts = {});

// ---------------------------------------------------------------------------
// Pullbacks and pushforwards (moduli mode)

// Pullback along the gluing map of a stable graph. Each term is a tuple of
// per-vertex keys (strata on M_{g(v),n(v)}bar, vertex legs ordered as
// Graph::half_edges_at) with a coefficient.
using GluingPullback = std::map<std::vector<Key>, Q>;
GluingPullback pullback_gluing(const QClass& x, const Graph& gamma);

// Forgetting marking n+1: M_{g,n+1} -> M_{g,n}.
QClass pullback_forgetful(const QClass& x);
QClass pushforward_forgetful(const QClass& x);

// Formal pullback under forgetting marking n+1 on the Picard stack: the
// curve and line bundle do not change, so psi, xi, eta pull back to
// themselves and a stratum becomes the sum over vertices of the stratum
// with the new leg attached there.
template <class R>
TautClass<R> pic_append_marking(const TautClass<R>& x);

// Vertex-level helpers shared with the Pixton module.
Decoration deco_with_new_leg(const Decoration& d, const Graph& old_graph, const Graph& new_graph);

}  // namespace drc
