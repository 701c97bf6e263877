#pragma once

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "drcycle/calculus.hpp"
#include "drcycle/tautclass.hpp"

namespace drc {

// Which graph sum to assemble.
//   Pic:     formal class on the Picard stack, prestable graphs with
//            multidegree, decorations psi, xi, eta.
//   Moduli:  the sum pulled back along L = omega^k on M_{g,n}bar: stable
//            graphs with the k-canonical multidegree, psi and kappa only.
//   Target:  formal class for L twisted by omega_log^k; graph degrees are
//            the target degrees beta(v), vertex sums k(2g-2+n(v)) + beta(v).
enum class Variant { Pic, Moduli, Target };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

struct PixtonRequest {
    int g = 0;
    int n = 0;
    std::vector<int> A;
    int d = 0;  // Pic: sum of A; Target: total target degree; Moduli: ignored
    int c = 0;
    Variant variant = Variant::Pic;
    int k = 0;
    int max_edges = -1;    // defaults to c
    int degree_bound = -1; // Pic/Target: |delta(v)| bound, defaults to max(1, |d|)
    bool allow_truncation = false;  // accept max_edges < c (checks report it)

    int edges() const { return max_edges < 0 ? c : max_edges; }
    int bound() const;
    Mode mode() const { return variant == Variant::Moduli ? Mode::Moduli : Mode::Pic; }
    // Degree recorded on the resulting class.
    int class_degree() const;
    // Throws std::invalid_argument when the data are inconsistent.
    void validate() const;
    json to_json() const;
};

PixtonRequest pixton_request_from_json(const json& j);

// Coefficients of Phi_a(x) = (1 - exp(-a x / 2)) / x up to x^order.
std::vector<Q> edge_series(const Q& a, int order);

struct SampleSpec {
    int R = -1;        // first sample; -1 selects the default base point
    int D = -1;        // degree bound; -1 selects 2c
    int holdouts = 3;  // extra samples beyond the fit range
    int perturb = 0;   // added to one value at the last sample (sensitivity control)
};

// Thrown when a fitted polynomial misses a held-out sample.
class CertificationError : public std::runtime_error {
public:
    CertificationError(const std::string& msg, json witness)
        : std::runtime_error(msg), witness_(std::move(witness)) {}
    const json& witness() const { return witness_; }

private:
    json witness_;
};

struct PolyReport {
    PolyClass cls;
    int R = 0, D = 0;
    std::vector<int> fit_points, holdout_points;
};

// Codimension c part of the graph sum at a fixed r.
QClass pixton_raw(const PixtonRequest& req, int r);

// Coefficients as certified polynomials in r.
PolyClass pixton_polynomial(const PixtonRequest& req, const SampleSpec& spec = {});
PolyReport pixton_polynomial_report(const PixtonRequest& req, const SampleSpec& spec = {});
int default_base_point(const PixtonRequest& req);

// Constant term in r.
QClass pixton_class(const PixtonRequest& req, const SampleSpec& spec = {});

// Restriction to terms whose vertex degrees all satisfy |delta(v)| <= bound.
template <class R>
TautClass<R> degree_window(const TautClass<R>& x, int bound) {
    TautClass<R> out(x.g, x.n, x.d, x.mode);
    for (auto& [k, c] : x.terms) {
        bool ok = true;
        for (int v : decode_key(k).graph.degree) ok = ok && std::abs(v) <= bound;
        if (ok) out.terms.emplace(k, c);
    }
    return out;
}

// c_A of a one-edge separating graph: -(delta_1 - sum_{i in I_1} a_i)^2.
Q separating_coefficient(const Graph& G, const std::vector<int>& A);

// 1/2 (-eta + sum (2 a_i xi_i + a_i^2 psi_i) + sum_se c_A [Gamma]) in Pic
// mode, or 1/2 (-k^2 kappa_1 + sum a~_i^2 psi_i + sum_se c_A [Gamma]) in
// moduli mode. Pic divisors are taken with |delta(v)| <= bound.
QClass exponent_divisor(const PixtonRequest& req, int bound);

// exp(exponent) times the graph sum over graphs without separating edges,
// codimension c part. Pic products use a widened window; the result is
// restricted to the request window.
PolyClass pixton_factorized(const PixtonRequest& req, const SampleSpec& spec = {});

// Replace xi, eta, degrees by their values for L = omega^k on M_{g,n}bar.
template <class R>
TautClass<R> specialize_to_moduli(const TautClass<R>& x, int k);

// DR_g(A) on M_{g,n}bar for sum a_i = k(2g-2), i.e. the Moduli variant at
// c = g (equal to 2^{-g} P_g^{g,k}(A~) with a~_i = a_i + k).
QClass dr_cycle(int g, const std::vector<int>& A, int k);

// theta^g/g! on compact type for (g, A, d) in Pic mode, where theta is the
// exponent divisor; bound is the degree window of the output.
QClass compact_type_theta(int g, const std::vector<int>& A, int d, int bound);

}  // namespace drc
