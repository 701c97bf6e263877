#pragma once

#include <string>
#include <vector>

#include "drcycle/pixton.hpp"

namespace drc {

enum class Verdict { Pass, Fail, Inconclusive };

std::string verdict_name(Verdict v);  // "pass", "fail", "inconclusive-truncated"

struct CheckReport {
    std::string name;
    json params;
    Verdict verdict = Verdict::Fail;
    json witness;  // first offending term or pairing; null on pass
    json details;
    json to_json() const;
};

// Shared parameter block. Fields unused by a check are ignored; JSON keys
// match the field names (A and shift as integer arrays).
struct CheckParams {
    int g = 0;
    std::vector<int> A;
    int d = 0;
    bool d_given = false;  // otherwise d = sum A
    int k = 0;
    bool k_given = false;  // vanishing: otherwise derived from A
    int c = 0;
    Variant variant = Variant::Pic;
    int max_edges = -1;
    int bound = -1;
    SampleSpec samples;
    std::string which;        // invariance: I .. VI
    std::vector<int> shift;   // invariance III
    bool perturb = false;     // sensitivity control: +1 on one stratum

    static CheckParams from_json(const json& j);
    json to_json() const;
};

CheckReport check_polynomiality(const CheckParams& p);
CheckReport check_vanishing(const CheckParams& p);
CheckReport check_invariance(const CheckParams& p);
CheckReport check_compact_type(const CheckParams& p);
CheckReport check_factorization(const CheckParams& p);
CheckReport check_conjectureA(const CheckParams& p);

// Dispatch by name: polynomiality, vanishing, invariance, compact_type,
// factorization, conjectureA.
CheckReport run_check(const std::string& name, const CheckParams& p);
const std::vector<std::string>& check_names();

struct CheckJob {
    std::string name;
    CheckParams params;
};

// Runs jobs on the worker pool; reports come back in job order.
std::vector<CheckReport> run_checks(const std::vector<CheckJob>& jobs);

std::string report_table(const std::vector<CheckReport>& reports);

// Tools shared with the tests.
// epsilon: delta -> -delta, xi -> -xi, eta_{a,b} -> (-1)^b eta_{a,b}.
template <class R>
TautClass<R> dualize(const TautClass<R>& x);
// Pullback under L -> L(-sum b_i x_i); only eta = eta_{0,2} may occur on vertices.
template <class R>
TautClass<R> twist_pullback(const TautClass<R>& x, const std::vector<int>& b);
// Coefficients of beta^j (j >= 1) after xi_i -> xi_i + beta and
// eta(v) -> eta(v) + 2 beta delta(v); empty when the class is invariant.
template <class R>
std::map<int, TautClass<R>> base_twist_defect(const TautClass<R>& x);

// Stable graphs of (g, n) with decorations of total codimension m
// (psi on half-edges, kappa monomials on vertices), canonical and deduplicated.
std::vector<Stratum> decorated_strata(int g, int n, int m);

}  // namespace drc
