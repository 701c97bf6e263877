#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "drcycle/graph.hpp"
#include "drcycle/rpoly.hpp"

namespace drc {

// Pic: formal classes on the Picard stack, graphs carry multidegrees and
// decorations may use xi and eta_{a,b}. Moduli: classes on M_{g,n}bar,
// stable graphs, psi and kappa only.
enum class Mode { Pic, Moduli };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

// A stored coefficient c on key K stands for c * j_{Gamma*}[gamma], where
// (Gamma, gamma) = decode_key(K) and j is the gluing map. Any 1/|Aut|
// weight is therefore already part of c.
template <class R>
class TautClass {
public:
    int g = 0, n = 0, d = 0;
    Mode mode = Mode::Moduli;
    std::map<Key, R> terms;

    TautClass() = default;
    TautClass(int g_, int n_, int d_, Mode m) : g(g_), n(n_), d(d_), mode(m) {}

    static TautClass unit(int g, int n, int d, Mode m) {
        TautClass c(g, n, d, m);
        Graph G({g}, {}, std::vector<int>(n, 0), {m == Mode::Pic ? d : 0});
        c.add_term(Stratum(G), R(1));
        return c;
    }

    bool same_space(const TautClass& o) const { return g == o.g && n == o.n && d == o.d && mode == o.mode; }
    void require_same_space(const TautClass& o) const {
        if (!same_space(o)) throw std::invalid_argument("tautological classes live on different spaces");
    }

    void add_term(const Stratum& s, const R& c) { add_key(canonical_key(s), c); }
    void add_key(const Key& k, const R& c) {
        if (drc::is_zero(c)) return;
        auto [it, fresh] = terms.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (drc::is_zero(it->second)) terms.erase(it);
        }
    }

    TautClass& add(const TautClass& o, const R& s) {
        require_same_space(o);
        for (auto& [k, c] : o.terms) add_key(k, c * s);
        return *this;
    }
    TautClass& operator+=(const TautClass& o) { return add(o, R(1)); }
    TautClass& operator-=(const TautClass& o) { return add(o, R(-1)); }
    friend TautClass operator+(TautClass a, const TautClass& b) { return a += b; }
    friend TautClass operator-(TautClass a, const TautClass& b) { return a -= b; }

    TautClass scaled(const R& s) const {
        TautClass out(g, n, d, mode);
        for (auto& [k, c] : terms) out.add_key(k, c * s);
        return out;
    }

    TautClass grade(int c) const {
        TautClass out(g, n, d, mode);
        for (auto& [k, v] : terms)
            if (key_codim(k) == c) out.terms.emplace(k, v);
        return out;
    }

    bool is_zero() const { return terms.empty(); }
    size_t size() const { return terms.size(); }
    bool operator==(const TautClass& o) const { return same_space(o) && terms == o.terms; }
    bool operator!=(const TautClass& o) const { return !(*this == o); }

    static int key_codim(const Key& k) { return decode_key(k).codim(); }
};

using QClass = TautClass<Q>;
using PolyClass = TautClass<RPoly>;

QClass substitute_r(const PolyClass& x, const Q& r0);
QClass constant_term(const PolyClass& x);
PolyClass to_poly(const QClass& x);

// Restriction to terms whose graph is a tree.
template <class R>
TautClass<R> trees_only(const TautClass<R>& x) {
    TautClass<R> out(x.g, x.n, x.d, x.mode);
    for (auto& [k, c] : x.terms)
        if (decode_key(k).graph.is_tree()) out.terms.emplace(k, c);
    return out;
}

json class_to_json(const QClass& x);
json class_to_json(const PolyClass& x);
QClass qclass_from_json(const json& j);
PolyClass polyclass_from_json(const json& j);

json coeff_to_json(const Q& c);
json coeff_to_json(const RPoly& c);

}  // namespace drc
