#include "drcycle/tautclass.hpp"

namespace drc {

std::string mode_name(Mode m) { return m == Mode::Pic ? "pic" : "moduli"; }

Mode parse_mode(const std::string& s) {
    if (s == "pic") return Mode::Pic;
    if (s == "moduli") return Mode::Moduli;
    throw std::invalid_argument("unknown mode '" + s + "' (expected pic or moduli)");
}

QClass substitute_r(const PolyClass& x, const Q& r0) {
    QClass out(x.g, x.n, x.d, x.mode);
    for (auto& [k, c] : x.terms) out.add_key(k, c.eval(r0));
    return out;
}

QClass constant_term(const PolyClass& x) { return substitute_r(x, 0); }

PolyClass to_poly(const QClass& x) {
    PolyClass out(x.g, x.n, x.d, x.mode);
    for (auto& [k, c] : x.terms) out.add_key(k, RPoly(c));
    return out;
}

json coeff_to_json(const Q& c) { return to_string(c); }

json coeff_to_json(const RPoly& c) {
    json arr = json::array();
    for (auto& q : c.coeffs()) arr.push_back(to_string(q));
    return json{{"poly", arr}};
}

namespace {

template <class R>
json to_json_impl(const TautClass<R>& x) {
    json terms = json::array();
    for (auto& [k, c] : x.terms) {
        Stratum s = decode_key(k);
        terms.push_back({{"graph", graph_to_json(s.graph)}, {"decoration", deco_to_json(s.deco)},
                         {"coeff", coeff_to_json(c)}});
    }
    return json{{"g", x.g}, {"n", x.n}, {"d", x.d}, {"mode", mode_name(x.mode)}, {"terms", terms}};
}

Q parse_q(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Q(j.get<long>());
    throw std::invalid_argument("coefficient must be a \"p/q\" string");
}

RPoly parse_poly(const json& j) {
    if (j.is_object()) {
        std::vector<Q> cs;
        for (auto& x : j.at("poly")) cs.push_back(parse_q(x));
        return RPoly(cs);
    }
    return RPoly(parse_q(j));
}

template <class R, class P>
TautClass<R> from_json_impl(const json& j, P parse) {
    const json& list = j.is_object() ? j.at("terms") : j;
    if (!list.is_array()) throw std::invalid_argument("class JSON must be a list of terms");
    TautClass<R> out;
    bool have_meta = j.is_object();
    if (have_meta) {
        out = TautClass<R>(j.at("g"), j.at("n"), j.value("d", 0), parse_mode(j.value("mode", "moduli")));
    }
    bool first = true;
    for (auto& t : list) {
        Graph G = graph_from_json(t.at("graph"));
        Decoration D = t.contains("decoration") ? deco_from_json(t.at("decoration"), G) : Decoration::zero(G);
        if (!have_meta && first) {
            bool pic = D.has_pic_symbols();
            for (int x : G.degree) pic = pic || x != 0;
            out = TautClass<R>(G.total_genus(), G.nl(), G.total_degree(), pic ? Mode::Pic : Mode::Moduli);
        }
        first = false;
        if (G.total_genus() != out.g || G.nl() != out.n || (out.mode == Mode::Pic && G.total_degree() != out.d))
            throw std::invalid_argument("class term does not match the class (g, n, d)");
        out.add_term(Stratum(G, D), parse(t.at("coeff")));
    }
    return out;
}

}  // namespace

json class_to_json(const QClass& x) { return to_json_impl(x); }
json class_to_json(const PolyClass& x) { return to_json_impl(x); }

QClass qclass_from_json(const json& j) { return from_json_impl<Q>(j, parse_q); }
PolyClass polyclass_from_json(const json& j) { return from_json_impl<RPoly>(j, parse_poly); }

}  // namespace drc
