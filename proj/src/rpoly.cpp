#include "drcycle/rpoly.hpp"

#include <stdexcept>

namespace drc {

RPoly::RPoly(const Q& c) {
    if (!drc::is_zero(c)) c_.push_back(c);
}

RPoly::RPoly(std::vector<Q> coeffs) : c_(std::move(coeffs)) { trim(); }

RPoly RPoly::r() { return RPoly(std::vector<Q>{Q(0), Q(1)}); }

void RPoly::trim() {
    while (!c_.empty() && drc::is_zero(c_.back())) c_.pop_back();
}

Q RPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Q(0);
    return c_[i];
}

Q RPoly::eval(const Q& r) const {
    Q acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + *it;
    return acc;
}

RPoly& RPoly::operator+=(const RPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

RPoly& RPoly::operator-=(const RPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

RPoly& RPoly::operator*=(const RPoly& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<Q> out(c_.size() + o.c_.size() - 1);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
    c_ = std::move(out);
    trim();
    return *this;
}

RPoly& RPoly::operator*=(const Q& s) {
    if (drc::is_zero(s)) {
        c_.clear();
        return *this;
    }
    for (auto& x : c_) x *= s;
    return *this;
}

RPoly RPoly::operator-() const {
    RPoly out = *this;
    for (auto& x : out.c_) x = -x;
    return out;
}

std::string RPoly::to_string() const {
    if (c_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (drc::is_zero(c_[i])) continue;
        if (!s.empty()) s += " + ";
        s += "(" + drc::to_string(c_[i]) + ")";
        if (i == 1) s += "*r";
        if (i > 1) s += "*r^" + std::to_string(i);
    }
    return s;
}

RPoly interpolate(const std::vector<Q>& xs, const std::vector<Q>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("interpolate: size mismatch");
    const size_t n = xs.size();
    std::vector<Q> dd = ys;
    for (size_t j = 1; j < n; ++j)
        for (size_t i = n - 1; i >= j; --i) {
            Q den = xs[i] - xs[i - j];
            if (drc::is_zero(den)) throw std::invalid_argument("interpolate: repeated node");
            dd[i] = (dd[i] - dd[i - 1]) / den;
            if (i == j) break;
        }
    RPoly out;
    for (size_t k = n; k-- > 0;) {
        out *= RPoly(std::vector<Q>{-xs[k], Q(1)});
        out += RPoly(dd[k]);
    }
    return out;
}

}  // namespace drc
