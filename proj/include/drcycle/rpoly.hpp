#pragma once

#include <string>
#include <vector>

#include "drcycle/rational.hpp"

namespace drc {

// Univariate polynomial in r with rational coefficients, dense, trimmed.
class RPoly {
public:
    RPoly() = default;
    RPoly(const Q& c);  // NOLINT: implicit constant embedding is intended
    RPoly(int c) : RPoly(Q(c)) {}
    explicit RPoly(std::vector<Q> coeffs);

    static RPoly r();

    const std::vector<Q>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    Q coeff(int i) const;
    Q constant_term() const { return coeff(0); }
    Q eval(const Q& r) const;

    RPoly& operator+=(const RPoly& o);
    RPoly& operator-=(const RPoly& o);
    RPoly& operator*=(const RPoly& o);
    RPoly& operator*=(const Q& s);

    friend RPoly operator+(RPoly a, const RPoly& b) { return a += b; }
    friend RPoly operator-(RPoly a, const RPoly& b) { return a -= b; }
    friend RPoly operator*(RPoly a, const RPoly& b) { return a *= b; }
    friend RPoly operator*(RPoly a, const Q& s) { return a *= s; }
    friend RPoly operator*(const Q& s, RPoly a) { return a *= s; }
    RPoly operator-() const;
    bool operator==(const RPoly& o) const { return c_ == o.c_; }
    bool operator!=(const RPoly& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    void trim();
    std::vector<Q> c_;
};

inline bool is_zero(const RPoly& p) { return p.is_zero(); }

// Newton interpolation through (xs[i], ys[i]); xs pairwise distinct.
RPoly interpolate(const std::vector<Q>& xs, const std::vector<Q>& ys);

}  // namespace drc
