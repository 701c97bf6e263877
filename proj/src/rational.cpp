#include "drcycle/rational.hpp"

#include <stdexcept>

namespace drc {

std::string to_string(const Q& x) {
    Q y = x;
    y.canonicalize();
    return y.get_num().get_str() + "/" + y.get_den().get_str();
}

Q parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    Q out;
    if (out.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (out.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    out.canonicalize();
    return out;
}

Q factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative");
    Z f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Q(f);
}

Q binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return Q(0);
    Z b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Q(b);
}

Q power(const Q& x, int e) {
    if (e < 0) {
        if (is_zero(x)) throw std::domain_error("0 to negative power");
        return power(Q(1) / x, -e);
    }
    Z num, den;
    mpz_pow_ui(num.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(e));
    return Q(num, den);
}

Z ipow(const Z& x, int e) {
    Z out;
    mpz_pow_ui(out.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(e));
    return out;
}

Q multinomial(const std::vector<int>& ks) {
    int n = 0;
    Q den = 1;
    for (int k : ks) {
        n += k;
        den *= factorial(k);
    }
    return factorial(n) / den;
}

}  // namespace drc
