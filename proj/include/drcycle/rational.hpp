#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace drc {

using Q = mpq_class;
using Z = mpz_class;

// Always "p/q" with q >= 1, e.g. "7/1", "-1/24".
std::string to_string(const Q& x);

// Accepts "p/q" or "p".
Q parse_rational(const std::string& s);

Q factorial(int n);
Q binomial(int n, int k);
Q power(const Q& x, int e);
Z ipow(const Z& x, int e);

inline bool is_zero(const Q& x) { return sgn(x) == 0; }

// Multinomial n! / prod k_i!, with n = sum k_i.
Q multinomial(const std::vector<int>& ks);

}  // namespace drc
