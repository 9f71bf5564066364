// Copyright 2026 The relbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELBC_EXACT_HPP
#define RELBC_EXACT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace relbc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt out = 1;
    for (int i = 1; i <= k; ++i) {
        out = out * (n - k + i) / i;
    }
    return out;
}

/// Exact rational value of a finite double (every double is a dyadic rational).
inline Rational to_rational(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("to_rational: non-finite value");
    }
    int exp = 0;
    const double mant = std::frexp(v, &exp);
    // mant * 2^53 is an integer.
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational out = Rational(scaled);
    if (exp >= 0) {
        out *= Rational(BigInt(1) << exp);
    } else {
        out /= Rational(BigInt(1) << -exp);
    }
    return out;
}

inline double to_double(const Rational &r) {
    return r.convert_to<double>();
}

/// P(X ≥ k_min) for X ~ Binomial(n, p), summed exactly with p taken as its exact
/// binary value: p = a / 2^e, so each term is C(n,k) a^k (2^e − a)^(n−k) / 2^(e n).
inline Rational binomial_upper_tail(int n, double p, int k_min) {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("binomial_upper_tail: p must lie in [0, 1]");
    }
    if (k_min <= 0) {
        return 1;
    }
    if (k_min > n) {
        return 0;
    }
    const Rational pr = to_rational(p);
    const BigInt a = boost::multiprecision::numerator(pr);
    const BigInt d = boost::multiprecision::denominator(pr);
    const BigInt b = d - a;
    BigInt num = 0;
    for (int k = k_min; k <= n; ++k) {
        num += binomial(n, k) * boost::multiprecision::pow(a, static_cast<unsigned>(k)) *
               boost::multiprecision::pow(b, static_cast<unsigned>(n - k));
    }
    return Rational(num, boost::multiprecision::pow(d, static_cast<unsigned>(n)));
}

}  // namespace relbc

#endif  // RELBC_EXACT_HPP
