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

#ifndef RELBC_BOUNDS_HPP
#define RELBC_BOUNDS_HPP

// Closed-form security bounds and their spectral / combinatorial checks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relbc/exact.hpp"
#include "relbc/projectors.hpp"
#include "relbc/spectral.hpp"

namespace relbc {

enum class Variant { ETBC, ETRBC };

inline const char *to_string(Variant v) {
    return v == Variant::ETBC ? "ETBC" : "ETRBC";
}

/// Largest N for which dense spectral checks are run (8^N-dimensional spaces).
inline constexpr int kMaxSpectralN = 4;
inline constexpr int kMaxThresholdSpectralN = 4;

/// Sum-binding bound for ETBC: 1 + 2^(−N+1) + 2^(−2N).
inline double etbc_paper_bound(int n) {
    if (n < 1) {
        throw std::invalid_argument("etbc_paper_bound: N must be at least 1");
    }
    return 1 + std::ldexp(1.0, -n + 1) + std::ldexp(1.0, -2 * n);
}

inline void require_spectral_range(int n, int max_n, const char *what) {
    if (n < 1 || n > max_n) {
        throw std::out_of_range(std::string(what) + ": N = " + std::to_string(n) + " outside the tractable range [1, " +
                                std::to_string(max_n) + "]");
    }
}

/// λ_max(P_0 + P_1): the largest p_0 + p_1 any state handed to Bob can achieve.
inline double exact_cheat_value(int n) {
    require_spectral_range(n, kMaxSpectralN, "exact_cheat_value");
    const HermitianOperator sum = build_test_projector(0, n) + build_test_projector(1, n);
    return top_eigenpair(sum.matrix()).value;
}

/// ‖P_0 P_1‖ over the full ranges.
inline double etbc_product_norm(int n) {
    require_spectral_range(n, kMaxSpectralN, "etbc_product_norm");
    return operator_norm(build_test_projector(0, n), build_test_projector(1, n));
}

/// ‖P^{J0}_0 · P^{J1'}_1‖.
inline double cross_projector_norm(int n, const std::set<int> &j0, const std::set<int> &j1prime) {
    require_spectral_range(n, kMaxSpectralN, "cross_projector_norm");
    return operator_norm(build_test_projector(0, n, j0), build_test_projector(1, n, j1prime));
}

/// Split of [1, N] into the halves sent to B_0 and B_1.
struct SubsetPartition {
    int n = 0;
    std::set<int> j0;
    std::set<int> j1;

    static SubsetPartition from_j0(int n, std::set<int> j0) {
        if (n < 2 || n % 2 != 0) {
            throw std::invalid_argument("SubsetPartition: N must be even and at least 2");
        }
        if (static_cast<int>(j0.size()) != n / 2 || *j0.begin() < 1 || *j0.rbegin() > n) {
            throw std::invalid_argument("SubsetPartition: J0 must be an N/2-subset of [1, N]");
        }
        SubsetPartition p{n, std::move(j0), {}};
        for (int j = 1; j <= n; ++j) {
            if (!p.j0.count(j)) {
                p.j1.insert(j);
            }
        }
        return p;
    }
};

inline int overlap(const std::set<int> &a, const std::set<int> &b) {
    int k = 0;
    for (int x : a) {
        k += b.count(x) ? 1 : 0;
    }
    return k;
}

/// P(|J_0 ∩ J'_0| > N/3) for a uniform N/2-subset J'_0 and a fixed N/2-subset J_0,
/// as an exact hypergeometric sum.
inline Rational subset_overlap_tail_exact(int n) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("subset_overlap_tail: N must be even and at least 2");
    }
    const int h = n / 2;
    BigInt hits = 0;
    for (int k = 0; k <= h; ++k) {
        if (3 * k > n) {
            hits += binomial(h, k) * binomial(h, h - k);
        }
    }
    return Rational(hits, binomial(n, h));
}

inline double subset_overlap_tail(int n) {
    return to_double(subset_overlap_tail_exact(n));
}

/// Leading-order bound (N/6)(2^(−10/6)·3)^N on the overlap tail.
inline double etrbc_tail_bound(int n) {
    if (n < 6 || n % 2 != 0) {
        throw std::invalid_argument("etrbc_tail_bound: N must be even and at least 6");
    }
    return (n / 6.0) * std::pow(3.0 * std::exp2(-10.0 / 6.0), n);
}

/// ETRBC bound on p_1 given p_0: 1 − p_0 + 2^(−N/6+1) + 2^(−N/3) + tail.
/// The constant in the tail's order term is taken as 1.
inline double etrbc_p1_bound(int n, double p0) {
    if (!(p0 >= 0 && p0 <= 1)) {
        throw std::invalid_argument("etrbc_p1_bound: p0 must lie in [0, 1]");
    }
    return 1 - p0 + std::exp2(-n / 6.0 + 1) + std::exp2(-n / 3.0) + etrbc_tail_bound(n);
}

/// ETRBC bound on p_0 + p_1. Below N = 6, where the closed-form tail is not
/// defined, the exact overlap tail takes its place.
inline double etrbc_sum_bound(int n) {
    const double tail = n >= 6 ? etrbc_tail_bound(n) : subset_overlap_tail(n);
    return 1 + std::exp2(-n / 6.0 + 1) + std::exp2(-n / 3.0) + tail;
}

/// 2^(−N+2δN) 3^(2δN) (Nδ+1)² C(N, N−Nδ)²: the bound on ‖P_0^δ P_1^δ‖.
inline double qdelta_norm_bound(int n, double delta) {
    if (!(delta >= 0 && delta < 1)) {
        throw std::invalid_argument("qdelta_norm_bound: delta must lie in [0, 1)");
    }
    const int x = allowed_failures(n, delta);
    const double c = to_double(Rational(binomial(n, n - x)));
    return std::ldexp(1.0, -n + 2 * x) * std::pow(3.0, 2 * x) * (x + 1.0) * (x + 1.0) * c * c;
}

/// Concentration term γ(δ, N), instantiated as the Hoeffding bound exp(−2N(δ−ε)²).
inline double hoeffding_gamma(double delta, double epsilon, int n) {
    if (!(delta > epsilon) || epsilon < 0) {
        throw std::invalid_argument("hoeffding_gamma: requires delta > epsilon >= 0");
    }
    return std::exp(-2.0 * n * (delta - epsilon) * (delta - epsilon));
}

/// ‖P_0^δ P_1^δ‖ by block SVD.
inline double threshold_product_norm(int n, double delta) {
    require_spectral_range(n, kMaxThresholdSpectralN, "threshold_product_norm");
    return operator_norm(build_threshold_projector(0, n, delta), build_threshold_projector(1, n, delta));
}

inline double threshold_cheat_value(int n, double delta) {
    require_spectral_range(n, kMaxThresholdSpectralN, "threshold_cheat_value");
    const HermitianOperator sum = build_threshold_projector(0, n, delta) + build_threshold_projector(1, n, delta);
    return top_eigenpair(sum.matrix()).value;
}

/// One row of the bound battery.
struct BoundReport {
    std::string quantity;
    int n = 0;
    double delta = 0;
    Variant variant = Variant::ETBC;
    double computed_norm = 0;
    double norm_bound = 0;
    double cheat_value = std::numeric_limits<double>::quiet_NaN();
    double paper_bound = std::numeric_limits<double>::quiet_NaN();
    bool satisfied = false;
};

inline constexpr double kBoundSlack = 1e-9;

/// ETBC row at slack δ: ‖P_0^δ P_1^δ‖ against its closed form, and λ_max(P_0^δ + P_1^δ)
/// against (1 + bound)², which is 1 + 2^(−N+1) + 2^(−2N) at δ = 0.
inline BoundReport etbc_bound_report(int n, double delta) {
    BoundReport r;
    r.quantity = delta == 0 ? "etbc_norm" : "etbc_threshold_norm";
    r.n = n;
    r.delta = delta;
    r.variant = Variant::ETBC;
    if (delta == 0) {
        r.computed_norm = etbc_product_norm(n);
        r.norm_bound = std::ldexp(1.0, -n);
        r.cheat_value = exact_cheat_value(n);
        r.paper_bound = etbc_paper_bound(n);
    } else {
        r.computed_norm = threshold_product_norm(n, delta);
        r.norm_bound = qdelta_norm_bound(n, delta);
        r.cheat_value = threshold_cheat_value(n, delta);
        r.paper_bound = (1 + r.norm_bound) * (1 + r.norm_bound);
    }
    r.satisfied = r.computed_norm <= r.norm_bound + kBoundSlack && r.cheat_value >= 1 - kBoundSlack &&
                  r.cheat_value <= r.paper_bound + kBoundSlack;
    return r;
}

/// All k-subsets of [1, n], in lexicographic order.
inline std::vector<std::set<int>> subsets_of_size(int n, int k) {
    std::vector<std::set<int>> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) {
            continue;
        }
        std::set<int> s;
        for (int j = 0; j < n; ++j) {
            if (mask & (1u << j)) {
                s.insert(j + 1);
            }
        }
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// ETRBC row: over every pair of partitions (J_0, J'_0) with |J_0 ∩ J'_0| ≤ N/3 the
/// largest ‖P^{J_0}_0 P^{J'_1}_1‖, against 2^(−N/6). Every pair must also obey the
/// 2^(−|J_0 ∩ J'_1|) law for the row to be satisfied.
inline BoundReport etrbc_norm_report(int n) {
    if (n % 2 != 0) {
        throw std::invalid_argument("etrbc_norm_report: N must be even");
    }
    require_spectral_range(n, kMaxSpectralN, "etrbc_norm_report");
    BoundReport r;
    r.quantity = "etrbc_cross_norm";
    r.n = n;
    r.variant = Variant::ETRBC;
    r.norm_bound = std::exp2(-n / 6.0);
    r.paper_bound = 1 + std::exp2(-n / 6.0 + 1) + std::exp2(-n / 3.0);
    r.cheat_value = 0;
    bool law = true;
    for (const auto &j0 : subsets_of_size(n, n / 2)) {
        for (const auto &j0prime : subsets_of_size(n, n / 2)) {
            const SubsetPartition other = SubsetPartition::from_j0(n, j0prime);
            const HermitianOperator p0 = build_test_projector(0, n, j0);
            const HermitianOperator p1 = build_test_projector(1, n, other.j1);
            const double norm = operator_norm(p0, p1);
            law = law && std::abs(norm - std::ldexp(1.0, -overlap(j0, other.j1))) <= kBoundSlack;
            if (3 * overlap(j0, j0prime) <= n) {
                r.computed_norm = std::max(r.computed_norm, norm);
                r.cheat_value = std::max(r.cheat_value, top_eigenpair((p0 + p1).matrix()).value);
            }
        }
    }
    r.satisfied = law && r.computed_norm <= r.norm_bound + kBoundSlack && r.cheat_value >= 1 - kBoundSlack &&
                  r.cheat_value <= r.paper_bound + kBoundSlack;
    return r;
}

/// ETRBC overlap-tail row: exact hypergeometric tail against (N/6)(2^(−10/6)·3)^N.
inline BoundReport etrbc_tail_report(int n) {
    BoundReport r;
    r.quantity = "etrbc_overlap_tail";
    r.n = n;
    r.variant = Variant::ETRBC;
    r.computed_norm = subset_overlap_tail(n);
    r.norm_bound = etrbc_tail_bound(n);
    r.satisfied = r.computed_norm <= r.norm_bound + kBoundSlack;
    return r;
}

}  // namespace relbc

#endif  // RELBC_BOUNDS_HPP
