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

#ifndef RELBC_PROJECTORS_HPP
#define RELBC_PROJECTORS_HPP

// Bob's verification projectors on the 3N qubits Alice hands over.
//
// Qubit ordering is fixed: for each j the triple (H1^j, H2^j, H0^j) with triples
// in ascending j. H0 is what B_0 receives (the W0Q slot), H1 what B_1 receives
// (W1Q) and H2 what B_c received at commitment. H2 is addressed through the W0P
// label, which is the slot A_c hands over in every cheating preparation here.

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "relbc/quantum.hpp"

namespace relbc {

inline QubitLabel h0(int j) {
    return {Register::W0Q, j};
}
inline QubitLabel h1(int j) {
    return {Register::W1Q, j};
}
inline QubitLabel h2(int j) {
    return {Register::W0P, j};
}

/// (H1^j, H2^j, H0^j) for j = 1..n.
inline Labels protocol_labels(int n) {
    Labels out;
    for (int j = 1; j <= n; ++j) {
        out.push_back(h1(j));
        out.push_back(h2(j));
        out.push_back(h0(j));
    }
    return out;
}

/// The pair Bob tests for a claimed `bit` on triple j: (H2, H0) for 0, (H1, H2) for 1.
inline std::pair<QubitLabel, QubitLabel> tested_pair(int bit, int j) {
    if (bit == 0) {
        return {h2(j), h0(j)};
    }
    return {h1(j), h2(j)};
}

inline std::vector<int> full_range(int n) {
    std::vector<int> out;
    for (int j = 1; j <= n; ++j) {
        out.push_back(j);
    }
    return out;
}

/// Tensor product of singlet projectors on the tested pair of every j in `subset`,
/// identity on everything else.
inline HermitianOperator build_test_projector(int bit, int n, const std::set<int> &subset) {
    if (bit != 0 && bit != 1) {
        throw std::invalid_argument("build_test_projector: bit must be 0 or 1");
    }
    if (subset.empty()) {
        throw std::invalid_argument("build_test_projector: empty subset");
    }
    if (*subset.begin() < 1 || *subset.rbegin() > n) {
        throw std::invalid_argument("build_test_projector: subset not within [1, N]");
    }
    std::optional<HermitianOperator> out;
    for (int j : subset) {
        const auto [a, b] = tested_pair(bit, j);
        HermitianOperator factor = singlet_projector(a, b);
        out = out ? out->tensor(factor) : std::move(factor);
    }
    return *out;
}

inline HermitianOperator build_test_projector(int bit, int n) {
    const auto r = full_range(n);
    return build_test_projector(bit, n, std::set<int>(r.begin(), r.end()));
}

/// Number of failures allowed at slack delta over n tests; requires delta·n integral.
inline int allowed_failures(int n, double delta) {
    const double x = delta * n;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9) {
        throw std::invalid_argument("delta * N must be an integer");
    }
    return static_cast<int>(r);
}

/// Projector onto Bell-product states of the N tested pairs with at least (1−δ)N
/// singlet factors: the sum over m ≥ (1−δ)N of the exactly-m-singlet projectors.
inline HermitianOperator build_threshold_projector(int bit, int n, double delta) {
    if (!(delta >= 0 && delta < 1)) {
        throw std::invalid_argument("build_threshold_projector: delta must lie in [0, 1)");
    }
    const int max_fail = allowed_failures(n, delta);
    if (n < 1) {
        throw std::invalid_argument("build_threshold_projector: N must be at least 1");
    }
    // by_fail[f] = projector onto the first k pairs with exactly f non-singlet factors.
    std::vector<std::optional<HermitianOperator>> by_fail(static_cast<std::size_t>(n + 1));
    for (int j = 1; j <= n; ++j) {
        const auto [a, b] = tested_pair(bit, j);
        const HermitianOperator pass = singlet_projector(a, b);
        const HermitianOperator fail = HermitianOperator::identity({a, b}) - pass;
        std::vector<std::optional<HermitianOperator>> next(by_fail.size());
        if (j == 1) {
            next[0] = pass;
            next[1] = fail;
        } else {
            for (int f = 0; f <= n; ++f) {
                if (by_fail[static_cast<std::size_t>(f)]) {
                    auto with_pass = by_fail[static_cast<std::size_t>(f)]->tensor(pass);
                    auto &slot = next[static_cast<std::size_t>(f)];
                    slot = slot ? *slot + with_pass : with_pass;
                }
                if (f > 0 && by_fail[static_cast<std::size_t>(f - 1)]) {
                    auto with_fail = by_fail[static_cast<std::size_t>(f - 1)]->tensor(fail);
                    auto &slot = next[static_cast<std::size_t>(f)];
                    slot = slot ? *slot + with_fail : with_fail;
                }
            }
        }
        by_fail = std::move(next);
    }
    std::optional<HermitianOperator> out;
    for (int f = 0; f <= max_fail; ++f) {
        const auto &term = by_fail[static_cast<std::size_t>(f)];
        out = out ? *out + *term : *term;
    }
    return *out;
}

}  // namespace relbc

#endif  // RELBC_PROJECTORS_HPP
