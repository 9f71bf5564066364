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

#ifndef RELBC_SPECTRAL_HPP
#define RELBC_SPECTRAL_HPP

// Singular values and eigenvalues of sparse operators.
//
// A sparse matrix is permuted into block-diagonal form by taking connected
// components of its row/column incidence graph. Every block is then handed to a
// full dense SVD (or Hermitian eigensolver). The spectrum of the matrix is the
// union of the block spectra plus zeros, so nothing is approximated; the
// decomposition only keeps the dense problems small. Blocks whose entries are all
// real go through the real-valued solvers.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "relbc/quantum.hpp"

namespace relbc {

struct SparseBlock {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
};

/// Connected components of the bipartite row/column graph of `m`. Empty rows
/// and columns belong to no block.
inline std::vector<SparseBlock> connected_blocks(const SparseOp &m) {
    const Eigen::Index nr = m.rows();
    const Eigen::Index nc = m.cols();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(nr + nc));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::vector<char> used(static_cast<std::size_t>(nr + nc), 0);
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        for (SparseOp::InnerIterator it(m, c); it; ++it) {
            if (it.value() == cplx(0)) {
                continue;
            }
            const Eigen::Index a = find(it.row());
            const Eigen::Index b = find(nr + it.col());
            used[static_cast<std::size_t>(it.row())] = 1;
            used[static_cast<std::size_t>(nr + it.col())] = 1;
            if (a != b) {
                parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    std::vector<long> block_of_root(static_cast<std::size_t>(nr + nc), -1);
    std::vector<SparseBlock> blocks;
    for (Eigen::Index v = 0; v < nr + nc; ++v) {
        if (!used[static_cast<std::size_t>(v)]) {
            continue;
        }
        const Eigen::Index root = find(v);
        long &id = block_of_root[static_cast<std::size_t>(root)];
        if (id < 0) {
            id = static_cast<long>(blocks.size());
            blocks.emplace_back();
        }
        if (v < nr) {
            blocks[static_cast<std::size_t>(id)].rows.push_back(v);
        } else {
            blocks[static_cast<std::size_t>(id)].cols.push_back(v - nr);
        }
    }
    return blocks;
}

namespace detail {

inline CMatrix gather_block(const SparseOp &m, const SparseBlock &b) {
    std::vector<long> row_pos(static_cast<std::size_t>(m.rows()), -1);
    std::vector<long> col_pos(static_cast<std::size_t>(m.cols()), -1);
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
        row_pos[static_cast<std::size_t>(b.rows[i])] = static_cast<long>(i);
    }
    for (std::size_t j = 0; j < b.cols.size(); ++j) {
        col_pos[static_cast<std::size_t>(b.cols[j])] = static_cast<long>(j);
    }
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(b.rows.size()), static_cast<Eigen::Index>(b.cols.size()));
    for (Eigen::Index c : b.cols) {
        for (SparseOp::InnerIterator it(m, c); it; ++it) {
            const long r = row_pos[static_cast<std::size_t>(it.row())];
            if (r >= 0) {
                out(r, col_pos[static_cast<std::size_t>(c)]) = it.value();
            }
        }
    }
    return out;
}

inline bool is_real(const CMatrix &m) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace detail

/// All singular values of a dense matrix via full SVD, descending.
inline std::vector<double> dense_singular_values(const CMatrix &m) {
    Eigen::VectorXd s;
    if (detail::is_real(m)) {
        s = Eigen::JacobiSVD<Eigen::MatrixXd>(m.real()).singularValues();
    } else {
        s = Eigen::JacobiSVD<CMatrix>(m).singularValues();
    }
    return {s.data(), s.data() + s.size()};
}

/// Nonzero-block singular values of a sparse matrix, descending. Singular values
/// contributed by empty rows/columns (exact zeros) are omitted.
inline std::vector<double> singular_values(const SparseOp &m) {
    std::vector<double> out;
    for (const SparseBlock &b : connected_blocks(m)) {
        const auto s = dense_singular_values(detail::gather_block(m, b));
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Largest singular value.
inline double operator_norm(const SparseOp &m) {
    double best = 0;
    for (const SparseBlock &b : connected_blocks(m)) {
        const auto s = dense_singular_values(detail::gather_block(m, b));
        if (!s.empty()) {
            best = std::max(best, s.front());
        }
    }
    return best;
}

inline double operator_norm(const HermitianOperator &op) {
    return operator_norm(op.matrix());
}

/// ‖A·B‖ with both factors extended by identity to the union of their labels.
inline double operator_norm(const HermitianOperator &a, const HermitianOperator &b) {
    return operator_norm(product_matrix(a, b));
}

/// Number of singular values within `tol` of 1 (the rank, for a projector).
inline int count_unit_singular_values(const SparseOp &m, double tol = 1e-9) {
    int n = 0;
    for (double s : singular_values(m)) {
        n += std::abs(s - 1) <= tol ? 1 : 0;
    }
    return n;
}

struct TopEigenpair {
    double value = 0;
    CVector vector;
    int multiplicity = 0;
};

/// Eigenvalues of a Hermitian sparse matrix, descending, including the zeros
/// from empty rows.
inline std::vector<double> hermitian_eigenvalues(const SparseOp &m) {
    std::vector<double> out;
    Eigen::Index covered = 0;
    for (const SparseBlock &b : connected_blocks(m)) {
        const CMatrix block = detail::gather_block(m, SparseBlock{b.rows, b.rows});
        covered += static_cast<Eigen::Index>(b.rows.size());
        if (detail::is_real(block)) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.real(), Eigen::EigenvaluesOnly);
            out.insert(out.end(), es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(block, Eigen::EigenvaluesOnly);
            out.insert(out.end(), es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        }
    }
    out.insert(out.end(), static_cast<std::size_t>(m.rows() - covered), 0.0);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Largest eigenvalue and a unit eigenvector (in the full space) of a Hermitian
/// sparse matrix with at least one nonzero entry. The multiplicity counts
/// eigenvalues within `tol` of the top across all blocks.
inline TopEigenpair top_eigenpair(const SparseOp &m, double tol = 1e-9) {
    TopEigenpair best;
    best.value = -std::numeric_limits<double>::infinity();
    std::vector<double> all;
    for (const SparseBlock &b : connected_blocks(m)) {
        const CMatrix block = detail::gather_block(m, SparseBlock{b.rows, b.rows});
        Eigen::VectorXd values;
        CMatrix vectors;
        if (detail::is_real(block)) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.real());
            values = es.eigenvalues();
            vectors = es.eigenvectors().cast<cplx>();
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
            values = es.eigenvalues();
            vectors = es.eigenvectors();
        }
        all.insert(all.end(), values.data(), values.data() + values.size());
        const Eigen::Index top = values.size() - 1;
        if (values[top] > best.value + tol) {
            best.value = values[top];
            best.vector = CVector::Zero(m.rows());
            for (std::size_t i = 0; i < b.rows.size(); ++i) {
                best.vector[b.rows[i]] = vectors(static_cast<Eigen::Index>(i), top);
            }
        }
    }
    if (all.empty()) {
        throw std::invalid_argument("top_eigenpair: zero matrix");
    }
    for (double v : all) {
        best.multiplicity += std::abs(v - best.value) <= tol ? 1 : 0;
    }
    return best;
}

}  // namespace relbc

#endif  // RELBC_SPECTRAL_HPP
