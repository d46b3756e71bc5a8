// Copyright 2026 The mpsprep Authors
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

#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <string>
#include <vector>

#include "mpsprep/tensor.hpp"

namespace mpsprep {

inline constexpr double kRankTruncationThreshold = 1e-14;

// Transforms an MPS into right-canonical form: afterwards every site satisfies
// sum_d M^d (M^d)^dag = I on its incoming bond. Works sector-by-sector, so the
// block-sparsity pattern is preserved, and sweeps right to left, absorbing the
// triangular factors into the neighbouring site. Numerically dead bond
// directions (singular values below kRankTruncationThreshold) are truncated
// and reported through `warnings`. The output is normalized; the input's norm
// and global phase are discarded. Requires B_0 = 1.
template <class T>
SymmetricMPS<T> right_canonicalize(SymmetricMPS<T> mps,
                                   std::vector<std::string>* warnings = nullptr) {
    const int n = mps.n_sites();
    if (n == 0) throw std::invalid_argument("cannot canonicalize an empty MPS");
    if (mps.tensors.front().left.dim() != 1)
        throw std::invalid_argument(
            "right_canonicalize requires a one-dimensional leftmost bond; boundary weights for "
            "wider bonds are not representable");

    for (int i = n - 1; i >= 0; --i) {
        auto& t = mps.tensors[i];
        std::vector<std::pair<Charge, int>> new_sectors;
        std::map<Charge, Matrix<T>> absorb;  // q_left -> L factor for the previous site

        BlockSparseTensor<T> replacement;
        replacement.site = t.site;
        replacement.right = t.right;

        for (const auto& ls : t.left.sectors()) {
            // Stack the right-facing blocks of this left sector horizontally,
            // in site-charge order.
            std::vector<std::pair<int, const Matrix<T>*>> parts;
            int total_cols = 0;
            for (int d = 0; d < t.site.dim; ++d) {
                const Matrix<T>* b = t.find_block(ls.charge, t.site.charges[d]);
                if (!b) continue;
                parts.emplace_back(d, b);
                total_cols += static_cast<int>(b->cols());
            }
            if (parts.empty()) {
                if (warnings)
                    warnings->push_back("site " + std::to_string(i + 1) + ": left sector " +
                                        ls.charge.to_string() + " carries no blocks; removed");
                continue;
            }
            Matrix<T> stacked(ls.size, total_cols);
            int off = 0;
            for (auto& [d, b] : parts) {
                stacked.middleCols(off, b->cols()) = *b;
                off += static_cast<int>(b->cols());
            }

            // LQ of the stacked matrix via QR of its adjoint. Column pivoting
            // exposes rank deficiency; the SVD is used only when truncation is
            // actually needed.
            Eigen::ColPivHouseholderQR<Matrix<T>> qr(stacked.adjoint());
            int rank = 0;
            {
                const auto& rdiag = qr.matrixR();
                int k = static_cast<int>(std::min(stacked.rows(), stacked.cols()));
                for (int j = 0; j < k; ++j)
                    if (std::abs(rdiag(j, j)) > kRankTruncationThreshold) ++rank;
            }
            Matrix<T> ortho_rows;  // rank x total_cols, orthonormal rows
            Matrix<T> lfactor;     // ls.size x rank
            if (rank == ls.size) {
                Matrix<T> q = qr.householderQ() * Matrix<T>::Identity(total_cols, rank);
                Matrix<T> r = qr.matrixR().topRows(rank).template triangularView<Eigen::Upper>();
                ortho_rows = q.adjoint();
                lfactor = (r * qr.colsPermutation().transpose()).adjoint();
            } else {
                Eigen::JacobiSVD<Matrix<T>> svd(stacked,
                                                Eigen::ComputeThinU | Eigen::ComputeThinV);
                rank = 0;
                for (int j = 0; j < svd.singularValues().size(); ++j)
                    if (svd.singularValues()(j) > kRankTruncationThreshold) ++rank;
                if (rank == 0) {
                    if (warnings)
                        warnings->push_back("site " + std::to_string(i + 1) + ": left sector " +
                                            ls.charge.to_string() + " is numerically zero; removed");
                    continue;
                }
                if (warnings)
                    warnings->push_back("site " + std::to_string(i + 1) + ": left sector " +
                                        ls.charge.to_string() + " truncated from " +
                                        std::to_string(ls.size) + " to " + std::to_string(rank));
                ortho_rows = svd.matrixV().leftCols(rank).adjoint();
                lfactor = svd.matrixU().leftCols(rank) *
                          svd.singularValues().head(rank).asDiagonal();
            }

            new_sectors.emplace_back(ls.charge, rank);
            absorb[ls.charge] = std::move(lfactor);

            off = 0;
            for (auto& [d, b] : parts) {
                replacement.insert_block(ls.charge, t.site.charges[d],
                                         ortho_rows.middleCols(off, b->cols()));
                off += static_cast<int>(b->cols());
            }
        }

        replacement.left = BondSpace::from_sectors(new_sectors);
        mps.tensors[i] = std::move(replacement);

        if (i > 0) {
            auto& prev = mps.tensors[i - 1];
            BlockSparseTensor<T> updated;
            updated.left = prev.left;
            updated.site = prev.site;
            updated.right = mps.tensors[i].left;
            for (const auto& [key, block] : prev.blocks) {
                auto it = absorb.find(key.q_right);
                if (it == absorb.end()) continue;  // sector vanished
                updated.insert_block(key.q_left, key.q_site, block * it->second);
            }
            mps.tensors[i - 1] = std::move(updated);
        }
        // At the first site the remaining 1x1 factor is the state's norm and
        // global phase; dropping it normalizes the state.
    }
    return mps;
}

// Contracts the MPS into a dense amplitude vector of length D^n. Site 1 is the
// most significant digit of the basis index. Requires trivial boundary bonds.
template <class T>
Vector<T> contract_to_statevector(const SymmetricMPS<T>& mps,
                                  std::int64_t amplitude_cap = std::int64_t(1) << 22) {
    const int n = mps.n_sites();
    if (n == 0) throw std::invalid_argument("empty MPS");
    if (mps.tensors.front().left.dim() != 1 || mps.tensors.back().right.dim() != 1)
        throw std::invalid_argument("statevector contraction requires boundary bonds of dimension 1");
    std::int64_t dim = 1;
    for (int i = 0; i < n; ++i) {
        dim *= mps.tensors[i].site.dim;
        if (dim > amplitude_cap)
            throw std::invalid_argument("statevector would exceed the amplitude cap of " +
                                        std::to_string(amplitude_cap));
    }

    Matrix<T> cur = Matrix<T>::Ones(1, 1);
    for (int i = 0; i < n; ++i) {
        const auto& t = mps.tensors[i];
        const int D = t.site.dim;
        Matrix<T> next(cur.rows() * D, t.right.dim());
        for (int d = 0; d < D; ++d) {
            Matrix<T> slice = t.dense_slice(d);
            Matrix<T> prod = cur * slice;
            for (Eigen::Index p = 0; p < cur.rows(); ++p) next.row(p * D + d) = prod.row(p);
        }
        cur = std::move(next);
    }
    return Vector<T>(cur.col(0));
}

// Non-zero block of a stacked site isometry, in matrix coordinates.
struct BlockPatternEntry {
    int d = 0;           // site basis index
    Charge q_site;       // its charge
    Charge q_row;        // outgoing-bond sector charge of the rows
    Charge q_col;        // incoming-bond sector charge of the columns
    int row_off = 0, row_size = 0;
    int col_off = 0, col_size = 0;
};

struct BlockPattern {
    int rows = 0;            // D * B_out
    int cols = 0;            // B_in
    int site_dim = 0;        // D
    int bond_out_dim = 0;    // stride of the site-major row index
    std::vector<BlockPatternEntry> entries;
};

// Stacks the site tensor into the isometry U' whose columns are indexed by the
// incoming bond and whose rows are (site state, outgoing bond) pairs, site
// state major: U'[(d,v), u] = M^d[u, v]. For a right-canonical tensor the
// columns are orthonormal. Also reports where each charge block sits in U'.
template <class T>
std::pair<Matrix<T>, BlockPattern> site_isometry(const BlockSparseTensor<T>& t,
                                                 double residual_tol = 1e-8) {
    const int D = t.site.dim;
    const int b_out = t.right.dim();
    const int b_in = t.left.dim();
    Matrix<T> u = Matrix<T>::Zero(D * b_out, b_in);
    BlockPattern pattern;
    pattern.rows = D * b_out;
    pattern.cols = b_in;
    pattern.site_dim = D;
    pattern.bond_out_dim = b_out;

    for (const auto& [key, block] : t.blocks) {
        int d = -1;
        for (int j = 0; j < D; ++j)
            if (t.site.charges[j] == key.q_site) d = j;
        auto ls = t.left.sector(key.q_left);
        auto rs = t.right.sector(key.q_right);
        if (d < 0 || !ls || !rs) throw std::invalid_argument("tensor block outside its bond spaces");
        u.block(d * b_out + rs->offset, ls->offset, rs->size, ls->size) = block.transpose();
        BlockPatternEntry e;
        e.d = d;
        e.q_site = key.q_site;
        e.q_row = key.q_right;
        e.q_col = key.q_left;
        e.row_off = d * b_out + rs->offset;
        e.row_size = rs->size;
        e.col_off = ls->offset;
        e.col_size = ls->size;
        pattern.entries.push_back(e);
    }

    double residual = (u.adjoint() * u - Matrix<T>::Identity(b_in, b_in)).norm();
    if (residual > residual_tol)
        throw std::invalid_argument("site tensor is not an isometry (residual " +
                                    std::to_string(residual) + "); canonicalize first");
    return {std::move(u), std::move(pattern)};
}

}  // namespace mpsprep
