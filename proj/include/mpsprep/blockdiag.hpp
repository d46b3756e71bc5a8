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

#include <Eigen/QR>
#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mpsprep/canonical.hpp"
#include "mpsprep/givens.hpp"
#include "mpsprep/tensor.hpp"

namespace mpsprep {

inline int next_power_of_two(int x) {
    int p = 1;
    while (p < x) p *= 2;
    return p;
}

inline int ceil_log2(int x) {
    int p = 1, e = 0;
    while (p < x) p *= 2, ++e;
    return e;
}

// One rectangle of the permuted isometry: all row blocks feeding a single
// column sector, stacked contiguously.
struct Rectangle {
    Charge q_col;
    int col_off = 0;
    int width = 0;
    int height = 0;
    std::vector<int> tight_rows;   // constituent rows of U' in stacking order
    std::vector<int> padded_rows;  // same rows in the padded register basis
};

// Explicit index maps for the three permutation stages. All maps are
// placement maps: map[new_position] = original_index.
struct SitePermutations {
    int dim = 0;      // padded l (power of two)
    int anc_dim = 0;  // padded bond register dimension
    std::vector<Rectangle> rectangles;  // in lexicographic column-charge order
    std::vector<int> p_r;               // rows after merging rectangles
    std::vector<int> p_c;               // columns after routing complements
    std::vector<int> free_rows;         // rows outside every rectangle
    std::vector<int> free_cols;         // columns left over after completion
    std::vector<int> p_o;               // final block order; index into the
                                        // chain, -1 for a 1x1 identity filler
};

// Groups the isometry's charge blocks into rectangles and constructs the row
// and column permutations that chain them along the diagonal, plus the
// size-descending block order. The pattern must contain at most one block per
// (site charge, row sector) and per (site charge, column sector).
inline SitePermutations find_permutations(const BlockPattern& pattern, int padded_dim = 0) {
    const int site_pow2 = next_power_of_two(pattern.site_dim);
    const int bond_out = pattern.bond_out_dim;
    const int bond_in = pattern.cols;
    int anc = next_power_of_two(std::max(bond_in, bond_out));
    if (padded_dim > 0) {
        if (padded_dim % site_pow2 != 0 || next_power_of_two(padded_dim) != padded_dim)
            throw std::invalid_argument("padded dimension must be a power of two");
        anc = padded_dim / site_pow2;
    }
    SitePermutations p;
    p.anc_dim = anc;
    p.dim = site_pow2 * anc;

    // Bucket pattern entries by column sector.
    std::vector<const BlockPatternEntry*> entries;
    for (const auto& e : pattern.entries) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
        if (!(a->q_col == b->q_col)) return a->q_col < b->q_col;
        if (!(a->q_site == b->q_site)) return a->q_site < b->q_site;
        return a->d < b->d;
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto *a = entries[i - 1], *b = entries[i];
        if (a->q_col == b->q_col && a->q_site == b->q_site)
            throw std::invalid_argument("pattern has two blocks in one block column");
        if (a->d == b->d && a->q_row == b->q_row)
            throw std::invalid_argument("pattern has two blocks in one block row");
    }

    std::vector<char> row_used(p.dim, 0), col_used(p.dim, 0);
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        Rectangle rect;
        rect.q_col = entries[i]->q_col;
        rect.col_off = entries[i]->col_off;
        rect.width = entries[i]->col_size;
        while (j < entries.size() && entries[j]->q_col == rect.q_col) {
            const auto* e = entries[j];
            const int sector_off = e->row_off - e->d * bond_out;
            for (int t = 0; t < e->row_size; ++t) {
                rect.tight_rows.push_back(e->row_off + t);
                const int padded = e->d * anc + sector_off + t;
                rect.padded_rows.push_back(padded);
                row_used[padded] = 1;
            }
            ++j;
        }
        rect.height = static_cast<int>(rect.tight_rows.size());
        if (rect.height < rect.width)
            throw std::invalid_argument("rectangle for column sector " + rect.q_col.to_string() +
                                        " is wider than tall; input is not a canonical isometry");
        for (int t = 0; t < rect.width; ++t) col_used[rect.col_off + t] = 1;
        p.rectangles.push_back(std::move(rect));
        i = j;
    }

    for (int r = 0; r < p.dim; ++r)
        if (!row_used[r]) p.free_rows.push_back(r);
    for (int c = bond_in; c < p.dim; ++c) p.free_cols.push_back(c);

    // Row permutation: rectangles in column-charge order, free rows last.
    for (const auto& rect : p.rectangles)
        p.p_r.insert(p.p_r.end(), rect.padded_rows.begin(), rect.padded_rows.end());
    p.p_r.insert(p.p_r.end(), p.free_rows.begin(), p.free_rows.end());

    // Column permutation: each rectangle's sector columns followed by the
    // complement columns it consumes, remaining free columns last.
    std::size_t free_cursor = 0;
    for (const auto& rect : p.rectangles) {
        for (int t = 0; t < rect.width; ++t) p.p_c.push_back(rect.col_off + t);
        for (int t = 0; t < rect.height - rect.width; ++t) {
            if (free_cursor >= p.free_cols.size())
                throw std::logic_error("ran out of free columns while completing rectangles");
            p.p_c.push_back(p.free_cols[free_cursor++]);
        }
    }
    for (; free_cursor < p.free_cols.size(); ++free_cursor)
        p.p_c.push_back(p.free_cols[free_cursor]);

    // Block order: sizes descending, ties by column-sector charge; every block
    // of size >= 2 is kept at an even offset by interleaving 1x1 identity
    // fillers where available.
    std::vector<int> order(p.rectangles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (p.rectangles[a].height != p.rectangles[b].height)
            return p.rectangles[a].height > p.rectangles[b].height;
        return p.rectangles[a].q_col < p.rectangles[b].q_col;
    });
    int fillers_left = static_cast<int>(p.free_rows.size());
    int offset = 0;
    for (int idx : order) {
        const int h = p.rectangles[idx].height;
        if (h >= 2 && offset % 2 == 1 && fillers_left > 0) {
            p.p_o.push_back(-1);
            --fillers_left;
            ++offset;
        }
        p.p_o.push_back(idx);
        offset += h;
    }
    for (int t = 0; t < fillers_left; ++t) p.p_o.push_back(-1);
    return p;
}

// Extends each rectangle to a square unitary by appending an orthonormal basis
// of its column complement (via column-pivoted QR). Blocks are returned in
// column-charge order, before size sorting.
template <class T>
std::vector<Matrix<T>> complete_rectangles(const Matrix<T>& u_tight, const BlockPattern& pattern,
                                           double ortho_tol = 1e-8) {
    SitePermutations p = find_permutations(pattern);
    std::vector<Matrix<T>> out;
    for (const auto& rect : p.rectangles) {
        Matrix<T> r(rect.height, rect.width);
        for (int i = 0; i < rect.height; ++i)
            for (int j = 0; j < rect.width; ++j)
                r(i, j) = u_tight(rect.tight_rows[i], rect.col_off + j);
        double residual =
            (r.adjoint() * r - Matrix<T>::Identity(rect.width, rect.width)).norm();
        if (residual > ortho_tol)
            throw std::invalid_argument("rectangle columns are not orthonormal (residual " +
                                        std::to_string(residual) + ")");
        Matrix<T> b(rect.height, rect.height);
        b.leftCols(rect.width) = r;
        if (rect.height > rect.width) {
            Eigen::ColPivHouseholderQR<Matrix<T>> qr(r);
            Matrix<T> qfull = qr.householderQ() * Matrix<T>::Identity(rect.height, rect.height);
            b.rightCols(rect.height - rect.width) = qfull.rightCols(rect.height - rect.width);
        }
        out.push_back(std::move(b));
    }
    return out;
}

// Block-diagonal factorization [U' *] = W V Q^dag of the padded site unitary.
// w and q are placement maps: entry (i, j) of the block-diagonal V sits at
// (w[i], q[j]) of the full matrix. Blocks are size-sorted descending with 1x1
// identity fillers keeping starts even, and the first `isometry_cols` columns
// of the reassembled matrix reproduce U'.
template <class T>
struct BlockDiagonalDecomposition {
    int dim = 0;
    int isometry_cols = 0;
    std::vector<int> w, q;
    std::vector<Matrix<T>> blocks;
    std::vector<int> block_offsets;

    int largest_block() const {
        int m = 0;
        for (const auto& b : blocks) m = std::max(m, static_cast<int>(b.rows()));
        return m;
    }
};

template <class T>
BlockDiagonalDecomposition<T> block_diagonalize(const Matrix<T>& u_tight,
                                                const BlockPattern& pattern,
                                                int padded_dim = 0) {
    SitePermutations p = find_permutations(pattern, padded_dim);
    std::vector<Matrix<T>> chain = complete_rectangles(u_tight, pattern);

    BlockDiagonalDecomposition<T> dec;
    dec.dim = p.dim;
    dec.isometry_cols = pattern.cols;
    dec.w.resize(p.dim);
    dec.q.resize(p.dim);

    // Positions of each chain block inside p_r / p_c.
    std::vector<int> row_start(p.rectangles.size()), col_start(p.rectangles.size());
    {
        int r = 0, c = 0;
        for (std::size_t j = 0; j < p.rectangles.size(); ++j) {
            row_start[j] = r;
            col_start[j] = c;
            r += p.rectangles[j].height;
            c += p.rectangles[j].height;  // width + complement
        }
    }
    const int n_rect_rows = std::accumulate(
        p.rectangles.begin(), p.rectangles.end(), 0,
        [](int acc, const Rectangle& r) { return acc + r.height; });

    int offset = 0;
    std::size_t filler_cursor = 0;
    for (int idx : p.p_o) {
        if (idx < 0) {
            dec.blocks.push_back(Matrix<T>::Identity(1, 1));
            dec.block_offsets.push_back(offset);
            dec.w[offset] = p.p_r[n_rect_rows + filler_cursor];
            dec.q[offset] = p.p_c[n_rect_rows + filler_cursor];
            ++filler_cursor;
            ++offset;
            continue;
        }
        const int h = p.rectangles[idx].height;
        dec.blocks.push_back(chain[idx]);
        dec.block_offsets.push_back(offset);
        for (int t = 0; t < h; ++t) {
            dec.w[offset + t] = p.p_r[row_start[idx] + t];
            dec.q[offset + t] = p.p_c[col_start[idx] + t];
        }
        offset += h;
    }
    if (offset != p.dim) throw std::logic_error("block placement does not cover the register");
    return dec;
}

// Dense W V Q^dag, mainly for verification.
template <class T>
Matrix<T> reassemble(const BlockDiagonalDecomposition<T>& dec) {
    Matrix<T> a = Matrix<T>::Zero(dec.dim, dec.dim);
    for (std::size_t k = 0; k < dec.blocks.size(); ++k) {
        const auto& b = dec.blocks[k];
        const int off = dec.block_offsets[k];
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) a(dec.w[off + i], dec.q[off + j]) = b(i, j);
    }
    return a;
}

// The isometry embedded into the padded register basis (rows (d, v) at
// d * anc_dim + v), for comparing against reassemble().
template <class T>
Matrix<T> embed_isometry(const Matrix<T>& u_tight, const BlockPattern& pattern, int padded_dim) {
    const int anc = padded_dim / next_power_of_two(pattern.site_dim);
    Matrix<T> u = Matrix<T>::Zero(padded_dim, pattern.cols);
    for (int d = 0; d < pattern.site_dim; ++d)
        for (int v = 0; v < pattern.bond_out_dim; ++v)
            u.row(d * anc + v) = u_tight.row(d * pattern.bond_out_dim + v);
    return u;
}

// Aligned full-width layers for a block-diagonal unitary, per-layer active
// widths, and the concatenated final diagonal.
struct MergedPlan {
    int dim = 0;
    ScalarKind kind = ScalarKind::real;
    std::vector<RotationLayer> layers;
    std::vector<int> active_width;  // a_r for r = 1..s
    std::vector<double> final_phase;
    std::vector<int> block_sizes;  // placement order

    int layer_count() const { return static_cast<int>(layers.size()); }
};

// Combines per-block plans (placement order, consecutive offsets) into single
// full-width layers. A block whose first layer's global parity conflicts with
// the parity fixed by the first rotating block receives an identity filler
// layer in front; a_r counts the sizes of all blocks whose (filler-extended)
// decomposition still has an r-th layer.
inline MergedPlan merge_block_plans(const std::vector<SynthesisPlan>& plans) {
    MergedPlan merged;
    std::vector<int> offsets;
    for (const auto& plan : plans) {
        offsets.push_back(merged.dim);
        merged.dim += plan.dim;
        merged.block_sizes.push_back(plan.dim);
        if (plan.kind == ScalarKind::cplx) merged.kind = ScalarKind::cplx;
        for (int i = 1; i < plan.layer_count(); ++i)
            if (plan.layers[i].parity != opposite(plan.layers[i - 1].parity))
                throw std::invalid_argument("block plan layers must alternate parity");
    }

    // Global parity of a block's first layer: a block at an odd offset sees
    // its local pairing shifted by one.
    auto global_start = [&](std::size_t j) -> int {
        const auto& plan = plans[j];
        int local = plan.layers[0].parity == Parity::unshifted ? 0 : 1;
        return (local + offsets[j]) % 2;
    };

    int master = -1;
    for (std::size_t j = 0; j < plans.size(); ++j) {
        if (plans[j].layer_count() > 0) {
            master = global_start(j);
            break;
        }
    }

    std::vector<int> extended(plans.size(), 0);  // l~_j
    std::vector<int> filler(plans.size(), 0);
    int s = 0;
    for (std::size_t j = 0; j < plans.size(); ++j) {
        if (plans[j].layer_count() == 0) continue;
        filler[j] = (global_start(j) != master) ? 1 : 0;
        extended[j] = plans[j].layer_count() + filler[j];
        s = std::max(s, extended[j]);
    }

    merged.layers.resize(s);
    merged.active_width.resize(s, 0);
    for (int r = 1; r <= s; ++r) {
        auto& layer = merged.layers[r - 1];
        layer.parity = ((master + r - 1) % 2 == 0) ? Parity::unshifted : Parity::shifted;
        for (std::size_t j = 0; j < plans.size(); ++j) {
            if (extended[j] < r) continue;
            merged.active_width[r - 1] += plans[j].dim;
            const int local_index = r - filler[j];
            if (local_index < 1) continue;  // identity filler layer
            const auto& local = plans[j].layers[local_index - 1];
            for (const auto& rot : local.rotations) {
                const int top = offsets[j] + local.top_row(rot.block);
                if (top % 2 != (layer.parity == Parity::unshifted ? 0 : 1))
                    throw std::runtime_error("block layer parity is misaligned");
                Rotation g = rot;
                g.block = layer.parity == Parity::unshifted ? top / 2 : (top - 1) / 2;
                layer.rotations.push_back(g);
            }
        }
    }

    merged.final_phase.resize(merged.dim, merged.kind == ScalarKind::real ? 1.0 : 0.0);
    for (std::size_t j = 0; j < plans.size(); ++j) {
        for (int t = 0; t < plans[j].dim; ++t) {
            double v = plans[j].final_phase.empty() ? (plans[j].kind == ScalarKind::real ? 1.0 : 0.0)
                                                    : plans[j].final_phase[t];
            if (merged.kind == ScalarKind::cplx && plans[j].kind == ScalarKind::real)
                v = v < 0 ? std::numbers::pi : 0.0;
            merged.final_phase[offsets[j] + t] = v;
        }
    }
    return merged;
}

// Dense product of the merged layers and diagonal (equals blkdiag of the
// block unitaries).
template <class T>
Matrix<T> reconstruct_merged(const MergedPlan& plan) {
    SynthesisPlan p;
    p.dim = plan.dim;
    p.kind = plan.kind;
    p.form = BlockForm::ry_rz;
    p.layers = plan.layers;
    p.final_phase = plan.final_phase;
    return reconstruct<T>(p);
}

// Synthesizes every block of a decomposition and merges the plans.
template <class T>
std::pair<std::vector<SynthesisPlan>, MergedPlan> synthesize_blocks(
    const BlockDiagonalDecomposition<T>& dec) {
    std::vector<SynthesisPlan> plans;
    for (const auto& b : dec.blocks) plans.push_back(clements_decompose(b));
    return {plans, merge_block_plans(plans)};
}

}  // namespace mpsprep
