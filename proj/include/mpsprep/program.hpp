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

#include "mpsprep/blockdiag.hpp"
#include "mpsprep/canonical.hpp"

namespace mpsprep {

// One site unit of the preparation circuit: Q^dag permutation, merged
// rotation layers for the block-diagonal unitary, W permutation, with the
// final diagonal's signs / phases carried alongside.
template <class T>
struct CompiledSite {
    int dim = 0;       // l_i, power of two
    int anc_bits = 0;  // bond register width used by this unit
    BlockDiagonalDecomposition<T> dec;
    std::vector<SynthesisPlan> block_plans;
    MergedPlan merged;
};

template <class T>
CompiledSite<T> compile_site(const BlockSparseTensor<T>& tensor) {
    CompiledSite<T> unit;
    auto [u, pattern] = site_isometry(tensor);
    unit.dec = block_diagonalize(u, pattern);
    unit.dim = unit.dec.dim;
    unit.anc_bits = ceil_log2(unit.dim / next_power_of_two(pattern.site_dim));
    auto [plans, merged] = synthesize_blocks(unit.dec);
    unit.block_plans = std::move(plans);
    unit.merged = std::move(merged);
    return unit;
}

// Compiled preparation chain. All sites are compiled (the first site's unit is
// used for costing); simulation applies the first site's isometry directly as
// state preparation.
template <class T>
struct PreparationProgram {
    int n = 0;
    int site_bits = 0;  // qubits per site register
    int anc_bits = 0;   // shared bond ancilla register width
    Charge total_charge;
    Matrix<T> first_isometry;  // (D * B_1) x B_0, B_0 = 1
    int first_bond = 1;        // B_1, the row stride of first_isometry
    int site_dim = 0;          // D
    std::vector<CompiledSite<T>> sites;
};

template <class T>
PreparationProgram<T> compile_program(const SymmetricMPS<T>& mps) {
    PreparationProgram<T> prog;
    prog.n = mps.n_sites();
    if (prog.n == 0) throw std::invalid_argument("empty MPS");
    prog.total_charge = mps.total_charge;
    prog.site_bits = ceil_log2(mps.tensors.front().site.dim);
    int max_bond = 1;
    for (const auto& t : mps.tensors) max_bond = std::max(max_bond, t.right.dim());
    max_bond = std::max(max_bond, mps.tensors.front().left.dim());
    prog.anc_bits = ceil_log2(max_bond);
    for (const auto& t : mps.tensors) prog.sites.push_back(compile_site(t));
    auto [u1, pattern1] = site_isometry(mps.tensors.front());
    if (pattern1.cols != 1)
        throw std::invalid_argument("the first site must have a one-dimensional incoming bond");
    prog.first_isometry = u1;
    prog.first_bond = mps.tensors.front().right.dim();
    prog.site_dim = mps.tensors.front().site.dim;
    return prog;
}

// Inverse density: dense tensor element count over stored non-zeros.
template <class T>
double inverse_density(const SymmetricMPS<T>& mps) {
    double dense = 0, nnz = 0;
    for (const auto& t : mps.tensors) {
        dense += static_cast<double>(t.site.dim) * t.left.dim() * t.right.dim();
        for (const auto& [key, block] : t.blocks) nnz += static_cast<double>(block.size());
    }
    return nnz == 0 ? 0.0 : dense / nnz;
}

}  // namespace mpsprep
