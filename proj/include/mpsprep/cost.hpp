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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpsprep/program.hpp"

namespace mpsprep {

using CostInt = std::int64_t;

inline CostInt ceil_div(CostInt a, CostInt b) { return (a + b - 1) / b; }

inline bool is_power_of_two(CostInt x) { return x > 0 && (x & (x - 1)) == 0; }

// Smallest t with 2^t >= a/b for positive integers; exact in integer
// arithmetic.
inline CostInt ceil_log2_ratio(CostInt a, CostInt b) {
    CostInt t = 0, cover = b;
    while (cover < a) cover *= 2, ++t;
    return t;
}

struct CostParams {
    int bitsize = 15;  // angle register width b
    std::optional<CostInt> ancilla_cap;
    std::map<std::string, CostInt> lambda_overrides;  // component label -> forced lambda
};

struct CostItem {
    std::string label;
    CostInt toffolis = 0;
    CostInt qubits = 0;
    CostInt lambda = 0;
};

struct CostReport {
    CostInt toffolis = 0;
    CostInt ancilla_peak = 0;
    CostInt total_qubits = 0;
    std::vector<CostItem> breakdown;

    void add(const std::string& label, CostInt tof, CostInt qubits, CostInt lambda) {
        breakdown.push_back({label, tof, qubits, lambda});
        toffolis += tof;
        ancilla_peak = std::max(ancilla_peak, qubits);
    }
};

struct QroamCost {
    CostInt toffolis = 0;
    CostInt qubits = 0;
};

// Rotation-layer data load: ceil(l/(2L)) + 2bL Toffolis (b replacing 2b in the
// real case) with 2b(L-1) + ceil(log(l/L)) transient qubits.
inline QroamCost qroam_layer_cost(CostInt l, CostInt b, CostInt lambda, bool real) {
    if (!is_power_of_two(lambda)) throw std::invalid_argument("lambda must be a power of two");
    const CostInt width = real ? b : 2 * b;
    QroamCost c;
    c.toffolis = ceil_div(l, 2 * lambda) + width * lambda;
    c.qubits = width * (lambda - 1) + ceil_log2_ratio(l, lambda);
    return c;
}

// Basis-permutation data load on a v-qubit register: 2^v/L + v(L-1) Toffolis.
inline QroamCost qroam_permutation_cost(CostInt v, CostInt lambda) {
    if (!is_power_of_two(lambda)) throw std::invalid_argument("lambda must be a power of two");
    const CostInt items = CostInt(1) << v;
    if (lambda > items) throw std::invalid_argument("lambda exceeds the address space");
    QroamCost c;
    c.toffolis = items / lambda + v * (lambda - 1);
    c.qubits = v * (lambda - 1) + ceil_log2_ratio(items, lambda);
    return c;
}

namespace detail {

struct Chosen {
    CostInt lambda = 1;
    CostInt toffolis = 0;
    CostInt qubits = 0;
};

// Exhaustive scan over power-of-two trade-off parameters; the objective is
// unimodal so this is cheap and exact. Candidates violating the ancilla cap
// are skipped; if nothing fits the cap, lambda = 1 is used.
template <class Eval>
Chosen choose_lambda(CostInt max_lambda, const CostParams& params, const std::string& label,
                     Eval eval) {
    auto ov = params.lambda_overrides.find(label);
    if (ov != params.lambda_overrides.end()) {
        if (!is_power_of_two(ov->second))
            throw std::invalid_argument("lambda override for '" + label +
                                        "' must be a power of two");
        QroamCost c = eval(ov->second);
        return {ov->second, c.toffolis, c.qubits};
    }
    Chosen best;
    bool found = false;
    for (CostInt lam = 1; lam <= max_lambda; lam *= 2) {
        QroamCost c = eval(lam);
        if (params.ancilla_cap && c.qubits > *params.ancilla_cap) continue;
        if (!found || c.toffolis < best.toffolis) {
            best = {lam, c.toffolis, c.qubits};
            found = true;
        }
    }
    if (!found) {
        QroamCost c = eval(1);
        best = {1, c.toffolis, c.qubits};
    }
    return best;
}

}  // namespace detail

// Optimal rotation-layer load cost over power-of-two lambdas.
inline detail::Chosen optimal_layer_cost(CostInt l, CostInt b, bool real,
                                         const CostParams& params = {},
                                         const std::string& label = "layers") {
    const CostInt max_lambda = CostInt(1) << ceil_log2_ratio(std::max<CostInt>(ceil_div(l, 2), 1), 1);
    return detail::choose_lambda(max_lambda, params, label,
                                 [&](CostInt lam) { return qroam_layer_cost(l, b, lam, real); });
}

// Final phase diagonal of the block-diagonal synthesis: ceil(l/L) + bL.
inline detail::Chosen optimal_phase_cost(CostInt l, CostInt b, const CostParams& params = {}) {
    const CostInt max_lambda = CostInt(1) << ceil_log2_ratio(std::max<CostInt>(l, 1), 1);
    return detail::choose_lambda(max_lambda, params, "final-phase", [&](CostInt lam) {
        QroamCost c;
        c.toffolis = ceil_div(l, lam) + b * lam;
        c.qubits = b * (lam - 1) + ceil_log2_ratio(l, lam);
        return c;
    });
}

// Permutation circuit cost C_P = 2^ceil(log l)/L'' + ceil(log l)(L''-1).
inline CostReport permutation_cost(CostInt l, CostInt lambda) {
    const CostInt v = ceil_log2_ratio(l, 1);
    QroamCost c = qroam_permutation_cost(v, lambda);
    CostReport r;
    r.add("permutation", c.toffolis, c.qubits, lambda);
    return r;
}

// Sign-fixup cost C_F = 2^ceil(log l)/L' + L' with L' + ceil(log(l/L')) qubits.
inline CostReport signfix_cost(CostInt l, CostInt lambda) {
    if (!is_power_of_two(lambda)) throw std::invalid_argument("lambda must be a power of two");
    const CostInt pow = CostInt(1) << ceil_log2_ratio(l, 1);
    if (lambda > pow) throw std::invalid_argument("lambda exceeds the padded dimension");
    CostReport r;
    r.add("sign-fix", pow / lambda + lambda, lambda + ceil_log2_ratio(l, lambda), lambda);
    return r;
}

namespace detail {

inline Chosen optimal_permutation(CostInt l, const CostParams& params) {
    const CostInt v = ceil_log2_ratio(l, 1);
    return choose_lambda(CostInt(1) << v, params, "permutation",
                         [&](CostInt lam) { return qroam_permutation_cost(v, lam); });
}

inline Chosen optimal_signfix(CostInt l, const CostParams& params) {
    const CostInt pow = CostInt(1) << ceil_log2_ratio(l, 1);
    return choose_lambda(pow, params, "sign-fix", [&](CostInt lam) {
        QroamCost c;
        c.toffolis = pow / lam + lam;
        c.qubits = lam + ceil_log2_ratio(l, lam);
        return c;
    });
}

}  // namespace detail

// Upper bound for synthesizing a dense l x l unitary as l alternating layers:
//   (l+1)(ceil(l/(2L)) + 2bL) + b + ceil(l/L') + L' + l ceil(log l)   (complex)
//   l(ceil(l/(2L)) + bL) + ceil(l/L') + L' + l ceil(log l)            (real)
inline CostReport synthesis_cost_dense(CostInt l, CostInt b, bool real,
                                       const CostParams& params = {}) {
    CostReport r;
    auto layer = optimal_layer_cost(l, b, real, params);
    r.add("layers", l * layer.toffolis, layer.qubits, layer.lambda);
    if (!real) r.add("final-phase", layer.toffolis + b, layer.qubits, layer.lambda);
    auto fix = detail::optimal_signfix(l, params);
    r.add("sign-fix", fix.toffolis, fix.qubits, fix.lambda);
    r.add("increments", l * ceil_log2_ratio(l, 1), 0, 0);
    return r;
}

// Block-diagonal layer-merged synthesis bound C_V: per-layer loads of a_r/2
// angles with individual lambdas plus address controls, the final diagonal,
// and the shift increments.
inline CostReport synthesis_cost_block_diag(const MergedPlan& merged, CostInt b, bool real,
                                            const CostParams& params = {}) {
    CostReport r;
    const CostInt l = merged.dim;
    CostInt layer_tof = 0, layer_qubits = 0, first_lambda = 0;
    for (int s = 0; s < merged.layer_count(); ++s) {
        const CostInt a = merged.active_width[s];
        auto pick = optimal_layer_cost(a, b, real, params);
        layer_tof += pick.toffolis + ceil_log2_ratio(l, a);
        layer_qubits = std::max(layer_qubits, pick.qubits);
        if (s == 0) first_lambda = pick.lambda;
    }
    r.add("block-layers", layer_tof, layer_qubits, first_lambda);
    if (!real) {
        auto phase = optimal_phase_cost(l, b, params);
        r.add("final-phase", phase.toffolis, phase.qubits, phase.lambda);
    }
    r.add("increments", static_cast<CostInt>(merged.layer_count()) * ceil_log2_ratio(l, 1), 0, 0);
    return r;
}

// Full site bound C_V + 2 C_P + C_F; both permutations are costed identically.
template <class T>
CostReport site_cost_sparse(const BlockDiagonalDecomposition<T>& dec, const MergedPlan& merged,
                            const CostParams& params = {}) {
    const bool real = merged.kind == ScalarKind::real;
    CostReport r = synthesis_cost_block_diag(merged, params.bitsize, real, params);
    auto perm = detail::optimal_permutation(dec.dim, params);
    r.add("permutation-in", perm.toffolis, perm.qubits, perm.lambda);
    r.add("permutation-out", perm.toffolis, perm.qubits, perm.lambda);
    auto fix = detail::optimal_signfix(dec.dim, params);
    r.add("sign-fix", fix.toffolis, fix.qubits, fix.lambda);
    return r;
}

// Dense baseline site bound (stage decomposition into cosine-sine rotation
// stages, two chi x chi unitaries, one block-diagonal stage, and a sign fix):
//   3(ceil(chi/L) + bL) + 2(chi+1)(ceil(chi/(2L')) + 2bL')
//     + (chi+1)(ceil(2chi/L'') + 2bL'') + 3(chi ceil(log chi) + b)
//     + ceil(4chi/L''') + L'''                                   (complex)
// with 2b -> b, (chi+1) -> chi and the trailing +b dropped in the real case.
inline CostReport site_cost_dense_baseline(CostInt chi, CostInt b, bool real,
                                           const CostParams& params = {}) {
    CostReport r;
    const CostInt reps = real ? chi : chi + 1;

    auto cs = detail::choose_lambda(
        CostInt(1) << ceil_log2_ratio(std::max<CostInt>(chi, 1), 1), params, "cs-rotations",
        [&](CostInt lam) {
            QroamCost c;
            c.toffolis = ceil_div(chi, lam) + b * lam;
            c.qubits = b * (lam - 1) + ceil_log2_ratio(std::max<CostInt>(chi, 1), lam);
            return c;
        });
    r.add("cs-rotations", 3 * cs.toffolis, cs.qubits, cs.lambda);

    auto w = optimal_layer_cost(chi, b, real, params, "subspace-unitaries");
    r.add("subspace-unitaries", 2 * reps * w.toffolis, w.qubits, w.lambda);

    auto u4 = detail::choose_lambda(
        CostInt(1) << ceil_log2_ratio(std::max<CostInt>(2 * chi, 1), 1), params, "block-unitary",
        [&](CostInt lam) {
            const CostInt width = real ? b : 2 * b;
            QroamCost c;
            c.toffolis = ceil_div(2 * chi, lam) + width * lam;
            c.qubits = width * (lam - 1) + ceil_log2_ratio(std::max<CostInt>(2 * chi, 1), lam);
            return c;
        });
    r.add("block-unitary", reps * u4.toffolis, u4.qubits, u4.lambda);

    r.add("bookkeeping", 3 * (chi * ceil_log2_ratio(std::max<CostInt>(chi, 1), 1) + (real ? 0 : b)),
          0, 0);

    auto fix = detail::choose_lambda(
        CostInt(1) << ceil_log2_ratio(std::max<CostInt>(4 * chi, 1), 1), params, "sign-fix",
        [&](CostInt lam) {
            QroamCost c;
            c.toffolis = ceil_div(4 * chi, lam) + lam;
            c.qubits = lam + ceil_log2_ratio(std::max<CostInt>(4 * chi, 1), lam);
            return c;
        });
    r.add("sign-fix", fix.toffolis, fix.qubits, fix.lambda);
    return r;
}

enum class CostMethod { sparse, dense, dense_real };

inline const char* to_string(CostMethod m) {
    switch (m) {
        case CostMethod::sparse: return "sparse";
        case CostMethod::dense: return "dense";
        default: return "dense_real";
    }
}

// Whole-chain estimate. Sites are summed; the ancilla peak is the maximum over
// sites since the preparation is sequential. The first site is costed as one
// synthesis of its isometry through the same machinery as every other site.
// Total qubits = n ceil(log D) + ceil(log chi) + b + transient peak.
template <class T>
CostReport mps_total_cost(const SymmetricMPS<T>& mps, CostMethod method,
                          const CostParams& params = {}) {
    const int n = mps.n_sites();
    if (method == CostMethod::dense_real && is_complex_v<T>)
        throw std::invalid_argument("method dense_real requires a real-valued MPS");
    CostReport total;
    CostInt chi = 1;
    for (const auto& t : mps.tensors) chi = std::max<CostInt>(chi, t.right.dim());
    chi = std::max<CostInt>(chi, mps.tensors.front().left.dim());

    for (int i = 0; i < n; ++i) {
        const auto& t = mps.tensors[i];
        CostReport site;
        if (method == CostMethod::sparse) {
            auto unit = compile_site(t);
            site = site_cost_sparse(unit.dec, unit.merged, params);
        } else {
            const CostInt chi_site = std::max(t.left.dim(), t.right.dim());
            site = site_cost_dense_baseline(chi_site, params.bitsize,
                                            method == CostMethod::dense_real, params);
        }
        total.add("site " + std::to_string(i + 1), site.toffolis, site.ancilla_peak, 0);
    }
    const CostInt site_qubits = static_cast<CostInt>(n) *
                                ceil_log2_ratio(mps.tensors.front().site.dim, 1);
    total.total_qubits = site_qubits + ceil_log2_ratio(chi, 1) + params.bitsize +
                         total.ancilla_peak;
    return total;
}

}  // namespace mpsprep
