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

#include <Eigen/Eigenvalues>

#include "mpsprep/cost.hpp"
#include "mpsprep/program.hpp"
#include "mpsprep/random.hpp"

namespace mpsprep {

// Source of the +-1 outcomes produced by X-basis measurements of angle and
// permutation ancilla registers. Measurement signs only matter on basis
// states with non-zero loaded data, so the simulator draws lazily; the final
// state must not depend on any outcome.
class SignOutcomeSource {
   public:
    enum class Mode { all_plus, seeded, exhaustive };

    static SignOutcomeSource all_plus() { return SignOutcomeSource(Mode::all_plus, 0, {}); }
    static SignOutcomeSource seeded(std::uint64_t seed) {
        return SignOutcomeSource(Mode::seeded, seed, {});
    }
    // Prescribed outcomes (false = +1); draws past the end return +1. A dry
    // run with an empty tape counts the consequential outcomes.
    static SignOutcomeSource exhaustive(std::vector<bool> outcomes) {
        return SignOutcomeSource(Mode::exhaustive, 0, std::move(outcomes));
    }

    int draw() {
        int s = 1;
        switch (mode_) {
            case Mode::all_plus: break;
            case Mode::seeded: s = (rng_.bits() & 1) ? -1 : 1; break;
            case Mode::exhaustive:
                if (cursor_ < tape_.size()) s = tape_[cursor_] ? -1 : 1;
                ++cursor_;
                break;
        }
        record_.push_back(s);
        return s;
    }

    std::size_t draws() const { return record_.size(); }
    const std::vector<int>& record() const { return record_; }
    Mode mode() const { return mode_; }

   private:
    SignOutcomeSource(Mode mode, std::uint64_t seed, std::vector<bool> tape)
        : mode_(mode), rng_(seed), tape_(std::move(tape)) {}

    Mode mode_;
    Rng rng_;
    std::vector<bool> tape_;
    std::size_t cursor_ = 0;
    std::vector<int> record_;
};

struct SimulationResult {
    Vector<Complex> site_state;       // amplitudes over the site registers, ancilla on |0>
    Matrix<Complex> ancilla_density;  // reduced state of the bond register

    double ancilla_trace_distance() const {
        Matrix<Complex> diff = ancilla_density;
        diff(0, 0) -= 1.0;
        Eigen::SelfAdjointEigenSolver<Matrix<Complex>> es(diff);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
    }
};

namespace detail {

inline constexpr double kSupportTolerance = 1e-14;

// The site unit acting on the (site register, low bond-register bits)
// subspace, applied structurally so that measurement-induced sign flips can be
// injected and corrected the way the compiled circuit would.
inline void apply_compiled_unit(Eigen::Ref<Matrix<Complex>> local, const MergedPlan& merged,
                                const std::vector<int>& q, const std::vector<int>& w,
                                SignOutcomeSource& signs) {
    const int l = static_cast<int>(local.rows());
    auto has_support = [&](int row) { return local.row(row).norm() > kSupportTolerance; };

    std::vector<int> sigma(l, 1);

    // Q^dag: basis j moves to the slot that q maps onto j.
    {
        std::vector<int> qinv(l);
        for (int p = 0; p < l; ++p) qinv[q[p]] = p;
        Matrix<Complex> moved(l, local.cols());
        std::vector<int> moved_sigma(l, 1);
        for (int j = 0; j < l; ++j) {
            int s = has_support(j) ? signs.draw() : 1;
            moved.row(qinv[j]) = static_cast<double>(s) * local.row(j);
            moved_sigma[qinv[j]] = s;
        }
        local = moved;
        sigma = moved_sigma;
    }

    // Rotation layers with angles adapted to the accumulated signs; every
    // block with non-zero loaded data picks up a fresh measurement sign on
    // both of its wires.
    for (const auto& layer : merged.layers) {
        RotationLayer adapted = adapt_layer_to_signs(layer, sigma);
        for (const auto& rot : adapted.rotations) {
            const int m = adapted.top_row(rot.block);
            if (rot.theta == 0 && rot.phi == 0) continue;
            Matrix<Complex> b =
                detail::rotation_block<Complex>(rot, BlockForm::ry_rz, merged.kind);
            Eigen::RowVectorXcd top = local.row(m), bot = local.row(m + 1);
            local.row(m) = b(0, 0) * top + b(0, 1) * bot;
            local.row(m + 1) = b(1, 0) * top + b(1, 1) * bot;
        }
        for (const auto& rot : adapted.rotations) {
            if (rot.theta == 0 && rot.phi == 0) continue;
            const int m = adapted.top_row(rot.block);
            if (!has_support(m) && !has_support(m + 1)) continue;
            const int s = signs.draw();
            if (s < 0) {
                local.row(m) *= -1.0;
                local.row(m + 1) *= -1.0;
                sigma[m] = -sigma[m];
                sigma[m + 1] = -sigma[m + 1];
            }
        }
    }

    // Final diagonal. Real plans defer their +-1 entries to the sign fix; the
    // complex phase rotation is applied physically and its angle registers
    // are measured away like the layers'.
    if (merged.kind == ScalarKind::real) {
        for (int j = 0; j < l; ++j)
            if (merged.final_phase[j] < 0) sigma[j] = -sigma[j];
    } else {
        for (int j = 0; j < l; ++j)
            local.row(j) *= std::polar(1.0, merged.final_phase[j]);
        for (int i = 0; i < l / 2; ++i) {
            const int m = 2 * i;
            const bool loaded = std::abs(merged.final_phase[m]) > 0 ||
                                std::abs(merged.final_phase[m + 1]) > 0;
            if (!loaded || (!has_support(m) && !has_support(m + 1))) continue;
            const int s = signs.draw();
            if (s < 0) {
                local.row(m) *= -1.0;
                local.row(m + 1) *= -1.0;
                sigma[m] = -sigma[m];
                sigma[m + 1] = -sigma[m + 1];
            }
        }
    }

    // W: slot i moves to basis w[i].
    {
        Matrix<Complex> moved(l, local.cols());
        std::vector<int> moved_sigma(l, 1);
        for (int i = 0; i < l; ++i) {
            int s = has_support(i) ? signs.draw() : 1;
            moved.row(w[i]) = static_cast<double>(s) * local.row(i);
            moved_sigma[w[i]] = sigma[i] * s;
        }
        local = moved;
        sigma = moved_sigma;
    }

    // Joint sign fix restores the exact site unitary.
    for (int j = 0; j < l; ++j)
        if (sigma[j] < 0) local.row(j) *= -1.0;
}

}  // namespace detail

// Runs the compiled preparation chain on a dense statevector: the first site's
// isometry acts as state preparation, every further site as Q^dag, adapted
// rotation layers, W, and a trailing sign fix. Returns the site-register
// amplitudes (bond ancilla projected on |0>) and the ancilla's reduced state.
template <class T>
SimulationResult simulate_preparation(const PreparationProgram<T>& prog,
                                      SignOutcomeSource& signs, int qubit_cap = 24) {
    const int n = prog.n, r = prog.site_bits, w = prog.anc_bits;
    const int total_bits = n * r + w;
    if (total_bits > qubit_cap)
        throw std::invalid_argument("simulation would need " + std::to_string(total_bits) +
                                    " qubits, above the cap of " + std::to_string(qubit_cap));
    const std::int64_t dim = std::int64_t(1) << total_bits;
    Vector<Complex> state = Vector<Complex>::Zero(dim);

    // Site 1 is plain state preparation of its isometry's only column; rows
    // are (d, v) pairs with stride B_1.
    {
        const int b1 = prog.first_bond;
        const int site1_shift = w + r * (n - 1);
        for (int d = 0; d < prog.site_dim; ++d) {
            for (int v = 0; v < b1; ++v) {
                Complex amp;
                if constexpr (is_complex_v<T>)
                    amp = prog.first_isometry(d * b1 + v, 0);
                else
                    amp = Complex(prog.first_isometry(d * b1 + v, 0), 0.0);
                const std::int64_t idx = (std::int64_t(d) << site1_shift) | v;
                state(idx) = amp;
            }
        }
    }

    // Remaining sites.
    for (int i = 2; i <= n; ++i) {
        const auto& unit = prog.sites[i - 1];
        const int wi = unit.anc_bits;
        const int l = unit.dim;
        const int site_shift = w + r * (n - i);
        const int mid_bits = site_shift - wi;
        const int hi_bits = total_bits - (site_shift + r);
        const std::int64_t n_rest = std::int64_t(1) << (mid_bits + hi_bits);
        Matrix<Complex> local(l, n_rest);
        const std::int64_t mid_mask = (std::int64_t(1) << mid_bits) - 1;
        for (std::int64_t t = 0; t < n_rest; ++t) {
            const std::int64_t base = ((t >> mid_bits) << (site_shift + r)) |
                                      ((t & mid_mask) << wi);
            for (int d = 0; d < (1 << r); ++d)
                for (int a = 0; a < (1 << wi); ++a)
                    local((d << wi) | a, t) =
                        state(base | (std::int64_t(d) << site_shift) | a);
        }
        detail::apply_compiled_unit(local, unit.merged, unit.dec.q, unit.dec.w, signs);
        for (std::int64_t t = 0; t < n_rest; ++t) {
            const std::int64_t base = ((t >> mid_bits) << (site_shift + r)) |
                                      ((t & mid_mask) << wi);
            for (int d = 0; d < (1 << r); ++d)
                for (int a = 0; a < (1 << wi); ++a)
                    state(base | (std::int64_t(d) << site_shift) | a) =
                        local((d << wi) | a, t);
        }
    }

    SimulationResult result;
    const std::int64_t anc_dim = std::int64_t(1) << w;
    const std::int64_t site_dim_total = dim >> w;
    result.ancilla_density = Matrix<Complex>::Zero(anc_dim, anc_dim);
    for (std::int64_t sidx = 0; sidx < site_dim_total; ++sidx)
        for (std::int64_t a = 0; a < anc_dim; ++a)
            for (std::int64_t a2 = 0; a2 < anc_dim; ++a2)
                result.ancilla_density(a, a2) +=
                    state((sidx << w) | a) * std::conj(state((sidx << w) | a2));

    // Site amplitudes in D-ary order (site 1 most significant), ancilla |0>.
    const int D = prog.site_dim;
    std::int64_t d_pow = 1;
    for (int i = 0; i < n; ++i) d_pow *= D;
    result.site_state = Vector<Complex>::Zero(d_pow);
    for (std::int64_t didx = 0; didx < d_pow; ++didx) {
        std::int64_t bits = 0, rest = didx;
        for (int i = n - 1; i >= 0; --i) {
            bits |= (rest % D) << (r * (n - 1 - i));
            rest /= D;
        }
        result.site_state(didx) = state(bits << w);
    }
    return result;
}

// Gate-level Toffoli count of the compiled program under the same QROAM and
// rotation conventions as the cost bounds (rotations cost b-2, shifts
// 2(ceil(log l)-1) per shifted layer); always at most the bound.
inline CostInt layer_instrumented_toffolis(CostInt active, CostInt l, CostInt b, bool real,
                                           CostInt lambda, bool shifted) {
    const CostInt width = real ? b : 2 * b;
    CostInt t = ceil_div(active, 2 * lambda) + width * (lambda - 1);
    t += (real ? 1 : 2) * std::max<CostInt>(b - 2, 0);
    t += ceil_log2_ratio(l, active);
    if (shifted) t += 2 * (ceil_log2_ratio(l, 1) - 1);
    return t;
}

template <class T>
CostInt instrumented_toffoli_count(const PreparationProgram<T>& prog,
                                   const CostParams& params = {}) {
    CostInt total = 0;
    const CostInt b = params.bitsize;
    for (const auto& unit : prog.sites) {
        const bool real = unit.merged.kind == ScalarKind::real;
        const CostInt l = unit.dim;
        const CostInt v = ceil_log2_ratio(l, 1);
        for (int s = 0; s < unit.merged.layer_count(); ++s) {
            const CostInt a = unit.merged.active_width[s];
            auto pick = optimal_layer_cost(a, b, real, params);
            total += layer_instrumented_toffolis(
                a, l, b, real, pick.lambda,
                unit.merged.layers[s].parity == Parity::shifted);
        }
        if (!real) {
            auto pick = optimal_phase_cost(l, b, params);
            total += ceil_div(l, pick.lambda) + b * (pick.lambda - 1) +
                     std::max<CostInt>(b - 2, 0);
        }
        auto perm = detail::optimal_permutation(l, params);
        total += 2 * ((std::int64_t(1) << v) / perm.lambda + v * (perm.lambda - 1));
        auto fix = detail::optimal_signfix(l, params);
        total += (std::int64_t(1) << v) / fix.lambda + (fix.lambda - 1);
    }
    return total;
}

}  // namespace mpsprep
