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

#include <cassert>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mpsprep/tensor.hpp"

namespace mpsprep {

// Angles below this magnitude are stored as exact zeros so that identity
// blocks compress out of the plan.
inline constexpr double kAngleZeroTolerance = 1e-14;

enum class Parity { unshifted, shifted };

inline Parity opposite(Parity p) {
    return p == Parity::unshifted ? Parity::shifted : Parity::unshifted;
}

enum class BlockForm { givens_raw, ry_rz };

struct Rotation {
    int block = 0;  // block i sits on rows (2i, 2i+1) unshifted, (2i+1, 2i+2) shifted
    double theta = 0;
    double phi = 0;  // raw Givens phase, or the R_z angle once folded; 0 for real plans
};

struct RotationLayer {
    Parity parity = Parity::unshifted;
    std::vector<Rotation> rotations;

    int top_row(int block) const {
        return parity == Parity::unshifted ? 2 * block : 2 * block + 1;
    }
};

// Ordered rotation layers plus a final diagonal: the represented matrix is
// D * L_s * ... * L_1 with layers[0] = L_1 applied first. For real plans
// final_phase holds the +-1 diagonal entries, otherwise the phase angles.
struct SynthesisPlan {
    int dim = 0;
    ScalarKind kind = ScalarKind::real;
    BlockForm form = BlockForm::ry_rz;
    std::vector<RotationLayer> layers;
    std::vector<double> final_phase;

    int layer_count() const { return static_cast<int>(layers.size()); }
};

inline double wrap_angle(double a) {
    a = std::fmod(a + std::numbers::pi, 2 * std::numbers::pi);
    if (a <= 0) a += 2 * std::numbers::pi;
    return a - std::numbers::pi;
}

namespace detail {

// 2x2 block of one plan rotation in the requested scalar type.
template <class T>
Matrix<T> rotation_block(const Rotation& r, BlockForm form, ScalarKind kind) {
    const double c = std::cos(r.theta), s = std::sin(r.theta);
    Matrix<T> b(2, 2);
    if (kind == ScalarKind::real) {
        b(0, 0) = c;
        b(0, 1) = -s;
        b(1, 0) = s;
        b(1, 1) = c;
        return b;
    }
    if constexpr (is_complex_v<T>) {
        if (form == BlockForm::givens_raw) {
            const Complex ph = std::polar(1.0, r.phi);
            b(0, 0) = ph * c;
            b(0, 1) = -s;
            b(1, 0) = ph * s;
            b(1, 1) = c;
        } else {  // R_y(theta) * R_z(phi)
            const Complex em = std::polar(1.0, -r.phi), ep = std::polar(1.0, r.phi);
            b(0, 0) = c * em;
            b(0, 1) = -s * ep;
            b(1, 0) = s * em;
            b(1, 1) = c * ep;
        }
        return b;
    }
    throw std::logic_error("complex plan cannot be reconstructed into a real matrix");
}

template <class T>
void apply_layer_left(const RotationLayer& layer, BlockForm form, ScalarKind kind, Matrix<T>& m) {
    for (const auto& r : layer.rotations) {
        if (r.theta == 0 && r.phi == 0) continue;
        const int a = layer.top_row(r.block);
        Matrix<T> b = rotation_block<T>(r, form, kind);
        Eigen::Matrix<T, 1, Eigen::Dynamic> top = m.row(a), bot = m.row(a + 1);
        m.row(a) = b(0, 0) * top + b(0, 1) * bot;
        m.row(a + 1) = b(1, 0) * top + b(1, 1) * bot;
    }
}

}  // namespace detail

// Multiplies the plan's layers (first layer = rightmost factor) and final
// diagonal into a dense matrix.
template <class T>
Matrix<T> reconstruct(const SynthesisPlan& plan) {
    if (plan.kind == ScalarKind::cplx && !is_complex_v<T>)
        throw std::invalid_argument("complex plan requires a complex reconstruction type");
    Matrix<T> m = Matrix<T>::Identity(plan.dim, plan.dim);
    for (const auto& layer : plan.layers) detail::apply_layer_left(layer, plan.form, plan.kind, m);
    if (!plan.final_phase.empty()) {
        for (int j = 0; j < plan.dim; ++j) {
            if (plan.kind == ScalarKind::real) {
                m.row(j) *= static_cast<T>(plan.final_phase[j]);
            } else if constexpr (is_complex_v<T>) {
                m.row(j) *= std::polar(1.0, plan.final_phase[j]);
            }
        }
    }
    return m;
}

namespace detail {

struct SweepRotation {
    int wire = 0;  // top wire of the pair (wire, wire+1)
    double theta = 0;
    double phi = 0;
};

// Greedy earliest-slot packing of a rotation sequence (application order) into
// parity-alternating layers. The diagonal-by-diagonal sweep order guarantees
// at most `dim` slots; this is asserted by the caller.
inline std::vector<RotationLayer> pack_layers(const std::vector<SweepRotation>& seq, int dim) {
    std::vector<RotationLayer> layers;
    std::vector<int> busy(dim, -1);  // highest slot index occupying the wire
    int start_parity = -1;
    for (const auto& rot : seq) {
        const int p = rot.wire % 2;
        if (start_parity < 0) start_parity = p;
        int slot = std::max(busy[rot.wire], busy[rot.wire + 1]) + 1;
        if ((start_parity + slot) % 2 != p) ++slot;
        while (static_cast<int>(layers.size()) <= slot) {
            RotationLayer l;
            l.parity = ((start_parity + layers.size()) % 2 == 0) ? Parity::unshifted
                                                                 : Parity::shifted;
            layers.push_back(l);
        }
        Rotation r;
        r.block = (rot.wire - (p == 1 ? 1 : 0)) / 2;
        r.theta = rot.theta;
        r.phi = rot.phi;
        layers[slot].rotations.push_back(r);
        busy[rot.wire] = busy[rot.wire + 1] = slot;
    }
    return layers;
}

template <class T>
void check_unitary(const Matrix<T>& u, double tol) {
    if (u.rows() != u.cols()) throw std::invalid_argument("matrix is not square");
    double residual = (u.adjoint() * u - Matrix<T>::Identity(u.cols(), u.cols())).norm();
    if (residual > tol)
        throw std::invalid_argument("matrix is not unitary (residual " + std::to_string(residual) +
                                    ")");
}

// Diagonal-by-diagonal sweep zeroing the strict lower triangle with
// alternating column (right-multiplied) and row (left-multiplied) Givens
// rotations, then rewriting everything as D * G_k * ... * G_1.
template <class T>
SynthesisPlan clements_sweep(Matrix<T> u) {
    constexpr bool cplx = is_complex_v<T>;
    const int n = static_cast<int>(u.rows());
    const double scale = std::sqrt(static_cast<double>(n));

    struct Op {
        bool left;
        int wire;
        double theta, phi;
    };
    std::vector<Op> left_ops, right_ops;

    for (int k = 1; k <= n - 1; ++k) {
        const int d = n - k;
        if (k % 2 == 1) {
            for (int r = n - 1; r >= n - k; --r) {
                const int c = r - d;
                const T a = u(r, c), b = u(r, c + 1);
                double theta = 0, phi = 0;
                if constexpr (cplx) {
                    if (std::abs(a) < kAngleZeroTolerance) continue;
                    theta = std::atan2(std::abs(a), std::abs(b));
                    phi = wrap_angle(std::arg(a) - std::arg(b));
                } else {
                    if (std::abs(a) < kAngleZeroTolerance) continue;
                    theta = std::atan2(a, b);
                }
                const double co = std::cos(theta), si = std::sin(theta);
                // u <- u * T^{-1}(theta, phi) on columns (c, c+1)
                Vector<T> colc = u.col(c), colc1 = u.col(c + 1);
                T ph;
                if constexpr (cplx)
                    ph = std::polar(1.0, -phi);
                else
                    ph = 1.0;
                u.col(c) = ph * co * colc - si * colc1;
                u.col(c + 1) = ph * si * colc + co * colc1;
                assert(std::abs(u(r, c)) < 1e-12 * scale);
                right_ops.push_back({false, c, theta, phi});
            }
        } else {
            for (int r = n - k; r <= n - 1; ++r) {
                const int c = r - d;
                const T a = u(r - 1, c), b = u(r, c);
                double theta = 0, phi = 0;
                if constexpr (cplx) {
                    if (std::abs(b) < kAngleZeroTolerance) continue;
                    theta = std::atan2(std::abs(b), std::abs(a));
                    phi = wrap_angle(std::numbers::pi + std::arg(b) - std::arg(a));
                } else {
                    if (std::abs(b) < kAngleZeroTolerance) continue;
                    theta = std::atan2(-b, a);
                }
                const double co = std::cos(theta), si = std::sin(theta);
                // u <- G(theta, phi) * u on rows (r-1, r)
                Eigen::Matrix<T, 1, Eigen::Dynamic> top = u.row(r - 1), bot = u.row(r);
                T ph;
                if constexpr (cplx)
                    ph = std::polar(1.0, phi);
                else
                    ph = 1.0;
                u.row(r - 1) = ph * co * top - si * bot;
                u.row(r) = ph * si * top + co * bot;
                assert(std::abs(u(r, c)) < 1e-12 * scale);
                left_ops.push_back({true, r - 1, theta, phi});
            }
        }
    }
    (void)scale;

    // Residual diagonal.
    std::vector<Complex> diag(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i != j && std::abs(u(i, j)) > 1e-9)
                throw std::runtime_error("sweep left a non-diagonal residual");
        }
        Complex dj;
        if constexpr (cplx)
            dj = u(j, j);
        else
            dj = Complex(u(j, j), 0.0);
        if (std::abs(std::abs(dj) - 1.0) > 1e-9)
            throw std::runtime_error("sweep residual diagonal is not unimodular");
        diag[j] = dj / std::abs(dj);
    }

    // Factor sequence left to right:
    //   [diag(e^{-i phi_j}) G(-theta_j, 0)] for each left op, the residual
    //   diagonal, then the inverted right ops G(theta, phi) in reverse order.
    // The pending diagonal is pushed to the far left through every G factor:
    //   G(theta, phi) diag(dm, dn) = diag(dn, dn) G(theta, phi + arg dm - arg dn).
    std::vector<Complex> pending(n, Complex(1.0, 0.0));
    std::deque<SweepRotation> emitted;

    auto push_g = [&](int wire, double theta, double phi) {
        const Complex dm = pending[wire], dn = pending[wire + 1];
        if constexpr (cplx) {
            double phi2 = wrap_angle(phi + std::arg(dm) - std::arg(dn));
            pending[wire] = dn;
            if (std::abs(theta) < kAngleZeroTolerance) {
                // G(0, phi2) is itself diagonal; fold it into pending.
                pending[wire] = dn * std::polar(1.0, phi2);
                return;
            }
            emitted.push_front({wire, theta, phi2});
        } else {
            const double sm = dm.real(), sn = dn.real();
            if (std::abs(theta) < kAngleZeroTolerance) return;
            emitted.push_front({wire, sm * sn * theta, 0.0});
        }
    };

    for (const auto& op : right_ops) push_g(op.wire, op.theta, op.phi);
    for (int j = 0; j < n; ++j) pending[j] *= diag[j];
    for (auto it = left_ops.rbegin(); it != left_ops.rend(); ++it) {
        push_g(it->wire, -it->theta, 0.0);
        if constexpr (cplx) pending[it->wire] *= std::polar(1.0, -it->phi);
    }

    SynthesisPlan plan;
    plan.dim = n;
    plan.kind = cplx ? ScalarKind::cplx : ScalarKind::real;
    plan.form = BlockForm::givens_raw;
    std::vector<SweepRotation> application_order(emitted.rbegin(), emitted.rend());
    plan.layers = pack_layers(application_order, n);
    if (static_cast<int>(plan.layers.size()) > n)
        throw std::runtime_error("layer packing exceeded the dimension bound");
    plan.final_phase.resize(n);
    for (int j = 0; j < n; ++j)
        plan.final_phase[j] = cplx ? std::arg(pending[j]) : (pending[j].real() < 0 ? -1.0 : 1.0);
    return plan;
}

}  // namespace detail

// Raw alternating-layer decomposition U = D~ G_k ... G_1 with plain Givens
// blocks. The sweep handles odd dimensions directly (a shifted or unshifted
// layer simply leaves its unpaired wires alone), which keeps the layer count
// at most l for every dimension.
template <class T>
SynthesisPlan clements_decompose_raw(const Matrix<T>& u_in, double unitarity_tol = 1e-8) {
    detail::check_unitary(u_in, unitarity_tol);
    const int l = static_cast<int>(u_in.rows());
    if (l == 1) {
        SynthesisPlan plan;
        plan.dim = 1;
        plan.kind = scalar_kind_of<T>();
        plan.form = BlockForm::givens_raw;
        if constexpr (is_complex_v<T>)
            plan.final_phase = {std::arg(u_in(0, 0))};
        else
            plan.final_phase = {u_in(0, 0) < 0 ? -1.0 : 1.0};
        return plan;
    }
    SynthesisPlan plan = detail::clements_sweep(Matrix<T>(u_in));
    // Drop trailing all-identity layers.
    while (!plan.layers.empty() && plan.layers.back().rotations.empty()) plan.layers.pop_back();
    return plan;
}

// Rewrites raw Givens blocks as R_y(theta) R_z(phi') blocks: each block's
// scalar phase (phi + beta_m + beta_n)/2 is pushed onto both wires of the
// block and travels left, ending up in the final diagonal.
inline SynthesisPlan fold_phases(const SynthesisPlan& raw) {
    if (raw.form != BlockForm::givens_raw)
        throw std::invalid_argument("fold_phases expects a raw Givens plan");
    SynthesisPlan plan = raw;
    plan.form = BlockForm::ry_rz;
    if (plan.kind == ScalarKind::real) return plan;

    std::vector<double> beta(plan.dim, 0.0);
    for (auto& layer : plan.layers) {
        for (auto& r : layer.rotations) {
            const int m = layer.top_row(r.block);
            const double b1 = beta[m], b2 = beta[m + 1];
            const double bp = (r.phi + b1 + b2) / 2;
            const double phip = (b2 - b1 - r.phi) / 2;
            r.phi = wrap_angle(phip);
            beta[m] = beta[m + 1] = bp;
        }
    }
    for (int j = 0; j < plan.dim; ++j)
        plan.final_phase[j] = wrap_angle(plan.final_phase[j] + beta[j]);
    return plan;
}

// Full synthesis: alternating R_y/R_z layers plus a final diagonal. For
// scalar_kind real the plan carries no phase angles and a +-1 diagonal.
template <class T>
SynthesisPlan clements_decompose(const Matrix<T>& u, ScalarKind kind = scalar_kind_of<T>(),
                                 double unitarity_tol = 1e-8) {
    if constexpr (is_complex_v<T>) {
        if (kind == ScalarKind::real) {
            double imag_norm = u.imag().norm();
            if (imag_norm > 1e-10)
                throw std::invalid_argument("requested a real plan for a complex matrix (|Im| = " +
                                            std::to_string(imag_norm) + ")");
            Matrix<double> ur = u.real();
            return clements_decompose(ur, ScalarKind::real, unitarity_tol);
        }
        return fold_phases(clements_decompose_raw(u, unitarity_tol));
    } else {
        if (kind == ScalarKind::cplx) {
            Matrix<Complex> uc = u.template cast<Complex>();
            return fold_phases(clements_decompose_raw(uc, unitarity_tol));
        }
        return fold_phases(clements_decompose_raw(u, unitarity_tol));
    }
}

// Flips the rotation angles so that L' diag(signs) = diag(signs) L. The R_z
// parts and the final diagonal commute with sign flips, so only theta moves.
inline RotationLayer adapt_layer_to_signs(const RotationLayer& layer,
                                          const std::vector<int>& signs) {
    RotationLayer out = layer;
    for (auto& r : out.rotations) {
        const int m = out.top_row(r.block);
        if (signs[m] * signs[m + 1] < 0) r.theta = -r.theta;
    }
    return out;
}

// Commutes a +-1 diagonal from the right of the plan to its left:
// reconstruct(plan') diag(out) = diag(in) reconstruct(plan), with out == in.
inline std::pair<SynthesisPlan, std::vector<int>> propagate_signs(const SynthesisPlan& plan,
                                                                  const std::vector<int>& signs) {
    if (static_cast<int>(signs.size()) != plan.dim)
        throw std::invalid_argument("sign vector length must equal the plan dimension");
    SynthesisPlan out = plan;
    for (auto& layer : out.layers) layer = adapt_layer_to_signs(layer, signs);
    return {std::move(out), signs};
}

}  // namespace mpsprep
