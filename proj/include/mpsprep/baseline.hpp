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
#include <Eigen/SVD>
#include <stdexcept>

#include "mpsprep/tensor.hpp"

namespace mpsprep {

// Factorization of a column-orthonormal stack [A; B] into
//   [[U1, 0], [0, U2]] [[D1, -D2], [D2, D1]] [V; 0]
// with real diagonal D1, D2 and the middle matrix column-orthonormal.
template <class T>
struct StackSplit {
    Matrix<T> u1, u2;              // m x m unitaries
    Eigen::VectorXd d1, d2;        // diagonals of the m x k rectangular-diagonal factors
    Matrix<T> v;                   // k x k unitary
    int m = 0, k = 0;
    double d2_offdiagonal = 0;     // norm of the dropped off-diagonal part of the polar factor

    Matrix<T> d1_rect() const { return rect(d1); }
    Matrix<T> d2_rect() const { return rect(d2); }

    // [A; B] rebuilt from the factors.
    Matrix<T> reconstruct() const {
        Matrix<T> top = u1 * rect(d1) * v;
        Matrix<T> bot = u2 * rect(d2) * v;
        Matrix<T> out(2 * m, k);
        out.topRows(m) = top;
        out.bottomRows(m) = bot;
        return out;
    }

   private:
    Matrix<T> rect(const Eigen::VectorXd& d) const {
        Matrix<T> r = Matrix<T>::Zero(m, k);
        for (int i = 0; i < k; ++i) r(i, i) = d(i);
        return r;
    }
};

namespace detail {

// Orthonormal completion of a tall matrix with orthonormal columns.
template <class T>
Matrix<T> complete_to_unitary(const Matrix<T>& iso) {
    const int m = static_cast<int>(iso.rows());
    const int k = static_cast<int>(iso.cols());
    Matrix<T> u(m, m);
    u.leftCols(k) = iso;
    if (m > k) {
        Eigen::ColPivHouseholderQR<Matrix<T>> qr(iso);
        Matrix<T> q = qr.householderQ() * Matrix<T>::Identity(m, m);
        u.rightCols(m - k) = q.rightCols(m - k);
    }
    return u;
}

}  // namespace detail

// Splits a column-orthonormal stack [A; B] (A, B both m x k, m >= k) via an
// SVD of A and a polar decomposition of B V^dag. The polar step keeps D2
// diagonal even when B is rank-deficient, where a QR factor would not be.
template <class T>
StackSplit<T> split_orthonormal(const Matrix<T>& a, const Matrix<T>& b, double tol = 1e-8) {
    const int m = static_cast<int>(a.rows());
    const int k = static_cast<int>(a.cols());
    if (b.rows() != m || b.cols() != k)
        throw std::invalid_argument("stack halves must have equal shapes");
    if (m < k) throw std::invalid_argument("stack halves must be at least as tall as wide");
    {
        Matrix<T> gram = a.adjoint() * a + b.adjoint() * b;
        double residual = (gram - Matrix<T>::Identity(k, k)).norm();
        if (residual > tol)
            throw std::invalid_argument("stack columns are not orthonormal (residual " +
                                        std::to_string(residual) + ")");
    }

    StackSplit<T> s;
    s.m = m;
    s.k = k;

    Eigen::JacobiSVD<Matrix<T>> svd_a(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    s.u1 = svd_a.matrixU();
    s.v = svd_a.matrixV().adjoint();
    s.d1 = Eigen::VectorXd::Zero(k);
    s.d1.head(svd_a.singularValues().size()) = svd_a.singularValues();

    // Polar decomposition of B V^dag = P H with H = Y S Y^dag positive
    // semi-definite; H^2 = I - D1^dag D1 is diagonal, hence so is H.
    Matrix<T> bv = b * svd_a.matrixV();
    Eigen::JacobiSVD<Matrix<T>> svd_b(bv, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Matrix<T> p = svd_b.matrixU() * svd_b.matrixV().adjoint();
    Matrix<T> h = svd_b.matrixV() * svd_b.singularValues().asDiagonal() *
                  svd_b.matrixV().adjoint();
    s.d2 = h.real().diagonal();
    Matrix<T> offdiag = h;
    offdiag.diagonal().setZero();
    s.d2_offdiagonal = offdiag.norm();
    s.u2 = detail::complete_to_unitary(p);
    return s;
}

// Staged decomposition of a (4m) x k site isometry into cosine-sine rotation
// stages, two controlled unitaries, one block-diagonal stage, and the bond
// unitary V that is pushed onto the previous site.
template <class T>
struct BaselineSiteCircuit {
    int m = 0, k = 0;
    Eigen::VectorXd d1, d1p, d2, d2p, d3, d3p;  // expanded m-entry diagonals
    Matrix<T> w1, w2;
    Matrix<T> u1, u2, u3, u4;
    Matrix<T> v;  // k x k, reattached to the previous site

    // Dense product of the six stages (without v), a 4m x 4m unitary.
    Matrix<T> staged_product() const {
        const int mm = m;
        auto cs_stage = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& sn, int lo) {
            Matrix<T> s = Matrix<T>::Identity(4 * mm, 4 * mm);
            for (int i = 0; i < mm; ++i) {
                s(lo * mm + i, lo * mm + i) = c(i);
                s(lo * mm + i, (lo + 1) * mm + i) = -sn(i);
                s((lo + 1) * mm + i, lo * mm + i) = sn(i);
                s((lo + 1) * mm + i, (lo + 1) * mm + i) = c(i);
            }
            return s;
        };
        Matrix<T> s1 = Matrix<T>::Zero(4 * mm, 4 * mm);
        for (int i = 0; i < mm; ++i) {
            s1(i, i) = d1(i);
            s1(i, mm + i) = -d1p(i);
            s1(mm + i, i) = d1p(i);
            s1(mm + i, mm + i) = d1(i);
            s1(2 * mm + i, 2 * mm + i) = d1(i);
            s1(2 * mm + i, 3 * mm + i) = -d1p(i);
            s1(3 * mm + i, 2 * mm + i) = d1p(i);
            s1(3 * mm + i, 3 * mm + i) = d1(i);
        }
        Matrix<T> s2 = Matrix<T>::Identity(4 * mm, 4 * mm);
        for (int b = 1; b < 4; ++b) s2.block(b * mm, b * mm, mm, mm) = w1;
        Matrix<T> s3 = cs_stage(d2, d2p, 1);
        Matrix<T> s4 = Matrix<T>::Identity(4 * mm, 4 * mm);
        s4.block(2 * mm, 2 * mm, mm, mm) = w2;
        s4.block(3 * mm, 3 * mm, mm, mm) = w2;
        Matrix<T> s5 = cs_stage(d3, d3p, 2);
        Matrix<T> s6 = Matrix<T>::Zero(4 * mm, 4 * mm);
        s6.block(0, 0, mm, mm) = u1;
        s6.block(mm, mm, mm, mm) = u2;
        s6.block(2 * mm, 2 * mm, mm, mm) = u3;
        s6.block(3 * mm, 3 * mm, mm, mm) = u4;
        return s6 * s5 * s4 * s3 * s2 * s1;
    }

    // First k columns of the site unitary after reattaching v: compare this
    // against the input isometry.
    Matrix<T> reconstruct_isometry() const {
        Matrix<T> vin = Matrix<T>::Zero(4 * m, k);
        vin.topRows(k) = v;
        return staged_product() * vin;
    }
};

// Staged decomposition of the stacked site isometry: two QR passes peel the
// lower blocks, then three stack splits produce the cosine-sine stages. The
// blocks A_1..A_4 must have equal heights; if the height is below the width
// the input is zero-padded per block.
template <class T>
BaselineSiteCircuit<T> berry_decompose(const Matrix<T>& u_in, double tol = 1e-8) {
    if (u_in.rows() % 4 != 0)
        throw std::invalid_argument("site isometry height must be divisible by the site dimension 4");
    const int k = static_cast<int>(u_in.cols());
    int m = static_cast<int>(u_in.rows()) / 4;
    Matrix<T> u = u_in;
    if (m < k) {
        // pad each block to height k
        Matrix<T> padded = Matrix<T>::Zero(4 * k, k);
        for (int j = 0; j < 4; ++j) padded.block(j * k, 0, m, k) = u_in.block(j * m, 0, m, k);
        u = std::move(padded);
        m = k;
    }
    {
        double residual =
            (u.adjoint() * u - Matrix<T>::Identity(k, k)).norm();
        if (residual > tol)
            throw std::invalid_argument("input columns are not orthonormal (residual " +
                                        std::to_string(residual) + ")");
    }

    BaselineSiteCircuit<T> c;
    c.m = m;
    c.k = k;
    auto a1 = u.topRows(m);

    // QR of the lower three blocks: [A2; A3; A4] = [B2; B3; B4] R2.
    Matrix<T> lower = u.bottomRows(3 * m);
    Eigen::HouseholderQR<Matrix<T>> qr1(lower);
    Matrix<T> q1 = qr1.householderQ() * Matrix<T>::Identity(3 * m, m);
    Matrix<T> r2 = Matrix<T>::Zero(m, k);
    r2.topRows(std::min(m, k)) =
        qr1.matrixQR().topRows(std::min(m, k)).template triangularView<Eigen::Upper>();
    Matrix<T> b2 = q1.topRows(m), b3 = q1.middleRows(m, m), b4 = q1.bottomRows(m);

    // QR of the lower two B blocks: [B3; B4] = [C3; C4] S3.
    Matrix<T> lower2(2 * m, m);
    lower2.topRows(m) = b3;
    lower2.bottomRows(m) = b4;
    Eigen::HouseholderQR<Matrix<T>> qr2(lower2);
    Matrix<T> q2 = qr2.householderQ() * Matrix<T>::Identity(2 * m, m);
    Matrix<T> s3 = qr2.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
    Matrix<T> c3 = q2.topRows(m), c4 = q2.bottomRows(m);

    // Three stack splits. [A1; R2], [B2; S3] and [C3; C4] all have
    // orthonormal columns by construction.
    auto l1 = split_orthonormal<T>(a1, r2, tol);
    auto l2 = split_orthonormal<T>(b2, s3, tol);
    auto l3 = split_orthonormal<T>(c3, c4, tol);

    auto expand = [m](const Eigen::VectorXd& d, int k_, double fill) {
        Eigen::VectorXd e = Eigen::VectorXd::Constant(m, fill);
        e.head(k_) = d;
        return e;
    };
    c.d1 = expand(l1.d1, k, 1.0);
    c.d1p = expand(l1.d2, k, 0.0);
    c.d2 = expand(l2.d1, m, 1.0);
    c.d2p = expand(l2.d2, m, 0.0);
    c.d3 = expand(l3.d1, m, 1.0);
    c.d3p = expand(l3.d2, m, 0.0);
    c.u1 = l1.u1;
    c.u2 = l2.u1;
    c.u3 = l3.u1;
    c.u4 = l3.u2;
    c.w1 = l2.v * l1.u2;  // V' U~
    c.w2 = l3.v * l2.u2;  // V'' U^
    c.v = l1.v;
    return c;
}

}  // namespace mpsprep
