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

#include <gtest/gtest.h>

#include "mpsprep/baseline.hpp"
#include "mpsprep/canonical.hpp"
#include "mpsprep/random.hpp"
#include "test_util.hpp"

namespace {

using namespace mpsprep;
using mpsprep::testing::random_isometry;
using mpsprep::testing::random_unitary;
using mpsprep::testing::unitary_residual;

template <class T>
void expect_split_valid(const Matrix<T>& a, const Matrix<T>& b, double tol = 1e-10) {
    auto s = split_orthonormal<T>(a, b);
    Matrix<T> stack(2 * s.m, s.k);
    stack.topRows(s.m) = a;
    stack.bottomRows(s.m) = b;
    EXPECT_LT((s.reconstruct() - stack).norm(), tol);
    // D1^2 + D2^2 = I on the diagonal.
    for (int i = 0; i < s.k; ++i)
        EXPECT_NEAR(s.d1(i) * s.d1(i) + s.d2(i) * s.d2(i), 1.0, 1e-12);
    EXPECT_LT(unitary_residual(s.u1), 1e-10);
    EXPECT_LT(unitary_residual(s.u2), 1e-10);
    EXPECT_LT(unitary_residual(s.v), 1e-10);
    // The middle block matrix has orthonormal columns.
    Matrix<T> mid(2 * s.m, 2 * s.k);
    mid.topLeftCorner(s.m, s.k) = s.d1_rect();
    mid.topRightCorner(s.m, s.k) = -s.d2_rect();
    mid.bottomLeftCorner(s.m, s.k) = s.d2_rect();
    mid.bottomRightCorner(s.m, s.k) = s.d1_rect();
    EXPECT_LT(unitary_residual(mid), 1e-10);
}

TEST(StackSplit, IdentityAndZeroHalves) {
    Matrix<double> a = Matrix<double>::Zero(3, 2);
    a(0, 0) = 1;
    a(1, 1) = 1;
    Matrix<double> b = Matrix<double>::Zero(3, 2);
    auto s = split_orthonormal<double>(a, b);
    EXPECT_NEAR(s.d1(0), 1.0, 1e-14);
    EXPECT_NEAR(s.d1(1), 1.0, 1e-14);
    EXPECT_NEAR(s.d2.norm(), 0.0, 1e-14);
    expect_split_valid<double>(a, b);

    // Swapped roles: A = 0 forces D1 = 0, D2 = I.
    auto s2 = split_orthonormal<double>(b, a);
    EXPECT_NEAR(s2.d1.norm(), 0.0, 1e-14);
    EXPECT_NEAR(s2.d2(0), 1.0, 1e-14);
    EXPECT_NEAR(s2.d2(1), 1.0, 1e-14);
    expect_split_valid<double>(b, a);
}

TEST(StackSplit, RandomStacks) {
    Rng rng(1);
    for (int m : {2, 4, 8, 16}) {
        for (int k = 1; k <= m; k += std::max(1, m / 3)) {
            auto stack = random_isometry<double>(2 * m, k, rng);
            expect_split_valid<double>(stack.topRows(m).eval(), stack.bottomRows(m).eval());
            auto cstack = random_isometry<Complex>(2 * m, k, rng);
            expect_split_valid<Complex>(cstack.topRows(m).eval(), cstack.bottomRows(m).eval());
        }
    }
}

TEST(StackSplit, EightByThreeExample) {
    Rng rng(2);
    auto stack = random_isometry<double>(8, 3, rng);
    auto s = split_orthonormal<double>(stack.topRows(4).eval(), stack.bottomRows(4).eval());
    EXPECT_LT((s.reconstruct() - stack).norm(), 1e-10);
}

TEST(StackSplit, RankDeficientBKeepsDiagonalD2) {
    // Engineer B V^dag with an exactly zero column: sigma_1(A) = 1.
    Rng rng(3);
    const int m = 4, k = 3;
    Eigen::VectorXd c(k), sn(k);
    c << 1.0, 0.6, 0.3;
    for (int i = 0; i < k; ++i) sn(i) = std::sqrt(1.0 - c(i) * c(i));
    auto u1 = random_unitary<double>(m, rng);
    auto u2 = random_unitary<double>(m, rng);
    auto v = random_unitary<double>(k, rng);
    Matrix<double> d1 = Matrix<double>::Zero(m, k), d2 = Matrix<double>::Zero(m, k);
    for (int i = 0; i < k; ++i) {
        d1(i, i) = c(i);
        d2(i, i) = sn(i);
    }
    Matrix<double> a = u1 * d1 * v, b = u2 * d2 * v;
    auto s = split_orthonormal<double>(a, b);
    // The split's own factors must reproduce the stack with diagonal D2.
    Matrix<double> stack(2 * m, k);
    stack.topRows(m) = a;
    stack.bottomRows(m) = b;
    EXPECT_LT((s.reconstruct() - stack).norm(), 1e-10);
    EXPECT_NEAR(s.d2(0), 0.0, 1e-12);
    for (int i = 0; i < k; ++i)
        EXPECT_NEAR(s.d1(i) * s.d1(i) + s.d2(i) * s.d2(i), 1.0, 1e-12);
}

TEST(StackSplit, RejectsNonOrthonormal) {
    Matrix<double> a = Matrix<double>::Ones(3, 2);
    Matrix<double> b = Matrix<double>::Ones(3, 2);
    EXPECT_THROW(split_orthonormal<double>(a, b), std::invalid_argument);
}

TEST(BerryDecompose, ProductStateSite) {
    Matrix<double> u = Matrix<double>::Zero(4, 1);
    u(2, 0) = 1.0;
    auto c = berry_decompose(u);
    EXPECT_LT((c.reconstruct_isometry() - u).norm(), 1e-10);
    EXPECT_LT(unitary_residual(c.staged_product()), 1e-10);
}

TEST(BerryDecompose, RandomSitesReconstruct) {
    Rng rng(5);
    for (int m : {2, 8}) {
        for (int k : {1, m / 2, m}) {
            if (k < 1) continue;
            auto u = random_isometry<double>(4 * m, k, rng);
            auto c = berry_decompose(u);
            EXPECT_LT((c.reconstruct_isometry() - u).norm(), 1e-9) << "m=" << m << " k=" << k;
            EXPECT_LT(unitary_residual(c.staged_product()), 1e-9);
        }
    }
}

TEST(BerryDecompose, ComplexSitesReconstruct) {
    Rng rng(7);
    auto u = random_isometry<Complex>(16, 4, rng);
    auto c = berry_decompose(u);
    EXPECT_LT((c.reconstruct_isometry() - u).norm(), 1e-9);
}

TEST(BerryDecompose, RealInputsYieldRealFactors) {
    // With T = double every factor is real by construction; additionally the
    // cosine-sine stages must be orthogonal.
    Rng rng(9);
    auto u = random_isometry<double>(16, 3, rng);
    auto c = berry_decompose(u);
    for (const Eigen::VectorXd* d : {&c.d1, &c.d2, &c.d3}) {
        for (int i = 0; i < d->size(); ++i) EXPECT_LE(std::abs((*d)(i)), 1.0 + 1e-12);
    }
    for (int i = 0; i < c.m; ++i) {
        EXPECT_NEAR(c.d1(i) * c.d1(i) + c.d1p(i) * c.d1p(i), 1.0, 1e-10);
        EXPECT_NEAR(c.d2(i) * c.d2(i) + c.d2p(i) * c.d2p(i), 1.0, 1e-10);
        EXPECT_NEAR(c.d3(i) * c.d3(i) + c.d3p(i) * c.d3p(i), 1.0, 1e-10);
    }
}

TEST(BerryDecompose, CanonicalMpsSites) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto mps =
            right_canonicalize(random_symmetric_mps<double>(4, 12, Charge{3, 1}, 200 + seed));
        for (const auto& t : mps.tensors) {
            auto [u, pattern] = site_isometry(t);
            auto c = berry_decompose(u);
            Matrix<double> rebuilt = c.reconstruct_isometry();
            const int m_in = static_cast<int>(u.rows()) / 4;
            double residual = 0;
            for (int j = 0; j < 4; ++j) {
                residual += (rebuilt.block(j * c.m, 0, m_in, c.k) -
                             u.block(j * m_in, 0, m_in, c.k))
                                .squaredNorm();
                residual += rebuilt.block(j * c.m + m_in, 0, c.m - m_in, c.k).squaredNorm();
            }
            EXPECT_LT(std::sqrt(residual), 1e-9);
        }
    }
}

TEST(BerryDecompose, PadsWideFirstSite) {
    // Height below width per block: m = 1, k = 2 forces padding.
    Rng rng(11);
    auto u = random_isometry<double>(4, 2, rng);
    auto c = berry_decompose(u);
    EXPECT_EQ(c.m, 2);
    Matrix<double> rebuilt = c.reconstruct_isometry();
    // The padded reconstruction interleaves zero rows per block.
    for (int j = 0; j < 4; ++j) {
        EXPECT_LT((rebuilt.block(j * 2, 0, 1, 2) - u.block(j, 0, 1, 2)).norm(), 1e-9);
        EXPECT_LT(rebuilt.block(j * 2 + 1, 0, 1, 2).norm(), 1e-9);
    }
}

}  // namespace
