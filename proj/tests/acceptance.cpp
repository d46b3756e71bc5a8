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

// End-to-end acceptance suite. Each test is one acceptance criterion and
// prints exactly one pass/fail line through the test runner.

#include <gtest/gtest.h>

#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>

#include "mpsprep/mpsprep.hpp"
#include "test_util.hpp"

namespace {

using namespace mpsprep;
using mpsprep::testing::random_isometry;
using mpsprep::testing::random_unitary;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Average-rank Spearman correlation.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        const int n = static_cast<int>(v.size());
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> rank(n);
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = (i + j) / 2.0 + 1.0;
            for (int t = i; t <= j; ++t) rank[order[t]] = avg;
            i = j + 1;
        }
        return rank;
    };
    auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i], my += ry[i];
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

Charge charge_for(int i, int n) {
    static const std::vector<Charge> pool = {Charge{2, 0}, Charge{3, 1}, Charge{4, 0},
                                             Charge{1, 1}, Charge{2, 2}, Charge{4, 2}};
    const Charge& q = pool[i % pool.size()];
    // (4,2) needs at least three sites: two doubly-occupied sites pin Sz to 0.
    if (n < 3 && q == Charge{4, 2}) return Charge{2, 0};
    return q;
}

TEST(Acceptance, Criterion1_SynthesisRoundTrip) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20260810);
    for (int l : {2, 4, 8, 16, 32, 64}) {
        for (int rep = 0; rep < 200; ++rep) {
            auto ur = random_unitary<double>(l, rng);
            auto pr = clements_decompose(ur);
            ASSERT_LT((reconstruct<double>(pr) - ur).norm(), 1e-9)
                << "real l=" << l << " rep=" << rep;
            for (const auto& layer : pr.layers)
                for (const auto& rot : layer.rotations)
                    ASSERT_EQ(rot.phi, 0.0) << "real plan carries a phase angle";

            auto uc = random_unitary<Complex>(l, rng);
            auto pc = clements_decompose(uc, ScalarKind::cplx);
            ASSERT_LT((reconstruct<Complex>(pc) - uc).norm(), 1e-9)
                << "complex l=" << l << " rep=" << rep;
        }
    }
    const double elapsed = seconds_since(t0);
    EXPECT_LT(elapsed, 30.0) << "round-trip batch exceeded the runtime budget";
}

TEST(Acceptance, Criterion2_RealCaseSqrtTwoImprovement) {
    const CostInt l = 4096, b = 15;
    auto cplx = optimal_layer_cost(l, b, false);
    auto real = optimal_layer_cost(l, b, true);
    const double ratio = static_cast<double>(cplx.toffolis) / static_cast<double>(real.toffolis);
    EXPECT_GE(ratio, 1.30);
    EXPECT_LE(ratio, 1.48);
    EXPECT_LE(cplx.toffolis, 1.15 * std::sqrt(4.0 * b * l));
    EXPECT_LE(real.toffolis, 1.15 * std::sqrt(2.0 * b * l));
}

TEST(Acceptance, Criterion3_BlockDiagonalization) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + (i % 5);
        const int chi = 4 + ((i * 3) % 13);
        auto mps = right_canonicalize(
            random_symmetric_mps<double>(n, chi, charge_for(i, n), 1000 + i));
        for (const auto& t : mps.tensors) {
            auto [u, pattern] = site_isometry(t);
            auto dec = block_diagonalize(u, pattern);
            auto a = reassemble(dec);
            ASSERT_LT((a.leftCols(pattern.cols) - embed_isometry(u, pattern, dec.dim)).norm(),
                      1e-10)
                << "instance " << i;
            ASSERT_LT(mpsprep::testing::unitary_residual(a), 1e-10) << "instance " << i;
            auto [plans, merged] = synthesize_blocks(dec);
            ASSERT_LE(merged.layer_count(), dec.largest_block() + 1) << "instance " << i;
        }
    }
    EXPECT_LT(seconds_since(t0), 60.0);
}

TEST(Acceptance, Criterion4_EndToEndFidelity) {
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + (i % 4);
        const int chi = 2 + (i % 7);
        auto mps = right_canonicalize(
            random_symmetric_mps<double>(n, chi, charge_for(i, n), 2000 + i));
        auto prog = compile_program(mps);
        auto oracle = contract_to_statevector(mps);

        Vector<Complex> reference;
        for (int s = 0; s < 20; ++s) {
            auto src = SignOutcomeSource::seeded(4000 + 31 * i + s);
            auto sim = simulate_preparation(prog, src);
            Complex dot = 0;
            for (int a = 0; a < oracle.size(); ++a) dot += oracle(a) * sim.site_state(a);
            ASSERT_GE(std::abs(dot) / oracle.norm(), 1.0 - 1e-10)
                << "instance " << i << " seed " << s;
            ASSERT_LT(sim.ancilla_trace_distance(), 1e-9) << "instance " << i << " seed " << s;
            if (s == 0)
                reference = sim.site_state;
            else
                ASSERT_LT((sim.site_state - reference).norm(), 1e-10)
                    << "sign outcomes changed the state, instance " << i;
        }
    }

    // Exhaustive branch enumeration at n = 2, chi = 2.
    auto mps = right_canonicalize(random_symmetric_mps<double>(2, 2, Charge{2, 0}, 31));
    auto prog = compile_program(mps);
    auto dry = SignOutcomeSource::exhaustive({});
    auto reference = simulate_preparation(prog, dry);
    const std::size_t k = dry.draws();
    ASSERT_LE(k, 18u);
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << k); ++mask) {
        std::vector<bool> tape(k);
        for (std::size_t bit = 0; bit < k; ++bit) tape[bit] = (mask >> bit) & 1;
        auto src = SignOutcomeSource::exhaustive(tape);
        auto sim = simulate_preparation(prog, src);
        ASSERT_LT((sim.site_state - reference.site_state).norm(), 1e-10) << "branch " << mask;
        ASSERT_LT(sim.ancilla_trace_distance(), 1e-9);
    }
}

TEST(Acceptance, Criterion5_SplittingLemma) {
    Rng rng(5);
    int done = 0;
    for (int rep = 0; done < 200; ++rep) {
        const int m = 2 << (rep % 4);  // 2, 4, 8, 16
        const int k = 1 + rep % m;
        Matrix<double> a, b;
        if (rep % 5 == 4) {
            // Constructed rank-deficient lower half: sigma_1(A) = 1 zeroes the
            // first column of B V^dag.
            auto u1 = random_unitary<double>(m, rng);
            auto u2 = random_unitary<double>(m, rng);
            auto v = random_unitary<double>(k, rng);
            Matrix<double> d1 = Matrix<double>::Zero(m, k), d2 = Matrix<double>::Zero(m, k);
            for (int i = 0; i < k; ++i) {
                const double c = i == 0 ? 1.0 : rng.uniform();
                d1(i, i) = c;
                d2(i, i) = std::sqrt(1.0 - c * c);
            }
            a = u1 * d1 * v;
            b = u2 * d2 * v;
        } else {
            auto stack = random_isometry<double>(2 * m, k, rng);
            a = stack.topRows(m);
            b = stack.bottomRows(m);
        }
        auto s = split_orthonormal<double>(a, b);
        Matrix<double> stack(2 * m, k);
        stack.topRows(m) = a;
        stack.bottomRows(m) = b;
        ASSERT_LT((s.reconstruct() - stack).norm(), 1e-10) << "rep " << rep;
        for (int i = 0; i < k; ++i)
            ASSERT_LT(std::abs(s.d1(i) * s.d1(i) + s.d2(i) * s.d2(i) - 1.0), 1e-12);
        ASSERT_LT(s.d2_offdiagonal, 1e-12) << "rep " << rep;
        ++done;
    }
}

TEST(Acceptance, Criterion6_CostFormulaFidelity) {
    // Hand-evaluated instances.
    EXPECT_EQ(qroam_layer_cost(4, 15, 1, false).toffolis, 32);
    CostParams ones;
    for (const char* label : {"layers", "final-phase", "sign-fix", "permutation", "cs-rotations",
                              "subspace-unitaries", "block-unitary"})
        ones.lambda_overrides[label] = 1;
    EXPECT_EQ(synthesis_cost_dense(2, 15, true, ones).toffolis, 37);
    EXPECT_EQ(site_cost_dense_baseline(1, 15, false, ones).toffolis, 286);
    EXPECT_EQ(permutation_cost(8, 1).toffolis, 8);
    EXPECT_EQ(signfix_cost(8, 2).toffolis, 6);
    EXPECT_EQ(qroam_permutation_cost(12, 1).toffolis, 4096);

    // Merged-plan hand count: widths (8,8,4,4) at l=8, b=15, real, lambda 1.
    Rng rng(3);
    auto mk = [&](int dim) {
        SynthesisPlan p;
        p.dim = dim;
        p.kind = ScalarKind::real;
        Parity par = Parity::unshifted;
        for (int r = 0; r < dim; ++r) {
            RotationLayer layer;
            layer.parity = par;
            const int nb = par == Parity::unshifted ? dim / 2 : (dim - 1) / 2;
            for (int b = 0; b < nb; ++b) layer.rotations.push_back({b, rng.symmetric(), 0.0});
            p.layers.push_back(layer);
            par = opposite(par);
        }
        p.final_phase.assign(dim, 1.0);
        return p;
    };
    auto merged = merge_block_plans({mk(4), mk(2), mk(2)});
    EXPECT_EQ(synthesis_cost_block_diag(merged, 15, true, ones).toffolis, 86);

    // Optimizer output equals an exhaustive power-of-two scan, for every
    // dimension up to 2^16.
    for (CostInt l = 2; l <= 65536; ++l) {
        for (bool real : {false, true}) {
            auto got = optimal_layer_cost(l, 15, real);
            CostInt best = std::numeric_limits<CostInt>::max();
            for (CostInt lam = 1; lam <= 2 * l; lam *= 2)
                best = std::min(best, qroam_layer_cost(l, 15, lam, real).toffolis);
            ASSERT_EQ(got.toffolis, best) << "l=" << l;
        }
    }
}

TEST(Acceptance, Criterion7_SparseVsDenseImprovement) {
    const std::vector<int> sector_caps = {24, 26, 28, 30, 33, 36,  40,  44,  48,  52,
                                          57, 62, 68, 74, 80, 86,  93,  100, 107, 114,
                                          121, 128, 136, 144, 152, 160, 168, 172, 176, 180};
    std::vector<double> densities, improvements;
    for (int ms : sector_caps) {
        RandomMpsOptions opts;
        opts.sector_cap = ms;
        auto mps = right_canonicalize(
            random_symmetric_mps<double>(20, 224, Charge{10, 0}, 2740 + ms, opts));
        const double inv_density = inverse_density(mps);
        ASSERT_GE(inv_density, 15.0) << "sector cap " << ms;
        ASSERT_LE(inv_density, 45.0) << "sector cap " << ms;
        auto sparse = mps_total_cost(mps, CostMethod::sparse);
        auto dense = mps_total_cost(mps, CostMethod::dense);
        const double improvement =
            static_cast<double>(dense.toffolis) / static_cast<double>(sparse.toffolis);
        EXPECT_GT(improvement, 5.0) << "sector cap " << ms;
        densities.push_back(inv_density);
        improvements.push_back(improvement);
    }
    ASSERT_EQ(densities.size(), 30u);
    const double rho = spearman(densities, improvements);
    EXPECT_GT(rho, 0.8) << "improvement is not increasing with inverse density";
}

TEST(Acceptance, Criterion8_InstrumentedCountWithinBound) {
    CostParams params;
    auto check = [&](const SymmetricMPS<double>& mps) {
        auto prog = compile_program(mps);
        CostInt bound = 0;
        for (const auto& unit : prog.sites)
            bound += site_cost_sparse(unit.dec, unit.merged, params).toffolis;
        const CostInt instrumented = instrumented_toffoli_count(prog, params);
        ASSERT_GE(instrumented, 0);
        ASSERT_LE(instrumented, bound);
    };
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + (i % 5);
        const int chi = 4 + ((i * 3) % 13);
        check(right_canonicalize(random_symmetric_mps<double>(n, chi, charge_for(i, n), 1000 + i)));
    }
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + (i % 4);
        const int chi = 2 + (i % 7);
        check(right_canonicalize(random_symmetric_mps<double>(n, chi, charge_for(i, n), 2000 + i)));
    }
}

}  // namespace
