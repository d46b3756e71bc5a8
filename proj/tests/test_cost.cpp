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

#include <cmath>
#include <limits>

#include "mpsprep/cost.hpp"
#include "mpsprep/random.hpp"
#include "test_util.hpp"

namespace {

using namespace mpsprep;

CostParams all_lambda_one() {
    CostParams p;
    for (const char* label : {"layers", "final-phase", "sign-fix", "permutation", "cs-rotations",
                              "subspace-unitaries", "block-unitary"})
        p.lambda_overrides[label] = 1;
    return p;
}

SynthesisPlan full_plan(int dim, Rng& rng) {
    SynthesisPlan plan;
    plan.dim = dim;
    plan.kind = ScalarKind::real;
    plan.form = BlockForm::ry_rz;
    Parity p = Parity::unshifted;
    for (int r = 0; r < dim; ++r) {
        RotationLayer layer;
        layer.parity = p;
        const int n_blocks = p == Parity::unshifted ? dim / 2 : (dim - 1) / 2;
        for (int b = 0; b < n_blocks; ++b) layer.rotations.push_back({b, rng.symmetric(), 0.0});
        plan.layers.push_back(layer);
        p = opposite(p);
    }
    plan.final_phase.assign(dim, 1.0);
    return plan;
}

TEST(Qroam, LayerFlavorExamples) {
    auto c = qroam_layer_cost(4, 15, 1, /*real=*/false);
    EXPECT_EQ(c.toffolis, 32);  // ceil(4/2) + 2*15
    EXPECT_EQ(c.qubits, 2);     // lambda = 1: address qubits only, ceil(log 4)

    auto r = qroam_layer_cost(4, 15, 1, /*real=*/true);
    EXPECT_EQ(r.toffolis, 17);

    EXPECT_THROW(qroam_layer_cost(8, 15, 3, false), std::invalid_argument);
}

TEST(Qroam, PermutationFlavorExample) {
    auto c = qroam_permutation_cost(12, 1);
    EXPECT_EQ(c.toffolis, 4096);
    auto c2 = qroam_permutation_cost(3, 8);
    EXPECT_EQ(c2.toffolis, 1 + 3 * 7);
}

TEST(OptimalLayer, MatchesContinuumEstimates) {
    auto cplx = optimal_layer_cost(4096, 15, false);
    const double target_c = std::sqrt(4.0 * 15 * 4096);
    EXPECT_LT(cplx.toffolis, 1.15 * target_c);
    EXPECT_GT(cplx.toffolis, 0.85 * target_c);

    auto real = optimal_layer_cost(4096, 15, true);
    const double target_r = std::sqrt(2.0 * 15 * 4096);
    EXPECT_LT(real.toffolis, 1.15 * target_r);

    const double ratio = static_cast<double>(cplx.toffolis) / real.toffolis;
    EXPECT_NEAR(ratio, std::numbers::sqrt2, 0.1 * std::numbers::sqrt2);
}

TEST(OptimalLayer, EqualsExhaustiveScan) {
    for (CostInt l : {2, 5, 64, 1000, 4096, 65536}) {
        for (bool real : {false, true}) {
            auto got = optimal_layer_cost(l, 15, real);
            CostInt best = std::numeric_limits<CostInt>::max();
            for (CostInt lam = 1; lam <= 2 * l; lam *= 2)
                best = std::min(best, qroam_layer_cost(l, 15, lam, real).toffolis);
            EXPECT_EQ(got.toffolis, best) << "l=" << l << " real=" << real;
        }
    }
}

TEST(OptimalLayer, UnimodalInLambda) {
    for (CostInt l : {16, 128, 1024, 4096}) {
        bool rising = false;
        CostInt prev = std::numeric_limits<CostInt>::max();
        for (CostInt lam = 1; lam <= l; lam *= 2) {
            CostInt t = qroam_layer_cost(l, 15, lam, false).toffolis;
            if (t > prev) rising = true;
            if (rising) {
                EXPECT_GE(t, prev) << "l=" << l << " lambda=" << lam;
            }
            prev = t;
        }
    }
}

TEST(DenseSynthesis, HandEvaluatedRealCase) {
    // l=2, b=15, all lambdas 1: 2(1+15) + (2+1) + 2*1 = 37.
    auto r = synthesis_cost_dense(2, 15, true, all_lambda_one());
    EXPECT_EQ(r.toffolis, 37);
}

TEST(DenseSynthesis, ComplexAlwaysCostsMoreThanReal) {
    for (CostInt l : {2, 3, 8, 64, 500}) {
        auto c1 = synthesis_cost_dense(l, 15, false, all_lambda_one());
        auto r1 = synthesis_cost_dense(l, 15, true, all_lambda_one());
        EXPECT_GT(c1.toffolis, r1.toffolis) << l;
        auto c2 = synthesis_cost_dense(l, 15, false);
        auto r2 = synthesis_cost_dense(l, 15, true);
        EXPECT_GT(c2.toffolis, r2.toffolis) << l;
    }
}

TEST(DenseSynthesis, LayerComponentMatchesOptimalLayerCost) {
    auto report = synthesis_cost_dense(4096, 15, false);
    auto pick = optimal_layer_cost(4096, 15, false);
    ASSERT_EQ(report.breakdown[0].label, "layers");
    EXPECT_EQ(report.breakdown[0].toffolis, 4096 * pick.toffolis);
    EXPECT_EQ(report.breakdown[0].lambda, pick.lambda);
}

TEST(BlockDiagSynthesis, SingleFullBlockReducesToDenseUpToBookkeeping) {
    Rng rng(3);
    const CostInt l = 16, b = 15;
    auto plan = full_plan(16, rng);
    auto merged = merge_block_plans({plan});
    CostParams p = all_lambda_one();
    SynthesisPlan cplan = plan;
    cplan.kind = ScalarKind::cplx;
    auto merged_c = merge_block_plans({cplan});
    auto cv = synthesis_cost_block_diag(merged_c, b, false, p);
    auto dense = synthesis_cost_dense(l, b, false, p);
    // Same layer loads; the dense bound books the final phase as one extra
    // layer load plus b, the merged bound as ceil(l/L) + bL, and the dense
    // bound additionally carries its own sign-fix term.
    const CostInt layer_term = qroam_layer_cost(l, b, 1, false).toffolis;
    const CostInt diff = (layer_term + b) - (l + b) + (l + 1);
    EXPECT_EQ(dense.toffolis - cv.toffolis, diff);
}

TEST(BlockDiagSynthesis, FullWidthLayersNeedNoControls) {
    Rng rng(5);
    auto merged = merge_block_plans({full_plan(8, rng)});
    auto report = synthesis_cost_block_diag(merged, 15, true, all_lambda_one());
    // Every a_r equals l, so the control term vanishes and the layer row is
    // exactly s * (ceil(l/2) + b).
    ASSERT_EQ(report.breakdown[0].label, "block-layers");
    EXPECT_EQ(report.breakdown[0].toffolis, 8 * (4 + 15));
}

TEST(BlockDiagSynthesis, HandEvaluatedMergedWidths) {
    Rng rng(7);
    auto merged = merge_block_plans({full_plan(4, rng), full_plan(2, rng), full_plan(2, rng)});
    ASSERT_EQ(merged.dim, 8);
    ASSERT_EQ((std::vector<int>{8, 8, 4, 4}), merged.active_width);
    auto report = synthesis_cost_block_diag(merged, 15, true, all_lambda_one());
    // sum_r (ceil(a_r/2) + ceil(log(8/a_r)) + 15) + s*3
    //   = (4+0+15) + (4+0+15) + (2+1+15) + (2+1+15) + 12 = 86.
    EXPECT_EQ(report.toffolis, 86);
}

TEST(PermutationAndSignFix, HandEvaluatedExamples) {
    EXPECT_EQ(permutation_cost(8, 1).toffolis, 8);
    EXPECT_EQ(signfix_cost(8, 2).toffolis, 6);
    const CostInt l = 8, v = 3;
    EXPECT_EQ(permutation_cost(l, 8).toffolis, 1 + v * (8 - 1));
}

TEST(SiteCostSparse, TotalIsSumOfComponents) {
    auto mps = right_canonicalize(random_symmetric_mps<double>(4, 8, Charge{2, 0}, 21));
    CostParams params;
    for (const auto& t : mps.tensors) {
        auto unit = compile_site(t);
        auto site = site_cost_sparse(unit.dec, unit.merged, params);
        CostInt manual = synthesis_cost_block_diag(unit.merged, params.bitsize, true, params)
                             .toffolis;
        manual += 2 * detail::optimal_permutation(unit.dec.dim, params).toffolis;
        manual += detail::optimal_signfix(unit.dec.dim, params).toffolis;
        EXPECT_EQ(site.toffolis, manual);
    }
}

TEST(SiteCostSparse, ProductStateSiteStillLoads) {
    auto mps = right_canonicalize(random_symmetric_mps<double>(3, 1, Charge{2, 0}, 2));
    auto unit = compile_site(mps.tensors[1]);
    auto site = site_cost_sparse(unit.dec, unit.merged);
    EXPECT_GT(site.toffolis, 0);  // permutations and sign fix are structural
}

TEST(SiteCostSparse, PermutationComparableToOneLayerAtScale) {
    // chi = 1024-scale register: l = 4096.
    auto perm = detail::optimal_permutation(4096, CostParams{});
    auto layer = optimal_layer_cost(4096, 15, true);
    EXPECT_LE(perm.toffolis, 3 * layer.toffolis);
}

TEST(DenseBaseline, HandEvaluatedChiOne) {
    auto c = site_cost_dense_baseline(1, 15, false, all_lambda_one());
    EXPECT_EQ(c.toffolis, 286);
    auto r = site_cost_dense_baseline(1, 15, true, all_lambda_one());
    EXPECT_LT(r.toffolis, c.toffolis);
}

TEST(DenseBaseline, RealSavingApproachesSqrtTwoAtScale) {
    auto c = site_cost_dense_baseline(4096, 15, false);
    auto r = site_cost_dense_baseline(4096, 15, true);
    const double ratio = static_cast<double>(c.toffolis) / r.toffolis;
    EXPECT_GT(ratio, 1.25);
    EXPECT_LT(ratio, 1.45);
}

TEST(DenseBaseline, AncillaCapRestrictsLambda) {
    CostParams capped;
    capped.ancilla_cap = 40;
    auto c = site_cost_dense_baseline(4096, 15, false, capped);
    for (const auto& item : c.breakdown) EXPECT_LE(item.qubits, 40) << item.label;
    auto free_params = site_cost_dense_baseline(4096, 15, false);
    EXPECT_GE(c.toffolis, free_params.toffolis);
}

TEST(MpsTotalCost, SingleSiteEqualsOneSynthesis) {
    auto mps = right_canonicalize(random_symmetric_mps<double>(1, 1, Charge{1, 1}, 0));
    auto total = mps_total_cost(mps, CostMethod::sparse);
    ASSERT_EQ(total.breakdown.size(), 1u);
    auto unit = compile_site(mps.tensors[0]);
    EXPECT_EQ(total.toffolis, site_cost_sparse(unit.dec, unit.merged).toffolis);
}

TEST(MpsTotalCost, SparseBeatsDenseOnBlockSparseInput) {
    RandomMpsOptions opts;
    opts.sector_cap = 20;
    auto mps = right_canonicalize(
        random_symmetric_mps<double>(6, 64, Charge{4, 0}, 9, opts));
    auto sparse = mps_total_cost(mps, CostMethod::sparse);
    auto dense = mps_total_cost(mps, CostMethod::dense);
    auto dense_real = mps_total_cost(mps, CostMethod::dense_real);
    EXPECT_LT(sparse.toffolis, dense_real.toffolis);
    EXPECT_LT(dense_real.toffolis, dense.toffolis);
    EXPECT_GT(static_cast<double>(dense.toffolis) / sparse.toffolis, 5.0);
}

TEST(SiteCostSparse, AncillaCapHonored) {
    RandomMpsOptions opts;
    opts.sector_cap = 12;
    auto mps = right_canonicalize(random_symmetric_mps<double>(5, 32, Charge{4, 0}, 4, opts));
    CostParams capped;
    capped.ancilla_cap = 30;
    for (const auto& t : mps.tensors) {
        auto unit = compile_site(t);
        auto site = site_cost_sparse(unit.dec, unit.merged, capped);
        for (const auto& item : site.breakdown) EXPECT_LE(item.qubits, 30) << item.label;
    }
}

TEST(MpsTotalCost, SitewiseSparseNeverExceedsDense) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto mps =
            right_canonicalize(random_symmetric_mps<double>(5, 12, Charge{4, 0}, 60 + seed));
        for (const auto& t : mps.tensors) {
            auto unit = compile_site(t);
            int nontrivial = 0;
            for (const auto& b : unit.dec.blocks)
                if (b.rows() >= 2) ++nontrivial;
            if (nontrivial < 2) continue;
            auto sparse = site_cost_sparse(unit.dec, unit.merged);
            auto dense = site_cost_dense_baseline(std::max(t.left.dim(), t.right.dim()), 15, true);
            EXPECT_LE(sparse.toffolis, dense.toffolis);
        }
    }
}

TEST(MpsTotalCost, DenseRealRatioInExpectedWindowAtLargeChi) {
    auto mps = random_symmetric_mps<double>(6, 256, Charge{6, 0}, 5);
    auto dense = mps_total_cost(mps, CostMethod::dense);
    auto dense_real = mps_total_cost(mps, CostMethod::dense_real);
    const double ratio = static_cast<double>(dense.toffolis) / dense_real.toffolis;
    EXPECT_GT(ratio, 1.2);
    EXPECT_LT(ratio, 1.5);
}

TEST(MpsTotalCost, QubitAccounting) {
    auto mps = right_canonicalize(random_symmetric_mps<double>(4, 8, Charge{2, 0}, 9));
    auto total = mps_total_cost(mps, CostMethod::sparse);
    CostInt chi = 1;
    for (const auto& t : mps.tensors) chi = std::max<CostInt>(chi, t.right.dim());
    EXPECT_EQ(total.total_qubits, 4 * 2 + ceil_log2_ratio(chi, 1) + 15 + total.ancilla_peak);
}

}  // namespace
