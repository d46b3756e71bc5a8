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

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "mpsprep/tensor.hpp"

namespace mpsprep {

// Deterministic random source. Only raw generator words are consumed (no
// std::*_distribution), so a given seed reproduces the same stream on every
// platform and standard library.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    // Uniform integer in [lo, hi] via rejection-free modulo of a wide draw.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    template <class T>
    T scalar() {
        if constexpr (is_complex_v<T>) {
            return Complex(symmetric(), symmetric());
        } else {
            return symmetric();
        }
    }

    template <class T>
    Matrix<T> matrix(int rows, int cols) {
        Matrix<T> m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = scalar<T>();
        return m;
    }

   private:
    std::mt19937_64 gen_;
};

struct RandomMpsOptions {
    // Upper bound on the number of charge sectors kept per bond; 0 keeps as
    // many as fit into chi_cap. Lowering it yields denser tensors.
    int sector_cap = 0;
};

namespace detail {

inline std::vector<std::set<Charge>> charge_paths(int n, const SiteBasis& basis,
                                                  const Charge& total) {
    std::vector<std::set<Charge>> forward(n + 1), feasible(n + 1);
    forward[0].insert(Charge::zero(total.size()));
    for (int i = 0; i < n; ++i)
        for (const auto& q : forward[i])
            for (const auto& d : basis.charges) forward[i + 1].insert(q + d);
    std::vector<std::set<Charge>> backward(n + 1);
    backward[n].insert(total);
    for (int i = n; i > 0; --i)
        for (const auto& q : backward[i])
            for (const auto& d : basis.charges) backward[i - 1].insert(q - d);
    for (int i = 0; i <= n; ++i)
        std::set_intersection(forward[i].begin(), forward[i].end(), backward[i].begin(),
                              backward[i].end(), std::inserter(feasible[i], feasible[i].begin()));
    return feasible;
}

}  // namespace detail

// Deterministic pseudo-random symmetric MPS on n fermionic sites with total
// charge `total_charge`. Every bond dimension stays <= chi_cap and the result
// always passes validate(). Throws if no charge path from the vacuum to the
// requested total charge exists.
template <class T>
SymmetricMPS<T> random_symmetric_mps(int n, int chi_cap, const Charge& total_charge,
                                     std::uint64_t seed, RandomMpsOptions opts = {}) {
    if (n < 1) throw std::invalid_argument("site count must be positive");
    if (chi_cap < 1) throw std::invalid_argument("chi_cap must be positive");
    const SiteBasis basis = SiteBasis::fermionic();
    if (total_charge.size() != basis.charges[0].size())
        throw std::invalid_argument("total charge must have " +
                                    std::to_string(basis.charges[0].size()) + " components");

    auto feasible = detail::charge_paths(n, basis, total_charge);
    for (int i = 0; i <= n; ++i) {
        if (feasible[i].empty())
            throw std::invalid_argument("total charge " + total_charge.to_string() +
                                        " is infeasible on " + std::to_string(n) + " sites");
    }

    Rng rng(seed);

    // Pick one guaranteed charge path, then keep a random feasible superset of
    // it per bond, pruned back to mutual reachability.
    std::vector<Charge> path(n + 1);
    path[0] = Charge::zero(total_charge.size());
    path[n] = total_charge;
    for (int i = 1; i < n; ++i) {
        std::vector<Charge> options;
        for (const auto& d : basis.charges) {
            Charge q = path[i - 1] + d;
            if (feasible[i].count(q)) options.push_back(q);
        }
        // Feasibility of path[i-1] guarantees at least one continuation, but
        // the continuation must itself stay feasible through bond i.
        std::vector<Charge> good;
        for (const auto& q : options) {
            bool reaches = false;
            for (const auto& d : basis.charges)
                if (feasible[i + 1].count(q + d)) reaches = true;
            if (i == n) reaches = (q == total_charge);
            if (reaches) good.push_back(q);
        }
        if (good.empty()) good = options;
        path[i] = good[rng.uniform_int(0, static_cast<int>(good.size()) - 1)];
    }

    int sector_cap = opts.sector_cap > 0 ? std::min(opts.sector_cap, chi_cap) : chi_cap;
    std::vector<std::vector<Charge>> kept(n + 1);
    kept[0] = {path[0]};
    kept[n] = {path[n]};
    for (int i = 1; i < n; ++i) {
        std::vector<Charge> pool(feasible[i].begin(), feasible[i].end());
        // Deterministic shuffle.
        for (int j = static_cast<int>(pool.size()) - 1; j > 0; --j)
            std::swap(pool[j], pool[rng.uniform_int(0, j)]);
        std::vector<Charge> chosen = {path[i]};
        for (const auto& q : pool) {
            if (static_cast<int>(chosen.size()) >= sector_cap) break;
            if (!(q == path[i])) chosen.push_back(q);
        }
        kept[i] = std::move(chosen);
    }

    // Closure: drop charges unreachable from the kept neighbours. The chosen
    // path always survives, so no bond empties out.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 1; i <= n; ++i) {
            std::vector<Charge> pruned;
            for (const auto& q : kept[i]) {
                bool ok = false;
                for (const auto& d : basis.charges)
                    for (const auto& p : kept[i - 1]) ok |= (p + d == q);
                if (ok)
                    pruned.push_back(q);
                else
                    changed = true;
            }
            kept[i] = std::move(pruned);
        }
        for (int i = n - 1; i >= 0; --i) {
            std::vector<Charge> pruned;
            for (const auto& q : kept[i]) {
                bool ok = false;
                for (const auto& d : basis.charges)
                    for (const auto& p : kept[i + 1]) ok |= (q + d == p);
                if (ok)
                    pruned.push_back(q);
                else
                    changed = true;
            }
            kept[i] = std::move(pruned);
        }
    }

    // Distribute sector sizes: everyone gets 1, then random sectors grow until
    // a random target dimension <= chi_cap is reached.
    std::vector<BondSpace> bonds(n + 1);
    for (int i = 0; i <= n; ++i) {
        std::sort(kept[i].begin(), kept[i].end());
        std::vector<std::pair<Charge, int>> sectors;
        for (const auto& q : kept[i]) sectors.emplace_back(q, 1);
        if (i > 0 && i < n) {
            int dim = static_cast<int>(sectors.size());
            int target = rng.uniform_int(dim, chi_cap);
            while (dim < target) {
                sectors[rng.uniform_int(0, static_cast<int>(sectors.size()) - 1)].second++;
                ++dim;
            }
        }
        bonds[i] = BondSpace::from_sectors(std::move(sectors));
    }

    SymmetricMPS<T> mps;
    mps.total_charge = total_charge;
    mps.tensors.resize(n);
    for (int i = 0; i < n; ++i) {
        auto& t = mps.tensors[i];
        t.left = bonds[i];
        t.site = basis;
        t.right = bonds[i + 1];
        for (const auto& ls : t.left.sectors()) {
            for (const auto& d : basis.charges) {
                auto rs = t.right.sector(ls.charge + d);
                if (!rs) continue;
                t.insert_block(ls.charge, d, rng.matrix<T>(ls.size, rs->size));
            }
        }
    }
    return mps;
}

}  // namespace mpsprep
