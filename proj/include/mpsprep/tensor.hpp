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

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "mpsprep/charge.hpp"

namespace mpsprep {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<T, Complex>;

enum class ScalarKind { real, cplx };

template <class T>
constexpr ScalarKind scalar_kind_of() {
    return is_complex_v<T> ? ScalarKind::cplx : ScalarKind::real;
}

// Charge triple addressing one dense block of a site tensor.
struct BlockKey {
    Charge q_left;
    Charge q_site;
    Charge q_right;

    bool operator<(const BlockKey& o) const {
        if (q_left != o.q_left) return q_left < o.q_left;
        if (q_site != o.q_site) return q_site < o.q_site;
        return q_right < o.q_right;
    }
    bool operator==(const BlockKey& o) const {
        return q_left == o.q_left && q_site == o.q_site && q_right == o.q_right;
    }
    std::string to_string() const {
        return q_left.to_string() + "+" + q_site.to_string() + "->" + q_right.to_string();
    }
};

// Rank-3 site tensor stored as charge-keyed dense blocks. A block with key
// (q_left, q_site, q_right) holds the matrix slice of M^{q_site} connecting the
// q_left sector of the incoming bond to the q_right sector of the outgoing
// bond. insert_block derives q_right = q_left + q_site, so tensors built
// through it satisfy the conservation rule by construction; `blocks` stays
// public so deserialized data can be checked by validate().
template <class T>
struct BlockSparseTensor {
    BondSpace left;
    SiteBasis site;
    BondSpace right;
    std::map<BlockKey, Matrix<T>> blocks;

    void insert_block(const Charge& q_left, const Charge& q_site, Matrix<T> m) {
        Charge q_right = q_left + q_site;
        blocks[BlockKey{q_left, q_site, q_right}] = std::move(m);
    }

    const Matrix<T>* find_block(const Charge& q_left, const Charge& q_site) const {
        auto it = blocks.find(BlockKey{q_left, q_site, q_left + q_site});
        return it == blocks.end() ? nullptr : &it->second;
    }

    // Dense B_left x B_right matrix of the d-th site slice.
    Matrix<T> dense_slice(int d) const {
        Matrix<T> m = Matrix<T>::Zero(left.dim(), right.dim());
        const Charge& qd = site.charges.at(d);
        for (const auto& [key, block] : blocks) {
            if (!(key.q_site == qd)) continue;
            auto ls = left.sector(key.q_left);
            auto rs = right.sector(key.q_right);
            if (!ls || !rs) continue;
            m.block(ls->offset, rs->offset, block.rows(), block.cols()) = block;
        }
        return m;
    }
};

template <class T>
struct SymmetricMPS {
    std::vector<BlockSparseTensor<T>> tensors;
    Charge total_charge;

    int n_sites() const { return static_cast<int>(tensors.size()); }
    static constexpr ScalarKind scalar_kind() { return scalar_kind_of<T>(); }
};

namespace detail {

inline bool sectors_sorted_contiguous(const BondSpace& b, std::string where,
                                      std::vector<std::string>& out) {
    bool ok = true;
    const auto& ss = b.sectors();
    int expect = 0;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (ss[i].offset != expect) {
            out.push_back(where + ": sector " + ss[i].charge.to_string() + " is not contiguous");
            ok = false;
        }
        expect = ss[i].offset + ss[i].size;
        if (i > 0 && !(ss[i - 1].charge < ss[i].charge)) {
            out.push_back(where + ": sectors not in lexicographic charge order");
            ok = false;
        }
    }
    if (expect != b.dim()) {
        out.push_back(where + ": sector sizes do not sum to the bond dimension");
        ok = false;
    }
    return ok;
}

}  // namespace detail

// Structural diagnostic. Returns one message per violation; an empty result
// certifies that every stored block obeys q_left + q_site = q_right, that
// adjacent bonds agree, and that all blocks have matching sector shapes.
template <class T>
std::vector<std::string> validate(const SymmetricMPS<T>& mps) {
    std::vector<std::string> v;
    const int n = mps.n_sites();
    if (n == 0) {
        v.push_back("mps has no sites");
        return v;
    }
    for (int i = 0; i < n; ++i) {
        const auto& t = mps.tensors[i];
        const std::string where = "site " + std::to_string(i + 1);
        if (static_cast<int>(t.site.charges.size()) != t.site.dim)
            v.push_back(where + ": site basis charge count differs from its dimension");
        detail::sectors_sorted_contiguous(t.left, where + " left bond", v);
        detail::sectors_sorted_contiguous(t.right, where + " right bond", v);
        if (i > 0 && !(mps.tensors[i - 1].right == t.left))
            v.push_back(where + ": left bond does not match previous site's right bond");
        for (const auto& [key, block] : t.blocks) {
            if (!(key.q_left + key.q_site == key.q_right))
                v.push_back(where + ": block " + key.to_string() + " violates " +
                            key.q_right.to_string() + " != " + key.q_left.to_string() + "+" +
                            key.q_site.to_string());
            auto ls = t.left.sector(key.q_left);
            auto rs = t.right.sector(key.q_right);
            if (!ls)
                v.push_back(where + ": block " + key.to_string() + " references missing left sector");
            if (!rs)
                v.push_back(where + ": block " + key.to_string() +
                            " references missing right sector");
            bool site_has = false;
            for (const auto& q : t.site.charges) site_has |= (q == key.q_site);
            if (!site_has)
                v.push_back(where + ": block " + key.to_string() + " references missing site charge");
            if (block.rows() == 0 || block.cols() == 0)
                v.push_back(where + ": block " + key.to_string() + " has zero size");
            if (ls && rs && (block.rows() != ls->size || block.cols() != rs->size))
                v.push_back(where + ": block " + key.to_string() + " shape " +
                            std::to_string(block.rows()) + "x" + std::to_string(block.cols()) +
                            " does not match sectors " + std::to_string(ls->size) + "x" +
                            std::to_string(rs->size));
        }
    }
    const auto& last = mps.tensors[n - 1].right;
    for (const auto& s : last.sectors()) {
        if (!(s.charge == mps.total_charge))
            v.push_back("last bond carries sector " + s.charge.to_string() +
                        " different from the total charge " + mps.total_charge.to_string());
    }
    return v;
}

}  // namespace mpsprep
