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
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsprep {

// Additive abelian quantum numbers attached to basis states and bond indices.
// Component 0 is the particle number, component 1 is twice the spin projection
// (kept doubled so every entry is an integer); more components may be appended
// for additional abelian symmetries. Charges add componentwise and are ordered
// lexicographically, which fixes a deterministic sector order everywhere.
struct Charge {
    std::vector<int> components;

    Charge() = default;
    Charge(std::initializer_list<int> c) : components(c) {}
    explicit Charge(std::vector<int> c) : components(std::move(c)) {}

    static Charge zero(std::size_t n_components) {
        return Charge(std::vector<int>(n_components, 0));
    }

    std::size_t size() const { return components.size(); }
    int operator[](std::size_t i) const { return components[i]; }

    Charge operator+(const Charge& o) const {
        check_size(o);
        Charge r = *this;
        for (std::size_t i = 0; i < r.components.size(); ++i) r.components[i] += o.components[i];
        return r;
    }
    Charge operator-(const Charge& o) const {
        check_size(o);
        Charge r = *this;
        for (std::size_t i = 0; i < r.components.size(); ++i) r.components[i] -= o.components[i];
        return r;
    }

    bool operator==(const Charge& o) const { return components == o.components; }
    bool operator!=(const Charge& o) const { return components != o.components; }
    bool operator<(const Charge& o) const { return components < o.components; }
    bool operator<=(const Charge& o) const { return components <= o.components; }
    bool operator>(const Charge& o) const { return components > o.components; }

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (i) os << ',';
            os << components[i];
        }
        os << ')';
        return os.str();
    }

   private:
    void check_size(const Charge& o) const {
        if (components.size() != o.components.size())
            throw std::invalid_argument("charge component counts differ: " + to_string() + " vs " +
                                        o.to_string());
    }
};

// Local basis of one site together with the charge carried by each basis state.
struct SiteBasis {
    int dim = 0;
    std::vector<Charge> charges;

    // Spinful fermionic site: |0,0>, |1,+1/2>, |1,-1/2>, |2,0> in this order.
    static SiteBasis fermionic() {
        SiteBasis b;
        b.dim = 4;
        b.charges = {Charge{0, 0}, Charge{1, 1}, Charge{1, -1}, Charge{2, 0}};
        return b;
    }
};

// Virtual (bond) index space. Indices with equal charge form one contiguous
// sector; sectors are kept sorted lexicographically by charge.
class BondSpace {
   public:
    struct Sector {
        Charge charge;
        int offset = 0;
        int size = 0;
    };

    BondSpace() = default;

    // Builds a bond space from (charge, size) pairs; sorts sectors by charge.
    static BondSpace from_sectors(std::vector<std::pair<Charge, int>> sectors) {
        std::sort(sectors.begin(), sectors.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        BondSpace bs;
        int off = 0;
        for (auto& [q, sz] : sectors) {
            if (sz <= 0) throw std::invalid_argument("bond sector size must be positive");
            if (!bs.sectors_.empty() && bs.sectors_.back().charge == q)
                throw std::invalid_argument("duplicate bond sector charge " + q.to_string());
            bs.sectors_.push_back({q, off, sz});
            off += sz;
        }
        bs.dim_ = off;
        return bs;
    }

    // Builds from a per-index charge list (exchange-format order). The list
    // must already be sector-contiguous and lexicographically sorted.
    static BondSpace from_index_charges(const std::vector<Charge>& charges) {
        std::vector<std::pair<Charge, int>> sectors;
        for (const auto& q : charges) {
            if (!sectors.empty() && sectors.back().first == q) {
                ++sectors.back().second;
            } else {
                sectors.emplace_back(q, 1);
            }
        }
        for (std::size_t i = 1; i < sectors.size(); ++i) {
            if (!(sectors[i - 1].first < sectors[i].first))
                throw std::invalid_argument("bond index charges are not sector-sorted");
        }
        return from_sectors(std::move(sectors));
    }

    int dim() const { return dim_; }
    const std::vector<Sector>& sectors() const { return sectors_; }

    const Charge& charge_of(int index) const {
        for (const auto& s : sectors_)
            if (index >= s.offset && index < s.offset + s.size) return s.charge;
        throw std::out_of_range("bond index out of range");
    }

    std::optional<Sector> sector(const Charge& q) const {
        for (const auto& s : sectors_)
            if (s.charge == q) return s;
        return std::nullopt;
    }

    bool operator==(const BondSpace& o) const {
        if (dim_ != o.dim_ || sectors_.size() != o.sectors_.size()) return false;
        for (std::size_t i = 0; i < sectors_.size(); ++i) {
            if (!(sectors_[i].charge == o.sectors_[i].charge) ||
                sectors_[i].offset != o.sectors_[i].offset || sectors_[i].size != o.sectors_[i].size)
                return false;
        }
        return true;
    }

   private:
    std::vector<Sector> sectors_;
    int dim_ = 0;
};

}  // namespace mpsprep
