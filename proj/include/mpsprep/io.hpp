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

#include <json.hpp>
#include <string>
#include <variant>

#include "mpsprep/cost.hpp"
#include "mpsprep/program.hpp"

namespace mpsprep {

using Json = nlohmann::json;
inline constexpr int kMpsFormatVersion = 1;

using AnyMps = std::variant<SymmetricMPS<double>, SymmetricMPS<Complex>>;

namespace detail {

inline Json charge_to_json(const Charge& q) { return Json(q.components); }

inline Charge charge_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw std::runtime_error(where + ": charge must be an integer array");
    std::vector<int> c;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw std::runtime_error(where + ": charge entries must be integers");
        c.push_back(x.get<int>());
    }
    return Charge(std::move(c));
}

template <class T>
Json block_data_to_json(const Matrix<T>& m) {
    Json data = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            if constexpr (is_complex_v<T>) {
                data.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
            } else {
                data.push_back(m(r, c));
            }
        }
    }
    return data;
}

template <class T>
Matrix<T> block_data_from_json(const Json& data, int rows, int cols, const std::string& where) {
    if (!data.is_array() || static_cast<int>(data.size()) != rows * cols)
        throw std::runtime_error(where + ": data length must be rows*cols");
    Matrix<T> m(rows, cols);
    int idx = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++idx) {
            const Json& x = data[idx];
            if constexpr (is_complex_v<T>) {
                if (!x.is_array() || x.size() != 2)
                    throw std::runtime_error(where + ": complex entries must be [re, im] pairs");
                m(r, c) = Complex(x[0].get<double>(), x[1].get<double>());
            } else {
                if (!x.is_number())
                    throw std::runtime_error(where + ": real entries must be numbers");
                m(r, c) = x.get<double>();
            }
        }
    }
    return m;
}

inline std::vector<Charge> bond_charges(const BondSpace& b) {
    std::vector<Charge> out;
    for (const auto& s : b.sectors())
        for (int i = 0; i < s.size; ++i) out.push_back(s.charge);
    return out;
}

}  // namespace detail

template <class T>
Json mps_to_json(const SymmetricMPS<T>& mps) {
    Json j;
    j["version"] = kMpsFormatVersion;
    j["n"] = mps.n_sites();
    j["scalar"] = is_complex_v<T> ? "complex" : "real";
    Json site_charges = Json::array();
    for (const auto& t : mps.tensors) {
        Json sc = Json::array();
        for (const auto& q : t.site.charges) sc.push_back(detail::charge_to_json(q));
        site_charges.push_back(sc);
    }
    j["site_charges"] = site_charges;
    Json bonds = Json::array();
    auto push_bond = [&](const BondSpace& b) {
        Json idx = Json::array();
        for (const auto& q : detail::bond_charges(b)) idx.push_back(detail::charge_to_json(q));
        bonds.push_back(idx);
    };
    push_bond(mps.tensors.front().left);
    for (const auto& t : mps.tensors) push_bond(t.right);
    j["bonds"] = bonds;
    Json blocks = Json::array();
    for (const auto& t : mps.tensors) {
        Json site_blocks = Json::array();
        for (const auto& [key, block] : t.blocks) {
            Json bj;
            bj["q_left"] = detail::charge_to_json(key.q_left);
            bj["q_site"] = detail::charge_to_json(key.q_site);
            bj["q_right"] = detail::charge_to_json(key.q_right);
            bj["rows"] = block.rows();
            bj["cols"] = block.cols();
            bj["data"] = detail::block_data_to_json(block);
            site_blocks.push_back(bj);
        }
        blocks.push_back(site_blocks);
    }
    j["blocks"] = blocks;
    return j;
}

namespace detail {

template <class T>
SymmetricMPS<T> mps_from_json_typed(const Json& j) {
    const int n = j.at("n").get<int>();
    if (n < 1) throw std::runtime_error("field 'n' must be positive");
    const Json& site_charges = j.at("site_charges");
    const Json& bonds = j.at("bonds");
    const Json& blocks = j.at("blocks");
    if (static_cast<int>(site_charges.size()) != n)
        throw std::runtime_error("'site_charges' must list one entry per site");
    if (static_cast<int>(bonds.size()) != n + 1)
        throw std::runtime_error("'bonds' must list n+1 entries");
    if (static_cast<int>(blocks.size()) != n)
        throw std::runtime_error("'blocks' must list one entry per site");

    std::vector<BondSpace> bond_spaces;
    for (int i = 0; i <= n; ++i) {
        std::vector<Charge> charges;
        for (const auto& q : bonds[i])
            charges.push_back(charge_from_json(q, "bonds[" + std::to_string(i) + "]"));
        if (charges.empty()) throw std::runtime_error("bond " + std::to_string(i) + " is empty");
        try {
            bond_spaces.push_back(BondSpace::from_index_charges(charges));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("bonds[" + std::to_string(i) + "]: " + e.what());
        }
    }

    SymmetricMPS<T> mps;
    mps.total_charge = bond_spaces[n].sectors().front().charge;
    for (int i = 0; i < n; ++i) {
        BlockSparseTensor<T> t;
        t.left = bond_spaces[i];
        t.right = bond_spaces[i + 1];
        t.site.charges.clear();
        for (const auto& q : site_charges[i])
            t.site.charges.push_back(charge_from_json(q, "site_charges[" + std::to_string(i) + "]"));
        t.site.dim = static_cast<int>(t.site.charges.size());
        for (const auto& bj : blocks[i]) {
            const std::string where = "blocks[" + std::to_string(i) + "]";
            BlockKey key{charge_from_json(bj.at("q_left"), where),
                         charge_from_json(bj.at("q_site"), where),
                         charge_from_json(bj.at("q_right"), where)};
            const int rows = bj.at("rows").get<int>();
            const int cols = bj.at("cols").get<int>();
            t.blocks[key] = block_data_from_json<T>(bj.at("data"), rows, cols, where);
        }
        mps.tensors.push_back(std::move(t));
    }
    return mps;
}

}  // namespace detail

inline AnyMps mps_from_json(const Json& j) {
    if (!j.is_object()) throw std::runtime_error("document root must be an object");
    if (!j.contains("version")) throw std::runtime_error("missing 'version' field");
    const int version = j.at("version").get<int>();
    if (version != kMpsFormatVersion)
        throw std::runtime_error("unknown format version " + std::to_string(version));
    const std::string scalar = j.at("scalar").get<std::string>();
    if (scalar == "real") return detail::mps_from_json_typed<double>(j);
    if (scalar == "complex") return detail::mps_from_json_typed<Complex>(j);
    throw std::runtime_error("field 'scalar' must be \"real\" or \"complex\"");
}

inline Json plan_to_json(const SynthesisPlan& plan) {
    Json j;
    j["dim"] = plan.dim;
    j["scalar"] = plan.kind == ScalarKind::real ? "real" : "complex";
    j["form"] = plan.form == BlockForm::ry_rz ? "ry_rz" : "givens";
    Json layers = Json::array();
    for (const auto& layer : plan.layers) {
        Json lj;
        lj["parity"] = layer.parity == Parity::unshifted ? "unshifted" : "shifted";
        Json angles = Json::array();
        for (const auto& r : layer.rotations) {
            Json rj;
            rj["block"] = r.block;
            rj["theta"] = r.theta;
            if (plan.kind == ScalarKind::cplx) rj["phi"] = r.phi;
            angles.push_back(rj);
        }
        lj["angles"] = angles;
        layers.push_back(lj);
    }
    j["layers"] = layers;
    j["final_phase"] = plan.final_phase;
    return j;
}

inline SynthesisPlan plan_from_json(const Json& j) {
    SynthesisPlan plan;
    plan.dim = j.at("dim").get<int>();
    const std::string scalar = j.at("scalar").get<std::string>();
    if (scalar != "real" && scalar != "complex")
        throw std::runtime_error("plan scalar must be \"real\" or \"complex\"");
    plan.kind = scalar == "real" ? ScalarKind::real : ScalarKind::cplx;
    plan.form = j.value("form", "ry_rz") == "givens" ? BlockForm::givens_raw : BlockForm::ry_rz;
    for (const auto& lj : j.at("layers")) {
        RotationLayer layer;
        const std::string parity = lj.at("parity").get<std::string>();
        if (parity != "unshifted" && parity != "shifted")
            throw std::runtime_error("layer parity must be \"unshifted\" or \"shifted\"");
        layer.parity = parity == "unshifted" ? Parity::unshifted : Parity::shifted;
        for (const auto& rj : lj.at("angles")) {
            Rotation r;
            r.block = rj.at("block").get<int>();
            r.theta = rj.at("theta").get<double>();
            r.phi = rj.value("phi", 0.0);
            layer.rotations.push_back(r);
        }
        plan.layers.push_back(layer);
    }
    plan.final_phase = j.at("final_phase").get<std::vector<double>>();
    if (static_cast<int>(plan.final_phase.size()) != plan.dim)
        throw std::runtime_error("final_phase length must equal the plan dimension");
    return plan;
}

inline Json merged_plan_to_json(const MergedPlan& merged) {
    SynthesisPlan as_plan;
    as_plan.dim = merged.dim;
    as_plan.kind = merged.kind;
    as_plan.form = BlockForm::ry_rz;
    as_plan.layers = merged.layers;
    as_plan.final_phase = merged.final_phase;
    Json j = plan_to_json(as_plan);
    j["active_width"] = merged.active_width;
    j["block_sizes"] = merged.block_sizes;
    return j;
}

template <class T>
Json compiled_site_to_json(const CompiledSite<T>& unit) {
    Json j;
    j["dim"] = unit.dim;
    j["w"] = unit.dec.w;
    j["q"] = unit.dec.q;
    j["block_offsets"] = unit.dec.block_offsets;
    Json plans = Json::array();
    for (const auto& p : unit.block_plans) plans.push_back(plan_to_json(p));
    j["block_plans"] = plans;
    j["merged"] = merged_plan_to_json(unit.merged);
    return j;
}

inline Json report_to_json(const CostReport& report) {
    Json j;
    j["toffolis"] = report.toffolis;
    j["ancilla_peak"] = report.ancilla_peak;
    j["total_qubits"] = report.total_qubits;
    Json items = Json::array();
    for (const auto& item : report.breakdown) {
        Json ij;
        ij["component"] = item.label;
        ij["toffolis"] = item.toffolis;
        ij["qubits"] = item.qubits;
        ij["lambda"] = item.lambda;
        items.push_back(ij);
    }
    j["breakdown"] = items;
    return j;
}

}  // namespace mpsprep
