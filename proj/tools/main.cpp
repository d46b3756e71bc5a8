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

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mpsprep/mpsprep.hpp"

namespace {

using namespace mpsprep;

Charge parse_charge(const std::string& text) {
    std::vector<int> components;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            components.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw std::runtime_error("invalid charge component '" + part + "'");
        }
    }
    if (components.empty()) throw std::runtime_error("empty charge");
    return Charge(std::move(components));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

AnyMps load_mps(const std::string& path) {
    AnyMps mps = mps_from_json(read_json_file(path));
    auto violations = std::visit([](const auto& m) { return validate(m); }, mps);
    if (!violations.empty()) {
        std::string msg = path + ": invalid MPS:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    return mps;
}

template <class T>
std::vector<int> bond_dims(const SymmetricMPS<T>& mps) {
    std::vector<int> dims = {mps.tensors.front().left.dim()};
    for (const auto& t : mps.tensors) dims.push_back(t.right.dim());
    return dims;
}

struct CostRow {
    std::string method;
    CostReport report;
};

template <class T>
void print_cost_table(const SymmetricMPS<T>& canonical, const std::vector<CostRow>& rows,
                      const CostParams& params) {
    auto dims = bond_dims(canonical);
    std::cout << "sites         " << canonical.n_sites() << "\n";
    std::cout << "bond dims     ";
    for (std::size_t i = 0; i < dims.size(); ++i) std::cout << (i ? " " : "") << dims[i];
    std::cout << "\n";
    std::cout << "density^-1    " << std::fixed << std::setprecision(2)
              << inverse_density(canonical) << "\n";
    std::cout << "angle bitsize " << params.bitsize << "\n";
    double dense_tof = 0;
    for (const auto& row : rows)
        if (row.method == "dense") dense_tof = static_cast<double>(row.report.toffolis);
    for (const auto& row : rows) {
        std::cout << "method " << std::left << std::setw(11) << row.method << std::right
                  << " toffolis " << std::setw(14) << row.report.toffolis << "  qubits "
                  << std::setw(8) << row.report.total_qubits;
        if (dense_tof > 0)
            std::cout << "  improvement " << std::setprecision(1)
                      << dense_tof / static_cast<double>(row.report.toffolis) << "x";
        std::cout << "\n";
    }
}

int run_gen(int sites, int chi, const std::string& charge_text, std::uint64_t seed, bool use_complex,
            int max_sectors, const std::string& output) {
    Charge charge = parse_charge(charge_text);
    RandomMpsOptions opts;
    opts.sector_cap = max_sectors;
    Json j;
    if (use_complex)
        j = mps_to_json(random_symmetric_mps<Complex>(sites, chi, charge, seed, opts));
    else
        j = mps_to_json(random_symmetric_mps<double>(sites, chi, charge, seed, opts));
    write_text_file(output, j.dump(2) + "\n");
    std::cout << "wrote " << output << "\n";
    return 0;
}

template <class T>
int run_synth_typed(const SymmetricMPS<T>& mps, const std::string& output) {
    std::vector<std::string> warnings;
    auto canonical = right_canonicalize(mps, &warnings);
    for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
    const int n = canonical.n_sites();
    std::vector<Json> site_docs(n);
    parallel_for_index(n, [&](int i) {
        site_docs[i] = compiled_site_to_json(compile_site(canonical.tensors[i]));
    });
    Json j;
    j["version"] = kMpsFormatVersion;
    j["n"] = n;
    j["scalar"] = is_complex_v<T> ? "complex" : "real";
    j["sites"] = site_docs;
    write_text_file(output, j.dump(2) + "\n");
    std::cout << "wrote " << output << " (" << n << " site plans)\n";
    return 0;
}

template <class T>
int run_cost_typed(const SymmetricMPS<T>& mps, const std::string& method, const CostParams& params,
                   const std::string& json_out) {
    auto canonical = right_canonicalize(mps);
    std::vector<CostRow> rows;
    auto add = [&](CostMethod m) {
        rows.push_back({to_string(m), mps_total_cost(canonical, m, params)});
    };
    add(CostMethod::dense);
    if (method == "dense_real" || method == "compare") {
        if (is_complex_v<T> && method == "dense_real")
            throw std::runtime_error("method dense_real requires a real MPS");
        if (!is_complex_v<T>) add(CostMethod::dense_real);
    }
    if (method == "sparse" || method == "compare") add(CostMethod::sparse);

    std::vector<CostRow> shown;
    for (const auto& row : rows)
        if (method == "compare" || row.method == method || row.method == "dense")
            shown.push_back(row);
    print_cost_table(canonical, shown, params);

    if (!json_out.empty()) {
        Json j;
        j["bond_dims"] = bond_dims(canonical);
        j["inverse_density"] = inverse_density(canonical);
        j["bitsize"] = params.bitsize;
        for (const auto& row : rows) j["reports"][row.method] = report_to_json(row.report);
        write_text_file(json_out, j.dump(2) + "\n");
    }
    return 0;
}

template <class T>
int run_verify_typed(const SymmetricMPS<T>& mps, std::uint64_t seed, int sign_seeds,
                     int qubit_cap) {
    std::vector<std::string> warnings;
    auto canonical = right_canonicalize(mps, &warnings);
    for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
    auto prog = compile_program(canonical);

    double max_residual = 0;
    std::vector<double> residuals(canonical.n_sites());
    parallel_for_index(canonical.n_sites(), [&](int i) {
        auto [u, pattern] = site_isometry(canonical.tensors[i]);
        const auto& dec = prog.sites[i].dec;
        auto a = reassemble(dec);
        residuals[i] = (a.leftCols(pattern.cols) - embed_isometry(u, pattern, dec.dim)).norm();
    });
    for (double r : residuals) max_residual = std::max(max_residual, r);
    std::cout << "block-diagonalization max residual " << std::scientific << std::setprecision(2)
              << max_residual << "\n";

    bool pass = max_residual < 1e-10;
    const int total_bits = canonical.n_sites() * prog.site_bits + prog.anc_bits;
    if (total_bits <= qubit_cap) {
        auto oracle = contract_to_statevector(canonical);
        double min_fidelity = 1.0, max_trace = 0.0;
        for (int s = -1; s < sign_seeds; ++s) {
            auto src = s < 0 ? SignOutcomeSource::all_plus()
                             : SignOutcomeSource::seeded(seed + static_cast<std::uint64_t>(s));
            auto sim = simulate_preparation(prog, src, qubit_cap);
            Complex dot = 0;
            for (int i = 0; i < oracle.size(); ++i) {
                if constexpr (is_complex_v<T>)
                    dot += std::conj(oracle(i)) * sim.site_state(i);
                else
                    dot += oracle(i) * sim.site_state(i);
            }
            min_fidelity = std::min(min_fidelity, std::abs(dot) / oracle.norm());
            max_trace = std::max(max_trace, sim.ancilla_trace_distance());
        }
        std::cout << "simulation fidelity min " << std::setprecision(12) << min_fidelity << " ("
                  << sign_seeds + 1 << " sign branches)\n";
        std::cout << "ancilla trace distance max " << std::setprecision(2) << max_trace << "\n";
        pass = pass && min_fidelity >= 1.0 - 1e-10 && max_trace < 1e-9;
    } else {
        std::cout << "simulation skipped: " << total_bits << " qubits exceed the cap of "
                  << qubit_cap << "\n";
    }
    std::cout << "verify: " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compiler and resource estimator for symmetric MPS preparation circuits"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random block-sparse MPS");
    int sites = 4, chi = 8, max_sectors = 0;
    std::string charge_text = "2,0", output, input, json_out, method = "sparse";
    std::uint64_t seed = 0;
    bool use_complex = false;
    gen->add_option("--sites", sites, "number of sites")->required();
    gen->add_option("--chi", chi, "maximal bond dimension")->required();
    gen->add_option("--charge", charge_text, "total charge, e.g. 4,0")->required();
    gen->add_option("--seed", seed, "random seed");
    gen->add_flag("--complex", use_complex, "complex-valued tensors");
    gen->add_option("--max-sectors", max_sectors, "cap on charge sectors per bond (0 = chi)");
    gen->add_option("-o,--output", output, "output file")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Compile per-site preparation plans");
    synth->add_option("-i,--input", input, "MPS file")->required();
    synth->add_option("-o,--output", output, "plan file")->required();

    // cost
    auto* cost = app.add_subcommand("cost", "Estimate Toffoli and qubit costs");
    int bitsize = 15;
    std::int64_t ancilla_cap = 0;
    cost->add_option("-i,--input", input, "MPS file")->required();
    cost->add_option("--method", method, "sparse | dense | dense_real")
        ->check(CLI::IsMember({"sparse", "dense", "dense_real"}));
    cost->add_option("--bitsize", bitsize, "angle register width b");
    cost->add_option("--ancilla-cap", ancilla_cap, "per-component ancilla cap (0 = none)");
    cost->add_option("--json", json_out, "also write a machine-readable report");

    // verify
    auto* verify = app.add_subcommand("verify", "Check compilation and simulate the preparation");
    int sign_seeds = 5, qubit_cap = 24;
    verify->add_option("-i,--input", input, "MPS file")->required();
    verify->add_option("--seed", seed, "base seed for sign outcomes");
    verify->add_option("--sign-seeds", sign_seeds, "number of random sign-outcome branches");
    verify->add_option("--qubit-cap", qubit_cap, "statevector qubit cap");

    // compare
    auto* compare = app.add_subcommand("compare", "Cost all methods and print improvement factors");
    compare->add_option("-i,--input", input, "MPS file")->required();
    compare->add_option("--bitsize", bitsize, "angle register width b");
    compare->add_option("--ancilla-cap", ancilla_cap, "per-component ancilla cap (0 = none)");
    compare->add_option("--json", json_out, "also write a machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return run_gen(sites, chi, charge_text, seed, use_complex, max_sectors, output);

        AnyMps mps = load_mps(input);
        CostParams params;
        params.bitsize = bitsize;
        if (ancilla_cap > 0) params.ancilla_cap = ancilla_cap;

        if (synth->parsed())
            return std::visit([&](const auto& m) { return run_synth_typed(m, output); }, mps);
        if (cost->parsed())
            return std::visit(
                [&](const auto& m) { return run_cost_typed(m, method, params, json_out); }, mps);
        if (verify->parsed())
            return std::visit(
                [&](const auto& m) { return run_verify_typed(m, seed, sign_seeds, qubit_cap); },
                mps);
        if (compare->parsed())
            return std::visit(
                [&](const auto& m) { return run_cost_typed(m, "compare", params, json_out); },
                mps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
