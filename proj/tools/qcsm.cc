#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcsm/experiment.h"
#include "qcsm/model_io.h"
#include "qcsm/oracle.h"

using namespace qcsm;

namespace {

Circuit load_circuit(const std::string &builtin, const std::string &file, int d, int T,
                     const std::string &cnot_schedule) {
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) {
            throw std::invalid_argument("cannot open " + file);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_circuit(buf.str());
    }
    if (builtin.empty()) {
        throw std::invalid_argument("pass --builtin or --circuit");
    }
    BuiltinParams p;
    p.distance = d;
    if (T > 0) {
        p.duration = T;
    }
    p.cnot_schedule = cnot_schedule;
    return builtin_circuit(builtin, p);
}

void write_or_print(const std::string &path, const std::string &content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot write " + path);
    }
    out << content;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stabilizer circuits as disordered spin models: compiler and decoders"};
    app.require_subcommand(1);

    std::string builtin, circuit_file, out_path, graph_path, cnot_schedule = "midpoint";
    int d = 3, T = -1;
    double px = 0.1, pz = 0.0;
    bool keep_overcomplete = false, gauge_fix = false, no_simplify = false;

    auto add_circuit_opts = [&](CLI::App *cmd) {
        cmd->add_option("--builtin", builtin, "built-in circuit family");
        cmd->add_option("--circuit", circuit_file, "circuit file path");
        cmd->add_option("-d,--distance", d, "code distance");
        cmd->add_option("-T,--duration", T, "circuit duration (timesteps)");
        cmd->add_option("--cnot-schedule", cnot_schedule, "rep_cnot: midpoint | every_cell");
    };

    auto *build = app.add_subcommand("build-model", "compile a circuit into a spin model file");
    add_circuit_opts(build);
    build->add_option("--px", px, "X error probability");
    build->add_option("--pz", pz, "Z error probability");
    build->add_flag("--keep-overcomplete", keep_overcomplete,
                    "retain dependent gauge generators (gauge symmetries)");
    build->add_flag("--gauge-fix", gauge_fix, "force the fully reduced basis");
    build->add_flag("--raw", no_simplify, "skip degree-1/2 spin integration");
    build->add_option("-o,--output", out_path, "model file ('-' for stdout)");
    build->add_option("--graph", graph_path, "also write a JSON graph export");

    auto *inspect = app.add_subcommand("inspect", "dump gauge generators and redundancies");
    add_circuit_opts(inspect);
    inspect->add_flag("--keep-overcomplete", keep_overcomplete,
                      "retain dependent gauge generators");
    inspect->add_option("-o,--output", out_path, "output path ('-' for stdout)");

    std::string oracle_mode = "ml";
    auto *oracle = app.add_subcommand("oracle", "exact small-instance references");
    add_circuit_opts(oracle);
    oracle->add_option("--px", px, "X error probability");
    oracle->add_option("--pz", pz, "Z error probability");
    oracle->add_option("--mode", oracle_mode, "ml | partition | coset");

    std::string config_path, out_prefix;
    auto *run = app.add_subcommand("run-experiment", "disorder-averaged ML decoding curves");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("-o,--output", out_prefix, "output prefix (overrides config)");

    std::string csv_path;
    double window_lo = 0, window_hi = 0;
    auto *thresh = app.add_subcommand("estimate-threshold", "crossing fit over curve CSV");
    thresh->add_option("--csv", csv_path, "curve points CSV")->required();
    thresh->add_option("--window-lo", window_lo, "fit window lower edge")->required();
    thresh->add_option("--window-hi", window_hi, "fit window upper edge")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            Circuit c = load_circuit(builtin, circuit_file, d, T, cnot_schedule);
            bool overcomplete = keep_overcomplete && !gauge_fix;
            GaugeBasis basis = compile_gauge_basis(c, overcomplete);
            SpinModel model = build_hamiltonian(basis, NoiseChannel::independent(px, pz));
            if (!no_simplify) {
                model = simplify(model);
            }
            write_or_print(out_path, model_to_text(model));
            if (!graph_path.empty()) {
                write_or_print(graph_path, model_to_graph_json(model));
            }
        } else if (inspect->parsed()) {
            Circuit c = load_circuit(builtin, circuit_file, d, T, cnot_schedule);
            GaugeBasis basis = compile_gauge_basis(c, keep_overcomplete);
            std::ostringstream out;
            out << "# " << basis.generators.size() << " generators, rank " << basis.rank << "\n";
            for (size_t k = 0; k < basis.generators.size(); k++) {
                out << "g" << k << ": " << pauli_to_tokens(basis.generators[k]) << "\n";
            }
            for (const auto &red : basis.redundancies) {
                out << "redundancy:";
                for (int k : red) {
                    out << " g" << k;
                }
                out << "\n";
            }
            for (const auto &issue : validate_circuit(c)) {
                out << (issue.is_error ? "error: " : "note: ") << issue.message << "\n";
            }
            write_or_print(out_path, out.str());
        } else if (oracle->parsed()) {
            Circuit c = load_circuit(builtin, circuit_file, d, T, cnot_schedule);
            NoiseChannel channel = NoiseChannel::independent(px, pz);
            if (oracle_mode == "ml") {
                auto res = exact_ml_success(c, channel);
                std::cout << "ml_success " << res.success << " syndromes " << res.num_syndromes
                          << " cosets " << res.num_cosets << "\n";
            } else if (oracle_mode == "partition" || oracle_mode == "coset") {
                GaugeBasis basis = compile_gauge_basis(c, false);
                SpinModel model = build_hamiltonian(basis, channel);
                SpacetimePauli identity(c.grid());
                if (oracle_mode == "partition") {
                    auto eta = signs_from_error(model, identity);
                    std::cout << "log_partition " << exact_partition(model, eta.eta) << "\n";
                } else {
                    std::cout << "log_coset_probability "
                              << log_coset_probability(identity, basis.generators, channel) << "\n";
                }
            } else {
                throw std::invalid_argument("unknown oracle mode " + oracle_mode);
            }
        } else if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                throw std::invalid_argument("cannot open config " + config_path);
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            ExperimentConfig cfg = parse_experiment_config(buf.str());
            if (!out_prefix.empty()) {
                cfg.output_prefix = out_prefix;
            }
            ExperimentResult res = run_experiment(cfg);
            if (cfg.output_prefix.empty()) {
                std::cout << res.csv;
            } else {
                write_or_print(cfg.output_prefix + ".csv", res.csv);
                write_or_print(cfg.output_prefix + ".manifest.json", res.manifest_json);
            }
        } else if (thresh->parsed()) {
            std::ifstream in(csv_path);
            if (!in) {
                throw std::invalid_argument("cannot open csv " + csv_path);
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            auto points = curve_points_from_csv(buf.str());
            auto est = estimate_threshold(points, window_lo, window_hi);
            std::cout << "{\n  \"x_c\": " << est.x_c << ",\n  \"y_c\": " << est.y_c
                      << ",\n  \"ci\": [" << est.ci_lo << ", " << est.ci_hi << "],\n  \"in_window\": "
                      << (est.in_window ? "true" : "false") << "\n}\n";
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
