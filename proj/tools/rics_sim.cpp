#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rics/harness.hpp"
#include "rics/metasurface.hpp"

namespace {

rics::ScenarioConfig load_config(const std::string& path) {
    if (path.empty()) return rics::ScenarioConfig{};
    return rics::config_from_file(path);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> items;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RICS-aided vehicular offloading simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, report_path, trace_path;
    std::string scheme = "aioa";
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "run one scheme on one seed");
    run->add_option("--config", config_path, "JSON config path");
    run->add_option("--scheme", scheme, "scheme id")->capture_default_str();
    run->add_option("--seed", seed, "RNG seed")->capture_default_str();
    run->add_option("--out", out_path, "result CSV path (default stdout)");
    run->add_option("--report", report_path, "per-CV safety report CSV path");
    run->add_option("--trace", trace_path, "outer-iteration trace CSV path");

    std::string param = "cv_power";
    double from = 20.0, to = 40.0, step = 5.0;
    std::string schemes_csv = "aioa";
    int num_seeds = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over schemes/seeds");
    sweep_cmd->add_option("--param", param,
                          "cv_power|v2v_power|d_rics|task_bits|num_cvs|num_elements")
        ->capture_default_str();
    sweep_cmd->add_option("--from", from, "first value")->required();
    sweep_cmd->add_option("--to", to, "last value")->required();
    sweep_cmd->add_option("--step", step, "increment")->required();
    sweep_cmd->add_option("--schemes", schemes_csv, "comma-separated scheme ids")
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", num_seeds, "number of seeds (1..n)")
        ->capture_default_str();
    sweep_cmd->add_option("--config", config_path, "JSON config path");
    sweep_cmd->add_option("--out", out_path, "CSV path (default stdout)");

    std::string suite = "mc-expectation";
    auto* validate_cmd = app.add_subcommand("validate", "run an oracle suite");
    validate_cmd->add_option("--suite", suite, "mc-expectation|gradcheck|phase-grid")
        ->capture_default_str();
    validate_cmd->add_option("--config", config_path, "JSON config path");

    std::string psi_grid = "0.5:2.0:0.1";
    auto* material_cmd =
        app.add_subcommand("material", "metasurface design table for a psi grid");
    material_cmd->add_option("--psi-grid", psi_grid, "a:b:step")->capture_default_str();
    material_cmd->add_option("--out", out_path, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = load_config(config_path);
            const auto detailed = rics::run_scheme_detailed(scheme, cfg, seed);
            write_text(out_path, rics::results_to_csv({detailed.row}));
            if (!report_path.empty())
                write_text(report_path, rics::report_to_csv(detailed.report, cfg));
            if (!trace_path.empty())
                write_text(trace_path, rics::trace_to_csv(detailed.trace));
        } else if (sweep_cmd->parsed()) {
            const auto cfg = load_config(config_path);
            std::vector<std::uint64_t> seeds(static_cast<std::size_t>(
                std::max(num_seeds, 0)));
            std::iota(seeds.begin(), seeds.end(), 1);
            const auto rows =
                rics::sweep(param, from, to, step, split_list(schemes_csv), seeds, cfg);
            write_text(out_path, rics::results_to_csv(rows));
        } else if (validate_cmd->parsed()) {
            const auto cfg = load_config(config_path);
            const auto rep = rics::validate(suite, cfg);
            for (const auto& line : rep.lines) std::cout << line << '\n';
            std::cout << "suite " << rep.suite << ": "
                      << (rep.passed ? "PASS" : "FAIL") << '\n';
            return rep.passed ? 0 : 1;
        } else if (material_cmd->parsed()) {
            double a = 0.5, b = 2.0, inc = 0.1;
            if (std::sscanf(psi_grid.c_str(), "%lf:%lf:%lf", &a, &b, &inc) != 3 ||
                inc <= 0.0)
                throw std::runtime_error("--psi-grid must be a:b:step");
            std::ostringstream oss;
            oss << "psi,eps_ratio_re,eps_ratio_im,feasible\n";
            namespace md = rics::metasurface_defaults;
            for (double psi = a; psi <= b + 1e-12; psi += inc) {
                const auto spec = rics::ms_material(psi, md::kDelta, md::kK0,
                                                    md::kGrinWidthNorm);
                oss << psi << ',' << spec.eps_ratio.real() << ','
                    << spec.eps_ratio.imag() << ',' << (spec.feasible ? 1 : 0)
                    << '\n';
            }
            write_text(out_path, oss.str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
