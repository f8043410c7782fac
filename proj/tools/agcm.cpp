#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agcm/report.hpp"

namespace {

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

agcm::LongitudinalDataset open_dataset(bool dental, const std::string& path,
                                       const std::string& group_col) {
    if (dental == !path.empty())
        throw agcm::ValidationError("choose exactly one of --dental or --data FILE");
    if (dental) return agcm::dental_dataset();
    agcm::CsvOptions opts;
    opts.group_column = group_col;
    return agcm::load_csv(path, opts);
}

void announce(const std::vector<std::filesystem::path>& written) {
    for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
}

struct SeedFlag {
    std::uint64_t value = 0;
    bool given = false;

    std::uint64_t resolve() {
        if (!given) {
            value = random_seed();
            std::cout << "seed: " << value << " (auto-generated; pass --seed to reproduce)\n";
        }
        return value;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive growth-curve models: fitting, model selection and Monte Carlo checks"};
    app.require_subcommand(1);

    // fit ------------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "Fit an additive model with explicit degrees");
    bool fit_dental = false;
    std::string fit_data, fit_group_col = "group", fit_out, fit_formats = "json,text";
    std::vector<int> fit_degrees;
    double fit_tol = agcm::kOrthogonalityTol;
    fit_cmd->add_flag("--dental", fit_dental, "use the embedded dental dataset");
    fit_cmd->add_option("--data", fit_data, "CSV dataset path");
    fit_cmd->add_option("--group-col", fit_group_col, "group column name (default: group)");
    fit_cmd->add_option("--degrees", fit_degrees, "per-group polynomial degrees, e.g. 1,3")
        ->required()
        ->delimiter(',');
    fit_cmd->add_option("--tol", fit_tol, "design orthogonality tolerance");
    fit_cmd->add_option("--out", fit_out, "output path prefix");
    fit_cmd->add_option("--format", fit_formats, "comma-separated: json,text");
    fit_cmd->callback([&] {
        const agcm::LongitudinalDataset data = open_dataset(fit_dental, fit_data, fit_group_col);
        const agcm::ModelSpec spec = agcm::dataset_spec(data, fit_degrees, fit_tol);
        const agcm::FitResult result = agcm::fit(data.Y, spec);
        std::cout << agcm::fit_table(result, data.group_labels);
        if (!fit_out.empty())
            announce(agcm::emit_report(result, fit_out, agcm::parse_formats(fit_formats), data.group_labels));
    });

    // select ---------------------------------------------------------------
    auto* select_cmd = app.add_subcommand("select", "AIC model selection over a degree grid");
    bool select_dental = false;
    std::string select_data, select_group_col = "group", select_out,
                select_formats = "json,text";
    std::vector<int> select_max;
    double select_tol = agcm::kOrthogonalityTol;
    select_cmd->add_flag("--dental", select_dental, "use the embedded dental dataset");
    select_cmd->add_option("--data", select_data, "CSV dataset path");
    select_cmd->add_option("--group-col", select_group_col, "group column name");
    select_cmd->add_option("--max-degrees", select_max,
                           "per-group maximum degrees (default: 3 for every group)")
        ->delimiter(',');
    select_cmd->add_option("--tol", select_tol, "design orthogonality tolerance");
    select_cmd->add_option("--out", select_out, "output path prefix");
    select_cmd->add_option("--format", select_formats, "comma-separated: json,text");
    select_cmd->callback([&] {
        const agcm::LongitudinalDataset data =
            open_dataset(select_dental, select_data, select_group_col);
        std::vector<int> max_degrees = select_max;
        if (max_degrees.empty())
            max_degrees.assign(static_cast<std::size_t>(data.group_count()), 3);
        const agcm::SelectionResult result = agcm::select_degrees(data, max_degrees, select_tol);
        std::cout << agcm::selection_table(result);
        if (!select_out.empty())
            announce(agcm::emit_report(result, select_out, agcm::parse_formats(select_formats)));
        if (result.best.empty())
            throw agcm::ValidationError("no candidate model could be fitted; see the grid report");
    });

    // simulate --------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Draw one dataset from the two-group scenario");
    int sim_n = 40;
    double sim_rho = 0.5;
    std::string sim_out, sim_law = "gaussian";
    SeedFlag sim_seed;
    sim_cmd->add_option("--n", sim_n, "total sample size (even, split across two groups)");
    sim_cmd->add_option("--rho", sim_rho, "serial correlation in [0, 1)");
    sim_cmd->add_option("--law", sim_law, "error law: gaussian or uniform")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    sim_cmd->add_option("--seed", sim_seed.value, "RNG seed")->each([&](const std::string&) {
        sim_seed.given = true;
    });
    sim_cmd->add_option("--out", sim_out, "CSV output path")->required();
    sim_cmd->callback([&] {
        agcm::SimulationScenario scenario =
            agcm::default_scenario(sim_n, sim_rho, sim_seed.resolve());
        if (sim_law == "uniform") scenario.law = agcm::ErrorLaw::kSymmetricUniform;
        const agcm::Matrix Y = agcm::generate(scenario);

        agcm::LongitudinalDataset data;
        data.Y = Y;
        data.timepoints = scenario.timepoints;
        for (int g = 0; g < scenario.group_count(); ++g) {
            data.group_labels.push_back("g" + std::to_string(g + 1));
            data.group_sizes.push_back(scenario.group_sizes[static_cast<std::size_t>(g)]);
        }
        for (agcm::Index i = 0; i < Y.rows(); ++i) data.source_row.push_back(i);

        std::filesystem::path path(sim_out);
        std::error_code ec;
        if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path(), ec);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw agcm::IoError("cannot open \"" + sim_out + "\" for writing");
        out << agcm::to_csv(data);
        out.flush();
        if (!out) throw agcm::IoError("failed writing \"" + sim_out + "\"");
        std::cout << "wrote " << sim_out << " (seed " << sim_seed.value << ")\n";
    });

    // mc-aic ------------------------------------------------------------------
    auto* mc_cmd = app.add_subcommand("mc-aic", "Averaged AIC of three candidates across n");
    double mc_rho = 0.5;
    std::vector<int> mc_grid = {20, 40, 80, 160, 320};
    long mc_reps = 500;
    bool mc_retain = false;
    std::string mc_out, mc_formats = "json,csv,svg";
    SeedFlag mc_seed;
    mc_cmd->add_option("--rho", mc_rho, "serial correlation in [0, 1)");
    mc_cmd->add_option("--n-grid", mc_grid, "even sample sizes, e.g. 20,40,80")->delimiter(',');
    mc_cmd->add_option("--reps", mc_reps, "replications per grid point");
    mc_cmd->add_flag("--retain", mc_retain, "keep per-replication AIC draws in the report");
    mc_cmd->add_option("--seed", mc_seed.value, "RNG seed")->each([&](const std::string&) {
        mc_seed.given = true;
    });
    mc_cmd->add_option("--out", mc_out, "output path prefix");
    mc_cmd->add_option("--format", mc_formats, "comma-separated: json,text,csv,svg");
    mc_cmd->callback([&] {
        const agcm::SimulationScenario scenario =
            agcm::default_scenario(mc_grid.empty() ? 20 : mc_grid.front(), mc_rho,
                                   mc_seed.resolve());
        const agcm::McReport report = agcm::mc_aic(scenario, mc_grid, mc_reps, mc_retain);
        std::cout << agcm::mc_table(report);
        if (!mc_out.empty())
            announce(agcm::emit_report(report, mc_out, agcm::parse_formats(mc_formats)));
    });

    // diag ---------------------------------------------------------------------
    auto* diag_cmd = app.add_subcommand("diag", "Monte Carlo diagnostics of the estimators");
    diag_cmd->require_subcommand(1);

    auto* cons_cmd = diag_cmd->add_subcommand("consistency", "Estimation error along an n grid");
    double cons_rho = 0.5;
    std::vector<int> cons_grid = {40, 160, 640};
    long cons_reps = 300;
    std::string cons_out, cons_formats = "json,text";
    SeedFlag cons_seed;
    cons_cmd->add_option("--rho", cons_rho, "serial correlation in [0, 1)");
    cons_cmd->add_option("--n-grid", cons_grid, "strictly increasing sample sizes")->delimiter(',');
    cons_cmd->add_option("--reps", cons_reps, "replications per grid point");
    cons_cmd->add_option("--seed", cons_seed.value, "RNG seed")->each([&](const std::string&) {
        cons_seed.given = true;
    });
    cons_cmd->add_option("--out", cons_out, "output path prefix");
    cons_cmd->add_option("--format", cons_formats, "comma-separated: json,text");
    cons_cmd->callback([&] {
        const agcm::SimulationScenario scenario =
            agcm::default_scenario(40, cons_rho, cons_seed.resolve());
        const std::vector<agcm::ConsistencyPoint> table =
            agcm::consistency_sweep(scenario, cons_grid, cons_reps);
        std::cout << agcm::consistency_table(table);
        if (!cons_out.empty())
            announce(agcm::emit_report(table, cons_out, agcm::parse_formats(cons_formats)));
    });

    auto* norm_cmd =
        diag_cmd->add_subcommand("normality", "Limiting-distribution check for one block");
    double norm_rho = 0.5;
    int norm_n = 400;
    long norm_reps = 5000;
    int norm_block = 1;
    std::string norm_out, norm_formats = "json,text";
    SeedFlag norm_seed;
    norm_cmd->add_option("--rho", norm_rho, "serial correlation in [0, 1)");
    norm_cmd->add_option("--n", norm_n, "sample size");
    norm_cmd->add_option("--reps", norm_reps, "replications");
    norm_cmd->add_option("--block", norm_block, "1-based coefficient block")->check(CLI::PositiveNumber);
    norm_cmd->add_option("--seed", norm_seed.value, "RNG seed")->each([&](const std::string&) {
        norm_seed.given = true;
    });
    norm_cmd->add_option("--out", norm_out, "output path prefix");
    norm_cmd->add_option("--format", norm_formats, "comma-separated: json,text");
    norm_cmd->callback([&] {
        const agcm::SimulationScenario scenario =
            agcm::default_scenario(40, norm_rho, norm_seed.resolve());
        const agcm::AsymptoticReport report =
            agcm::normality_check(scenario, norm_n, norm_reps, norm_block - 1);
        std::cout << agcm::asymptotic_summary(report);
        if (!norm_out.empty())
            announce(agcm::emit_report(report, norm_out, agcm::parse_formats(norm_formats)));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const agcm::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const agcm::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const agcm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
