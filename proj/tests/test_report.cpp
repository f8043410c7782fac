#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "agcm/report.hpp"

using namespace agcm;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("agcm-report-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

FitResult dental_fit(const std::vector<int>& degrees = {1, 1}) {
    LongitudinalDataset d = dental_dataset();
    return fit(d.Y, dataset_spec(d, degrees));
}

McReport small_mc(bool retain = false) {
    SimulationScenario s = default_scenario(40, 0.5, 12);
    return mc_aic(s, {20, 40}, 25, retain);
}

}  // namespace

TEST_CASE("matrix JSON round-trips bitwise") {
    Matrix A(2, 3);
    A << 1.0, -2.5, 1.0 / 3.0, 1e-17, 530.4131, -0.0;
    Json j = Json::parse(to_json(A).dump());
    Matrix B = matrix_from_json(j);
    CHECK((A - B).norm() == 0.0);

    CHECK_THROWS_AS(matrix_from_json(Json::parse("42")), IoError);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,2],[3]]")), IoError);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,\"x\"]]")), IoError);
}

TEST_CASE("fit reports round-trip through serialized JSON without loss") {
    FitResult original = dental_fit();
    Json reparsed = Json::parse(to_json(original).dump(2));
    FitResult loaded = fit_from_json(reparsed);

    CHECK(loaded.rmss == original.rmss);
    CHECK(loaded.aic == original.aic);
    CHECK(loaded.n_params == original.n_params);
    CHECK((loaded.mean_hat - original.mean_hat).norm() == 0.0);
    CHECK((loaded.residual - original.residual).norm() == 0.0);
    CHECK((loaded.covariance.sigma_hat - original.covariance.sigma_hat).norm() == 0.0);
    CHECK(loaded.covariance.divisor == original.covariance.divisor);
    REQUIRE(loaded.coefficients.size() == original.coefficients.size());
    for (std::size_t b = 0; b < loaded.coefficients.size(); ++b)
        CHECK((loaded.coefficients[b] - original.coefficients[b]).norm() == 0.0);

    CHECK_THROWS_AS(fit_from_json(Json::parse("{\"type\":\"other\"}")), IoError);
}

TEST_CASE("selection JSON separates valid cells from excluded ones") {
    LongitudinalDataset d = dental_dataset();
    Json j = to_json(select_degrees(d, {2, 2}));
    CHECK(j["type"] == "selection");
    REQUIRE(j["grid"].size() == 4);
    CHECK(j["grid"][0]["valid"] == true);
    CHECK(j["grid"][0].contains("aic"));
    CHECK(!j["grid"][0].contains("error"));
    CHECK(j["best"] == Json::array({1, 1}));
}

TEST_CASE("mc JSON carries rho when present and draws only when retained") {
    Json with_rho = to_json(small_mc(false));
    CHECK(with_rho["type"] == "mc_aic");
    CHECK(with_rho["rho"].get<double>() == 0.5);
    CHECK(!with_rho["points"][0].contains("draws"));

    McReport retained = small_mc(true);
    Json j = to_json(retained);
    REQUIRE(j["points"][0].contains("draws"));
    CHECK(j["points"][0]["draws"].size() == 25);

    McReport no_rho = retained;
    no_rho.rho.reset();
    CHECK(to_json(no_rho)["rho"].is_null());
}

TEST_CASE("mc CSV preserves full precision") {
    McReport mc = small_mc();
    std::istringstream in(mc_csv(mc));
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "n,aic_shared_min,aic_shared_max,aic_additive,var_shared_min,var_shared_max,"
          "var_additive,failures");
    std::string line;
    std::getline(in, line);
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(cell == "20");
    std::getline(row, cell, ',');
    CHECK(std::strtod(cell.c_str(), nullptr) == mc.points[0].aic_shared_min);
}

TEST_CASE("mc SVG is a complete three-series chart") {
    std::string svg = mc_svg(small_mc());
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1))
        ++polylines;
    CHECK(polylines == 3);
    CHECK(svg.find("shared degree 1") != std::string::npos);
    CHECK(svg.find("shared degree 3") != std::string::npos);
    CHECK(svg.find("additive (true)") != std::string::npos);
    CHECK(svg.find("Averaged AIC vs sample size") != std::string::npos);
    CHECK(svg.find("rho = 0.5") != std::string::npos);

    CHECK_THROWS_AS(mc_svg(McReport{}), ValidationError);
}

TEST_CASE("text tables render the selection layout") {
    LongitudinalDataset d = dental_dataset();
    SelectionResult sel = select_degrees(d, {3, 3});
    std::string table = selection_table(sel);
    CHECK(table.find("(1, 1)") != std::string::npos);
    CHECK(table.find("90.4011") != std::string::npos);
    CHECK(table.find(" *") != std::string::npos);
    CHECK(table.find("best (1, 1)") != std::string::npos);

    std::string ft = fit_table(dental_fit(), {"girl", "boy"});
    CHECK(ft.find("coefficients [girl]") != std::string::npos);
    CHECK(ft.find("aic") != std::string::npos);

    std::string mt = mc_table(small_mc());
    CHECK(mt.find("shared(1)") != std::string::npos);
    CHECK(mt.find("additive") != std::string::npos);
}

TEST_CASE("consistency and asymptotic text summaries") {
    SimulationScenario s = default_scenario(40, 0.5, 5);
    auto table = consistency_sweep(s, {20, 40}, 10);
    std::string text = consistency_table(table);
    CHECK(text.find("sigma_error") != std::string::npos);
    CHECK(text.find("theta_error_2") != std::string::npos);

    AsymptoticReport rep = normality_check(s, 40, 50, 0);
    std::string summary = asymptotic_summary(rep);
    CHECK(summary.find("block 1") != std::string::npos);
    CHECK(summary.find("relative") != std::string::npos);
    CHECK(summary.find("statistic mean in [") != std::string::npos);
}

TEST_CASE("parse_formats understands comma lists") {
    auto fmts = parse_formats("json,svg");
    CHECK(fmts.size() == 2);
    CHECK(fmts.count(ReportFormat::kJson) == 1);
    CHECK(fmts.count(ReportFormat::kSvg) == 1);
    CHECK(parse_formats("text").size() == 1);
    CHECK_THROWS_AS(parse_formats("bogus"), ValidationError);
    CHECK_THROWS_AS(parse_formats(""), ValidationError);
}

TEST_CASE("emit_report writes the requested files") {
    TempDir tmp;
    FitResult f = dental_fit();
    auto written = emit_report(f, tmp.path / "fit", {ReportFormat::kJson, ReportFormat::kText});
    REQUIRE(written.size() == 2);
    CHECK(fs::exists(tmp.path / "fit.json"));
    CHECK(fs::exists(tmp.path / "fit.txt"));
    Json j = Json::parse(slurp(tmp.path / "fit.json"));
    CHECK(j["aic"].get<double>() == f.aic);

    McReport mc = small_mc();
    auto mc_files = emit_report(mc, tmp.path / "nested/dir/mc",
                                {ReportFormat::kJson, ReportFormat::kCsv, ReportFormat::kSvg});
    CHECK(mc_files.size() == 3);
    CHECK(fs::exists(tmp.path / "nested/dir/mc.svg"));
    CHECK(slurp(tmp.path / "nested/dir/mc.csv").find("aic_additive") != std::string::npos);
}

TEST_CASE("emit_report rejects formats a result cannot render") {
    TempDir tmp;
    FitResult f = dental_fit();
    CHECK_THROWS_AS(emit_report(f, tmp.path / "fit", {ReportFormat::kCsv}), ValidationError);
    CHECK_THROWS_AS(emit_report(f, tmp.path / "fit", {ReportFormat::kSvg}), ValidationError);
    CHECK_THROWS_AS(emit_report(f, tmp.path / "fit", std::set<ReportFormat>{}), ValidationError);

    SimulationScenario s = default_scenario(40, 0.5, 5);
    auto table = consistency_sweep(s, {20, 40}, 5);
    CHECK_THROWS_AS(emit_report(table, tmp.path / "c", {ReportFormat::kCsv}), ValidationError);
}

TEST_CASE("emit_report surfaces filesystem failures as IoError") {
    TempDir tmp;
    std::ofstream blocker(tmp.path / "file");
    blocker << "x";
    blocker.close();
    // the parent "directory" is an existing regular file
    CHECK_THROWS_AS(emit_report(dental_fit(), tmp.path / "file" / "out", {ReportFormat::kJson}),
                    IoError);
}
