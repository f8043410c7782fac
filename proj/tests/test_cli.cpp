#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::atomic<int> dir_counter{0};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("agcm-cli-test-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(dir_counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CliResult {
    int code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    static std::atomic<int> out_counter{0};
    const fs::path capture = dir / ("cli_out_" + std::to_string(out_counter++) + ".txt");
    const std::string cmd =
        std::string(AGCM_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(capture);
    return r;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("cli help and parse errors") {
    TempDir tmp;
    CHECK(run_cli("--help", tmp.path).code == 0);
    CHECK(run_cli("fit --help", tmp.path).code == 0);
    CHECK(run_cli("", tmp.path).code == 2);                  // subcommand required
    CHECK(run_cli("fit --dental", tmp.path).code == 2);     // --degrees required
    CHECK(run_cli("no-such-command", tmp.path).code == 2);
}

TEST_CASE("cli select reproduces the dental table on stdout and disk") {
    TempDir tmp;
    CliResult r = run_cli("select --dental --out " + (tmp.path / "sel").string(), tmp.path);
    CHECK(r.code == 0);
    CHECK(r.output.find("90.4011") != std::string::npos);
    CHECK(r.output.find("best (1, 1)") != std::string::npos);
    CHECK(fs::exists(tmp.path / "sel.json"));
    CHECK(fs::exists(tmp.path / "sel.txt"));

    auto j = nlohmann::ordered_json::parse(slurp(tmp.path / "sel.json"));
    CHECK(j["best"] == nlohmann::ordered_json::array({1, 1}));
    CHECK(j["grid"].size() == 9);
}

TEST_CASE("cli fit writes the requested reports") {
    TempDir tmp;
    CliResult r = run_cli("fit --dental --degrees 1,1 --out " + (tmp.path / "fit").string() +
                              " --format json,text",
                          tmp.path);
    CHECK(r.code == 0);
    CHECK(r.output.find("aic") != std::string::npos);
    auto j = nlohmann::ordered_json::parse(slurp(tmp.path / "fit.json"));
    CHECK(std::abs(j["aic"].get<double>() - 90.4011) < 1e-3);
    CHECK(j["n"] == 27);
    CHECK(slurp(tmp.path / "fit.txt").find("coefficients [girl]") != std::string::npos);
}

TEST_CASE("cli exit code 2 for invalid models and unfittable grids") {
    TempDir tmp;
    // degree 9 needs ten profile columns over four timepoints
    CHECK(run_cli("fit --dental --degrees 9,9", tmp.path).code == 2);
    CHECK(run_cli("fit --dental --degrees 1", tmp.path).code == 2);  // one degree, two groups
    CHECK(run_cli("fit --dental --data somewhere.csv --degrees 1,1", tmp.path).code == 2);

    // five subjects in two groups leave r = 3 < p = 4: nothing can be fitted
    write_file(tmp.path / "tiny.csv",
               "group,8,10,12,14\n"
               "a,1,2,3,4\n"
               "a,2,3,4,5\n"
               "a,3,4,5,6\n"
               "b,4,5,6,7\n"
               "b,5,6,7,8\n");
    CliResult r = run_cli("select --data " + (tmp.path / "tiny.csv").string() +
                              " --max-degrees 1,1 --out " + (tmp.path / "grid").string(),
                          tmp.path);
    CHECK(r.code == 2);
    CHECK(r.output.find("excluded:") != std::string::npos);
    CHECK(fs::exists(tmp.path / "grid.json"));  // the error report is still written
}

TEST_CASE("cli exit code 3 for numeric degeneracy") {
    TempDir tmp;
    // identical rows lie exactly in the mean space: Sigma_hat collapses to zero
    write_file(tmp.path / "flat.csv",
               "group,1,2,3,4\n"
               "a,1,2,3,4\n"
               "a,1,2,3,4\n"
               "a,1,2,3,4\n"
               "a,1,2,3,4\n"
               "a,1,2,3,4\n");
    CliResult r =
        run_cli("fit --data " + (tmp.path / "flat.csv").string() + " --degrees 1", tmp.path);
    CHECK(r.code == 3);
    CHECK(r.output.find("numeric error") != std::string::npos);
}

TEST_CASE("cli exit code 4 for unreadable input") {
    TempDir tmp;
    CliResult r = run_cli("fit --data /nonexistent/never.csv --degrees 1,1", tmp.path);
    CHECK(r.code == 4);
    CHECK(r.output.find("io error") != std::string::npos);
}

TEST_CASE("cli simulate writes a loadable, seed-deterministic dataset") {
    TempDir tmp;
    const std::string a = (tmp.path / "a.csv").string();
    const std::string b = (tmp.path / "b.csv").string();
    CHECK(run_cli("simulate --n 20 --rho 0.5 --seed 7 --out " + a, tmp.path).code == 0);
    CHECK(run_cli("simulate --n 20 --rho 0.5 --seed 7 --out " + b, tmp.path).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("g1") != std::string::npos);

    // auto-generated seeds announce themselves and differ between runs
    CliResult auto_run = run_cli("simulate --n 20 --out " + (tmp.path / "c.csv").string(), tmp.path);
    CHECK(auto_run.code == 0);
    CHECK(auto_run.output.find("auto-generated; pass --seed to reproduce") != std::string::npos);

    CHECK(run_cli("simulate --n 21 --seed 7 --out " + a, tmp.path).code == 2);  // odd n
    CHECK(run_cli("simulate --n 20 --rho 1.5 --seed 7 --out " + a, tmp.path).code == 2);
    CHECK(run_cli("simulate --n 20 --law uniform --seed 7 --out " + a, tmp.path).code == 0);
}

TEST_CASE("cli mc-aic runs a small grid end to end") {
    TempDir tmp;
    CliResult r = run_cli("mc-aic --n-grid 20,40 --reps 25 --seed 5 --out " +
                              (tmp.path / "mc").string() + " --format json,csv,svg",
                          tmp.path);
    CHECK(r.code == 0);
    CHECK(r.output.find("averaged AIC") != std::string::npos);
    CHECK(fs::exists(tmp.path / "mc.json"));
    CHECK(fs::exists(tmp.path / "mc.csv"));
    CHECK(fs::exists(tmp.path / "mc.svg"));
    CHECK(slurp(tmp.path / "mc.svg").find("<polyline") != std::string::npos);

    CHECK(run_cli("mc-aic --n-grid 21 --reps 5 --seed 5", tmp.path).code == 2);
}

TEST_CASE("cli diagnostics run end to end") {
    TempDir tmp;
    CliResult cons = run_cli("diag consistency --n-grid 20,40 --reps 20 --seed 3 --out " +
                                 (tmp.path / "cons").string(),
                             tmp.path);
    CHECK(cons.code == 0);
    CHECK(cons.output.find("sigma_error") != std::string::npos);
    CHECK(fs::exists(tmp.path / "cons.json"));

    CliResult norm = run_cli("diag normality --n 60 --reps 200 --seed 3 --block 1", tmp.path);
    CHECK(norm.code == 0);
    CHECK(norm.output.find("limiting-distribution check, block 1") != std::string::npos);

    CHECK(run_cli("diag normality --n 60 --reps 200 --seed 3 --block 5", tmp.path).code == 2);
    CHECK(run_cli("diag", tmp.path).code == 2);
}
