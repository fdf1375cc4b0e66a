// test_cli.cpp — end-to-end runs of the floquet-pt binary (path supplied via
// the FLOQUET_PT_BIN environment variable by the build)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("FLOQUET_PT_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd =
        bin() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("fpt_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2) << "\n";
    return p;
}

// Data rows of a CSV (line count minus the header).
int csv_rows(const fs::path& p, std::string* header = nullptr) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) {
        if (rows < 0 && header) *header = line;
        ++rows;
    }
    return rows;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

TEST_CASE("usage errors exit with 2 and help with 0") {
    const fs::path dir = fresh_dir("usage");
    CHECK(run("", dir).code == 2);
    CHECK(run("--help", dir).code == 0);
    CHECK(run("spectrum --config " + (dir / "missing.json").string(), dir).code == 2);
}

TEST_CASE("malformed configuration exits with 2 and names the problem") {
    const fs::path dir = fresh_dir("badcfg");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{\"model\": }";
    CHECK(run("spectrum --config " + bad.string(), dir).code == 2);

    const fs::path unknown = write_config(
        dir, {{"model", "minimal"},
              {"banana", 3},
              {"sweep", {{"parameter", "lambda"}, {"start", 0.0}, {"stop", 1.0}, {"steps", 5}}}});
    const RunResult r = run("spectrum --config " + unknown.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("banana") != std::string::npos);
}

TEST_CASE("spectrum run writes the sweep tables and plots") {
    const fs::path dir = fresh_dir("spectrum");
    const fs::path cfg = write_config(
        dir, {{"model", "minimal"},
              {"sites", 8},
              {"sweep", {{"parameter", "lambda"}, {"start", 0.0}, {"stop", 1.0}, {"steps", 5}}}});
    const RunResult r =
        run("spectrum --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    for (const char* name : {"spectrum.csv", "p_com.csv", "spectrum_re.svg",
                             "spectrum_im.svg", "p_com.svg"})
        CHECK(r.out.find(name) != std::string::npos);

    std::string header;
    CHECK(csv_rows(dir / "spectrum.csv", &header) == 5 * 8);
    CHECK(header == "param,index,re_E,im_E");
    CHECK(csv_rows(dir / "p_com.csv") == 5);
    CHECK(slurp(dir / "spectrum_re.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("periodic rings keep p_com identically zero") {
    const fs::path dir = fresh_dir("ring");
    const fs::path cfg = write_config(
        dir, {{"model", "minimal"},
              {"sites", 10},
              {"eta", 1.0},
              {"sweep", {{"parameter", "lambda"}, {"start", 0.5}, {"stop", 3.0}, {"steps", 6}}}});
    CHECK(run("spectrum --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    std::ifstream in(dir / "p_com.csv");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        REQUIRE(cells.size() == 2);
        CHECK(std::stod(cells[1]) == 0.0);
    }
}

TEST_CASE("trajectory run keeps the pair product on the circle") {
    const fs::path dir = fresh_dir("traj");
    const fs::path cfg = write_config(
        dir, {{"model", "minimal"},
              {"sites", 2},
              {"sweep", {{"parameter", "lambda"}, {"start", 1.8}, {"stop", 2.2}, {"steps", 21}}}});
    const RunResult r =
        run("trajectory --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    std::ifstream in(dir / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "param,re_xi1,im_xi1,re_xi2,im_xi2,product_modulus,ambiguous");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto cells = split_csv_line(line);
        REQUIRE(cells.size() == 7);
        CHECK(std::abs(std::stod(cells[5]) - 1.0) < 1e-8);
    }
    CHECK(rows == 21);
}

TEST_CASE("model audit passes for the hybridized model and finds obstructions") {
    const fs::path dir = fresh_dir("audit2");
    const fs::path cfg = write_config(dir, {{"model", "type2"},
                                            {"sites", 8},
                                            {"t1", 1.0},
                                            {"t2", 0.5},
                                            {"parity", "identity"}});
    const RunResult r =
        run("validate-model --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    const json audit = json::parse(slurp(dir / "audit.json"));
    CHECK(audit["pt_protocol"]["pass"] == true);
    CHECK(audit["pt_floquet"]["pass"] == true);
    CHECK(audit["bloch"]["hermitian_sum_pass"] == true);
    CHECK(audit["bloch"]["commute_pass"] == true);
    CHECK(audit["obc_noncommute"] == true);
    CHECK(audit["g1_norm"].get<double>() < 1e-10);
    CHECK(audit["g2_norm"].get<double>() > 0.1);
    CHECK(audit["obstructions_any"] == true);
}

TEST_CASE("model audit of the single-band chain is clean") {
    const fs::path dir = fresh_dir("audit1");
    const fs::path cfg = write_config(dir, {{"model", "minimal"}, {"sites", 6}, {"t", 2.0}});
    const RunResult r =
        run("validate-model --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    const json audit = json::parse(slurp(dir / "audit.json"));
    CHECK(audit["obc_noncommute"] == true);
    CHECK(audit["g1_norm"].get<double>() < 1e-12);
}

TEST_CASE("scale-free run rejects short size lists and all-real spectra") {
    const fs::path dir = fresh_dir("sfbad");
    const fs::path three = write_config(
        dir, {{"model", "minimal"}, {"coupling", 3.0}, {"sizes", {8, 12, 16}}});
    CHECK(run("scale-free --config " + three.string() + " --out " + dir.string(), dir).code == 2);

    const fs::path ring = write_config(dir, {{"model", "minimal"},
                                             {"coupling", 3.0},
                                             {"eta", 1.0},
                                             {"sizes", {8, 12, 16, 20}}});
    CHECK(run("scale-free --config " + ring.string() + " --out " + dir.string(), dir).code == 3);
}

TEST_CASE("perturbation run reports the finite-size decay of the coupling") {
    const fs::path dir = fresh_dir("pert");
    const fs::path cfg = write_config(
        dir, {{"model", "minimal"}, {"coupling", 3.0}, {"sizes", {12, 16}}});
    const RunResult r =
        run("perturbation --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(csv_rows(dir / "gamma_p.csv") == 2);
    const json rep = json::parse(slurp(dir / "perturbation.json"));
    CHECK(rep.contains("slope_log_gamma_vs_log_size"));
    CHECK(std::isfinite(rep["slope_log_gamma_vs_log_size"].get<double>()));
    CHECK(fs::exists(dir / "v_heatmap_N12.csv"));
}

TEST_CASE("phase-diagram run grids sizes against the sweep") {
    const fs::path dir = fresh_dir("phase");
    const fs::path cfg = write_config(
        dir, {{"model", "minimal"},
              {"sizes", {8, 12}},
              {"sweep", {{"parameter", "lambda"}, {"start", 1.4}, {"stop", 2.2}, {"steps", 9}}}});
    const RunResult r =
        run("phase-diagram --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(csv_rows(dir / "phase_diagram.csv") == 2 * 9);
    CHECK(fs::exists(dir / "thresholds.csv"));
    CHECK(fs::exists(dir / "phase_diagram.svg"));
}
