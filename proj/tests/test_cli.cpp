#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

const std::string kExe = VERIFY_EXE;
const std::string kDir = TEST_SCRATCH_DIR;

int run(const std::string& args) {
    const std::string cmd = kExe + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string drop_line_with(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);)
        if (line.find(key) == std::string::npos) out += line + "\n";
    return out;
}

std::string write(const std::string& name, const std::string& content) {
    const std::string path = kDir + "/" + name;
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("help exits cleanly", "[cli]") { CHECK(run("--help") == 0); }

TEST_CASE("passing run exits 0", "[cli]") {
    CHECK(run("--suite geometry --n 1 --points 3") == 0);
    CHECK(run("--suite heisenberg --n 1,2 --points 2 --format text") == 0);
}

TEST_CASE("failing checks exit 1", "[cli]") {
    CHECK(run("--suite connections --n 1 --points 2 --tol-closed 1e-20") == 1);
}

TEST_CASE("configuration errors exit 2", "[cli]") {
    CHECK(run("--suite topology") == 2);
    CHECK(run("--n 0") == 2);
    CHECK(run("--points many") == 2);
    CHECK(run("--format yaml") == 2);
    CHECK(run("--suite statmech --model ising") == 2);
    CHECK(run("--models-file /nonexistent.json") == 2);
    CHECK(run("--no-such-flag") == 2);
    CHECK(run("--config " + write("bad.toml", "points = -4\n")) == 2);
    CHECK(run("--config " + write("typo.toml", "tol_fd = 1e-3\n")) == 2);
}

TEST_CASE("config file with flag overrides", "[cli]") {
    const std::string cfg = write("small.toml", "suite = \"geometry\"\nn = [2]\npoints = 2\nseed = 5\n");
    const std::string out = kDir + "/from_config.json";
    REQUIRE(run("--config " + cfg + " --points 3 --out " + out) == 0);
    const std::string report = slurp(out);
    CHECK(report.find("\"points\": 3") != std::string::npos);
    CHECK(report.find("geometry.tps.n2.volume") != std::string::npos);
    CHECK(report.find("geometry.tps.n1.") == std::string::npos);
}

TEST_CASE("models file adds models to the statmech suite", "[cli]") {
    const std::string models = write("coin.json", R"({"models": [{
        "name": "coin",
        "space": {"type": "discrete", "points": [-1, 1], "weights": [1, 1]},
        "quadrature": {"kind": "discrete_sum"},
        "observables": ["x"],
        "q_domain": {"lo": [-3], "hi": [3]}}]})");
    const std::string out = kDir + "/coin_report.json";
    REQUIRE(run("--suite statmech --model coin --models-file " + models + " --out " + out) == 0);
    const std::string report = slurp(out);
    CHECK(report.find("statmech.coin.kl_order") != std::string::npos);
    CHECK(report.find("statmech.two_level.") == std::string::npos);
}

TEST_CASE("identical runs give identical reports", "[cli]") {
    const std::string a = kDir + "/det_a.json";
    const std::string b = kDir + "/det_b.json";
    REQUIRE(run("--suite heisenberg --n 1 --points 4 --seed 9 --workers 1 --out " + a) == 0);
    REQUIRE(run("--suite heisenberg --n 1 --points 4 --seed 9 --workers 3 --out " + b) == 0);
    CHECK(drop_line_with(slurp(a), "duration_seconds") == drop_line_with(slurp(b), "duration_seconds"));
}
