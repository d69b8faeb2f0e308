#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

// Path injected by the build; see tests/CMakeLists.txt.
const std::string kCli = BASKETS_CLI_PATH;

int run(const std::string& args) {
    int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("baskets_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

} // namespace

TEST_CASE("help exits cleanly") {
    CHECK(run("--help") == 0);
    CHECK(run("simulate --help") == 0);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("no-such-command") == 1);
    CHECK(run("simulate --scenario 9 --n 10 --reps 2 --seed 1") == 1);
    CHECK(run("simulate --threshold 1.5 --scenario 1 --n 10 --reps 2") == 1);
    CHECK(run("derive-threshold --scenario 1 --reps 0") == 1);
}

TEST_CASE("simulate writes deterministic reports and a manifest") {
    TempDir dir;
    std::string cmd = "simulate --scenario 1 --n 10 --reps 4 --seed 42"
                      " --mcmc-iterations 800 --mcmc-burn-in 100 --out " +
                      dir.path.string();
    REQUIRE(run(cmd) == 0);
    CHECK(fs::exists(dir.path / "clustering_results.csv"));
    CHECK(fs::exists(dir.path / "rejection_probs.csv"));
    CHECK(fs::exists(dir.path / "posterior_summaries.csv"));
    CHECK(fs::exists(dir.path / "manifest.json"));
    auto manifest = slurp(dir.path / "manifest.json");
    CHECK(manifest.find("\"seed\"") != std::string::npos);
    CHECK(manifest.find("42") != std::string::npos);

    auto first = slurp(dir.path / "rejection_probs.csv");
    REQUIRE(run(cmd) == 0);
    CHECK(slurp(dir.path / "rejection_probs.csv") == first);
}

TEST_CASE("analyze handles an observed dataset end to end") {
    TempDir dir;
    auto csv = dir.path / "trial.csv";
    {
        std::ofstream out(csv);
        out << "basket_id,patient_id,assessment_index,state\n"
               "B1,p1,1,SD\nB1,p1,2,PR\nB1,p2,1,SD\nB1,p2,2,PD\n";
    }
    CHECK(run("analyze --data " + csv.string() +
              " --mcmc-iterations 800 --mcmc-burn-in 100 --out " +
              dir.path.string()) == 0);
    CHECK(run("cluster --data " + csv.string() + " --out " + dir.path.string()) == 0);
}

TEST_CASE("data errors exit 2 and name the problem") {
    TempDir dir;
    auto csv = dir.path / "bad.csv";
    {
        std::ofstream out(csv);
        out << "basket_id,patient_id,assessment_index\nB1,p1,1\n";
    }
    CHECK(run("analyze --data " + csv.string() + " --out " + dir.path.string()) == 2);
    CHECK(run("analyze --data " + (dir.path / "absent.csv").string() +
              " --out " + dir.path.string()) == 2);
}

TEST_CASE("derive-threshold reports the Monte Carlo estimate") {
    CHECK(run("derive-threshold --scenario 1 --reps 200000 --seed 7") == 0);
}
