#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

const std::string kCli = DPCUBE_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

struct Cleanup {
    std::vector<std::string> files;
    ~Cleanup() {
        for (const auto& f : files) std::remove(f.c_str());
    }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run("") == 1);
    CHECK(run("generate") == 1);  // needs --n or --input
    CHECK(run("rate --mechanism pmm --dim 1 --eps 1 --n 256,512 --trials 1") == 1);
    CHECK(run("audit --mechanism pmm --eps 0") == 1);
    CHECK(run("eval") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE("generate writes csv and metadata; manifest reproduces it") {
    Cleanup cleanup{{"cli_gen.csv", "cli_gen.json", "cli_again.csv", "cli_again.json",
                     "cli_stdout.txt", "cli_stderr.txt"}};
    REQUIRE(run("generate --mechanism pmm --dim 2 --eps 1 --n 300 --seed 5 --output cli_gen") == 0);
    const std::string csv = slurp("cli_gen.csv");
    CHECK(!csv.empty());

    REQUIRE(run("generate --manifest cli_gen.json --output cli_again") == 0);
    CHECK(slurp("cli_again.csv") == csv);
}

TEST_CASE("audit subcommand exit codes") {
    Cleanup cleanup{{"cli_stdout.txt", "cli_stderr.txt"}};
    CHECK(run("audit --mechanism pmm --eps 1 --window 40") == 0);
    CHECK(run("audit --mechanism psmm --eps 1 --window 40") == 0);
    CHECK(slurp("cli_stdout.txt").find("PASS") != std::string::npos);
}

TEST_CASE("eval and data errors") {
    Cleanup cleanup{{"cli_a.csv", "cli_b.csv", "cli_bad.csv", "cli_3d.csv", "cli_stdout.txt",
                     "cli_stderr.txt"}};
    write_file("cli_a.csv", "0\n");
    write_file("cli_b.csv", "1\n");
    REQUIRE(run("eval cli_a.csv cli_b.csv --method 1d") == 0);
    CHECK(slurp("cli_stdout.txt").substr(0, 1) == "1");
    REQUIRE(run("eval cli_a.csv cli_a.csv --method lp") == 0);
    CHECK(slurp("cli_stdout.txt").substr(0, 1) == "0");

    write_file("cli_bad.csv", "0.5,zebra\n");
    CHECK(run("eval cli_bad.csv cli_a.csv --method lp") == 2);
    CHECK(run("eval missing.csv cli_a.csv --method lp") == 2);

    write_file("cli_3d.csv", "0.1,0.2,0.3\n");
    CHECK(run("eval cli_a.csv cli_3d.csv --method lp") == 2);

    // Out-of-range data without --normalize is a data error.
    write_file("cli_bad.csv", "1.5\n");
    CHECK(run("generate --mechanism pmm --eps 1 --input cli_bad.csv") == 2);
}

TEST_CASE("rate report formats") {
    Cleanup cleanup{{"cli_rate.json", "cli_rate.csv", "cli_stdout.txt", "cli_stderr.txt"}};
    REQUIRE(run("rate --mechanism pmm --dim 1 --eps 1 --n 128,256,512,1024 --trials 2 --seed 2 "
                "--output cli_rate") == 0);
    const std::string json = slurp("cli_rate.json");
    CHECK(json.find("\"slope\"") != std::string::npos);
    const std::string csv = slurp("cli_rate.csv");
    CHECK(csv.find("n,trials_ok,failures") != std::string::npos);
}
