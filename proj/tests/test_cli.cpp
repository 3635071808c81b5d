#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gwt/tree.hpp"

#ifndef GWTREE_CLI_PATH
#error "GWTREE_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "gwtree_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the CLI with stdout/stderr captured into scratch files; returns the
// exit code (-1 when the process died abnormally).
int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
    fs::path so = scratch() / "stdout.txt";
    fs::path se = scratch() / "stderr.txt";
    std::string cmd = std::string("\"") + GWTREE_CLI_PATH + "\" " + args + " > " +
                      so.string() + " 2> " + se.string();
    int status = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    if (out) *out = slurp(so);
    if (err) *err = slurp(se);
    if (status == -1) return -1;
#ifdef _WIN32
    return status;
#else
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    std::string err;
    CHECK(run("", nullptr, &err) == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("sample --no-such-flag") == 2);
    CHECK(run("sample --dist nonsense47") == 2);
    CHECK(run("sample --event 'card~5'") == 2);
    CHECK(run("exact") == 2);  // needs a subcommand
    CHECK(run("--help") == 0);
    CHECK(run("sample --help") == 0);
    CHECK(run("converge tv --help") == 0);
}

TEST_CASE("draws are seed-deterministic") {
    std::string a, b, c;
    CHECK(run("sample --dist binary --n 40 --seed 5", &a) == 0);
    CHECK(run("sample --dist binary --n 40 --seed 5", &b) == 0);
    CHECK(run("sample --dist binary --n 40 --seed 6", &c) == 0);
    CHECK(a == b);
    CHECK(a != c);
    // First line records the run configuration.
    CHECK(a.rfind("# config {", 0) == 0);
    CHECK(data_lines(a).size() == 40);
}

TEST_CASE("fixed-size draws parse back to five-node trees") {
    std::string out;
    CHECK(run("sample --dist binary --event card=5 --exact-cycle --n 25 --seed 2", &out) == 0);
    auto lines = data_lines(out);
    REQUIRE(lines.size() == 25);
    for (const auto& line : lines) {
        gwt::Tree t = gwt::Tree::parse_parens(line);
        CHECK(t.card() == 5);
    }
}

TEST_CASE("off-lattice exact-cycle requests are refused as usage errors") {
    std::string err;
    CHECK(run("sample --dist binary --event card=4 --exact-cycle", nullptr, &err) == 2);
    CHECK(err.find("card") != std::string::npos);
}

TEST_CASE("spine draws emit structured prefixes") {
    std::string out;
    CHECK(run("sample --dist binary --kesten --height 2 --n 5 --seed 3 --format json", &out) ==
          0);
    json doc = json::parse(out);
    REQUIRE(doc.contains("config"));
    CHECK(doc["config"].contains("argv"));
    REQUIRE(doc.contains("trees"));
    REQUIRE(doc["trees"].size() == 5);
    for (const auto& entry : doc["trees"]) {
        CHECK(entry["h"] == 2);
        REQUIRE(entry.contains("degrees"));
        REQUIRE(entry.contains("spine"));
        CHECK(entry["spine"].size() == 2);
        CHECK(entry["spine_labels"].size() == 3);
        std::vector<std::int64_t> degrees = entry["degrees"];
        CHECK(gwt::Tree::decode(degrees).height() == 2);
    }
}

TEST_CASE("exact progeny artifacts carry the law and the config") {
    fs::path prefix = scratch() / "progeny";
    std::string cmd = "exact progeny --dist binary --nmax 9 --out " + prefix.string();
    CHECK(run(cmd) == 0);
    std::string csv = slurp_file(prefix.string() + ".csv");
    CHECK(csv.rfind("# config {", 0) == 0);
    CHECK(!data_lines(csv).empty());

    json doc = json::parse(slurp_file(prefix.string() + ".json"));
    CHECK(doc["config"].contains("argv"));
    std::int64_t offset = doc["offset"];
    std::vector<double> values = doc["values"];
    REQUIRE(offset <= 1);
    CHECK(values.at(static_cast<std::size_t>(1 - offset)) == doctest::Approx(0.5));
    CHECK(values.at(static_cast<std::size_t>(5 - offset)) == doctest::Approx(0.0625));
}

TEST_CASE("failure families map to distinct exit codes") {
    // Budget exhaustion.
    CHECK(run("exact trees --dist binary --card-max 13 --budget 3 --out " +
              (scratch() / "trees").string()) == 3);
    // Zero-mass event family.
    CHECK(run("converge ratio --dist binary --event card --width 1 --nmax 9 --out " +
              (scratch() / "ratio0").string()) == 4);
}

TEST_CASE("ratio diagnostics write both artifact forms") {
    fs::path prefix = scratch() / "ratio";
    CHECK(run("converge ratio --dist subcritical --event height_ge --nmax 60 --out " +
              prefix.string()) == 0);
    json doc = json::parse(slurp_file(prefix.string() + ".json"));
    CHECK(doc["target"] == doctest::Approx(0.8));
    CHECK(doc["converged"].is_boolean());
    REQUIRE(!doc["points"].empty());
    double last = doc["points"].back()["ratio"];
    CHECK(last == doctest::Approx(0.8).epsilon(0.01));

    std::string csv = slurp_file(prefix.string() + ".csv");
    auto lines = data_lines(csv);
    REQUIRE(!lines.empty());
    CHECK(lines.front() == "n,ratio,target");
    CHECK(lines.size() == doc["points"].size() + 1);
}

TEST_CASE("distance table is reproducible and thread-independent") {
    fs::path p1 = scratch() / "tv_t1";
    fs::path p4 = scratch() / "tv_t4";
    std::string base = "converge tv --dist binary --event card --h 2 --mc --replicates 20000 "
                       "--seed 9 --nmax 7 --out ";
    CHECK(run("--threads 1 " + base + p1.string()) == 0);
    CHECK(run("--threads 4 " + base + p4.string()) == 0);
    // The histograms merge by counting, so thread count must not leak into
    // the artifact beyond the argv echo.
    json d1 = json::parse(slurp_file(p1.string() + ".json"));
    json d4 = json::parse(slurp_file(p4.string() + ".json"));
    REQUIRE(d1["reports"].size() == d4["reports"].size());
    CHECK(d1["reports"] == d4["reports"]);

    json first = d1["reports"][0];
    CHECK(first["method"] == "monte_carlo");
    CHECK(first["samples"] == 20000);
}

TEST_CASE("exact distance route needs no replicates") {
    fs::path prefix = scratch() / "tv_exact";
    CHECK(run("converge tv --dist binary --event card --h 2 --exact --nmax 5 --out " +
              prefix.string()) == 0);
    json doc = json::parse(slurp_file(prefix.string() + ".json"));
    REQUIRE(doc["reports"].size() == 3);
    CHECK(doc["reports"][0]["tv"] == doctest::Approx(1.0));   // Card = 1
    CHECK(doc["reports"][1]["tv"] == doctest::Approx(1.0));   // Card = 3
    CHECK(doc["reports"][2]["tv"] == doctest::Approx(0.5));   // Card = 5
    for (const auto& rep : doc["reports"]) CHECK(rep["method"] == "exact");
}

TEST_CASE("critical tilt solver reports the closed-form answer") {
    fs::path prefix = scratch() / "solve";
    CHECK(run("tilt-solve --dist subcritical --A all --out " + prefix.string()) == 0);
    json doc = json::parse(slurp_file(prefix.string() + ".json"));
    REQUIRE(doc.contains("critical_theta"));
    double theta = doc["critical_theta"];
    CHECK(theta == doctest::Approx(std::sqrt(1.5)).epsilon(1e-9));
    CHECK(doc["tilted_mean"] == doctest::Approx(1.0).epsilon(1e-8));

    // Non-generic family: null instead of a number.
    fs::path ng = scratch() / "solve_ng";
    CHECK(run("tilt-solve --dist "
              "'{\"kind\":\"power_law\",\"p0\":0.5,\"exponent\":3.0}' --A all --out " +
              ng.string()) == 0);
    json ngdoc = json::parse(slurp_file(ng.string() + ".json"));
    CHECK(ngdoc["critical_theta"].is_null());
}

TEST_CASE("tilt invariance table is flat at machine scale") {
    fs::path prefix = scratch() / "tilt";
    CHECK(run("converge tilt --dist subcritical --A 0 --theta 0.8 --theta 1.1 --n 2 "
              "--card-max 11 --out " +
              prefix.string()) == 0);
    json doc = json::parse(slurp_file(prefix.string() + ".json"));
    REQUIRE(doc["rows"].size() == 2);
    for (const auto& row : doc["rows"]) {
        double d = row["discrepancy"];
        CHECK(d <= 1e-12);
        CHECK(row["slice_size"].get<std::uint64_t>() > 0);
    }
}
