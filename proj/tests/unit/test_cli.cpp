#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef HCMETA_BINARY
#error "HCMETA_BINARY must point at the hcmeta executable"
#endif

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + "'" HCMETA_BINARY "' " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "hcmeta_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("isoperimetry comparison on the torus") {
    auto r = run("isoperimetry --graph torus:6x6 --s-max 6 --brute-force --compare closed-form");
    CHECK(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == "s,delta,provenance,witness_count,closed_form,match,in_window");
    const int expected[] = {0, 3, 4, 5, 5, 6, 6};
    for (int s = 0; s <= 6; ++s) {
        CAPTURE(rows[s + 1]);
        CHECK(rows[s + 1].rfind(std::to_string(s) + "," + std::to_string(expected[s]) + ",brute-force,", 0) == 0);
        CHECK(rows[s + 1].find(",true,") != std::string::npos);
    }
}

TEST_CASE("closed-form profile without brute force") {
    auto r = run("isoperimetry --graph hypercube:4");
    CHECK(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[2] == "1,3,hypercube");
    CHECK(run("isoperimetry --graph path:6").code == 2);
}

TEST_CASE("gate count on the torus") {
    auto r = run("gate --graph torus:6x6 --alpha 7/10");
    CHECK(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["gate_count"] == 288);
    CHECK(j["closed_form_count"] == 288);
    CHECK(j["s_star"] == 3);
    auto listed = json::parse(run("gate --graph cycle:6 --alpha 1/2 --list").out);
    CHECK(listed["transitions"].size() == 6);
}

TEST_CASE("simulation report with the exponential test") {
    auto r = run("simulate --graph cycle:6 --alpha 1/2 --lambda 1e3 --samples 2000 --seed 42 --ks-exponential");
    CHECK(r.code == 0);
    auto j = json::parse(r.out);
    double p = j["ks"]["p_value"];
    CHECK(p > 0.01);
    CHECK(p <= 1.0);
    CHECK(j["pass"] == true);
    CHECK(j["ks"]["n"] == 2000);
    CHECK(j["timeouts"] == 0);
}

TEST_CASE("the odd path fails the exponential test") {
    auto r = run("simulate --graph path:6 --lambda 1e3 --samples 2000 --ks-exponential --exact");
    CHECK(r.code == 4);
    auto j = json::parse(r.out);
    CHECK(j["ks"]["p_value"] < 0.01);
    CHECK(j["pass"] == false);
    double mean = j["estimates"]["mean_time"], exact = j["exact"]["mean_time"], se = j["estimates"]["std_error"];
    CHECK(std::abs(mean - exact) < 4 * se);
}

TEST_CASE("gate statistics in the simulation report") {
    auto r = run("simulate --graph cycle:6 --alpha 1/2 --lambda 1e3 --samples 500 --gate");
    auto j = json::parse(r.out);
    CHECK(j["gate"]["transitions"] == 6);
    CHECK(j["gate"]["first_counts"].size() == 6);
    CHECK(j["gate"]["single_crossing"].get<int>() + j["gate"]["no_crossing"].get<int>() <= 500);
    CHECK(j["checks"].contains("single_crossing"));
}

TEST_CASE("exit codes") {
    CHECK(run("").code == 2);
    CHECK(run("nonsense").code == 2);
    CHECK(run("gate --graph torus:5x5x --alpha 7/10").code == 2);
    CHECK(run("gate --graph torus:6x6 --alpha 7/11x").code == 2);
    CHECK(run("gate --graph torus:6x6 --alpha 3/2").code == 2);
    CHECK(run("simulate --graph cycle:6 --lambda -5").code == 2);
    CHECK(run("simulate --graph cycle:6 --samples 10 --ks-exponential").code == 2);
    CHECK(run("hitting --graph cycle:6 --from 0,3").code == 2);
    CHECK(run("hitting --graph cycle:6 --from 0,99").code == 2);
    CHECK(run("verify --only 14").code == 2);
    CHECK(run("gate --graph torus:6x6 --config /nonexistent/config.json").code == 2);
    CHECK(run("isoperimetry --graph torus:8x8 --s-max 12 --brute-force --budget 1000").code == 3);
    CHECK(run("enumerate --graph torus:8x8 --cap 1000").code == 3);
    CHECK(run("--help").code == 0);
}

TEST_CASE("reruns are byte-identical and independent of the thread count") {
    auto a = scratch("a.jsonl"), b = scratch("b.jsonl");
    std::string args = "simulate --graph ladder:4 --lambda 20 --samples 300 --seed 9 --ks-exponential --samples-out ";
    auto first = run(args + a.string(), "HCMETA_THREADS=1");
    auto second = run(args + b.string() + " --threads 3");
    CHECK(first.out == second.out);
    CHECK(slurp(a) == slurp(b));
    CHECK(lines(slurp(a)).size() == 300);
    auto sample = json::parse(lines(slurp(a)).front());
    CHECK(sample["sample"] == 0);
    CHECK(sample["seed"] == 9);
    CHECK(run("gate --graph torus:6x6 --alpha 7/10").out == run("gate --graph torus:6x6 --alpha 7/10").out);
}

TEST_CASE("config files fill options the command line leaves out") {
    auto cfg = scratch("config.json"), out = scratch("out.json");
    std::ofstream(cfg) << R"({"graph": "cycle:6", "alpha": "1/2", "lambda": [1000], "samples": 400, "seed": 3,
                             "output": ")" << out.string() << R"("})";
    auto r = run("simulate --config " + cfg.string());
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    auto j = json::parse(slurp(out));
    CHECK(j["graph"] == "cycle:6");
    CHECK(j["samples"] == 400);
    CHECK(j["seed"] == 3);
    auto r2 = run("simulate --config " + cfg.string() + " --samples 100 --output " + out.string());
    CHECK(r2.code == 0);
    CHECK(json::parse(slurp(out))["samples"] == 100);
}

TEST_CASE("verify prints a table and honours thresholds from the config") {
    auto r = run("verify --only 1,2");
    CHECK(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].find("PASS") != std::string::npos);
    CHECK(rows[2] == "2/2 criteria passed");

    // The gate passage criterion sits below its default threshold at this activity.
    auto strict = run("verify --only 6");
    CHECK(strict.code == 4);
    CHECK(strict.out.find("FAIL") != std::string::npos);
    auto cfg = scratch("loose.json");
    std::ofstream(cfg) << R"({"thresholds": {"single_crossing_min": 0.8}})";
    CHECK(run("verify --only 6 --config " + cfg.string()).code == 0);

    auto j = json::parse(run("verify --only 9 --json").out);
    CHECK(j[0]["id"] == 9);
    CHECK(j[0]["pass"] == true);
}

TEST_CASE("analysis commands produce JSON") {
    auto e = lines(run("enumerate --graph cycle:6 --height --alpha 1/2").out);
    CHECK(e.size() == 18);
    CHECK(json::parse(e[0])["sites"].empty());
    auto res = json::parse(run("resistance --graph complete:2x3 --lambda 10 --lambda 100 --symbolic").out);
    CHECK(res["results"].size() == 2);
    auto hit = json::parse(run("hitting --graph cycle:6 --alpha 1/2 --lambda 1e4").out);
    double ratio = hit["results"][0]["mean_time"].get<double>() / (1e4 / 6.0);
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
    auto crit = json::parse(run("critical --graph ladder:4 --gate --hypotheses --predict").out);
    CHECK(crit["s_star"] == 1);
    CHECK(crit.contains("hypotheses"));
    CHECK(crit.contains("exponent"));
}
