#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "keyact/attack.hpp"
#include "keyact/boxes.hpp"
#include "keyact/entropy.hpp"
#include "keyact/io.hpp"
#include "keyact/rates.hpp"
#include "keyact/sdpa.hpp"
#include "keyact/wirings.hpp"
#include "oracles.hpp"

using namespace keyact;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(KEYACT_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& row) {
    std::vector<std::string> out;
    std::istringstream in(row);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    if (!row.empty() && row.back() == ',') out.emplace_back();
    return out;
}

std::string temp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("keyact_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("rate row re-derived from the library") {
    const Run r = run("rate --alpha 0.02 --v 0.90236 -m 2");
    REQUIRE(r.status == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "alpha,v,copies,S,Q,H_AE_lb,H_cc_ub,H_AB,r_lb,r_ub");
    const auto f = fields(ls[1]);
    REQUIRE(f.size() == 10);
    const FamilyPoint p{0.02, 0.90236};
    const Box b = family_box(p);
    entropy::RelaxationConfig config;
    config.nodes = 2;
    const double h_ae = entropy::entropy_lower_bound(b, config).value;
    const double s = 2.0 + 2.0 * p.alpha * (oracle::kSqrt2 * p.v - 1.0);
    const double h_ab = oracle::h2(p.alpha * (1.0 - p.v) / 2.0);
    CHECK(std::stod(f[3]) == doctest::Approx(s).epsilon(1e-11));
    CHECK(std::stod(f[4]) == doctest::Approx(p.alpha * (1.0 - p.v) / 2.0).epsilon(1e-11));
    CHECK(std::stod(f[5]) == doctest::Approx(h_ae).epsilon(1e-10));
    CHECK(std::stod(f[6]) == doctest::Approx(h_cc(p)).epsilon(1e-11));
    CHECK(std::stod(f[7]) == doctest::Approx(h_ab).epsilon(1e-11));
    CHECK(std::stod(f[8]) == doctest::Approx(h_ae - h_ab).epsilon(1e-9));
    CHECK(std::stod(f[9]) == doctest::Approx(h_cc(p) - h_ab).epsilon(1e-10));
}

TEST_CASE("exit codes") {
    CHECK(run("").status == 2);
    CHECK(run("rate --alpha 2").status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("--help").status == 0);
    CHECK(run("search --box /nonexistent/box.json").status == 1);

    const std::string bad = temp("bad.json");
    std::ofstream(bad) << "{\n \"nx\": 2,\n ]";
    CHECK(run("search --box " + bad).status == 2);
    CHECK(run("wire --alpha 0.5 --v 0.5 --alice xor:0,0 --bob xor:0,0,0").status == 2);
    std::filesystem::remove(bad);
}

TEST_CASE("wire matches the library") {
    const FamilyPoint p{0.3, 0.8};
    const Run x = run("wire --xor -k 2 --alpha 0.3 --v 0.8");
    REQUIRE(x.status == 0);
    const std::vector<Box> copies{family_box(p), family_box(p)};
    const Box ref = apply_wiring(xor_pair(2), copies);
    CHECK(max_abs_difference(io::box_from_json(x.out), ref) == 0.0);

    const std::string out = temp("wired.json");
    const Run named = run("wire --alpha 0.3 --v 0.8 --alice xor:0,0,0 xor:1,1,0 --bob xor:0,0,0 xor:1,1,0 xor:2,2,0 -o " +
                          out);
    REQUIRE(named.status == 0);
    CHECK(max_abs_difference(io::read_box(out), ref) == 0.0);
    std::filesystem::remove(out);
}

TEST_CASE("export-sdp writes the node problem") {
    const std::string out = temp("node.dat-s");
    REQUIRE(run("export-sdp --alpha 0.02 --v 0.90236 -m 3 --node 1 -o " + out).status == 0);
    entropy::RelaxationConfig config;
    config.nodes = 3;
    const sdp::Problem ref = entropy::build_relaxation(family_box({0.02, 0.90236}), config).problem(1);
    const sdp::Problem got = sdpa::read_file(out);
    CHECK(got.block_sizes == ref.block_sizes);
    CHECK(got.c == ref.c);
    CHECK(got.offset == ref.offset);
    std::filesystem::remove(out);
    CHECK(run("export-sdp -m 3 --node 5 -o " + out).status == 1);
}

TEST_CASE("grid rows and boundaries") {
    const std::string bound = temp("boundary.csv");
    const std::string args = "grid --alpha-min 0.01 --alpha-max 0.02 --alpha-steps 2 --v-min 0.9 --v-max 1 --v-steps 3 ";
    const Run a = run(args + "--threads 1 --boundary-output " + bound);
    const Run b = run(args + "--threads 3");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const auto ls = lines(a.out);
    CHECK(ls.size() == 1 + 2 * 3 * 3);
    const auto row = fields(ls[1]);
    CHECK(row[5].empty());
    CHECK(row[8].empty());

    const auto bl = lines(slurp(bound));
    REQUIRE(bl.size() == 1 + 2 * 3);
    CHECK(bl[0] == "alpha,copies,v_cc");
    const auto f = fields(bl[1]);
    CHECK(std::stod(f[0]) == doctest::Approx(0.01));
    CHECK(std::stoi(f[1]) == 1);
    CHECK(std::stod(f[2]) == doctest::Approx(cc_boundary(0.01, 1)).epsilon(1e-10));
    std::filesystem::remove(bound);
}

TEST_CASE("search output") {
    const Run r = run("search --alpha 0.02 --v 0.90236");
    REQUIRE(r.status == 0);
    CHECK(r.out.find("variant +-++") != std::string::npos);
    CHECK(r.out.find("chi_0 xor:0,0,0 label 13") != std::string::npos);
    CHECK(r.out.find("xi_2 xor:2,2,0") != std::string::npos);
}
