#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spintop/cli.hpp"

using namespace spintop;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string &name, const std::string &content)
{
    const auto p = std::filesystem::temp_directory_path() / ("spintop_test_" + name);
    std::ofstream(p) << content;
    return p;
}

std::vector<std::string> lines_of(const std::string &s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::string header_row(const std::string &csv)
{
    for (const auto &l : lines_of(csv)) {
        if (!l.empty() && l[0] != '#') {
            return l;
        }
    }
    return {};
}

} // namespace

TEST_CASE("curve report")
{
    const Run r = run({"curve"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["branch_points"]["l_plus"].get<double>() == doctest::Approx(2.4142136).epsilon(1e-7));
    CHECK(j["branch_points"]["l_minus"].get<double>() == doctest::Approx(0.4142136).epsilon(1e-6));
    CHECK(j["im_tau_positive"].get<bool>());
    CHECK(j["identities"]["a_period_doubling_rel"].get<double>() < 1e-10);
    CHECK(j["identities"]["v_residue_rel"].get<double>() < 1e-8);
}

TEST_CASE("unsupported and invalid input exits with 2")
{
    const Run low = run({"curve", "--energy", "0.5"});
    CHECK(low.code == 2);
    CHECK(low.err.find("regime-unsupported") != std::string::npos);
    CHECK(run({"curve", "--a", "-1"}).code == 2);
    CHECK(run({"solve", "--t-steps", "1"}).code == 2);
    CHECK(run({"factorize", "--contour-points", "4"}).code == 2);
    CHECK(run({"solve", "--angle0", "0.2"}).code == 2);
    CHECK(run({"solve", "--energy", "3", "--angle0", "0.2", "--momentum0", "3"}).code == 2);
    CHECK(run({"curve", "--format", "csv"}).code == 2);
    CHECK(run({"curve", "--variant", "sideways"}).code == 2);
    CHECK(run({"curve", "--p1", "1,2"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("solve writes a fixed CSV schema")
{
    const Run r = run({"solve"});
    REQUIRE(r.code == 0);
    CHECK(header_row(r.out) == "t,sin2_theta_pipeline,sin2_sn,sin2_rk4,pairwise_err");
    double worst = 0.0;
    bool in_rows = false;
    for (const auto &l : lines_of(r.out)) {
        if (in_rows) {
            worst = std::max(worst, std::stod(l.substr(l.rfind(',') + 1)));
        }
        in_rows = in_rows || (!l.empty() && l[0] == 't');
    }
    CHECK(worst < 1e-6);

    const Run two = run({"solve", "--t-steps", "2"});
    const auto ls = lines_of(two.out);
    const std::string first = ls[ls.size() - 2];
    CHECK(ls.size() - (std::find(ls.begin(), ls.end(), header_row(two.out)) - ls.begin()) == 3);
    CHECK(first.rfind("0,", 0) == 0);
    CHECK(std::abs(std::stod(first.substr(2))) < 1e-12);

    CHECK(header_row(run({"solve", "--variant", "noncompact"}).out)
          == "t,sinh2_theta_pipeline,sinh2_sc,sinh2_rk4,pairwise_err");
}

TEST_CASE("noncompact solve reports the blow-up time")
{
    const Run r = run({"solve", "--variant", "noncompact", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json &m = j["metadata"];
    CHECK(m["truncated"].get<bool>());
    const double tb = m["blowup_time"].get<double>();
    CHECK(std::abs(tb - m["blowup_time_u0"].get<double>()) < 1e-4);
    for (const auto &row : j["rows"]) {
        CHECK(row[0].get<double>() < tb);
    }
}

TEST_CASE("factorize exit codes")
{
    const Run r = run({"factorize", "--t-max", "0.1311", "--t-steps", "2"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["max_residual"].get<double>() < 1e-6);
    CHECK(j["classification"] == "canonical");
    CHECK(j["skipped"].empty());

    const json z = json::parse(run({"factorize", "--t-max", "0", "--t-steps", "2"}).out);
    CHECK(z["max_residual"].get<double>() < 1e-14);

    CHECK(run({"factorize", "--variant", "noncompact", "--t-max", "0.6555143885", "--t-steps", "2"}).code == 3);
    CHECK(run({"factorize", "--variant", "noncompact", "--t-max", "0.5", "--t-steps", "3"}).code == 0);
}

TEST_CASE("verify passes, is deterministic and catches an injected fault")
{
    const Run a = run({"verify"});
    const Run b = run({"verify"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    CHECK(j["all_pass"].get<bool>());
    CHECK(j["failed"] == 0);

    CHECK(run({"verify", "--seed", "12345"}).code == 0);
    CHECK(run({"verify", "--variant", "noncompact"}).code == 0);

    const Run f = run({"verify", "--inject-fault", "acal"});
    CHECK(f.code == 4);
    bool v_failed = false;
    const json fj = json::parse(f.out);
    for (const auto &c : fj["checks"]) {
        if (c["name"] == "v_residue") {
            v_failed = !c["pass"].get<bool>();
        }
    }
    CHECK(v_failed);
    CHECK(run({"curve", "--inject-fault", "acal"}).code == 4);
}

TEST_CASE("configuration file with flag overrides")
{
    const auto cfg = temp_file("cfg.json", R"({"variant": "noncompact", "energy": 5, "t_steps": 4})");
    const json j = json::parse(run({"solve", "--config", cfg.string(), "--format", "json"}).out);
    CHECK(j["metadata"]["variant"] == "noncompact");
    CHECK(j["metadata"]["energy"].get<double>() == 5.0);
    CHECK(j["metadata"]["t_steps"] == 4);

    const json k = json::parse(run({"curve", "--config", cfg.string(), "--variant", "compact", "--energy", "3"}).out);
    CHECK(k["config"]["variant"] == "compact");
    CHECK(k["energy"].get<double>() == 3.0);

    const auto bad = temp_file("bad.json", R"({"energi": 5})");
    CHECK(run({"curve", "--config", bad.string()}).code == 2);
    const auto broken = temp_file("broken.json", "{not json");
    CHECK(run({"curve", "--config", broken.string()}).code == 2);
    CHECK(run({"curve", "--config", "/nonexistent/spintop.json"}).code == 2);

    const auto tol = temp_file("tol.json", R"({"tolerances": {"triple_oracle": 1e-30}})");
    CHECK(run({"verify", "--config", tol.string()}).code == 4);
}

TEST_CASE("output file")
{
    const auto path = std::filesystem::temp_directory_path() / "spintop_test_out.json";
    std::filesystem::remove(path);
    const Run r = run({"curve", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    CHECK(json::parse(in)["command"] == "curve");
}

TEST_CASE("scan output is ordered by the energy grid")
{
    const Run r = run({"scan", "--energies", "10,1.5,3", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0][0].get<double>() == 10.0);
    CHECK(j["rows"][1][0].get<double>() == 1.5);
    CHECK(j["rows"][2][0].get<double>() == 3.0);
    CHECK(run({"scan"}).out == run({"scan"}).out);
    CHECK(run({"scan", "--energies", "3,0.5"}).code == 2);
}

TEST_CASE("floats are written with 17 significant digits")
{
    cli::Report j;
    j["x"] = 0.1;
    j["n"] = std::nan("");
    j["z"] = {{"re", 1.0 / 3.0}, {"im", 0.0}};
    const std::string s = cli::dump17(j);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("null") != std::string::npos);
    CHECK(json::parse(s)["x"].get<double>() == 0.1);
}

TEST_CASE("p1 parsing")
{
    const cli::P1Override p = cli::parse_p1("0.5,-1.25,-");
    CHECK(p.lambda == cplx(0.5, -1.25));
    CHECK(p.sheet == Sheet::minus);
    CHECK_THROWS_AS(cli::parse_p1("0.5,1,x"), Error);
    CHECK_THROWS_AS(cli::parse_p1("a,b,+"), Error);
}
