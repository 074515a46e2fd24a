#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#ifndef ROLLBALL_CLI_PATH
#error "ROLLBALL_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path dir = fs::temp_directory_path() /
                         ("rollball-" + tag + "-" + std::to_string(stamp));
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const fs::path& workdir, const std::string& args) {
    const fs::path out = workdir / "stdout.txt";
    const fs::path err = workdir / "stderr.txt";
    const std::string cmd = "cd '" + workdir.string() + "' && '" + ROLLBALL_CLI_PATH + "' " +
                            args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly and lists the subcommands") {
    const fs::path dir = fresh_dir("help");
    const CliResult res = run_cli(dir, "--help");
    CHECK(res.exit_code == 0);
    for (const char* sub :
         {"simulate", "integrals", "potential", "equilibria", "bifurcation", "reconstruct",
          "verify"})
        CHECK(res.out.find(sub) != std::string::npos);
}

TEST_CASE("usage errors exit with the usage code") {
    const fs::path dir = fresh_dir("usage");
    CHECK(run_cli(dir, "").exit_code == 2);                          // no subcommand
    CHECK(run_cli(dir, "simulate --b0gus 1 --t1 1").exit_code == 2); // unknown flag
    CHECK(run_cli(dir, "simulate --t1 2").exit_code == 2);           // missing --state
    CHECK(run_cli(dir, "equilibria --leaf 1,0 --r 1.0").exit_code == 2); // mutually exclusive
    CHECK(run_cli(dir, "verify --suite nonsense").exit_code == 2);
    CHECK(run_cli(dir, "reconstruct --traj /nonexistent.csv").exit_code == 2);
    CHECK(run_cli(dir, "simulate --state 1,0,not-a-number,0 --t1 1").exit_code == 2);
}

TEST_CASE("simulate writes the trajectory table and the integrals report") {
    const fs::path dir = fresh_dir("simulate");
    const CliResult res =
        run_cli(dir, "simulate --state 1.2,0.1,0.6,0.4 --t1 3 --out-traj t.csv "
                     "--out-integrals i.json");
    CHECK(res.exit_code == 0);

    std::ifstream traj(dir / "t.csv");
    REQUIRE(traj.good());
    std::string header;
    std::getline(traj, header);
    CHECK(header == "t,r,v_r,v_theta,omega_z,p0,p1,p2,p3,p4,E,J1,J2,K_drift");
    std::size_t rows = 0;
    for (std::string line; std::getline(traj, line);)
        if (!line.empty())
            ++rows;
    CHECK(rows > 10);

    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "i.json"));
    CHECK(j.contains("E0"));
    REQUIRE(j.at("J").size() == 2);
    CHECK(j.at("drift").at("E").get<double>() < 1e-8);
    CHECK(j.at("drift").at("J1").get<double>() < 1e-8);
    CHECK(j.at("drift").at("K").get<double>() == 0.0);
}

TEST_CASE("repeated runs are byte-identical") {
    const fs::path a = fresh_dir("det-a");
    const fs::path b = fresh_dir("det-b");
    const std::string args = "simulate --state 1.1,0.2,0.5,-0.3 --t1 4";
    CHECK(run_cli(a, args).exit_code == 0);
    CHECK(run_cli(b, args).exit_code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "integrals.json") == slurp(b / "integrals.json"));
    CHECK(!slurp(a / "trajectory.csv").empty());
}

TEST_CASE("vertex-bound run reports the early stop on stderr") {
    const fs::path dir = fresh_dir("vertex");
    write_file(dir / "plane.json", R"({"profile": {"kind": "plane"}})");
    const CliResult res =
        run_cli(dir, "--config plane.json simulate --state 1,-1,0,0 --t1 3");
    CHECK(res.exit_code == 1);
    CHECK(res.err.find("approached-vertex") != std::string::npos);
}

TEST_CASE("potential table covers the requested grid") {
    const fs::path dir = fresh_dir("potential");
    const CliResult res =
        run_cli(dir, "potential --j 1,0.5 --r-min 0.5 --r-max 2.0 --n 40 --out v.csv");
    CHECK(res.exit_code == 0);
    std::ifstream in(dir / "v.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "r,V,Vp,Vpp");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty())
            ++rows;
    CHECK(rows == 40);
}

TEST_CASE("equilibria at a radius report the circular family") {
    const fs::path dir = fresh_dir("equilibria");
    const CliResult res = run_cli(dir, "equilibria --r 1.1 --out eq.json");
    CHECK(res.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "eq.json"));
    REQUIRE(j.size() == 4); // default --v-theta list
    for (const auto& rec : j) {
        CHECK(rec.at("family").get<std::string>() == "RE3");
        CHECK(rec.at("r").get<double>() == 1.1);
        CHECK(rec.at("field_residual").get<double>() < 1e-9);
    }
}

TEST_CASE("bifurcation scan is refused on a critical-only profile") {
    const fs::path dir = fresh_dir("bifurcation");
    write_file(dir / "plane.json", R"({"profile": {"kind": "plane"}})");
    const CliResult res = run_cli(dir, "--config plane.json bifurcation --r 1.0");
    CHECK(res.exit_code == 1);
    CHECK(res.err.find("critical") != std::string::npos);
}

TEST_CASE("bifurcation table has a signature per rotation rate") {
    const fs::path dir = fresh_dir("bif-table");
    const CliResult res =
        run_cli(dir, "bifurcation --r 1.0 --omega-min 0 --omega-max 2 --n 5 --out b.csv");
    CHECK(res.exit_code == 0);
    std::ifstream in(dir / "b.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "Omega,branch_neg,branch_pos,zeros_neg,zeros_pos");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty())
            continue;
        ++rows;
        CHECK(line.find(",S") != std::string::npos);
    }
    CHECK(rows == 5);
}

TEST_CASE("reconstruct consumes the simulate output") {
    const fs::path dir = fresh_dir("reconstruct");
    CHECK(run_cli(dir, "simulate --state 1.3,0.0,0.7,-0.2 --t1 2").exit_code == 0);
    const CliResult res =
        run_cli(dir, "reconstruct --traj trajectory.csv --theta0 0.5 --out r.csv");
    CHECK(res.exit_code == 0);
    std::ifstream in(dir / "r.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,r,theta,qw,qx,qy,qz,v_r,v_theta,omega_z");
    std::string first;
    std::getline(in, first);
    CHECK(first.find("0.5") != std::string::npos);
}

TEST_CASE("bad configuration exits with the usage code and names the field") {
    const fs::path dir = fresh_dir("config");
    write_file(dir / "bad.json", R"({"params": {"k": 2.0}})");
    const CliResult res = run_cli(dir, "--config bad.json integrals --state 1,0,0.5,0 --t1 1");
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("params") != std::string::npos);

    write_file(dir / "steep.json",
               R"({"profile": {"kind": "poly_p1", "coeffs": [0.0, 0.0, -1.5]},
                   "admissibility_r_max": 2.0})");
    const CliResult res2 =
        run_cli(dir, "--config steep.json integrals --state 1,0,0.5,0 --t1 1");
    CHECK(res2.exit_code == 2);
    CHECK(res2.err.find("admissibility") != std::string::npos);
}

TEST_CASE("verify subcommand reports and fails loudly on planted faults") {
    const fs::path dir = fresh_dir("verify");
    const CliResult ok = run_cli(dir, "verify --suite poisson");
    CHECK(ok.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j.at("pass").get<bool>());

    for (const char* fault : {"field-sign", "energy-sign"}) {
        const CliResult res =
            run_cli(dir, std::string("verify --suite poisson --inject-fault ") + fault);
        CHECK(res.exit_code == 1);
        CHECK(res.err.find("hamiltonian-identity") != std::string::npos);
        const nlohmann::json rep = nlohmann::json::parse(res.out);
        CHECK_FALSE(rep.at("pass").get<bool>());
    }
}

}
