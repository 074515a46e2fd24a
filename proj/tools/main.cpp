#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rollball/config.hpp"
#include "rollball/equilibria.hpp"
#include "rollball/full_system.hpp"
#include "rollball/leaf.hpp"
#include "rollball/parabolic.hpp"
#include "rollball/reduced.hpp"
#include "rollball/routh.hpp"
#include "rollball/verify.hpp"

namespace {

using namespace rollball;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_doubles(const std::string& text, std::size_t expect,
                                  const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
        }
        if (used != item.size())
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
        out.push_back(v);
    }
    if (expect != 0 && out.size() != expect)
        throw CLI::ValidationError(flag, "expected " + std::to_string(expect) +
                                             " comma-separated numbers, got " +
                                             std::to_string(out.size()));
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (name.find('/') != std::string::npos || dir.empty() || dir == ".")
        return name;
    return dir + "/" + name;
}

const char* status_name(TrajStatus st) {
    switch (st) {
    case TrajStatus::Complete: return "complete";
    case TrajStatus::ApproachedVertex: return "approached-vertex";
    case TrajStatus::NonFinite: return "non-finite";
    default: return "step-underflow";
    }
}

void write_integrals_json(std::ostream& os, const ConservationReport& cr) {
    os << "{\n  \"E0\": " << g17(cr.E0) << ",\n  \"J\": [" << g17(cr.J0.j1) << ", "
       << g17(cr.J0.j2) << "],\n  \"drift\": {\"E\": " << g17(cr.max_rel_E)
       << ", \"J1\": " << g17(cr.max_rel_J1) << ", \"J2\": " << g17(cr.max_rel_J2)
       << ", \"K\": " << g17(cr.max_rel_K) << "}\n}\n";
}

void write_record_json(std::ostream& os, const EquilibriumRecord& rec,
                       const std::string& indent) {
    os << indent << "{\"family\": \"" << family_name(rec.family) << "\", \"r\": " << g17(rec.r)
       << ", \"v_theta\": " << g17(rec.v_theta) << ", \"omega_n\": " << g17(rec.omega_n)
       << ", \"Omega\": " << g17(rec.Omega) << ", \"S_value\": " << g17(rec.S_value)
       << ", \"classification\": \"" << classification_name(rec.classification)
       << "\", \"j\": [" << g17(rec.j.j1) << ", " << g17(rec.j.j2)
       << "], \"field_residual\": " << g17(rec.field_residual) << "}";
}

struct SimArgs {
    std::string state_str;
    double t0 = 0.0, t1 = 10.0;
    std::string out_traj = "trajectory.csv";
    std::string out_integrals = "integrals.json";
};

int run_simulate(const RunConfig& cfg, const SimArgs& a, bool integrals_only) {
    const auto st = parse_doubles(a.state_str, 4, "--state");
    if (!(st[0] > 0.0))
        throw CLI::ValidationError("--state", "initial r must be > 0");
    if (!(a.t1 > a.t0))
        throw CLI::ValidationError("--t1", "time span must have t1 > t0");
    const ReducedStatePolar s0 = ReducedStatePolar::from_omega_z(st[0], st[1], st[2], st[3],
                                                                 cfg.profile, cfg.params);
    IntegrateOptions opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    const Trajectory traj =
        integrate_reduced(cfg.params, cfg.profile, s0, a.t0, a.t1, opt);
    auto routh = routh_cache_get(cfg.params, cfg.profile, 8.0);
    const ConservationReport cr = conservation_report(cfg.params, cfg.profile, *routh, traj);

    if (!integrals_only) {
        auto out = open_out(join_path(cfg.output_dir, a.out_traj));
        write_trajectory_csv(out, cfg.params, cfg.profile, *routh, traj);
    }
    auto out = open_out(join_path(cfg.output_dir, a.out_integrals));
    write_integrals_json(out, cr);

    if (traj.status != TrajStatus::Complete) {
        std::cerr << "simulate: integration ended early with status '"
                  << status_name(traj.status) << "' at t = " << g17(traj.t_end()) << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int run_potential(const RunConfig& cfg, const std::string& j_str, double r_min, double r_max,
                  int n, const std::string& out_path) {
    const auto jv = parse_doubles(j_str, 2, "--j");
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw CLI::ValidationError("--r-min/--r-max", "need 0 < r-min < r-max");
    if (n < 2)
        throw CLI::ValidationError("--n", "need at least 2 grid points");
    auto routh = routh_cache_get(cfg.params, cfg.profile, 0.5 * r_max * r_max + 1.0);
    const LeafSystem leaf(cfg.params, cfg.profile, routh, {jv[0], jv[1]});
    auto out = open_out(join_path(cfg.output_dir, out_path));
    out << "r,V,Vp,Vpp\n";
    for (int i = 0; i < n; ++i) {
        const double r = r_min + (r_max - r_min) * i / (n - 1);
        out << g17(r) << ',' << g17(leaf.V(r)) << ',' << g17(leaf.V_p(r)) << ','
            << g17(leaf.V_pp(r)) << '\n';
    }
    return kExitOk;
}

struct EqArgs {
    std::string leaf_str, scan_str;
    double r = 0.0;
    bool has_r = false;
    std::string v_theta_str = "-1,-0.5,0.5,1";
    std::string omega_n_str = "-1,0,1";
    double r_min = 0.05, r_max = 8.0;
    int n_grid = 400;
    std::string out_path = "equilibria.json";
};

int run_equilibria(const RunConfig& cfg, const EqArgs& a) {
    auto routh = routh_cache_get(cfg.params, cfg.profile, 0.5 * a.r_max * a.r_max + 1.0);
    auto out = open_out(join_path(cfg.output_dir, a.out_path));

    if (!a.leaf_str.empty()) {
        const auto jv = parse_doubles(a.leaf_str, 2, "--leaf");
        const LeafSystem leaf(cfg.params, cfg.profile, routh, {jv[0], jv[1]});
        const auto recs = equilibria_on_leaf(leaf, a.r_min, a.r_max, a.n_grid);
        out << "[\n";
        for (std::size_t i = 0; i < recs.size(); ++i) {
            write_record_json(out, recs[i], "  ");
            out << (i + 1 < recs.size() ? ",\n" : "\n");
        }
        out << "]\n";
        return kExitOk;
    }

    if (a.has_r) {
        std::vector<EquilibriumRecord> recs;
        const double fp = cfg.profile.eval_profile(a.r).f_p;
        if (std::abs(fp) < kCriticalFp) {
            const auto omegas = parse_doubles(a.omega_n_str, 0, "--omega-n");
            recs = re1_re2_records(cfg.params, cfg.profile, routh, a.r, omegas);
        } else {
            for (double v : parse_doubles(a.v_theta_str, 0, "--v-theta")) {
                if (v == 0.0)
                    throw CLI::ValidationError("--v-theta", "values must be nonzero");
                recs.push_back(re3_record(cfg.params, cfg.profile, routh, a.r, v));
            }
        }
        out << "[\n";
        for (std::size_t i = 0; i < recs.size(); ++i) {
            write_record_json(out, recs[i], "  ");
            out << (i + 1 < recs.size() ? ",\n" : "\n");
        }
        out << "]\n";
        return kExitOk;
    }

    // --scan-j min,max,n over both leaf labels
    const auto spec = parse_doubles(a.scan_str, 3, "--scan-j");
    const int n = static_cast<int>(spec[2]);
    if (n < 2 || spec[1] <= spec[0])
        throw CLI::ValidationError("--scan-j", "expected min,max,n with min < max and n >= 2");
    std::vector<double> grid;
    for (int i = 0; i < n; ++i)
        grid.push_back(spec[0] + (spec[1] - spec[0]) * i / (n - 1));
    out << "[\n";
    bool first = true;
    for (double j1 : grid) {
        for (double j2 : grid) {
            const LeafSystem leaf(cfg.params, cfg.profile, routh, {j1, j2});
            const auto recs = equilibria_on_leaf(leaf, a.r_min, a.r_max, a.n_grid);
            if (!first)
                out << ",\n";
            first = false;
            out << "  {\"j1\": " << g17(j1) << ", \"j2\": " << g17(j2)
                << ", \"count\": " << recs.size() << ", \"equilibria\": [";
            for (std::size_t i = 0; i < recs.size(); ++i) {
                if (i)
                    out << ", ";
                write_record_json(out, recs[i], "");
            }
            out << "]}";
        }
    }
    out << "\n]\n";
    return kExitOk;
}

int run_bifurcation(const RunConfig& cfg, double r, double om_min, double om_max, int n,
                    const std::string& out_path) {
    if (!(r > 0.0))
        throw CLI::ValidationError("--r", "need r > 0");
    if (n < 2 || !(om_max > om_min))
        throw CLI::ValidationError("--omega-min/--omega-max/--n",
                                   "need omega-min < omega-max and n >= 2");
    if (std::abs(cfg.profile.eval_profile(r).f_p) < kCriticalFp)
        throw std::runtime_error(
            "bifurcation: r is a critical radius; the branch family needs f'(r) != 0");
    auto out = open_out(join_path(cfg.output_dir, out_path));
    out << "Omega,branch_neg,branch_pos,zeros_neg,zeros_pos\n";
    for (int i = 0; i < n; ++i) {
        const double om = om_min + (om_max - om_min) * i / (n - 1);
        const BranchSignature sig =
            branch_signature(cfg.params.with_omega(om), cfg.profile, r);
        out << g17(om) << ',' << sig.neg << ',' << sig.pos << ',';
        for (std::size_t z = 0; z < sig.zeros_neg.size(); ++z)
            out << (z ? ";" : "") << g17(sig.zeros_neg[z]);
        out << ',';
        for (std::size_t z = 0; z < sig.zeros_pos.size(); ++z)
            out << (z ? ";" : "") << g17(sig.zeros_pos[z]);
        out << '\n';
    }
    return kExitOk;
}

int run_reconstruct(const RunConfig& cfg, const std::string& traj_path, double theta0,
                    const std::string& quat_str, const std::string& out_path) {
    const auto qv = parse_doubles(quat_str, 4, "--quat0");
    std::ifstream in(traj_path);
    if (!in)
        throw std::runtime_error("reconstruct: cannot open trajectory file '" + traj_path +
                                 "'");
    std::string line, first_row, last_row;
    if (!std::getline(in, line) || line.rfind("t,r,v_r,v_theta,omega_z", 0) != 0)
        throw std::runtime_error("reconstruct: '" + traj_path +
                                 "' is not a trajectory CSV (bad header)");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first_row.empty())
            first_row = line;
        last_row = line;
    }
    if (first_row.empty())
        throw std::runtime_error("reconstruct: trajectory file has no data rows");
    const auto row0 = parse_doubles(first_row, 0, "trajectory row");
    const auto row1 = parse_doubles(last_row, 0, "trajectory row");
    if (row0.size() < 5 || row1.size() < 5)
        throw std::runtime_error("reconstruct: trajectory rows need t,r,v_r,v_theta,omega_z");

    const ReducedStatePolar s0 = ReducedStatePolar::from_omega_z(
        row0[1], row0[2], row0[3], row0[4], cfg.profile, cfg.params);
    IntegrateOptions opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    const Trajectory traj =
        integrate_reduced(cfg.params, cfg.profile, s0, row0[0], row1[0], opt);
    const FullTrajectory full = reconstruct(cfg.params, cfg.profile, traj, theta0,
                                            {qv[0], qv[1], qv[2], qv[3]});
    auto out = open_out(join_path(cfg.output_dir, out_path));
    write_reconstruction_csv(out, full);
    if (traj.status != TrajStatus::Complete) {
        std::cerr << "reconstruct: reduced integration ended early with status '"
                  << status_name(traj.status) << "'\n";
        return kExitFailure;
    }
    return kExitOk;
}

int run_verify_cmd(const RunConfig& cfg, const std::string& suite, const std::string& fault_str,
                   const std::string& out_path) {
    FaultInjection fault = FaultInjection::None;
    if (fault_str == "field-sign")
        fault = FaultInjection::FieldSign;
    else if (fault_str == "energy-sign")
        fault = FaultInjection::EnergySign;
    else if (!fault_str.empty())
        throw CLI::ValidationError("--inject-fault",
                                   "expected 'field-sign' or 'energy-sign'");
    const auto reports = run_verify(suite, cfg.seed, fault);
    if (out_path.empty()) {
        write_verify_json(std::cout, reports);
    } else {
        auto out = open_out(join_path(cfg.output_dir, out_path));
        write_verify_json(out, reports);
    }
    bool ok = true;
    for (const auto& rep : reports) {
        for (const auto& c : rep.checks) {
            if (!c.pass) {
                ok = false;
                std::cerr << "verify: FAILED check '" << c.name << "' (suite " << rep.suite
                          << "): measured " << g17(c.measured) << " vs threshold "
                          << g17(c.threshold) << "\n";
            }
        }
    }
    return ok ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rolling-ball dynamics on a rotating surface of revolution: reduced and "
                 "full simulation, first integrals, relative equilibria, stability scans "
                 "and self-verification"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);

    auto* sim = app.add_subcommand("simulate",
                                   "Integrate the reduced dynamics; write trajectory CSV "
                                   "and integrals JSON");
    SimArgs sa;
    sim->add_option("--state", sa.state_str, "initial r,v_r,v_theta,omega_z")->required();
    sim->add_option("--t0", sa.t0, "start time");
    sim->add_option("--t1", sa.t1, "end time")->required();
    sim->add_option("--out-traj", sa.out_traj, "trajectory CSV path");
    sim->add_option("--out-integrals", sa.out_integrals, "integrals JSON path");

    auto* integ = app.add_subcommand("integrals",
                                     "Integrate and report conserved-quantity values and "
                                     "drifts as JSON");
    SimArgs ia;
    integ->add_option("--state", ia.state_str, "initial r,v_r,v_theta,omega_z")->required();
    integ->add_option("--t0", ia.t0, "start time");
    integ->add_option("--t1", ia.t1, "end time")->required();
    integ->add_option("--out", ia.out_integrals, "integrals JSON path");

    auto* pot = app.add_subcommand("potential",
                                   "Tabulate the leaf effective potential V, V', V''");
    std::string pj = "1,0", pout = "potential.csv";
    double pr_min = 0.1, pr_max = 3.0;
    int pn = 200;
    pot->add_option("--j", pj, "leaf label j1,j2")->required();
    pot->add_option("--r-min", pr_min, "grid start");
    pot->add_option("--r-max", pr_max, "grid end");
    pot->add_option("--n", pn, "grid points");
    pot->add_option("--out", pout, "output CSV path");

    auto* eq = app.add_subcommand("equilibria",
                                  "Find and classify relative equilibria (JSON output)");
    EqArgs ea;
    auto* eq_leaf = eq->add_option("--leaf", ea.leaf_str, "leaf label j1,j2");
    auto* eq_r = eq->add_option("--r", ea.r, "parallel radius");
    auto* eq_scan = eq->add_option("--scan-j", ea.scan_str, "label grid min,max,n");
    eq->add_option("--v-theta", ea.v_theta_str, "orbital rates for --r (comma list)");
    eq->add_option("--omega-n", ea.omega_n_str, "spin rates for --r at a critical radius");
    eq->add_option("--r-min", ea.r_min, "search range start");
    eq->add_option("--r-max", ea.r_max, "search range end");
    eq->add_option("--n-grid", ea.n_grid, "root-bracketing grid size");
    eq->add_option("--out", ea.out_path, "output JSON path");
    eq_leaf->excludes(eq_r);
    eq_leaf->excludes(eq_scan);
    eq_r->excludes(eq_scan);

    auto* bif = app.add_subcommand("bifurcation",
                                   "Branch stability signatures over a rotation-rate grid "
                                   "(CSV output)");
    double br = 1.0, bo_min = 0.0, bo_max = 3.0;
    int bn = 100;
    std::string bout = "bifurcation.csv";
    bif->add_option("--r", br, "parallel radius")->required();
    bif->add_option("--omega-min", bo_min, "grid start");
    bif->add_option("--omega-max", bo_max, "grid end");
    bif->add_option("--n", bn, "grid points");
    bif->add_option("--out", bout, "output CSV path");

    auto* rec = app.add_subcommand("reconstruct",
                                   "Rebuild angle and attitude along a simulated "
                                   "trajectory (CSV output)");
    std::string rtraj, rquat = "1,0,0,0", rout = "reconstruction.csv";
    double rtheta0 = 0.0;
    rec->add_option("--traj", rtraj, "trajectory CSV from 'simulate'")
        ->required()
        ->check(CLI::ExistingFile);
    rec->add_option("--theta0", rtheta0, "initial angle");
    rec->add_option("--quat0", rquat, "initial attitude quaternion w,x,y,z");
    rec->add_option("--out", rout, "output CSV path");

    auto* ver = app.add_subcommand("verify", "Run self-verification suites (JSON report)");
    std::string vsuite = "all", vfault, vout;
    ver->add_option("--suite", vsuite, "all|poisson|engine|parabolic|equilibria|conservation")
        ->check(CLI::IsMember(
            {"all", "poisson", "engine", "parabolic", "equilibria", "conservation"}));
    ver->add_option("--inject-fault", vfault,
                    "corrupt a test double: field-sign|energy-sign")
        ->check(CLI::IsMember({"field-sign", "energy-sign"}));
    ver->add_option("--out", vout, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);

        if (sim->parsed())
            return run_simulate(cfg, sa, false);
        if (integ->parsed())
            return run_simulate(cfg, ia, true);
        if (pot->parsed())
            return run_potential(cfg, pj, pr_min, pr_max, pn, pout);
        if (eq->parsed()) {
            ea.has_r = eq_r->count() > 0;
            if (ea.leaf_str.empty() && !ea.has_r && ea.scan_str.empty())
                throw CLI::ValidationError("equilibria",
                                           "one of --leaf, --r, --scan-j is required");
            return run_equilibria(cfg, ea);
        }
        if (bif->parsed())
            return run_bifurcation(cfg, br, bo_min, bo_max, bn, bout);
        if (rec->parsed())
            return run_reconstruct(cfg, rtraj, rtheta0, rquat, rout);
        if (ver->parsed())
            return run_verify_cmd(cfg, vsuite, vfault, vout);
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
