#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pvdyn/analysis.hpp"
#include "pvdyn/calibration.hpp"
#include "pvdyn/longrun.hpp"
#include "pvdyn/report.hpp"

namespace {

using namespace pvdyn;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

double resolve(double flag_value, double fallback) {
    return std::isnan(flag_value) ? fallback : flag_value;
}

TariffPolicy parse_policy(const std::string& name, double charge, bool dynamic) {
    TariffPolicy policy;
    if (name == "flat") {
        policy.kind = TariffPolicy::Kind::RamseyFlat;
    } else if (name == "linear") {
        policy.kind = TariffPolicy::Kind::RamseyLinear;
    } else if (name == "two_part") {
        policy.kind = TariffPolicy::Kind::RamseyTwoPart;
    } else if (name == "fixed") {
        policy.kind = TariffPolicy::Kind::FixedCharge;
        policy.fixed_charge = charge;
        policy.dynamic_prices = dynamic;
    } else {
        throw ConfigError("unknown policy '" + name + "'");
    }
    return policy;
}

std::vector<double> parse_grid(const std::string& spec, double market_size) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("grid spec must be lo:hi:points, got '" + spec + "'");
    try {
        const double lo = std::stod(spec.substr(0, c1));
        const std::string hi_token = spec.substr(c1 + 1, c2 - c1 - 1);
        const double hi = hi_token == "max" ? market_size : std::stod(hi_token);
        const int points = std::stoi(spec.substr(c2 + 1));
        return uniform_grid(lo, hi, points);
    } catch (const std::invalid_argument&) {
        throw ConfigError("grid spec must be numeric lo:hi:points, got '" + spec + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("grid spec out of range: '" + spec + "'");
    }
}

void write_text(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    writer(out);
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

std::string policy_label(const std::string& name, double charge, bool dynamic) {
    std::string label = name;
    if (name == "fixed") {
        label += " charge=" + format_number(charge);
        label += dynamic ? " dynamic" : " flat";
    }
    return label;
}

struct ThresholdBrackets {
    double lo = kUnset, hi = kUnset;
};

ThresholdsReport compute_thresholds(const CalibrationDocument& doc, double theta, double xi,
                                    bool flat, double capacity_max,
                                    const ThresholdBrackets& user) {
    const MarketModel& model = doc.model;
    const AdoptionModel& am = doc.adoption;
    ThresholdsReport report;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const double min_margin = theta_sharp(model, capacity_max, flat);
    report.theta_sharp.value = min_margin;
    report.a_sharp.value = critical_connection_charge(model, theta, capacity_max, flat);

    // Default transition bracket: below the margin floor no feasibility
    // cliff exists, above the zero-capacity margin even R = 0 fails.
    const double margin_at_zero = max_retail_margin(model, 0.0, flat).value;
    const double lo = resolve(user.lo, min_margin);
    const double hi = resolve(user.hi, margin_at_zero * (1.0 + 1e-6));

    TariffPolicy base;
    base.kind = flat ? TariffPolicy::Kind::RamseyFlat : TariffPolicy::Kind::RamseyLinear;
    try {
        report.theta_dagger.value = theta_dagger(model, am, base, xi, lo, hi);
    } catch (const NoBracketError&) {
        report.theta_dagger = {nan, "bracket-failed"};
    }

    try {
        const LimitingCharge lc = limiting_connection_charge(model, am, theta, xi, flat);
        report.a_dagger.value = lc.charge;
        report.r_dagger.value = lc.capacity_kw;
    } catch (const NoStabilizingChargeError&) {
        report.a_dagger = {nan, "no-stabilizing-charge"};
        report.r_dagger = {nan, "no-stabilizing-charge"};
    }

    try {
        const LimitingCapacity cap = limiting_capacity(model, am, xi, flat, lo, hi);
        const std::string status = cap.assumptions_ok ? "ok" : "assumption-warning";
        report.r_limit = {cap.capacity_kw, status};
        report.theta_limit = {cap.theta, status};
    } catch (const NoBracketError&) {
        report.r_limit = {nan, "bracket-failed"};
        report.theta_limit = {nan, "bracket-failed"};
    }
    return report;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"closed-loop solar adoption under break-even retail tariffs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string policy_name = "flat";
    double charge = 0.0;
    bool dynamic = false;
    double theta_flag = kUnset, xi_flag = kUnset;

    auto add_common = [&](CLI::App* cmd, bool with_policy) {
        cmd->add_option("--config", config_path, "calibration JSON file")->required();
        cmd->add_option("--theta", theta_flag, "retailer cost, $/cycle (default from config)");
        cmd->add_option("--xi", xi_flag, "install cost, $/kW (default from config)");
        if (with_policy) {
            cmd->add_option("--policy", policy_name, "tariff policy")
                ->check(CLI::IsMember({"flat", "linear", "two_part", "fixed"}));
            cmd->add_option("--charge", charge, "fixed connection charge ($/cycle, policy=fixed)");
            cmd->add_flag("--dynamic-prices", dynamic,
                          "per-period balancing prices (policy=fixed)");
        }
    };

    auto* cmd_calibrate = app.add_subcommand("calibrate", "resolve a calibration document");
    std::string calibrate_out = "-";
    cmd_calibrate->add_option("--config", config_path, "calibration JSON file")->required();
    cmd_calibrate->add_option("--out", calibrate_out, "output path ('-' = stdout)");

    auto* cmd_potential = app.add_subcommand("potential", "sample the market potential curve");
    std::string grid_spec = "0:max:513";
    std::string potential_csv = "-", potential_json;
    add_common(cmd_potential, true);
    cmd_potential->add_option("--grid", grid_spec, "sampling grid lo:hi:points ('max' = market size)");
    cmd_potential->add_option("--out-csv", potential_csv, "curve CSV path ('-' = stdout)");
    cmd_potential->add_option("--out-json", potential_json, "equilibrium JSON path (omit = skip)");

    auto* cmd_simulate = app.add_subcommand("simulate", "run the yearly adoption loop");
    double r0 = 0.0;
    int years = 200;
    double tol = 0.0;
    std::string simulate_out = "-";
    add_common(cmd_simulate, true);
    cmd_simulate->add_option("--r0", r0, "initial capacity, kW");
    cmd_simulate->add_option("--years", years, "maximum simulated years")
        ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--tol", tol, "convergence tolerance, kW");
    cmd_simulate->add_option("--out", simulate_out, "trajectory CSV path ('-' = stdout)");

    auto* cmd_longrun = app.add_subcommand("longrun", "fixed-horizon run with cost drift");
    double theta_growth = 0.0, xi_growth = 0.0;
    int horizon = 20;
    std::string longrun_out = "-";
    add_common(cmd_longrun, true);
    cmd_longrun->add_option("--r0", r0, "initial capacity, kW");
    cmd_longrun->add_option("--years", horizon, "horizon length")->check(CLI::PositiveNumber);
    cmd_longrun->add_option("--theta-growth", theta_growth,
                            "retailer cost growth per year (0.02 = +2%)");
    cmd_longrun->add_option("--xi-growth", xi_growth,
                            "install cost growth per year (-0.05 = -5%)");
    cmd_longrun->add_option("--out", longrun_out, "year records CSV path ('-' = stdout)");

    auto* cmd_thresholds = app.add_subcommand("thresholds", "compute all analysis thresholds");
    bool dynamic_thresholds = false;
    double capacity_max = kUnset;
    ThresholdBrackets brackets;
    std::string thresholds_out = "-";
    add_common(cmd_thresholds, false);
    cmd_thresholds->add_flag("--dynamic", dynamic_thresholds,
                             "use per-period break-even prices instead of flat");
    cmd_thresholds->add_option("--capacity-max", capacity_max,
                               "capacity cap for the margin floor (default market size)");
    cmd_thresholds->add_option("--theta-lo", brackets.lo, "transition bracket low end");
    cmd_thresholds->add_option("--theta-hi", brackets.hi, "transition bracket high end");
    cmd_thresholds->add_option("--out", thresholds_out, "JSON path ('-' = stdout)");

    auto* cmd_sweep = app.add_subcommand("sweep", "sweep the fixed connection charge");
    double a_min = 0.0, a_max = kUnset;
    int points = 9;
    int sweep_years = 20;
    std::string sweep_out = "-";
    add_common(cmd_sweep, false);
    cmd_sweep->add_option("--a-min", a_min, "lowest connection charge");
    cmd_sweep->add_option("--a-max", a_max, "highest connection charge (default theta/M)");
    cmd_sweep->add_option("--points", points, "grid size")->check(CLI::Range(1, 100000));
    cmd_sweep->add_option("--years", sweep_years, "horizon length")->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--out", sweep_out, "sweep CSV path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // malformed flags are input validation errors
    }

    const CalibrationDocument doc = load_calibration(config_path);
    const double theta = resolve(theta_flag, doc.default_theta);
    const double xi = resolve(xi_flag, doc.default_xi);

    if (app.got_subcommand(cmd_calibrate)) {
        write_text(calibrate_out,
                   [&](std::ostream& os) { os << resolved_calibration_json(doc); });
        return 0;
    }

    if (app.got_subcommand(cmd_potential)) {
        const TariffPolicy policy = parse_policy(policy_name, charge, dynamic);
        const std::vector<double> grid = parse_grid(grid_spec, doc.adoption.market_size_kw);
        const PotentialCurve curve =
            potential_curve(doc.model, doc.adoption, policy, theta, xi, grid);
        std::ostringstream cmdline;
        cmdline << "potential policy=" << policy_label(policy_name, charge, dynamic)
                << " theta=" << format_number(theta) << " xi=" << format_number(xi)
                << " grid=" << grid_spec;
        const OutputMeta meta = make_meta(doc, cmdline.str());
        write_text(potential_csv,
                   [&](std::ostream& os) { write_potential_csv(os, meta, curve); });
        if (!potential_json.empty()) {
            const EquilibriumReport report = classify_equilibria(curve);
            write_text(potential_json,
                       [&](std::ostream& os) { os << equilibria_json(meta, curve, report); });
        }
        return 0;
    }

    if (app.got_subcommand(cmd_simulate)) {
        const TariffPolicy policy = parse_policy(policy_name, charge, dynamic);
        SimulateOptions options;
        options.max_years = years;
        options.capacity_tol_kw = tol;
        const Trajectory traj =
            simulate(doc.model, doc.adoption, policy, theta, xi, r0, options);
        std::ostringstream cmdline;
        cmdline << "simulate policy=" << policy_label(policy_name, charge, dynamic)
                << " theta=" << format_number(theta) << " xi=" << format_number(xi)
                << " r0=" << format_number(r0) << " years=" << years;
        const OutputMeta meta = make_meta(doc, cmdline.str());
        write_text(simulate_out,
                   [&](std::ostream& os) { write_trajectory_csv(os, meta, traj); });
        return 0;
    }

    if (app.got_subcommand(cmd_longrun)) {
        const TariffPolicy policy = parse_policy(policy_name, charge, dynamic);
        LongRunScenario scenario;
        scenario.years = horizon;
        scenario.theta_path = geometric_path(theta, theta_growth, horizon);
        scenario.xi_path = geometric_path(xi, xi_growth, horizon);
        scenario.policy = policy;
        scenario.initial_capacity_kw = r0;
        const LongRunResult result = run_longrun(doc.model, doc.adoption, scenario);
        std::ostringstream cmdline;
        cmdline << "longrun policy=" << policy_label(policy_name, charge, dynamic)
                << " theta=" << format_number(theta) << " xi=" << format_number(xi)
                << " r0=" << format_number(r0) << " years=" << horizon
                << " theta_growth=" << format_number(theta_growth)
                << " xi_growth=" << format_number(xi_growth);
        const OutputMeta meta = make_meta(doc, cmdline.str());
        write_text(longrun_out, [&](std::ostream& os) { write_longrun_csv(os, meta, result); });
        return 0;
    }

    if (app.got_subcommand(cmd_thresholds)) {
        const double cap = resolve(capacity_max, doc.adoption.market_size_kw);
        const ThresholdsReport report =
            compute_thresholds(doc, theta, xi, !dynamic_thresholds, cap, brackets);
        std::ostringstream cmdline;
        cmdline << "thresholds theta=" << format_number(theta) << " xi=" << format_number(xi)
                << " prices=" << (dynamic_thresholds ? "dynamic" : "flat")
                << " capacity_max=" << format_number(cap);
        const OutputMeta meta = make_meta(doc, cmdline.str());
        write_text(thresholds_out,
                   [&](std::ostream& os) { os << thresholds_json(meta, report); });
        return 0;
    }

    if (app.got_subcommand(cmd_sweep)) {
        const double top = resolve(a_max, theta / doc.model.num_consumers);
        std::vector<double> charges;
        if (points == 1 || top <= a_min) {
            charges.push_back(a_min);
        } else {
            charges = uniform_grid(a_min, top, points);
        }
        const auto entries = sweep_connection_charge(doc.model, doc.adoption, charges,
                                                     sweep_years, theta, xi);
        std::ostringstream cmdline;
        cmdline << "sweep theta=" << format_number(theta) << " xi=" << format_number(xi)
                << " a=" << format_number(a_min) << ":" << format_number(top) << ":" << points
                << " years=" << sweep_years;
        const OutputMeta meta = make_meta(doc, cmdline.str());
        write_text(sweep_out, [&](std::ostream& os) { write_sweep_csv(os, meta, entries); });
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
