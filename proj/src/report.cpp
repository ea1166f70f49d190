#include "pvdyn/report.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace pvdyn {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string outcome_name(RunOutcome outcome) {
    switch (outcome) {
        case RunOutcome::Converged: return "Converged";
        case RunOutcome::DeathSpiral: return "DeathSpiral";
        case RunOutcome::MaxYearsReached: return "MaxYearsReached";
    }
    return "Unknown";
}

OutputMeta make_meta(const CalibrationDocument& doc, std::string command) {
    OutputMeta meta;
    meta.calibration_hash = doc.hash;
    meta.adoption = doc.adoption;
    meta.command = std::move(command);
    return meta;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json meta_json(const OutputMeta& meta) {
    json j;
    j["calibration_hash"] = hash_hex(meta.calibration_hash);
    j["command"] = meta.command;
    j["adoption"] = {{"bass_innovation", meta.adoption.bass.innovation},
                     {"bass_imitation", meta.adoption.bass.imitation},
                     {"market_size_kw", meta.adoption.market_size_kw},
                     {"potential_decay", meta.adoption.potential_decay}};
    return j;
}

// Compact per-tariff price summary for CSV rows. Full price vectors live in
// the JSON outputs; CSV keeps one row per year readable.
void price_columns(std::ostream& os, const Tariff& tariff) {
    if (!tariff.has_prices()) {
        os << ",nan,nan,nan";
        return;
    }
    os << ',' << format_number(tariff.volumetric_price.mean()) << ','
       << format_number(tariff.volumetric_price.minCoeff()) << ','
       << format_number(tariff.volumetric_price.maxCoeff());
}

}  // namespace

void write_csv_header(std::ostream& os, const OutputMeta& meta) {
    os << "# command: " << meta.command << "\n";
    os << "# calibration_hash: " << hash_hex(meta.calibration_hash) << "\n";
    os << "# adoption: bass_innovation=" << format_number(meta.adoption.bass.innovation)
       << " bass_imitation=" << format_number(meta.adoption.bass.imitation)
       << " market_size_kw=" << format_number(meta.adoption.market_size_kw)
       << " potential_decay=" << format_number(meta.adoption.potential_decay) << "\n";
}

void write_potential_csv(std::ostream& os, const OutputMeta& meta,
                         const PotentialCurve& curve) {
    write_csv_header(os, meta);
    os << "capacity_kw,potential_kw,feasible\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        os << format_number(curve.grid[i]) << ','
           << (curve.feasible[i] ? format_number(curve.values[i]) : "nan") << ','
           << (curve.feasible[i] ? 1 : 0) << "\n";
    }
}

std::string equilibria_json(const OutputMeta& meta, const PotentialCurve& curve,
                            const EquilibriumReport& report) {
    json j = meta_json(meta);
    j["critical_level_kw"] = report.critical_level_kw;
    int feasible_points = 0;
    for (bool f : curve.feasible) feasible_points += f ? 1 : 0;
    j["feasible_points"] = feasible_points;
    j["grid_points"] = curve.grid.size();
    json eqs = json::array();
    for (const Equilibrium& eq : report.equilibria) {
        json e;
        e["capacity_kw"] = eq.capacity_kw;
        e["stable"] = eq.stable;
        e["tangent"] = eq.tangent;
        if (eq.basin_left_edge_kw)
            e["basin_left_edge_kw"] = *eq.basin_left_edge_kw;
        else
            e["basin_left_edge_kw"] = nullptr;
        eqs.push_back(std::move(e));
    }
    j["equilibria"] = std::move(eqs);
    if (report.death_spiral_predicted_from) {
        j["death_spiral_predicted_from"] = {report.death_spiral_predicted_from->first,
                                            report.death_spiral_predicted_from->second};
    } else {
        j["death_spiral_predicted_from"] = nullptr;
    }
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const OutputMeta& meta, const Trajectory& traj) {
    write_csv_header(os, meta);
    os << "year,capacity_kw,connection_charge,price_mean,price_min,price_max\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const SystemState& state = traj.states[k];
        os << k << ',' << format_number(state.capacity_kw) << ','
           << (state.tariff.has_prices() ? format_number(state.tariff.connection_charge)
                                         : "nan");
        price_columns(os, state.tariff);
        os << "\n";
    }
    os << "# outcome: " << outcome_name(traj.outcome);
    if (traj.outcome == RunOutcome::DeathSpiral) os << " year=" << traj.death_year;
    os << " final_capacity_kw=" << format_number(traj.final_capacity_kw) << "\n";
}

void write_longrun_csv(std::ostream& os, const OutputMeta& meta, const LongRunResult& result) {
    write_csv_header(os, meta);
    os << "year,capacity_kw,new_capacity_kw,connection_charge,price_mean,price_min,price_max,"
          "consumer_surplus,installation_cost,cum_cs,cum_sw\n";
    double cum_cs = 0.0, cum_sw = 0.0;
    for (const YearRecord& rec : result.records) {
        cum_cs += rec.consumer_surplus;
        cum_sw += rec.consumer_surplus - rec.installation_cost;
        os << rec.year << ',' << format_number(rec.capacity_kw) << ','
           << format_number(rec.new_capacity_kw) << ','
           << format_number(rec.tariff.connection_charge);
        price_columns(os, rec.tariff);
        os << ',' << format_number(rec.consumer_surplus) << ','
           << format_number(rec.installation_cost) << ',' << format_number(cum_cs) << ','
           << format_number(cum_sw) << "\n";
    }
    os << "# outcome: " << outcome_name(result.outcome);
    if (result.outcome == RunOutcome::DeathSpiral) os << " year=" << result.death_year;
    os << " final_capacity_kw=" << format_number(result.final_capacity_kw) << "\n";
}

void write_sweep_csv(std::ostream& os, const OutputMeta& meta,
                     const std::vector<SweepEntry>& entries) {
    write_csv_header(os, meta);
    os << "connection_charge,year,capacity_kw,consumer_surplus,cum_cs,cum_sw,outcome\n";
    for (const SweepEntry& entry : entries) {
        double cum_cs = 0.0, cum_sw = 0.0;
        const std::string name = outcome_name(entry.result.outcome);
        for (const YearRecord& rec : entry.result.records) {
            cum_cs += rec.consumer_surplus;
            cum_sw += rec.consumer_surplus - rec.installation_cost;
            os << format_number(entry.charge) << ',' << rec.year << ','
               << format_number(rec.capacity_kw) << ',' << format_number(rec.consumer_surplus)
               << ',' << format_number(cum_cs) << ',' << format_number(cum_sw) << ',' << name
               << "\n";
        }
        if (entry.result.records.empty()) {
            os << format_number(entry.charge) << ",0,"
               << format_number(entry.result.final_capacity_kw) << ",nan,nan,nan," << name
               << "\n";
        }
    }
}

namespace {

json threshold_json(const ThresholdValue& v) {
    json j;
    if (std::isnan(v.value))
        j["value"] = nullptr;
    else
        j["value"] = v.value;
    j["status"] = v.status;
    return j;
}

}  // namespace

std::string thresholds_json(const OutputMeta& meta, const ThresholdsReport& report) {
    json j = meta_json(meta);
    j["theta_sharp"] = threshold_json(report.theta_sharp);
    j["A_sharp"] = threshold_json(report.a_sharp);
    j["theta_dagger"] = threshold_json(report.theta_dagger);
    j["A_dagger"] = threshold_json(report.a_dagger);
    j["R_dagger"] = threshold_json(report.r_dagger);
    j["R_limit"] = threshold_json(report.r_limit);
    j["theta_limit"] = threshold_json(report.theta_limit);
    return j.dump(2) + "\n";
}

}  // namespace pvdyn
