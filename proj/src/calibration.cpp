#include "pvdyn/calibration.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pvdyn {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& origin,
                   const std::string& where) {
    if (!obj.is_object()) fail(origin, where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin, "missing field '" + where + "." + key + "'");
    return *it;
}

double number_field(const json& obj, const char* key, const std::string& origin,
                    const std::string& where) {
    const json& v = member(obj, key, origin, where);
    if (!v.is_number()) fail(origin, "field '" + where + "." + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
    if (!obj.is_object()) return fallback;
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ConfigError("field '" + std::string(key) + "' must be a number");
    return it->get<double>();
}

PeriodVec vec_field(const json& obj, const char* key, const std::string& origin,
                    const std::string& where, bool required) {
    if (!required && (!obj.is_object() || !obj.contains(key))) return PeriodVec();
    const json& v = member(obj, key, origin, where);
    if (!v.is_array() || v.empty())
        fail(origin, "field '" + where + "." + key + "' must be a nonempty array");
    PeriodVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            fail(origin, "field '" + where + "." + key + "' must hold numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

MarketModel parse_market(const json& m, const std::string& origin) {
    MarketModel model;
    model.demand_slope = number_field(m, "demand_slope", origin, "market");
    model.num_consumers = number_field(m, "num_consumers", origin, "market");
    model.periods_per_cycle =
        static_cast<int>(number_field(m, "periods_per_cycle", origin, "market"));
    model.cycles_per_year = number_or(m, "cycles_per_year", 365.0);
    const json& scenarios = member(m, "scenarios", origin, "market");
    if (!scenarios.is_array() || scenarios.empty())
        fail(origin, "field 'market.scenarios' must be a nonempty array");
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const std::string where = "market.scenarios[" + std::to_string(i) + "]";
        Scenario s;
        s.probability = number_or(scenarios[i], "probability", 1.0);
        s.demand_intercept = vec_field(scenarios[i], "demand_intercept", origin, where, true);
        s.wholesale_price = vec_field(scenarios[i], "wholesale_price", origin, where, true);
        s.solar_unit_output =
            vec_field(scenarios[i], "solar_unit_output", origin, where, true);
        model.scenarios.push_back(std::move(s));
    }
    return model;
}

MarketModel parse_anchors(const json& a, const std::string& origin) {
    CalibrationAnchors anchors;
    anchors.connection_charge = number_field(a, "connection_charge", origin, "anchors");
    anchors.flat_price = number_field(a, "flat_price", origin, "anchors");
    anchors.theta = number_field(a, "theta", origin, "anchors");
    anchors.consumer_surplus = number_field(a, "consumer_surplus", origin, "anchors");
    anchors.num_consumers = number_field(a, "num_consumers", origin, "anchors");
    anchors.periods_per_cycle =
        static_cast<int>(number_field(a, "periods_per_cycle", origin, "anchors"));
    anchors.cycles_per_year = number_or(a, "cycles_per_year", 365.0);
    if (a.contains("scenarios")) {
        const json& scenarios = a.at("scenarios");
        if (!scenarios.is_array())
            fail(origin, "field 'anchors.scenarios' must be an array");
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const std::string where = "anchors.scenarios[" + std::to_string(i) + "]";
            AnchorScenario s;
            s.probability = number_or(scenarios[i], "probability", 1.0);
            s.wholesale_price =
                vec_field(scenarios[i], "wholesale_price", origin, where, false);
            s.solar_unit_output =
                vec_field(scenarios[i], "solar_unit_output", origin, where, false);
            s.demand_shape = vec_field(scenarios[i], "demand_shape", origin, where, false);
            anchors.scenarios.push_back(std::move(s));
        }
    }
    try {
        return calibrate_reference(anchors);
    } catch (const std::invalid_argument& e) {
        fail(origin, std::string("anchors: ") + e.what());
    } catch (const std::domain_error& e) {
        fail(origin, std::string("anchors: ") + e.what());
    }
}

json vec_json(const PeriodVec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

CalibrationDocument parse_calibration_text(const std::string& text,
                                           const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");
    const json& version = member(doc, "schema_version", origin, "");
    if (!version.is_number_integer() || version.get<int>() != 1)
        fail(origin, "schema_version must be the integer 1");

    CalibrationDocument out;
    const bool has_market = doc.contains("market");
    const bool has_anchors = doc.contains("anchors");
    if (has_market == has_anchors)
        fail(origin, "exactly one of 'market' or 'anchors' is required");
    try {
        if (has_market) {
            out.model = parse_market(doc.at("market"), origin);
        } else {
            out.model = parse_anchors(doc.at("anchors"), origin);
            out.from_anchors = true;
        }
        out.model.validate();
    } catch (const NoSolutionError& e) {
        fail(origin, std::string("anchors admit no market model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        fail(origin, std::string("market: ") + e.what());
    }

    const json& adoption = member(doc, "adoption", origin, "");
    out.adoption.bass.innovation =
        number_field(adoption, "bass_innovation", origin, "adoption");
    out.adoption.bass.imitation = number_field(adoption, "bass_imitation", origin, "adoption");
    out.adoption.market_size_kw =
        number_field(adoption, "market_size_kw", origin, "adoption");
    out.adoption.potential_decay = number_or(adoption, "potential_decay", 0.3);
    try {
        out.adoption.validate();
    } catch (const std::invalid_argument& e) {
        fail(origin, std::string("adoption: ") + e.what());
    }

    const json& defaults = member(doc, "defaults", origin, "");
    out.default_theta = number_field(defaults, "theta", origin, "defaults");
    out.default_xi = number_field(defaults, "xi", origin, "defaults");
    if (!(out.default_theta >= 0.0)) fail(origin, "defaults.theta must be nonnegative");
    if (!(out.default_xi > 0.0)) fail(origin, "defaults.xi must be positive");

    out.hash = fnv1a64(resolved_calibration_json(out));
    return out;
}

CalibrationDocument load_calibration(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open calibration file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_calibration_text(buf.str(), path);
}

std::string resolved_calibration_json(const CalibrationDocument& doc) {
    json market;
    market["demand_slope"] = doc.model.demand_slope;
    market["num_consumers"] = doc.model.num_consumers;
    market["periods_per_cycle"] = doc.model.periods_per_cycle;
    market["cycles_per_year"] = doc.model.cycles_per_year;
    json scenarios = json::array();
    for (const Scenario& s : doc.model.scenarios) {
        json sc;
        sc["probability"] = s.probability;
        sc["demand_intercept"] = vec_json(s.demand_intercept);
        sc["wholesale_price"] = vec_json(s.wholesale_price);
        sc["solar_unit_output"] = vec_json(s.solar_unit_output);
        scenarios.push_back(std::move(sc));
    }
    market["scenarios"] = std::move(scenarios);

    json adoption;
    adoption["bass_innovation"] = doc.adoption.bass.innovation;
    adoption["bass_imitation"] = doc.adoption.bass.imitation;
    adoption["market_size_kw"] = doc.adoption.market_size_kw;
    adoption["potential_decay"] = doc.adoption.potential_decay;

    json root;
    root["schema_version"] = 1;
    root["market"] = std::move(market);
    root["adoption"] = std::move(adoption);
    root["defaults"] = {{"theta", doc.default_theta}, {"xi", doc.default_xi}};
    return root.dump(2) + "\n";
}

}  // namespace pvdyn
