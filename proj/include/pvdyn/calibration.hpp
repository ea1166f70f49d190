#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pvdyn/adoption.hpp"
#include "pvdyn/market.hpp"

namespace pvdyn {

/// A fully resolved calibration: the market model (given explicitly or
/// solved from headline anchors), the adoption environment, and the default
/// cost levels commands fall back to. The hash fingerprints the resolved
/// content and is embedded in every output artifact.
struct CalibrationDocument {
    MarketModel model;
    AdoptionModel adoption;
    double default_theta = 0.0;  // $/cycle
    double default_xi = 0.0;     // $/kW
    bool from_anchors = false;
    std::uint64_t hash = 0;
};

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Parses and validates a calibration JSON document; `origin` labels error
/// messages (usually the file path). The document must carry schema_version 1
/// and exactly one of "market" (explicit scenarios) or "anchors" (headline
/// values passed through calibrate_reference). Throws ConfigError with the
/// offending field named.
CalibrationDocument parse_calibration_text(const std::string& text, const std::string& origin);

/// Reads the file and parses it.
CalibrationDocument load_calibration(const std::string& path);

/// Canonical resolved form: explicit market scenarios (anchors already
/// solved), adoption block, defaults. Numbers round-trip exactly; reloading
/// the text reproduces the same model and hash.
std::string resolved_calibration_json(const CalibrationDocument& doc);

}  // namespace pvdyn
