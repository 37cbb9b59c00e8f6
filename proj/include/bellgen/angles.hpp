#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "bellgen/errors.hpp"

namespace bellgen {

enum class Setting : unsigned char { one = 1, two = 2 };

constexpr int as_int(Setting s) { return static_cast<int>(s); }

inline Setting setting_from_int(int v) {
    if (v != 1 && v != 2) {
        throw error("setting index must be 1 or 2, got " + std::to_string(v));
    }
    return static_cast<Setting>(v);
}

inline constexpr Setting kSettings[2] = {Setting::one, Setting::two};

/// The four analyzer orientations of a CHSH run, in radians.
///
/// Defaults are the maximally violating configuration for the cosine
/// correlation family: theta1=0, theta2=pi/2, theta1p=pi/4, theta2p=-pi/4.
/// Angles are stored exactly as given; only differences enter the model,
/// so no wrapping to [0, 2*pi) is performed.
struct AngleConfig {
    double theta1 = 0.0;
    double theta2 = std::numbers::pi / 2.0;
    double theta1p = std::numbers::pi / 4.0;
    double theta2p = -std::numbers::pi / 4.0;

    double left(Setting i) const { return i == Setting::one ? theta1 : theta2; }
    double right(Setting j) const { return j == Setting::one ? theta1p : theta2p; }

    void validate() const {
        if (!std::isfinite(theta1) || !std::isfinite(theta2) ||
            !std::isfinite(theta1p) || !std::isfinite(theta2p)) {
            throw config_error("angles must be finite");
        }
    }

    bool operator==(const AngleConfig&) const = default;
};

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

/// Parses an angle config from a stream of key=value lines (radians).
/// Required keys: theta1, theta2, theta1p, theta2p. Blank lines and lines
/// starting with '#' are ignored.
inline AngleConfig parse_angles(std::istream& in) {
    std::map<std::string, double> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("angle file line " + std::to_string(lineno) +
                               ": expected key=value");
        }
        std::string key = line.substr(first, eq - first);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) {
            key.pop_back();
        }
        std::istringstream val(line.substr(eq + 1));
        double v = 0.0;
        if (!(val >> v)) {
            throw config_error("angle file line " + std::to_string(lineno) +
                               ": bad numeric value for '" + key + "'");
        }
        if (!seen.emplace(key, v).second) {
            throw config_error("angle file: duplicate key '" + key + "'");
        }
    }
    for (const char* key : {"theta1", "theta2", "theta1p", "theta2p"}) {
        if (!seen.count(key)) {
            throw config_error(std::string("angle file: missing key '") + key + "'");
        }
    }
    if (seen.size() != 4) {
        throw config_error("angle file: unknown extra keys present");
    }
    AngleConfig a{seen["theta1"], seen["theta2"], seen["theta1p"], seen["theta2p"]};
    a.validate();
    return a;
}

inline AngleConfig load_angle_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open angle file: " + path.string());
    }
    return parse_angles(in);
}

} // namespace bellgen
