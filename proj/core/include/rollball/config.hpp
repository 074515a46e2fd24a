#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rollball/params.hpp"
#include "rollball/profile.hpp"

namespace rollball {

/// Run configuration shared by the command-line tools. Every field has a
/// working default: homogeneous ball (k = 2/5), unit gravity, resting
/// paraboloid b = 1.
struct RunConfig {
    Params params;
    Profile profile = Profile::parabolic(1.0);
    double rtol = 1e-10;
    double atol = 1e-12;
    std::uint64_t seed = 20260815;
    /// Radius range on which the profile must satisfy the rolling
    /// admissibility inequality f'' > -F^3.
    double admissibility_r_max = 3.0;
    std::string output_dir = ".";
};

/// Error in the configuration file contents; what() names the bad field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Build a Profile from its JSON object text:
/// {"kind": "parabolic"|"plane"|"poly_p1"|"table", "b": number,
///  "coeffs": [c0, c1, ...], "table": {"p1": [...], "psi": [...]}}.
Profile profile_from_json(const std::string& text);

/// Parse a full configuration document. Unknown keys are rejected so typos
/// do not silently fall back to defaults.
RunConfig config_from_json(const std::string& text);

/// Read and parse a configuration file; failures carry the path.
RunConfig load_config(const std::string& path);

} // namespace rollball
