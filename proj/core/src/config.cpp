#include "rollball/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rollball {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& where) {
    if (!j.is_number())
        throw ConfigError("config: " + where + " must be a number");
    return j.get<double>();
}

std::vector<double> require_number_array(const json& j, const std::string& where) {
    if (!j.is_array())
        throw ConfigError("config: " + where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number())
            throw ConfigError("config: " + where + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k)
                ok = true;
        if (!ok)
            throw ConfigError("config: unknown key '" + where + item.key() + "'");
    }
}

Profile profile_from(const json& j) {
    if (!j.is_object())
        throw ConfigError("config: profile must be an object");
    reject_unknown(j, {"kind", "b", "coeffs", "table"}, "profile.");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("config: profile.kind must be one of "
                          "\"parabolic\", \"plane\", \"poly_p1\", \"table\"");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "plane")
            return Profile::plane();
        if (kind == "parabolic") {
            if (!j.contains("b"))
                throw ConfigError("config: profile.b is required for kind \"parabolic\"");
            return Profile::parabolic(require_number(j.at("b"), "profile.b"));
        }
        if (kind == "poly_p1") {
            if (!j.contains("coeffs"))
                throw ConfigError("config: profile.coeffs is required for kind \"poly_p1\"");
            return Profile::poly_p1(require_number_array(j.at("coeffs"), "profile.coeffs"));
        }
        if (kind == "table") {
            if (!j.contains("table") || !j.at("table").is_object())
                throw ConfigError("config: profile.table {\"p1\": [...], \"psi\": [...]} is "
                                  "required for kind \"table\"");
            const json& t = j.at("table");
            reject_unknown(t, {"p1", "psi"}, "profile.table.");
            if (!t.contains("p1") || !t.contains("psi"))
                throw ConfigError("config: profile.table needs both p1 and psi arrays");
            return Profile::table(require_number_array(t.at("p1"), "profile.table.p1"),
                                  require_number_array(t.at("psi"), "profile.table.psi"));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: profile: ") + ex.what());
    }
    throw ConfigError("config: profile.kind '" + kind +
                      "' is not one of parabolic, plane, poly_p1, table");
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config: document is not valid JSON");
    return j;
}

} // namespace

Profile profile_from_json(const std::string& text) { return profile_from(parse_text(text)); }

RunConfig config_from_json(const std::string& text) {
    const json j = parse_text(text);
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    reject_unknown(j,
                   {"params", "profile", "integrator", "seed", "admissibility_r_max",
                    "output_dir"},
                   "");
    RunConfig cfg;

    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object())
            throw ConfigError("config: params must be an object");
        reject_unknown(p, {"k", "g_hat", "Omega"}, "params.");
        double k = cfg.params.k, g_hat = cfg.params.g_hat, Om = cfg.params.Omega;
        if (p.contains("k"))
            k = require_number(p.at("k"), "params.k");
        if (p.contains("g_hat"))
            g_hat = require_number(p.at("g_hat"), "params.g_hat");
        if (p.contains("Omega"))
            Om = require_number(p.at("Omega"), "params.Omega");
        try {
            cfg.params = Params(k, g_hat, Om);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("config: params: ") + ex.what());
        }
    }

    if (j.contains("profile"))
        cfg.profile = profile_from(j.at("profile"));

    if (j.contains("integrator")) {
        const json& t = j.at("integrator");
        if (!t.is_object())
            throw ConfigError("config: integrator must be an object");
        reject_unknown(t, {"rtol", "atol"}, "integrator.");
        if (t.contains("rtol"))
            cfg.rtol = require_number(t.at("rtol"), "integrator.rtol");
        if (t.contains("atol"))
            cfg.atol = require_number(t.at("atol"), "integrator.atol");
        if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
            throw ConfigError("config: integrator tolerances must be > 0");
    }

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned())
            throw ConfigError("config: seed must be a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }

    if (j.contains("admissibility_r_max")) {
        cfg.admissibility_r_max =
            require_number(j.at("admissibility_r_max"), "admissibility_r_max");
        if (!(cfg.admissibility_r_max > 0.0))
            throw ConfigError("config: admissibility_r_max must be > 0");
    }

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            throw ConfigError("config: output_dir must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }

    const AdmissibilityReport rep =
        cfg.profile.check_admissibility(cfg.admissibility_r_max, 400);
    if (!rep.ok) {
        std::ostringstream os;
        os << "config: profile violates rolling admissibility (f'' > -F^3) near r = "
           << (rep.violating_radii.empty() ? 0.0 : rep.violating_radii.front())
           << " within declared range r <= " << cfg.admissibility_r_max;
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return config_from_json(ss.str());
    } catch (const ConfigError& ex) {
        throw ConfigError(std::string(ex.what()) + " [" + path + "]");
    }
}

} // namespace rollball
