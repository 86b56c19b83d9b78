#include "bcr/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bcr/errors.hpp"
#include "bcr/expr.hpp"
#include "json.hpp"

namespace bcr {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
    throw config_error("config field '" + path + "': " + what);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) bad_field(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_field(path, "expected an integer");
    return j.get<int>();
}

// expression fields accept either a string or a bare number
std::string as_expression(const json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        try {
            Expr::parse(s);
        } catch (const expr_error& e) {
            bad_field(path, e.what());
        }
        return s;
    }
    if (j.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return os.str();
    }
    bad_field(path, "expected an expression string or a number");
}

void reject_unknown(const json& j, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            bad_field(scope.empty() ? item.key() : scope + "." + item.key(),
                      "unknown key");
    }
}

void parse_noise(const json& j, NoiseConfig& n) {
    if (!j.is_object()) bad_field("noise", "expected an object");
    reject_unknown(j, "noise",
                   {"angular_level", "neumann_level", "interior_level", "seed",
                    "reading"});
    if (j.contains("angular_level"))
        n.angular_level = as_number(j["angular_level"], "noise.angular_level");
    if (j.contains("neumann_level"))
        n.neumann_level = as_number(j["neumann_level"], "noise.neumann_level");
    if (j.contains("interior_level"))
        n.interior_level = as_number(j["interior_level"], "noise.interior_level");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            bad_field("noise.seed", "expected a nonnegative integer");
        n.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("reading")) {
        const json& r = j["reading"];
        if (!r.is_string()) bad_field("noise.reading", "expected a string");
        const std::string s = r.get<std::string>();
        if (s == "relative_sd")
            n.reading = NoiseReading::relative_sd;
        else if (s == "literal_variance")
            n.reading = NoiseReading::literal_variance;
        else
            bad_field("noise.reading",
                      "expected \"relative_sd\" or \"literal_variance\"");
    }
    if (n.angular_level < 0 || n.neumann_level < 0 || n.interior_level < 0)
        bad_field("noise", "levels must be nonnegative");
}

void parse_bounds(const json& j, Bounds& b) {
    if (!j.is_object()) bad_field("bounds", "expected an object");
    reject_unknown(j, "bounds", {"sigma_lo", "sigma_hi", "eps_stop", "eq_tol"});
    if (j.contains("sigma_lo")) b.sigma_lo = as_number(j["sigma_lo"], "bounds.sigma_lo");
    if (j.contains("sigma_hi")) b.sigma_hi = as_number(j["sigma_hi"], "bounds.sigma_hi");
    if (j.contains("eps_stop")) {
        if (j["eps_stop"].is_null())
            b.eps_stop.reset();
        else
            b.eps_stop = as_number(j["eps_stop"], "bounds.eps_stop");
    }
    if (j.contains("eq_tol")) b.eq_tol = as_number(j["eq_tol"], "bounds.eq_tol");
    if (!(b.sigma_lo > 0.0) || !(b.sigma_hi > b.sigma_lo))
        bad_field("bounds", "need 0 < sigma_lo < sigma_hi");
    if (!(b.eq_tol > 0.0)) bad_field("bounds.eq_tol", "must be positive");
    if (b.eps_stop && !(*b.eps_stop > 0.0))
        bad_field("bounds.eps_stop", "must be positive (or null for automatic)");
}

}  // namespace

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.dirichlet = "max(0,x1)";
    c.p = "2";
    c.q = "2";
    c.mesh_h = 0.025;
    c.noise.seed = 1;
    if (name == "paper-fig1" || name == "fig1") {
        c.phantom = "3/(1+exp(2*(x1+x2)))";
        c.samples = 1000;
        c.bounds.sigma_lo = 0.08;
        c.bounds.sigma_hi = 5.7;
    } else if (name == "paper-fig2" || name == "fig2") {
        c.phantom = "3/(1+exp(2*(x1+x2)))";
        c.samples = 100;
        c.bounds.sigma_lo = 0.08;
        c.bounds.sigma_hi = 5.7;
    } else if (name == "paper-fig3" || name == "fig3") {
        c.phantom = "2+cos(10*(x1-x2))";
        c.samples = 100;
        c.bounds.sigma_lo = 0.5;
        c.bounds.sigma_hi = 6.0;
    } else {
        throw config_error("unknown preset '" + name +
                           "' (expected paper-fig1, paper-fig2, paper-fig3)");
    }
    return c;
}

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be a JSON object");

    ExperimentConfig c;
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) bad_field("preset", "expected a string");
        c = preset_config(j["preset"].get<std::string>());
    }
    reject_unknown(j, "",
                   {"preset", "phantom", "dirichlet", "p", "q", "M", "mesh_h",
                    "kernel_std", "noise", "bounds", "out_dir"});
    if (j.contains("phantom")) c.phantom = as_expression(j["phantom"], "phantom");
    if (j.contains("dirichlet"))
        c.dirichlet = as_expression(j["dirichlet"], "dirichlet");
    if (j.contains("p")) c.p = as_expression(j["p"], "p");
    if (j.contains("q")) c.q = as_expression(j["q"], "q");
    if (j.contains("M")) {
        c.samples = as_int(j["M"], "M");
        if (c.samples < 4) bad_field("M", "need at least 4 samples");
    }
    if (j.contains("mesh_h")) {
        c.mesh_h = as_number(j["mesh_h"], "mesh_h");
        if (!(c.mesh_h > 0.0) || c.mesh_h > 1.0)
            bad_field("mesh_h", "need 0 < mesh_h <= 1");
    }
    if (j.contains("kernel_std"))
        c.kernel_std = as_number(j["kernel_std"], "kernel_std");
    if (j.contains("noise")) parse_noise(j["noise"], c.noise);
    if (j.contains("bounds")) parse_bounds(j["bounds"], c.bounds);
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) bad_field("out_dir", "expected a string");
        c.out_dir = j["out_dir"].get<std::string>();
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["phantom"] = c.phantom;
    j["dirichlet"] = c.dirichlet;
    j["p"] = c.p;
    j["q"] = c.q;
    j["M"] = c.samples;
    j["mesh_h"] = c.mesh_h;
    j["kernel_std"] = c.kernel_std;
    j["noise"] = {
        {"angular_level", c.noise.angular_level},
        {"neumann_level", c.noise.neumann_level},
        {"interior_level", c.noise.interior_level},
        {"seed", c.noise.seed},
        {"reading", c.noise.reading == NoiseReading::relative_sd
                        ? "relative_sd"
                        : "literal_variance"},
    };
    json b = {
        {"sigma_lo", c.bounds.sigma_lo},
        {"sigma_hi", c.bounds.sigma_hi},
        {"eq_tol", c.bounds.eq_tol},
    };
    if (c.bounds.eps_stop)
        b["eps_stop"] = *c.bounds.eps_stop;
    else
        b["eps_stop"] = nullptr;
    j["bounds"] = b;
    j["out_dir"] = c.out_dir;
    return j.dump(2) + "\n";
}

}  // namespace bcr
