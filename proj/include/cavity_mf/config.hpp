#ifndef CAVITY_MF_CONFIG_HPP
#define CAVITY_MF_CONFIG_HPP

// Flat `key = value` configuration files with `#` comments, command-line
// `--set key=value` overrides, and the mapping onto parameter structs.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace cavity_mf {

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys{
        // bare model
        "g", "omega_rabi", "delta_e", "delta_s", "delta_cavity", "kappa", "gamma", "eta_r", "eta_i", "n_spins",
        // effective overrides
        "delta_at", "delta_ph", "lambda", "g_tilde",
        // run
        "unit", "seed", "t_end", "samples", "rel_tol", "abs_tol", "t_transient", "t_measure", "alpha_r0", "alpha_i0",
        "s_x0", "s_y0", "w0", "g_lo", "g_hi", "g_steps", "hopf_steps", "lambda_grid", "delta_at_grid", "threshold_count",
        // array
        "g_tilde_a", "g_tilde_b", "delta_ph_a", "delta_ph_b", "n_rows", "n_cols", "seeds", "draws"};
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;  // 0 for command-line overrides
    };

    static Config parse(std::istream& in) {
        Config c;
        std::string raw;
        for (int line = 1; std::getline(in, raw); ++line) {
            const std::string text = trim(raw.substr(0, raw.find('#')));
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos) throw ConfigError("expected 'key = value'", {}, line);
            const std::string key = trim(text.substr(0, eq));
            if (c.entries_.count(key)) throw ConfigError("duplicate key", key, line);
            c.assign(key, trim(text.substr(eq + 1)), line);
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    /// Applies a `key=value` override; later overrides win.
    void set(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("override must read key=value: '" + assignment + "'");
        assign(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const std::map<std::string, Entry>& entries() const { return entries_; }

    double number(const std::string& key, double fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : to_number(key, it->second);
    }

    long integer(const std::string& key, long fallback) const {
        const double v = number(key, static_cast<double>(fallback));
        if (v != std::floor(v)) throw ConfigError("expected an integer", key, line_of(key));
        return static_cast<long>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    /// Comma-separated numbers.
    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        const auto it = entries_.find(key);
        if (it == entries_.end()) return out;
        std::stringstream ss(it->second.value);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(to_number(key, {trim(item), it->second.line}));
        return out;
    }

    int line_of(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

private:
    void assign(const std::string& key, const std::string& value, int line) {
        if (key.empty()) throw ConfigError("empty key", {}, line);
        if (!known_config_keys().count(key)) throw ConfigError("unknown key", key, line);
        if (value.empty()) throw ConfigError("missing value", key, line);
        entries_[key] = {value, line};
    }

    static double to_number(const std::string& key, const Entry& e) {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
            throw ConfigError("not a finite number: '" + e.value + "'", key, e.line);
        return v;
    }

    std::map<std::string, Entry> entries_;
};

/// Effective parameters. Bare keys (g, omega_rabi, delta_e, delta_s,
/// delta_cavity) are mapped through the adiabatic elimination when any of
/// them is present; delta_at, delta_ph, lambda and g_tilde then override the
/// derived values.
inline EffectiveParams effective_params(const Config& c) {
    EffectiveParams p;
    const double kappa = c.number("kappa", 0.0), gamma = c.number("gamma", 0.0);
    const std::complex<double> eta{c.number("eta_r", 0.0), c.number("eta_i", 0.0)};
    const double n = c.number("n_spins", 1.0);
    const bool bare = c.has("g") || c.has("omega_rabi") || c.has("delta_e") || c.has("delta_s") || c.has("delta_cavity");
    try {
        if (bare) {
            PhysicalParams phys;
            phys.g = c.number("g", 0.0);
            phys.omega_rabi = c.number("omega_rabi", 0.0);
            phys.delta_e = c.number("delta_e", 0.0);
            phys.delta_s = c.number("delta_s", 0.0);
            phys.delta_cavity = c.number("delta_cavity", 0.0);
            p = derive_effective_params(phys, kappa, gamma, eta, n);
        } else {
            p.kappa = kappa;
            p.gamma = gamma;
            p.eta_r = eta.real();
            p.eta_i = eta.imag();
            p.n_spins = n;
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "delta_e", c.line_of("delta_e"));
    }
    p.delta_at = c.number("delta_at", p.delta_at);
    p.delta_ph = c.number("delta_ph", p.delta_ph);
    p.lambda = c.number("lambda", p.lambda);
    p.g_tilde = c.number("g_tilde", p.g_tilde);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

/// Array parameters; the row values default to the single-cavity ones and
/// the column values to the row ones.
inline Params2D params_2d(const Config& c) {
    const EffectiveParams e = effective_params(c);
    Params2D p;
    p.g_tilde_a = c.number("g_tilde_a", e.g_tilde);
    p.g_tilde_b = c.number("g_tilde_b", p.g_tilde_a);
    p.delta_ph_a = c.number("delta_ph_a", e.delta_ph);
    p.delta_ph_b = c.number("delta_ph_b", p.delta_ph_a);
    p.delta_at = e.delta_at;
    p.lambda = e.lambda;
    p.kappa = e.kappa;
    p.gamma = e.gamma;
    p.eta = e.eta();
    p.n_rows = static_cast<int>(c.integer("n_rows", 1));
    p.n_cols = static_cast<int>(c.integer("n_cols", 1));
    try {
        p.validate();
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    return p;
}

}  // namespace cavity_mf

#endif
