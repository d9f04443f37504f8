#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "toml.hpp"
#include "wirebus/errors.hpp"

namespace wirebus::cli {

namespace {

struct UnitInfo {
    const char* name;
    int exponent;
};

const std::vector<UnitInfo>& units_for(Quantity q) {
    static const std::vector<UnitInfo> frequency{{"Hz", 0}, {"mHz", -3}, {"uHz", -6}, {"kHz", 3}, {"MHz", 6}, {"GHz", 9}};
    static const std::vector<UnitInfo> length{{"m", 0}, {"cm", -2}, {"mm", -3}, {"um", -6}, {"µm", -6}, {"nm", -9}};
    static const std::vector<UnitInfo> capacitance{{"F", 0}, {"uF", -6}, {"nF", -9}, {"pF", -12}, {"fF", -15}};
    static const std::vector<UnitInfo> temperature{{"K", 0}, {"mK", -3}, {"uK", -6}, {"µK", -6}, {"nK", -9}};
    static const std::vector<UnitInfo> time{{"s", 0}, {"ms", -3}, {"us", -6}, {"µs", -6}, {"ns", -9}};
    switch (q) {
        case Quantity::frequency: return frequency;
        case Quantity::length: return length;
        case Quantity::capacitance: return capacitance;
        case Quantity::temperature: return temperature;
        case Quantity::time: return time;
    }
    return frequency;
}

const char* quantity_name(Quantity q) {
    switch (q) {
        case Quantity::frequency: return "frequency";
        case Quantity::length: return "length";
        case Quantity::capacitance: return "capacitance";
        case Quantity::temperature: return "temperature";
        case Quantity::time: return "time";
    }
    return "quantity";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

// Shortest text that reads back to the same double.
std::string shortest(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string number(double x) {
    std::string s = shortest(x);
    // Keep floats recognisable as floats in TOML.
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

// ---- TOML field reading ------------------------------------------------------

class FieldError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Handler = std::function<void(const toml::node&)>;

long want_integer(const toml::node& n, long min_value) {
    const auto v = n.value_exact<std::int64_t>();
    if (!v) {
        throw FieldError("expects an integer");
    }
    if (*v < min_value) {
        throw FieldError("must be >= " + std::to_string(min_value));
    }
    return static_cast<long>(*v);
}

double want_number(const toml::node& n) {
    if (n.is_string()) {
        throw FieldError("expects a plain number without unit");
    }
    const auto v = n.value<double>();
    if (!v || !std::isfinite(*v)) {
        throw FieldError("expects a finite number");
    }
    return *v;
}

std::string want_string(const toml::node& n) {
    const auto v = n.value_exact<std::string>();
    if (!v) {
        throw FieldError("expects a string");
    }
    return *v;
}

bool want_bool(const toml::node& n) {
    const auto v = n.value_exact<bool>();
    if (!v) {
        throw FieldError("expects true or false");
    }
    return *v;
}

double want_quantity(const toml::node& n, Quantity q) {
    if (!n.is_string()) {
        throw FieldError(std::string("expects a ") + quantity_name(q) + " string with unit, e.g. \"" +
                         format_quantity(1.0, q) + "\"");
    }
    try {
        return parse_quantity(*n.value_exact<std::string>(), q);
    } catch (const ConfigError& e) {
        throw FieldError(e.what());
    }
}

void read_section(const toml::table& section, const std::string& name, const std::string& source,
                  const std::map<std::string, Handler>& handlers) {
    for (auto&& [key, node] : section) {
        const std::string k(key.str());
        const auto line = node.source().begin.line;
        const std::string where = source + ":" + std::to_string(line) + ": [" + name + "]." + k + ": ";
        const auto it = handlers.find(k);
        if (it == handlers.end()) {
            std::string known;
            for (const auto& [hk, _] : handlers) {
                known += (known.empty() ? "" : ", ") + hk;
            }
            throw ConfigError(where + "unknown key (known: " + known + ")");
        }
        try {
            it->second(node);
        } catch (const FieldError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

}  // namespace

double parse_quantity(const std::string& text, Quantity q) {
    const std::string t = trim(text);
    const auto space = t.find_first_of(" \t");
    if (space == std::string::npos) {
        throw ConfigError("\"" + text + "\": missing unit (expected a " + quantity_name(q) + ")");
    }
    const std::string num = t.substr(0, space);
    const std::string unit = trim(t.substr(space));
    const UnitInfo* info = nullptr;
    for (const auto& u : units_for(q)) {
        if (unit == u.name) {
            info = &u;
        }
    }
    if (info == nullptr) {
        std::string known;
        for (const auto& u : units_for(q)) {
            known += (known.empty() ? "" : ", ") + std::string(u.name);
        }
        throw ConfigError("\"" + text + "\": unknown " + std::string(quantity_name(q)) + " unit '" + unit +
                          "' (known: " + known + ")");
    }
    double value = 0.0;
    // Shift the decimal exponent in text so "3.2 mm" reads exactly as 3.2e-3.
    const bool has_exp = num.find_first_of("eE") != std::string::npos;
    const std::string shifted = has_exp || info->exponent == 0 ? num : num + "e" + std::to_string(info->exponent);
    if (!parse_double(shifted, value) || !std::isfinite(value)) {
        throw ConfigError("\"" + text + "\": '" + num + "' is not a number");
    }
    if (has_exp && info->exponent != 0) {
        value *= std::pow(10.0, info->exponent);
    }
    return value;
}

std::string format_quantity(double value, Quantity q) {
    return shortest(value) + " " + units_for(q).front().name;
}

RunConfig parse_config(const std::string& text, const std::string& source_name) {
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source_name << ":" << e.source().begin.line << ": " << e.description();
        throw ConfigError(msg.str());
    }
    RunConfig c;
    std::optional<toml::node_view<const toml::node>> delta_node;
    int delta_line = 0;

    const std::map<std::string, std::map<std::string, Handler>> sections{
        {"traps",
         {
             {"be_count", [&](const toml::node& n) { c.traps.be_count = want_integer(n, 1); }},
             {"electron_count", [&](const toml::node& n) { c.traps.electron_count = want_integer(n, 1); }},
             {"proton_count", [&](const toml::node& n) { c.traps.proton_count = want_integer(n, 1); }},
             {"ion_frequency",
              [&](const toml::node& n) { c.traps.ion_frequency_hz = want_quantity(n, Quantity::frequency); }},
             {"distance", [&](const toml::node& n) { c.traps.distance = want_quantity(n, Quantity::length); }},
             {"equalize_rates", [&](const toml::node& n) { c.traps.equalize_rates = want_bool(n); }},
             {"ion", [&](const toml::node& n) {
                  c.traps.ion = want_string(n);
                  try {
                      (void)ion_mass_ratio(c.traps.ion);
                  } catch (const ConfigError& e) {
                      throw FieldError(e.what());
                  }
              }},
         }},
        {"wire",
         {
             {"capacitance",
              [&](const toml::node& n) { c.wire.capacitance = want_quantity(n, Quantity::capacitance); }},
             {"coupled", [&](const toml::node& n) { c.wire.coupled = want_bool(n); }},
         }},
        {"drive",
         {
             {"omega_d_ratio", [&](const toml::node& n) { c.drive.omega_d_ratio = want_number(n); }},
             {"Q", [&](const toml::node& n) { c.drive.Q = want_number(n); }},
             {"tongue", [&](const toml::node& n) {
                  if (n.is_string()) {
                      if (want_string(n) != "auto") {
                          throw FieldError("expects \"auto\" or a non-negative integer");
                      }
                      c.drive.tongue = -1;
                  } else {
                      c.drive.tongue = static_cast<int>(want_integer(n, 0));
                  }
              }},
             {"k", [&](const toml::node& n) { c.drive.k = static_cast<int>(want_integer(n, -1000)); }},
         }},
        {"sweep",
         {
             {"eta_min", [&](const toml::node& n) { c.sweep.eta_min = want_number(n); }},
             {"eta_max", [&](const toml::node& n) { c.sweep.eta_max = want_number(n); }},
             {"eta_steps", [&](const toml::node& n) { c.sweep.eta_steps = static_cast<int>(want_integer(n, 2)); }},
             {"ratio_min", [&](const toml::node& n) { c.sweep.ratio_min = want_number(n); }},
             {"ratio_max", [&](const toml::node& n) { c.sweep.ratio_max = want_number(n); }},
             {"ratio_steps",
              [&](const toml::node& n) { c.sweep.ratio_steps = static_cast<int>(want_integer(n, 2)); }},
             {"k", [&](const toml::node& n) { c.sweep.k = static_cast<int>(want_integer(n, -1000)); }},
             {"narrowness_threshold", [&](const toml::node& n) { c.sweep.narrowness_threshold = want_number(n); }},
         }},
        {"ensemble",
         {
             {"n_traj", [&](const toml::node& n) { c.ensemble.n_traj = want_integer(n, 1); }},
             {"delta_omega", [&](const toml::node& n) {
                  delta_node = toml::node_view<const toml::node>(n);
                  delta_line = static_cast<int>(n.source().begin.line);
              }},
             {"detuning", [&](const toml::node& n) {
                  const std::string s = want_string(n);
                  if (s == "additive") {
                      c.ensemble.detuning = DetuningMode::additive;
                  } else if (s == "relative") {
                      c.ensemble.detuning = DetuningMode::relative;
                  } else {
                      throw FieldError("expects \"additive\" or \"relative\"");
                  }
              }},
             {"seed", [&](const toml::node& n) { c.ensemble.seed = static_cast<std::uint64_t>(want_integer(n, 0)); }},
             {"T_Be0", [&](const toml::node& n) { c.ensemble.T_Be0 = want_quantity(n, Quantity::temperature); }},
             {"T_e0", [&](const toml::node& n) { c.ensemble.T_e0 = want_quantity(n, Quantity::temperature); }},
             {"T_P0", [&](const toml::node& n) { c.ensemble.T_P0 = want_quantity(n, Quantity::temperature); }},
             {"sample_intervals",
              [&](const toml::node& n) { c.ensemble.sample_intervals = static_cast<int>(want_integer(n, 1)); }},
             {"t_end", [&](const toml::node& n) {
                  if (n.is_string() && *n.value_exact<std::string>() == "auto") {
                      c.ensemble.t_end.reset();
                  } else {
                      c.ensemble.t_end = want_quantity(n, Quantity::time);
                  }
              }},
             {"write_trajectories", [&](const toml::node& n) { c.ensemble.write_trajectories = want_bool(n); }},
         }},
        {"integrator",
         {
             {"abs_tol", [&](const toml::node& n) { c.integrator.abs_tol = want_number(n); }},
             {"rel_tol", [&](const toml::node& n) { c.integrator.rel_tol = want_number(n); }},
             {"precision", [&](const toml::node& n) {
                  const std::string s = want_string(n);
                  if (s == "double") {
                      c.integrator.precision = Precision::double_precision;
                  } else if (s == "double-double") {
                      c.integrator.precision = Precision::extended;
                  } else {
                      throw FieldError("expects \"double\" or \"double-double\"");
                  }
              }},
             {"propagation", [&](const toml::node& n) {
                  const std::string s = want_string(n);
                  if (s == "floquet") {
                      c.integrator.propagation = Propagation::floquet;
                  } else if (s == "direct") {
                      c.integrator.propagation = Propagation::direct;
                  } else {
                      throw FieldError("expects \"floquet\" or \"direct\"");
                  }
              }},
         }},
        {"output",
         {
             {"dir", [&](const toml::node& n) { c.output.dir = want_string(n); }},
             {"sample_interval",
              [&](const toml::node& n) { c.output.sample_interval = want_quantity(n, Quantity::time); }},
             {"window", [&](const toml::node& n) { c.output.window = want_quantity(n, Quantity::time); }},
         }},
    };

    for (auto&& [key, node] : root) {
        const std::string name(key.str());
        const auto line = node.source().begin.line;
        const auto it = sections.find(name);
        if (it == sections.end()) {
            throw ConfigError(source_name + ":" + std::to_string(line) + ": unknown section [" + name +
                              "] (known: traps, wire, drive, sweep, ensemble, integrator, output)");
        }
        if (!node.is_table()) {
            throw ConfigError(source_name + ":" + std::to_string(line) + ": '" + name + "' must be a [section]");
        }
        read_section(*node.as_table(), name, source_name, it->second);
    }

    if (delta_node) {
        const std::string where =
            source_name + ":" + std::to_string(delta_line) + ": [ensemble].delta_omega: ";
        try {
            const toml::node& n = *delta_node->node();
            c.ensemble.delta_omega = c.ensemble.detuning == DetuningMode::additive
                                         ? want_quantity(n, Quantity::frequency)
                                         : want_number(n);
        } catch (const FieldError& e) {
            throw ConfigError(where + e.what() +
                              (c.ensemble.detuning == DetuningMode::additive ? " (additive detuning)"
                                                                             : " (relative detuning)"));
        }
    }

    // Cross-field checks.
    auto fail = [&](const std::string& msg) { throw ConfigError(source_name + ": " + msg); };
    if (!(c.traps.ion_frequency_hz > 0.0)) fail("[traps].ion_frequency must be positive");
    if (!(c.traps.distance > 0.0)) fail("[traps].distance must be positive");
    if (!(c.wire.capacitance > 0.0)) fail("[wire].capacitance must be positive");
    if (!(c.drive.omega_d_ratio > 0.0)) fail("[drive].omega_d_ratio must be positive");
    if (!(c.ensemble.delta_omega >= 0.0)) fail("[ensemble].delta_omega must be >= 0");
    if (c.ensemble.t_end && !(*c.ensemble.t_end > 0.0)) fail("[ensemble].t_end must be positive");
    if (!(c.output.sample_interval > 0.0)) fail("[output].sample_interval must be positive");
    if (!(c.output.window >= 0.0)) fail("[output].window must be >= 0");
    try {
        sweep_grid(c).validate();
        integrator_config(c).validate();
    } catch (const ConfigError& e) {
        fail(e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string echo_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[traps]\n"
      << "be_count = " << c.traps.be_count << "\n"
      << "electron_count = " << c.traps.electron_count << "\n"
      << "proton_count = " << c.traps.proton_count << "\n"
      << "ion_frequency = " << quoted(format_quantity(c.traps.ion_frequency_hz, Quantity::frequency)) << "\n"
      << "distance = " << quoted(format_quantity(c.traps.distance, Quantity::length)) << "\n"
      << "equalize_rates = " << (c.traps.equalize_rates ? "true" : "false") << "\n"
      << "ion = " << quoted(c.traps.ion) << "\n\n";
    o << "[wire]\n"
      << "capacitance = " << quoted(format_quantity(c.wire.capacitance, Quantity::capacitance)) << "\n"
      << "coupled = " << (c.wire.coupled ? "true" : "false") << "\n\n";
    o << "[drive]\n"
      << "omega_d_ratio = " << number(c.drive.omega_d_ratio) << "\n"
      << "Q = " << number(c.drive.Q) << "\n"
      << "tongue = " << (c.drive.tongue < 0 ? std::string("\"auto\"") : std::to_string(c.drive.tongue)) << "\n"
      << "k = " << c.drive.k << "\n\n";
    o << "[sweep]\n"
      << "eta_min = " << number(c.sweep.eta_min) << "\n"
      << "eta_max = " << number(c.sweep.eta_max) << "\n"
      << "eta_steps = " << c.sweep.eta_steps << "\n"
      << "ratio_min = " << number(c.sweep.ratio_min) << "\n"
      << "ratio_max = " << number(c.sweep.ratio_max) << "\n"
      << "ratio_steps = " << c.sweep.ratio_steps << "\n"
      << "k = " << c.sweep.k << "\n"
      << "narrowness_threshold = " << number(c.sweep.narrowness_threshold) << "\n\n";
    o << "[ensemble]\n"
      << "n_traj = " << c.ensemble.n_traj << "\n"
      << "detuning = " << quoted(to_string(c.ensemble.detuning)) << "\n"
      << "delta_omega = "
      << (c.ensemble.detuning == DetuningMode::additive
              ? quoted(format_quantity(c.ensemble.delta_omega, Quantity::frequency))
              : number(c.ensemble.delta_omega))
      << "\n"
      << "seed = " << c.ensemble.seed << "\n"
      << "T_Be0 = " << quoted(format_quantity(c.ensemble.T_Be0, Quantity::temperature)) << "\n"
      << "T_e0 = " << quoted(format_quantity(c.ensemble.T_e0, Quantity::temperature)) << "\n"
      << "T_P0 = " << quoted(format_quantity(c.ensemble.T_P0, Quantity::temperature)) << "\n"
      << "sample_intervals = " << c.ensemble.sample_intervals << "\n"
      << "t_end = "
      << (c.ensemble.t_end ? quoted(format_quantity(*c.ensemble.t_end, Quantity::time)) : std::string("\"auto\""))
      << "\n"
      << "write_trajectories = " << (c.ensemble.write_trajectories ? "true" : "false") << "\n\n";
    o << "[integrator]\n"
      << "abs_tol = " << number(c.integrator.abs_tol) << "\n"
      << "rel_tol = " << number(c.integrator.rel_tol) << "\n"
      << "precision = " << quoted(to_string(c.integrator.precision)) << "\n"
      << "propagation = " << quoted(to_string(c.integrator.propagation)) << "\n\n";
    o << "[output]\n"
      << "dir = " << quoted(c.output.dir) << "\n"
      << "sample_interval = " << quoted(format_quantity(c.output.sample_interval, Quantity::time)) << "\n"
      << "window = " << quoted(format_quantity(c.output.window, Quantity::time)) << "\n";
    return o.str();
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double ion_mass_ratio(const std::string& ion) {
    const PhysicalConstants& pc = kCodata2018;
    if (ion == "Ca40") return pc.m_Ca40 / pc.m_e;
    if (ion == "Be9") return pc.m_Be9 / pc.m_e;
    if (ion == "P") return pc.m_P / pc.m_e;
    throw ConfigError("unknown ion species '" + ion + "' (known: Ca40, Be9, P)");
}

ExchangeSetupParams setup_params(const RunConfig& c) {
    ExchangeSetupParams p;
    p.n_be = c.traps.be_count;
    p.n_e = c.traps.electron_count;
    p.n_p = c.traps.proton_count;
    p.distance = c.traps.distance;
    p.capacitance = c.wire.capacitance;
    p.ion_frequency = angular(c.traps.ion_frequency_hz);
    p.drive_ratio = c.drive.omega_d_ratio;
    p.Q = c.drive.Q;
    p.tongue = c.drive.tongue;
    p.be_distance_scale = c.traps.equalize_rates ? symmetric_be_distance_scale(p) : 1.0;
    return p;
}

ExchangeSetup build_setup(const RunConfig& c) {
    ExchangeSetup s = make_exchange_setup(setup_params(c));
    if (!c.wire.coupled) {
        s.system.be.charge_per_particle = 0.0;
        s.system.p.charge_per_particle = 0.0;
        s.g1 = 0.0;
        s.g2 = 0.0;
    }
    return s;
}

SweepGrid sweep_grid(const RunConfig& c) {
    SweepGrid g;
    g.eta = {c.sweep.eta_min, c.sweep.eta_max, c.sweep.eta_steps};
    g.ratio = {c.sweep.ratio_min, c.sweep.ratio_max, c.sweep.ratio_steps};
    g.k = c.sweep.k;
    g.mass_ratio = ion_mass_ratio(c.traps.ion);
    return g;
}

IntegratorConfig integrator_config(const RunConfig& c) {
    return IntegratorConfig{c.integrator.abs_tol, c.integrator.rel_tol, c.integrator.precision};
}

}  // namespace wirebus::cli
