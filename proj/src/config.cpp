#include "kerrdiv/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kerrdiv {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = strip_quotes(trim(line.substr(eq + 1)));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: bad number for " + section + "." + key + ": " + v);
    return r;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    size_t pos = 0;
    const int r = std::stoi(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: bad integer for " + section + "." + key + ": " + v);
    return r;
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<double> out;
    std::string v = get(section, key);
    std::replace(v.begin(), v.end(), ';', ',');
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty())
        throw std::invalid_argument("config: empty list for " + section + "." + key);
    return out;
}

std::string ConfigFile::dump() const {
    std::ostringstream out;
    for (const auto& [section, kv] : sections_) {
        out << '[' << section << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
        out << '\n';
    }
    return out.str();
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_config(ConfigFile::parse_file(path));
}

RunConfig RunConfig::from_config(const ConfigFile& f) {
    RunConfig c;
    c.experiment = f.get("run", "experiment");
    c.output_dir = f.get("run", "output_dir", c.output_dir);
    c.verbose = f.get_int("run", "verbose", 0) != 0;

    c.profile_builtin = f.get("profile", "builtin", "");
    c.eps1_minus_expr = f.get("profile", "eps1_minus");
    c.eps1_plus_expr = f.get("profile", "eps1_plus");
    c.eps3_minus_expr = f.get("profile", "eps3_minus", "1");
    c.eps3_plus_expr = f.get("profile", "eps3_plus", "1");
    if (c.profile_builtin.empty() && c.eps1_minus_expr.empty() && c.eps1_plus_expr.empty())
        c.profile_builtin = "fig1";

    c.omega_list = f.get_list("mode", "omega", c.omega_list);
    if (f.has("mode", "omega0")) c.omega_list = {f.get_double("mode", "omega0", 3.0)};
    c.mode_domain = f.get_double("mode", "domain", c.mode_domain);
    c.mode_h1 = f.get_double("mode", "h1", c.mode_h1);
    c.n_candidates = f.get_int("mode", "n_candidates", c.n_candidates);
    c.shift = f.get_double("mode", "shift", c.shift);
    c.decay_tol = f.get_double("mode", "decay_tol", c.decay_tol);
    c.mode_method = f.get("mode", "method", c.mode_method);

    c.envelope_kind = f.get("envelope", "kind", c.envelope_kind);
    c.envelope_width = f.get_double("envelope", "width", c.envelope_width);
    c.envelope_expr = f.get("envelope", "expression");
    c.ansatz_eps_list = f.get_list("ansatz", "eps_list", c.ansatz_eps_list);

    c.eps = f.get_double("solver", "eps", c.eps);
    c.eps_list = f.get_list("solver", "eps_list", c.eps_list);
    c.h = f.get_double("solver", "h", c.h);
    c.h_list = f.get_list("solver", "h_list", c.h_list);
    c.tol = f.get_double("solver", "tol", c.tol);
    c.max_iter = f.get_int("solver", "max_iter", c.max_iter);
    c.theta = f.get_double("solver", "theta", c.theta);
    c.eps3_scale = f.get_double("solver", "eps3_scale", c.eps3_scale);
    c.domain_x = f.get_double("solver", "domain_x", c.domain_x);
    c.domain_y = f.get_double("solver", "domain_y", c.domain_y);
    return c;
}

void RunConfig::validate() const {
    static const char* kinds[] = {"dispersion", "h-sweep", "eps-sweep", "residual-trace", "audit"};
    if (std::find_if(std::begin(kinds), std::end(kinds),
                     [&](const char* k) { return experiment == k; }) == std::end(kinds))
        throw std::invalid_argument("config: unknown experiment kind '" + experiment + "'");
    if (omega_list.empty() || eps_list.empty() || h_list.empty() || ansatz_eps_list.empty())
        throw std::invalid_argument("config: empty parameter list");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    if (!(mode_h1 > 0.0) || !(mode_domain > 0.0))
        throw std::invalid_argument("config: mode grid parameters must be positive");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("config: eps must lie in (0, 1)");
    for (double e : eps_list)
        if (!(e > 0.0) || !(e < 1.0))
            throw std::invalid_argument("config: eps_list entries must lie in (0, 1)");
    if (!profile_builtin.empty() && profile_builtin != "fig1" &&
        profile_builtin.rfind("piecewise:", 0) != 0)
        throw std::invalid_argument("config: unknown profile builtin '" + profile_builtin + "'");
    if (profile_builtin.empty() && (eps1_minus_expr.empty() || eps1_plus_expr.empty()))
        throw std::invalid_argument("config: profile needs a builtin or eps1 expressions per side");
    if (mode_method != "auto" && mode_method != "dense" && mode_method != "shift-invert")
        throw std::invalid_argument("config: mode method must be auto, dense or shift-invert");
    if (envelope_kind != "gaussian" && envelope_kind != "expression" && envelope_kind != "zero")
        throw std::invalid_argument("config: envelope kind must be gaussian, expression or zero");
    if (envelope_kind == "expression" && envelope_expr.empty())
        throw std::invalid_argument("config: envelope expression missing");
}

DielectricProfile RunConfig::make_profile() const {
    if (profile_builtin == "fig1") return DielectricProfile::fig1();
    if (profile_builtin.rfind("piecewise:", 0) == 0) {
        // piecewise:<eps1->,<eps1+>[,<eps3->,<eps3+>]
        std::vector<double> vals;
        std::istringstream ss(profile_builtin.substr(10));
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
        if (vals.size() == 2) return DielectricProfile::piecewise_constant(vals[0], vals[1]);
        if (vals.size() == 4)
            return DielectricProfile::piecewise_constant(vals[0], vals[1], vals[2], vals[3]);
        throw std::invalid_argument("config: piecewise builtin needs 2 or 4 values");
    }
    return DielectricProfile::from_expressions(eps1_minus_expr, eps1_plus_expr,
                                               eps3_minus_expr, eps3_plus_expr);
}

Envelope RunConfig::make_envelope() const {
    if (envelope_kind == "zero") return Envelope::zero();
    if (envelope_kind == "expression") return Envelope::from_expression(envelope_expr);
    return Envelope::gaussian(envelope_width);
}

std::string RunConfig::echo() const {
    std::ostringstream o;
    o << "[run]\nexperiment = " << experiment << "\noutput_dir = " << output_dir
      << "\nverbose = " << (verbose ? 1 : 0) << "\n\n[profile]\n";
    if (!profile_builtin.empty()) o << "builtin = " << profile_builtin << '\n';
    if (!eps1_minus_expr.empty()) o << "eps1_minus = " << eps1_minus_expr << '\n';
    if (!eps1_plus_expr.empty()) o << "eps1_plus = " << eps1_plus_expr << '\n';
    if (!eps3_minus_expr.empty()) o << "eps3_minus = " << eps3_minus_expr << '\n';
    if (!eps3_plus_expr.empty()) o << "eps3_plus = " << eps3_plus_expr << '\n';
    o << "\n[mode]\nomega = ";
    for (size_t i = 0; i < omega_list.size(); ++i) o << (i ? "," : "") << omega_list[i];
    o << "\ndomain = " << mode_domain << "\nh1 = " << mode_h1
      << "\nn_candidates = " << n_candidates << "\nshift = " << shift
      << "\ndecay_tol = " << decay_tol << "\nmethod = " << mode_method;
    o << "\n\n[envelope]\nkind = " << envelope_kind << "\nwidth = " << envelope_width;
    if (!envelope_expr.empty()) o << "\nexpression = " << envelope_expr;
    o << "\n\n[ansatz]\neps_list = ";
    for (size_t i = 0; i < ansatz_eps_list.size(); ++i) o << (i ? "," : "") << ansatz_eps_list[i];
    o << "\n\n[solver]\neps = " << eps << "\neps_list = ";
    for (size_t i = 0; i < eps_list.size(); ++i) o << (i ? "," : "") << eps_list[i];
    o << "\nh = " << h << "\nh_list = ";
    for (size_t i = 0; i < h_list.size(); ++i) o << (i ? "," : "") << h_list[i];
    o << "\ntol = " << tol << "\nmax_iter = " << max_iter << "\ntheta = " << theta
      << "\neps3_scale = " << eps3_scale << "\ndomain_x = " << domain_x
      << "\ndomain_y = " << domain_y << '\n';
    return o.str();
}

} // namespace kerrdiv
