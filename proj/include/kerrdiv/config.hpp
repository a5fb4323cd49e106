#pragma once

#include <map>
#include <string>
#include <vector>

#include "kerrdiv/dielectric.hpp"
#include "kerrdiv/envelope.hpp"

namespace kerrdiv {

/// Key-value file with [section] headers; '#' starts a comment.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    std::string dump() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Parameters of one experiment run.
struct RunConfig {
    std::string experiment;
    std::string output_dir = "out";
    bool verbose = false;

    std::string profile_builtin = "fig1";
    std::string eps1_minus_expr, eps1_plus_expr;
    std::string eps3_minus_expr = "1", eps3_plus_expr = "1";

    std::vector<double> omega_list{3.0};
    double mode_domain = 40.0;
    double mode_h1 = 1e-3;
    int n_candidates = 4;
    double shift = 0.0;
    double decay_tol = 1e-6;
    std::string mode_method = "auto";

    std::string envelope_kind = "gaussian";
    double envelope_width = 5e6;
    std::string envelope_expr;

    // Scaling-audit sweep; sits below the solver sweep so the envelope stays
    // wide against the carrier period.
    std::vector<double> ansatz_eps_list{1e-4, 7e-5, 5e-5, 3e-5, 2e-5, 1e-5};

    double eps = 3e-4;
    std::vector<double> eps_list{1e-3, 7e-4, 5e-4, 3e-4, 2e-4, 1e-4};
    double h = 0.05;
    std::vector<double> h_list{0.2, 0.1, 0.05};
    double tol = 1e-8;
    int max_iter = 50;
    double theta = 1.0;
    double eps3_scale = 1.0;
    double domain_x = 6.0;
    double domain_y = 6.0;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_config(const ConfigFile& file);

    /// Throws std::invalid_argument on invalid settings; no computation runs.
    void validate() const;

    DielectricProfile make_profile() const;
    Envelope make_envelope() const;

    /// Effective settings serialized as a re-parsable config file.
    std::string echo() const;
};

} // namespace kerrdiv
