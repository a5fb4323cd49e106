#pragma once

#include "kerrdiv/config.hpp"

namespace kerrdiv {

// Exit codes shared by the CLI and the experiment drivers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNoMode = 3;
inline constexpr int kExitPartialConvergence = 4;
inline constexpr int kExitAuditFailure = 5;

int run_dispersion(const RunConfig& cfg);
int run_eps_sweep(const RunConfig& cfg);
int run_h_sweep(const RunConfig& cfg);
int run_residual_trace(const RunConfig& cfg);
int run_audit(const RunConfig& cfg);

/// Validates the config, prepares the output directory (with an echo of the
/// effective settings), and dispatches on the experiment kind.
int run_experiment(const RunConfig& cfg);

} // namespace kerrdiv
