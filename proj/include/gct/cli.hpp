#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "gct/io.hpp"

namespace gct::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2; // certified violation or infeasibility

// All tunables in one place; the full set is echoed into every output file.
struct RunConfig {
    std::string command;
    std::string manifold = "orthant";
    int n = 2;
    std::string p_arg;       // comma-separated coordinates, or a JSON path (spd)
    std::string q_arg;
    std::string input_path;  // datum / operator file
    std::string output_path;
    std::string fn;          // gconvex built-in name
    std::string mode = "auto"; // christoffel: auto | closed | numeric
    int steps = 100;
    int t_grid = 33;
    std::uint64_t seed = 0x5eed5eedULL;
    int trials = 500;
    int max_iter = 10000;
    double grad_tol = 1e-8;
    double step0 = 1.0;
    double divergence_floor = -50.0;
    int alt_iters = 1000;
    int gaussians = 100;
    double fd_step = 0.0;    // 0 selects the default step
};

void validate(const RunConfig& cfg);
io::json config_echo(const RunConfig& cfg);

// Parse "--p"-style point arguments: a comma list for the vector manifolds,
// a JSON file path for the SPD cone.
Point parse_point_arg(ManifoldKind kind, const std::string& arg);

int run_geodesic(const RunConfig& cfg, std::ostream& out);
int run_christoffel(const RunConfig& cfg, std::ostream& out);
int run_gconvex(const RunConfig& cfg, std::ostream& out);
int run_bl(const RunConfig& cfg, std::ostream& out);
int run_opscale(const RunConfig& cfg, std::ostream& out);
int run_selftest(const RunConfig& cfg, std::ostream& out);

} // namespace gct::cli
