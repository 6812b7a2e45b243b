#include <CLI11.hpp>
#include <iostream>

#include "gct/cli.hpp"

namespace {

void add_descent_flags(CLI::App* cmd, gct::cli::RunConfig& cfg) {
    cmd->add_option("--max-iter", cfg.max_iter, "Descent iteration cap");
    cmd->add_option("--grad-tol", cfg.grad_tol, "Riemannian gradient norm tolerance");
    cmd->add_option("--step", cfg.step0, "Initial line-search step");
    cmd->add_option("--divergence-floor", cfg.divergence_floor,
                    "Objective floor for divergence detection");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geodesic convexity toolkit: manifolds, Christoffel symbols, geodesics,\n"
                 "convexity tests, Brascamp-Lieb constants and operator scaling."};
    app.require_subcommand(1);

    gct::cli::RunConfig cfg;

    auto* geodesic = app.add_subcommand("geodesic", "Closed-form vs ODE geodesic trace (CSV)");
    geodesic->add_option("--manifold", cfg.manifold, "euclidean | orthant | spd")->required();
    geodesic->add_option("--p", cfg.p_arg, "Start point (comma list, or JSON file for spd)")
        ->required();
    geodesic->add_option("--q", cfg.q_arg, "End point")->required();
    geodesic->add_option("--steps", cfg.steps, "Runge-Kutta steps");
    geodesic->add_option("--out", cfg.output_path, "Output CSV path");

    auto* christoffel = app.add_subcommand("christoffel", "Christoffel symbols at a point (JSON)");
    christoffel->add_option("--manifold", cfg.manifold, "euclidean | orthant | spd")->required();
    christoffel->add_option("--p", cfg.p_arg, "Point")->required();
    christoffel->add_option("--mode", cfg.mode, "auto | closed | numeric");
    christoffel->add_option("--fd-step", cfg.fd_step, "Finite-difference step (0 = auto)");
    christoffel->add_option("--out", cfg.output_path, "Output JSON path");

    auto* gconvex = app.add_subcommand("gconvex", "Geodesic convexity violation search (JSON)");
    gconvex->add_option("--fn", cfg.fn, "Built-in function name")->required();
    gconvex->add_option("--manifold", cfg.manifold, "euclidean | orthant | spd")->required();
    gconvex->add_option("--n", cfg.n, "Ambient order");
    gconvex->add_option("--trials", cfg.trials, "Sampled point pairs");
    gconvex->add_option("--seed", cfg.seed, "Sampler seed");
    gconvex->add_option("--out", cfg.output_path, "Output JSON path");

    auto* bl = app.add_subcommand("bl", "Brascamp-Lieb constant from a datum file (JSON)");
    bl->add_option("--datum", cfg.input_path, "Datum file {\"n\",\"p\",\"B\"}")->required();
    bl->add_option("--trials", cfg.trials, "Random subspaces for the feasibility heuristic");
    bl->add_option("--gaussians", cfg.gaussians, "Sampled Gaussian inputs for the lower bound");
    bl->add_option("--seed", cfg.seed, "Sampling seed");
    bl->add_option("--out", cfg.output_path, "Output JSON path");
    add_descent_flags(bl, cfg);

    auto* opscale = app.add_subcommand("opscale", "Operator capacity and scaling (JSON + CSV)");
    opscale->add_option("--operator", cfg.input_path, "Operator file {\"n\",\"A\"}")->required();
    opscale->add_option("--alt-iters", cfg.alt_iters, "Alternating-scaling iteration cap");
    opscale->add_option("--out", cfg.output_path, "Output JSON path");
    add_descent_flags(opscale, cfg);

    auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");
    selftest->add_option("--seed", cfg.seed, "Suite seed");
    selftest->add_option("--out", cfg.output_path, "Report JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (geodesic->parsed()) {
            cfg.command = "geodesic";
            if (cfg.output_path.empty()) cfg.output_path = "geodesic.csv";
            return gct::cli::run_geodesic(cfg, std::cout);
        }
        if (christoffel->parsed()) {
            cfg.command = "christoffel";
            if (cfg.output_path.empty()) cfg.output_path = "christoffel.json";
            return gct::cli::run_christoffel(cfg, std::cout);
        }
        if (gconvex->parsed()) {
            cfg.command = "gconvex";
            if (cfg.output_path.empty()) cfg.output_path = "gconvex.json";
            return gct::cli::run_gconvex(cfg, std::cout);
        }
        if (bl->parsed()) {
            cfg.command = "bl";
            if (cfg.output_path.empty()) cfg.output_path = "bl.json";
            return gct::cli::run_bl(cfg, std::cout);
        }
        if (opscale->parsed()) {
            cfg.command = "opscale";
            if (cfg.output_path.empty()) cfg.output_path = "opscale.json";
            return gct::cli::run_opscale(cfg, std::cout);
        }
        if (selftest->parsed()) {
            cfg.command = "selftest";
            return gct::cli::run_selftest(cfg, std::cout);
        }
    } catch (const gct::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gct::cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gct::cli::kExitError;
    }
    return gct::cli::kExitError;
}
