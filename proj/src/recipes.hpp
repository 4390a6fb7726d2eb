#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "kernels/kernels.hpp"
#include "polaron.hpp"

// Canned figure-reproduction sweeps: each recipe writes one CSV per curve
// plus a manifest with every resolved parameter. All files land atomically
// (write-then-rename), so an interrupted run leaves no truncated output.

namespace uswg {

// exact output schemas, shared between the recipes and the subcommands
inline constexpr const char* kSpectralHeader = "omega,J_binned,J_analytic";
inline constexpr const char* kGroundStateHeader =
    "alpha,x,delta_r,ising_J,theta,e_gs,magnetization,entropy,converged,"
    "iterations";
inline constexpr const char* kDynamicsHeader =
    "t,re_c1,im_c1,re_c2,im_c2,sz1_pol,sz2_pol,sz1_lab,sz2_lab,gamma1,gamma2,"
    "norm";
inline constexpr const char* kDdeHeader = "t,re_c1,im_c1,re_c2,im_c2,norm";
inline constexpr const char* kOracleHeader =
    "alpha,x,e_exact,e_polaron,gap,parity";

std::vector<std::string> recipe_names();

// Runs one recipe into cfg.out_dir; returns the files written (relative to
// the output directory). Unknown names are ConfigErrors. If any ground-state
// solve in a sweep fails to converge the files are still written, then a
// NumericError reports the count.
std::vector<std::string> run_recipe(const std::string& name,
                                    const RunConfig& cfg,
                                    const kernels::Table& kern);

// row of the ground-state schema for a converged solution; x_cell lets the
// far curves encode infinite separation as -1
std::vector<std::string> ground_state_row(const PolaronSolution& sol,
                                          const ModeSet& modes, double alpha,
                                          double x_cell);

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);

} // namespace uswg
