#pragma once

#include "mvl/latent_opt.hpp"
#include "mvl/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace mvl {

struct FitOptions {
  double tol = 1e-5;   // relative objective change declaring convergence
  int max_outer = 200;
  int f_sweeps = 2;    // label-process sweeps per outer iteration
  std::uint64_t seed = 0;
  // Label-process block size: the leading gp_columns subjects. Negative
  // means every column. Labels observed outside the block are an error.
  int gp_columns = -1;
  OptimizeOptions mstep;
  bool verbose = false;           // progress lines on stderr
  std::optional<Matrix> u0;       // replaces the seeded random start
  // Warm-start state for continuation runs (e.g. refitting with a narrower
  // spike after a first pass). Must be shape-consistent with the data and
  // internally consistent; replaces the default initialization.
  std::optional<VariationalState> state0;
};

struct FitResult {
  LatentFeatures u;
  VariationalState state;
  FitReport report;
};

// Full variational EM: coordinate updates over the continuous view, the
// ordinal view, and the label process, then a quasi-Newton step in U,
// repeated until the objective settles (relative change below tol on two
// consecutive iterations) or max_outer is hit.
FitResult fit(const Dataset& d, const Hyperparameters& h,
              const FitOptions& opts = {});

// Complete variational objective for the current state and U; every fit
// iteration appends this value to the trace, and it never decreases across
// well-posed updates.
double elbo(const VariationalState& s, const Matrix& u, const Dataset& d,
            const Hyperparameters& h);

struct SelectKResult {
  int best_k = 0;
  // (candidate k, final objective), in the order tried
  std::vector<std::pair<int, double>> objective_by_k;
};

// Fits each candidate latent dimension and keeps the one with the highest
// final objective; exact ties resolve toward the smaller k.
SelectKResult select_k(const Dataset& d, const Hyperparameters& base,
                       const std::vector<int>& candidates,
                       const FitOptions& opts = {});

}  // namespace mvl
