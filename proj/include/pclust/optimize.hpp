#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pclust {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimOptions {
    double tolerance = 1e-6;          // step tolerance on the unconstrained scale
    double max_step = 1.0;            // largest expected distance to the minimum
    std::size_t max_evals = 10000;
    double rel_objective_tol = 1e-8;  // stop when one sweep improves less than this, relatively
    int extra_sweeps = 1;             // principal-axis: sweeps without progress before stopping
    std::uint64_t seed = 0;           // random steps when the search looks ill-conditioned
};

struct OptimResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evals = 0;
    bool converged = false;  // false when the evaluation budget ran out
    std::string method;
};

/// Brent's principal-axis minimizer. Non-finite objective values are treated
/// as +infinity. Returns the best point evaluated.
[[nodiscard]] OptimResult praxis(const Objective& f, std::vector<double> x0, const OptimOptions& options = {});

/// Nelder-Mead simplex with the standard reflection/expansion/contraction/shrink steps.
[[nodiscard]] OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimOptions& options = {});

} // namespace pclust
