#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "momq/blocks.hpp"
#include "momq/core.hpp"
#include "momq/distributions.hpp"

namespace momq {

enum class EstimatorKind {
    erm,           // minimize the empirical distortion
    mom_magnitude, // MOM criterion over centers projected to the ball of radius M
    mom_pmin,      // MOM criterion among candidates with min cell mass >= pmin/2
    mom_free,      // unconstrained MOM criterion
};

struct SearchStrategy {
    enum class Seeding { kpp, random_points, grid_1d };

    int restarts = 5;
    int max_iters = 50;
    Seeding seeding = Seeding::kpp;
    bool include_mom_mean_singleton = true;
    bool exact_1d = false; // DP on the empirical support; d = 1, kind = erm only
    // Caller-supplied candidates (e.g. an oracle optimum) that enter the
    // selection alongside the search results.
    std::vector<Quantizer> extra_candidates;
};

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::erm;
    std::size_t k = 1;
    double delta = 0.1;
    double magnitude = 0.0; // M, required for mom_magnitude
    double pmin = 0.0;      // required for mom_pmin
    SearchStrategy search;

    BlockPolicy block_policy() const;
};

struct FitResult {
    Quantizer quantizer;
    double criterion_value = 0.0;
    std::size_t candidates_evaluated = 0;
    bool feasible = true;
    std::map<std::string, double> diagnostics; // min_cell_mass, max/min_center_norm

    std::size_t block_count = 0; // 0 for erm
};

// Multi-restart search for the configured criterion. Deterministic for a
// fixed (data, config, seed); restarts may run in parallel but results
// equal sequential execution.
FitResult fit(const Dataset& data, const EstimatorConfig& config, std::uint64_t seed);

// Alternates Voronoi assignment and cell-mean updates, accepting an update
// only if the MOM criterion does not increase. Stops at the first rejection.
Quantizer lloyd_mom_refine(const Dataset& data, Quantizer a, const BlockPartition& part,
                           int iters);

// exact_distortion(truth, fit) minus the DP-oracle distortion at k, clamped
// at 0; raw (possibly slightly negative) value returned through raw_out.
double excess_distortion(const FitResult& fit, const DiscreteDistribution& truth,
                         std::size_t k, double* raw_out = nullptr);

} // namespace momq
