#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "momq/core.hpp"

namespace momq {

// Finite-support probability measure with exact-computation oracles.
struct DiscreteDistribution {
    std::vector<Point> atoms;
    std::vector<double> weights;
    std::size_t dim = 0;

    static DiscreteDistribution from(std::vector<Point> atoms, std::vector<double> weights);
};

struct GaussianSpec {
    Point mean;
    Point cov_diag;
};

struct ParetoSpec {
    double tail_index = 0.0; // must exceed 2 (two-moment assumption)
    double shift = 0.0;
    double scale = 1.0;

    double mean() const;
    double variance() const;
};

struct SamplerSpec {
    enum class Family { discrete, gaussian, pareto, mixture } family = Family::discrete;
    std::size_t dim = 1;

    DiscreteDistribution discrete;
    GaussianSpec gaussian;
    ParetoSpec pareto;
    std::vector<double> mixture_weights;
    std::vector<SamplerSpec> mixture_components;

    static SamplerSpec from_discrete(DiscreteDistribution d);
    static SamplerSpec from_gaussian(Point mean, Point cov_diag);
    static SamplerSpec from_pareto(double tail_index, double shift, double scale);
    static SamplerSpec from_mixture(std::vector<double> weights, std::vector<SamplerSpec> components);
    void validate() const;
};

struct OracleReport {
    Quantizer optimal;
    double distortion = 0.0;  // D(A*)
    double pmin = 0.0;        // lightest optimal cell mass
    double delta_gap = 0.0;   // D gap between best (k-1)- and k-point quantizers
    double radius_R = 0.0;    // smallest centered atom norm with tail <= delta_gap/64
    double magnitude_M = 0.0; // realized max center norm of the optimum
};

// n i.i.d. draws; bitwise reproducible for identical (spec, n, seed).
Dataset sample(const SamplerSpec& spec, std::size_t n, std::uint64_t seed);

// Two atoms {0, sqrt(n)} with masses (1 - 1/n, 1/n); second moment 1.
DiscreteDistribution example_1_1(std::size_t n);

// Five atoms (-1/sqrt(p), -1/(2 sqrt(p)), 0, 1/(2 sqrt(p)), 1/sqrt(p)) with
// masses (p(1-d)/4, p(1-d)/4, 1-p, p(1+d)/4, p(1+d)/4); second moment 5/8.
DiscreteDistribution lower_bound_family(double p, double family_delta);

// Globally optimal 1-D quantizer by dynamic programming over sorted atoms
// (optimal squared-loss cells are contiguous atom ranges). Ties between
// equal-cost partitions resolve to the smallest leftmost boundary,
// recursively.
OracleReport optimal_quantizer_1d(const DiscreteDistribution& dist, std::size_t k);

// D(A) = sum over atoms of weight * min_a ||atom - a||^2.
double exact_distortion(const DiscreteDistribution& dist, const Quantizer& a);

// max_j || a_j - E[X | X in V_j] || over cells with positive mass.
double centroid_check(const DiscreteDistribution& dist, const Quantizer& a);

// true iff every center satisfies ||a|| <= sqrt(E||X||^2 / pmin) + 1e-9.
bool magnitude_bound_check(const OracleReport& report, const DiscreteDistribution& dist);

double second_moment(const DiscreteDistribution& dist);
Point mean(const DiscreteDistribution& dist);

// Distribution spec files: {"family": ..., "params": {...}, "dim": d}.
// Unknown fields are rejected.
SamplerSpec load_spec_json(const std::string& text);
std::string spec_to_json(const SamplerSpec& spec);

} // namespace momq
