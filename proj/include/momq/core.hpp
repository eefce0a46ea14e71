#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace momq {

using Point = std::vector<double>;

// Ordered list of centers. The order matters: Voronoi ties go to the
// smallest index. Duplicate centers are allowed (padding a quantizer with
// copies never changes the induced partition of earlier indices).
struct Quantizer {
    std::vector<Point> centers;
    std::size_t dim = 0;

    static Quantizer from(std::vector<Point> centers);
    std::size_t size() const { return centers.size(); }
};

struct Dataset {
    std::vector<Point> points;
    std::optional<std::uint64_t> seed;
    std::string generator_tag;

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

struct MomentSummary {
    Point mean;
    double second_moment = 0.0; // E||X||^2 about the origin
    double trace_cov = 0.0;     // Tr(Sigma)
    double lambda_max = 0.0;    // largest eigenvalue of Sigma
};

double squared_norm(const Point& x);
double squared_distance(const Point& x, const Point& y);
double dot(const Point& x, const Point& y);

// Index of the Voronoi cell of x under A (0-based). Ties resolve to the
// smallest center index: strict inequality against earlier centers, weak
// against later ones.
std::size_t voronoi_index(const Point& x, const Quantizer& a);

// l_A(x) = min_a (-2<x,a> + ||a||^2) = min_a ||x-a||^2 - ||x||^2.
double loss_l(const Point& x, const Quantizer& a);

// Per-point l_A values. The parallel version must be bitwise identical to
// the serial one: each entry is an independent pure function of one point.
std::vector<double> loss_values(const Dataset& data, const Quantizer& a);
std::vector<double> loss_values_serial(const Dataset& data, const Quantizer& a);

// (1/N) sum_i min_a ||X_i - a||^2. Accumulation is an ordered sum over the
// point index in both variants, so results are bitwise identical.
double empirical_distortion(const Dataset& data, const Quantizer& a);
double empirical_distortion_serial(const Dataset& data, const Quantizer& a);

// Fraction of points per Voronoi cell; entries sum to 1.
std::vector<double> empirical_cell_masses(const Dataset& data, const Quantizer& a);

// Empirical mean, second moment, covariance trace and top eigenvalue
// (power iteration, relative tolerance 1e-9, 10000-iteration cap).
MomentSummary moment_summary(const Dataset& data);

} // namespace momq
