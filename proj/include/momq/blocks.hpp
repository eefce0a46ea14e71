#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "momq/core.hpp"

namespace momq {

// Contiguous equal-size index blocks I_j = {(j-1)m, ..., jm-1} (0-based).
// Trailing n - ell*m indices are not covered.
struct BlockPartition {
    std::size_t n = 0;
    std::size_t ell = 0;
    std::size_t block_size = 0;

    std::size_t covered() const { return ell * block_size; }
};

enum class PolicyKind {
    scalar_mom,       // ell = ceil(8 log 1/delta), made odd
    magnitude_m,      // ell = 8 ceil(log 2/delta) + 1
    pmin_constrained, // ell = 12 ceil(log 6/delta) + 1
    parameter_free,   // ell = 32 ceil(log 4/delta) + 1
    explicit_ell,
};

struct BlockPolicy {
    PolicyKind kind = PolicyKind::scalar_mom;
    double delta = 0.1;
    std::optional<std::size_t> explicit_count;
};

struct QuantileLevel {
    double alpha = 0.5;
};

// Number of blocks the policy prescribes. log means max(log x, 1).
// Throws if the count is not positive or not representable.
std::size_t block_count(const BlockPolicy& policy);

// Throws std::invalid_argument naming both values when ell > n.
BlockPartition make_partition(std::size_t n, const BlockPolicy& policy);

// Arithmetic mean of values over each block. Per-block accumulation order
// is fixed, so the parallel version is bitwise identical to the serial one.
std::vector<double> block_means(std::span<const double> values, const BlockPartition& part);
std::vector<double> block_means_serial(std::span<const double> values, const BlockPartition& part);

// Exact median of the block means (middle order statistic; ell must be odd).
double mom(std::span<const double> values, const BlockPartition& part);

// ceil(alpha*ell)-th smallest block mean; ell*alpha must be non-integer.
double qom(std::span<const double> values, const BlockPartition& part, QuantileLevel level);

// Scalar MOM estimate of the mean under the scalar_mom policy.
double mom_mean_estimate(std::span<const double> values, double delta);

// MOM of the per-point losses l_A.
double mom_criterion(const Dataset& data, const Quantizer& a, const BlockPartition& part);

} // namespace momq
