#include "momq/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace momq {

namespace {

// log x stands for max(log x, 1) throughout the block-count formulas
double clog(double x) { return std::max(std::log(x), 1.0); }

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must lie in (0,1), got " + std::to_string(delta));
}

} // namespace

std::size_t block_count(const BlockPolicy& policy) {
    switch (policy.kind) {
        case PolicyKind::scalar_mom: {
            check_delta(policy.delta);
            auto ell = static_cast<std::size_t>(std::ceil(8.0 * clog(1.0 / policy.delta)));
            if (ell % 2 == 0) ++ell; // one extra block so the median is unique
            return ell;
        }
        case PolicyKind::magnitude_m:
            check_delta(policy.delta);
            return 8 * static_cast<std::size_t>(std::ceil(clog(2.0 / policy.delta))) + 1;
        case PolicyKind::pmin_constrained:
            check_delta(policy.delta);
            return 12 * static_cast<std::size_t>(std::ceil(clog(6.0 / policy.delta))) + 1;
        case PolicyKind::parameter_free:
            check_delta(policy.delta);
            return 32 * static_cast<std::size_t>(std::ceil(clog(4.0 / policy.delta))) + 1;
        case PolicyKind::explicit_ell:
            if (!policy.explicit_count || *policy.explicit_count < 1)
                throw std::invalid_argument("explicit block policy needs explicit_count >= 1");
            return *policy.explicit_count;
    }
    throw std::logic_error("unreachable block policy kind");
}

BlockPartition make_partition(std::size_t n, const BlockPolicy& policy) {
    const std::size_t ell = block_count(policy);
    if (ell > n)
        throw std::invalid_argument(
            "infeasible confidence: policy requires " + std::to_string(ell) +
            " blocks but only " + std::to_string(n) + " samples are available");
    return BlockPartition{n, ell, n / ell};
}

std::vector<double> block_means_serial(std::span<const double> values, const BlockPartition& part) {
    if (values.size() < part.covered())
        throw std::invalid_argument("block_means: values shorter than the partition");
    std::vector<double> means(part.ell);
    for (std::size_t j = 0; j < part.ell; ++j) {
        double s = 0.0;
        const std::size_t base = j * part.block_size;
        for (std::size_t i = 0; i < part.block_size; ++i) s += values[base + i];
        means[j] = s / static_cast<double>(part.block_size);
    }
    return means;
}

std::vector<double> block_means(std::span<const double> values, const BlockPartition& part) {
    if (values.size() < part.covered())
        throw std::invalid_argument("block_means: values shorter than the partition");
    std::vector<double> means(part.ell);
    const std::ptrdiff_t ell = static_cast<std::ptrdiff_t>(part.ell);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < ell; ++j) {
        double s = 0.0;
        const std::size_t base = static_cast<std::size_t>(j) * part.block_size;
        for (std::size_t i = 0; i < part.block_size; ++i) s += values[base + i];
        means[static_cast<std::size_t>(j)] = s / static_cast<double>(part.block_size);
    }
    return means;
}

double mom(std::span<const double> values, const BlockPartition& part) {
    if (part.ell % 2 == 0)
        throw std::invalid_argument("mom requires an odd number of blocks");
    std::vector<double> means = block_means(values, part);
    const std::size_t mid = part.ell / 2;
    std::nth_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid), means.end());
    return means[mid];
}

double qom(std::span<const double> values, const BlockPartition& part, QuantileLevel level) {
    if (!(level.alpha > 0.0 && level.alpha < 1.0))
        throw std::invalid_argument("quantile level must lie in (0,1)");
    const double la = level.alpha * static_cast<double>(part.ell);
    if (std::abs(la - std::round(la)) < 1e-9)
        throw std::invalid_argument("ell * alpha must be non-integer for QOM");
    const auto rank = static_cast<std::size_t>(std::ceil(la)); // 1-based order statistic
    std::vector<double> means = block_means(values, part);
    std::nth_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(rank - 1), means.end());
    return means[rank - 1];
}

double mom_mean_estimate(std::span<const double> values, double delta) {
    const auto part = make_partition(values.size(), BlockPolicy{PolicyKind::scalar_mom, delta, {}});
    return mom(values, part);
}

double mom_criterion(const Dataset& data, const Quantizer& a, const BlockPartition& part) {
    const std::vector<double> losses = loss_values(data, a);
    return mom(losses, part);
}

} // namespace momq
