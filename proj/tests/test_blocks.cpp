#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <stdexcept>

#include "momq/blocks.hpp"
#include "momq/rng.hpp"

using namespace momq;

namespace {

std::vector<double> iota_values(std::size_t n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 1.0);
    return v;
}

BlockPartition explicit_partition(std::size_t n, std::size_t ell) {
    BlockPolicy policy;
    policy.kind = PolicyKind::explicit_ell;
    policy.explicit_count = ell;
    return make_partition(n, policy);
}

} // namespace

TEST_CASE("block counts follow the per-estimator formulas") {
    // log means max(log x, 1), applied before the ceiling.
    for (double delta : {0.5, 0.1, 0.05, 0.01}) {
        const auto clog = [](double x) { return std::max(std::log(x), 1.0); };
        BlockPolicy policy;
        policy.delta = delta;

        policy.kind = PolicyKind::magnitude_m;
        CHECK(block_count(policy) ==
              8 * static_cast<std::size_t>(std::ceil(clog(2.0 / delta))) + 1);

        policy.kind = PolicyKind::pmin_constrained;
        CHECK(block_count(policy) ==
              12 * static_cast<std::size_t>(std::ceil(clog(6.0 / delta))) + 1);

        policy.kind = PolicyKind::parameter_free;
        CHECK(block_count(policy) ==
              32 * static_cast<std::size_t>(std::ceil(clog(4.0 / delta))) + 1);

        policy.kind = PolicyKind::scalar_mom;
        std::size_t ell = static_cast<std::size_t>(std::ceil(8.0 * clog(1.0 / delta)));
        if (ell % 2 == 0) ++ell;
        CHECK(block_count(policy) == ell);
        CHECK(block_count(policy) % 2 == 1);
    }
}

TEST_CASE("make_partition hand values") {
    {
        BlockPolicy policy;
        policy.kind = PolicyKind::pmin_constrained;
        policy.delta = 0.05;
        const BlockPartition part = make_partition(1000, policy);
        CHECK(part.ell == 61); // 12*ceil(log 120)+1 = 12*5+1
        CHECK(part.block_size == 16);
        CHECK(part.covered() == 976);
    }
    {
        const BlockPartition part = explicit_partition(100, 1);
        CHECK(part.ell == 1);
        CHECK(part.block_size == 100);
        CHECK(part.covered() == 100);
    }
    {
        BlockPolicy policy;
        policy.kind = PolicyKind::magnitude_m;
        policy.delta = 0.5;
        // 8*ceil(log 4)+1 = 17 blocks cannot fit in 10 samples
        CHECK_THROWS_AS(make_partition(10, policy), std::invalid_argument);
        try {
            make_partition(10, policy);
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("17") != std::string::npos);
            CHECK(msg.find("10") != std::string::npos);
        }
    }
}

TEST_CASE("block_means hand values") {
    {
        const auto v = iota_values(9);
        CHECK(block_means(v, explicit_partition(9, 3)) ==
              std::vector<double>{2.0, 5.0, 8.0});
    }
    {
        const std::vector<double> v(12, 3.25);
        CHECK(block_means(v, explicit_partition(12, 4)) ==
              std::vector<double>{3.25, 3.25, 3.25, 3.25});
    }
    {
        const std::vector<double> v{1.0, 100.0, 1.0, 1.0, 1.0, 1.0};
        CHECK(block_means(v, explicit_partition(6, 3)) ==
              std::vector<double>{50.5, 1.0, 1.0});
    }
}

TEST_CASE("mom hand values") {
    CHECK(mom(iota_values(9), explicit_partition(9, 3)) == 5.0);
    const std::vector<double> contaminated{1.0, 100.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(mom(contaminated, explicit_partition(6, 3)) == 1.0);
    const std::vector<double> constant(15, -2.5);
    CHECK(mom(constant, explicit_partition(15, 5)) == -2.5);
}

TEST_CASE("qom hand values") {
    const auto v = iota_values(9); // block means (2, 5, 8)
    CHECK(qom(v, explicit_partition(9, 3), {0.3}) == 2.0);
    CHECK(qom(v, explicit_partition(9, 3), {0.75}) == 8.0);
}

TEST_CASE("qom rejects integer ell*alpha and mom rejects even ell") {
    const auto v = iota_values(8);
    CHECK_THROWS(qom(v, explicit_partition(8, 4), {0.5}));
    CHECK_THROWS(mom(v, explicit_partition(8, 4)));
}

TEST_CASE("mom_mean_estimate recovers a constant exactly") {
    for (double delta : {0.5, 0.05}) {
        const std::vector<double> v(200, 4.75);
        CHECK(mom_mean_estimate(v, delta) == 4.75);
    }
}

TEST_CASE("scalar MOM hits the sub-Gaussian deviation bound empirically") {
    const std::size_t n = 8000;
    const double delta = 0.01;
    const double bound = std::sqrt(32.0 * std::log(1.0 / delta) / n);
    int ok = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        rng::Counter gen(rng::derive_seed(99, 1, static_cast<std::uint64_t>(t)));
        std::vector<double> v(n);
        for (auto& x : v) x = gen.next_normal();
        if (std::fabs(mom_mean_estimate(v, delta)) <= bound) ++ok;
    }
    CHECK(static_cast<double>(ok) / trials >= 0.99);
}

TEST_CASE("median symmetry: mom(-v) == -mom(v)") {
    rng::Counter gen(7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t ell = 2 * (gen.next_u64() % 10) + 1;
        const std::size_t m = 1 + (gen.next_u64() % 5);
        std::vector<double> v(ell * m), neg;
        for (auto& x : v) x = gen.next_normal() * 10.0;
        for (double x : v) neg.push_back(-x);
        const auto part = explicit_partition(v.size(), ell);
        CHECK(mom(neg, part) == -mom(v, part));
    }
}

TEST_CASE("quantile duality: qom_a(v) == -qom_{1-a}(-v)") {
    rng::Counter gen(11);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t ell = 3 + (gen.next_u64() % 10);
        const std::size_t m = 1 + (gen.next_u64() % 4);
        std::vector<double> v(ell * m), neg;
        for (auto& x : v) x = gen.next_normal() * 5.0;
        for (double x : v) neg.push_back(-x);

        double alpha = gen.next_double();
        if (std::fabs(alpha * ell - std::round(alpha * ell)) < 1e-6) continue;
        const auto part = explicit_partition(v.size(), ell);
        CHECK(qom(v, part, {alpha}) == -qom(neg, part, {1.0 - alpha}));
    }
}

TEST_CASE("qom at alpha just below 1/2 equals mom for odd ell") {
    rng::Counter gen(13);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t ell = 2 * (gen.next_u64() % 8) + 3;
        std::vector<double> v(ell * 2);
        for (auto& x : v) x = gen.next_normal();
        const auto part = explicit_partition(v.size(), ell);
        // ceil(alpha*ell) with alpha slightly below 1/2 selects the middle
        // order statistic of an odd list, the MOM definition.
        const double alpha = 0.5 - 0.25 / static_cast<double>(ell);
        CHECK(qom(v, part, {alpha}) == mom(v, part));
    }
}

TEST_CASE("outputs are invariant to permutations within a block") {
    rng::Counter gen(19);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t ell = 2 * (gen.next_u64() % 5) + 3;
        const std::size_t m = 2 + (gen.next_u64() % 4);
        std::vector<double> v(ell * m);
        // small integer values make within-block sums order-independent
        for (auto& x : v) x = static_cast<double>(gen.next_u64() % 16);
        auto shuffled = v;
        const std::size_t block = gen.next_u64() % ell;
        std::reverse(shuffled.begin() + static_cast<std::ptrdiff_t>(block * m),
                     shuffled.begin() + static_cast<std::ptrdiff_t>((block + 1) * m));
        const auto part = explicit_partition(v.size(), ell);
        CHECK(block_means(v, part) == block_means(shuffled, part));
        CHECK(mom(v, part) == mom(shuffled, part));
    }
}

TEST_CASE("corrupting a minority of blocks moves mom at most the clean span") {
    rng::Counter gen(29);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t ell = 2 * (gen.next_u64() % 5) + 5;
        const std::size_t m = 1 + (gen.next_u64() % 3);
        std::vector<double> v(ell * m);
        for (auto& x : v) x = gen.next_normal();
        const auto part = explicit_partition(v.size(), ell);
        const double clean = mom(v, part);

        const std::size_t corrupt = gen.next_u64() % ((ell + 1) / 2); // < ceil(ell/2)
        auto bad = v;
        for (std::size_t j = 0; j < corrupt; ++j)
            for (std::size_t i = 0; i < m; ++i) bad[j * m + i] = 1e12;

        std::vector<double> clean_means;
        const auto all_means = block_means(v, part);
        for (std::size_t j = corrupt; j < ell; ++j) clean_means.push_back(all_means[j]);
        const auto [lo, hi] = std::minmax_element(clean_means.begin(), clean_means.end());
        const double dirty = mom(bad, part);
        CHECK(dirty >= *lo);
        CHECK(dirty <= *hi);
        CHECK(std::fabs(dirty - clean) <= *hi - *lo);
    }
}

TEST_CASE("mom_criterion special cases") {
    Dataset data;
    rng::Counter gen(37);
    for (int i = 0; i < 30; ++i) data.points.push_back({gen.next_normal()});

    // l at the zero quantizer is identically zero
    const Quantizer zero = Quantizer::from({{0.0}});
    CHECK(mom_criterion(data, zero, explicit_partition(30, 5)) == 0.0);

    // single block: criterion is the mean loss = distortion - mean ||X||^2
    const Quantizer a = Quantizer::from({{0.5}, {-1.0}});
    const auto part1 = explicit_partition(30, 1);
    double mean_sq = 0.0;
    for (const auto& p : data.points) mean_sq += squared_norm(p);
    mean_sq /= 30.0;
    const double expected = empirical_distortion(data, a) - mean_sq;
    CHECK(mom_criterion(data, a, part1) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("criterion ignores a fully corrupted block") {
    Dataset data;
    rng::Counter gen(41);
    for (int i = 0; i < 25; ++i) data.points.push_back({gen.next_normal()});
    const Quantizer a = Quantizer::from({{0.3}, {-0.7}});
    const auto part = explicit_partition(25, 5);
    const double before = mom_criterion(data, a, part);

    // corrupt the block whose loss mean is already the smallest; pushing it
    // further down cannot move the median block
    const auto means = block_means(loss_values(data, a), part);
    const std::size_t low = static_cast<std::size_t>(
        std::min_element(means.begin(), means.end()) - means.begin());
    auto moved = data;
    for (std::size_t i = low * part.block_size; i < (low + 1) * part.block_size; ++i)
        moved.points[i] = {1e9};
    CHECK(mom_criterion(moved, a, part) == before);
}

TEST_CASE("block_means parallel matches serial bitwise") {
    rng::Counter gen(53);
    std::vector<double> v(10007);
    for (auto& x : v) x = gen.next_normal() * 3.0;
    for (std::size_t ell : {1u, 7u, 61u, 101u}) {
        const auto part = explicit_partition(v.size(), ell);
        CHECK(block_means(v, part) == block_means_serial(v, part));
    }
}
