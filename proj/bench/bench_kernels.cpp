// Compares the OpenMP kernels against their serial reference
// implementations and verifies that results are bitwise identical.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "momq/blocks.hpp"
#include "momq/core.hpp"
#include "momq/distributions.hpp"

using namespace momq;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() /
           static_cast<double>(reps);
}

} // namespace

int main() {
    const std::size_t n = 200000;
    const std::size_t k = 16;
    const std::size_t d = 8;

    Point mean(d, 0.0), cov(d, 1.0);
    const SamplerSpec spec = SamplerSpec::from_gaussian(mean, cov);
    const Dataset data = sample(spec, n, 42);

    std::vector<Point> centers;
    for (std::size_t j = 0; j < k; ++j) {
        Point c(d);
        for (std::size_t t = 0; t < d; ++t)
            c[t] = std::cos(static_cast<double>(j * d + t));
        centers.push_back(std::move(c));
    }
    const Quantizer q = Quantizer::from(centers);

    std::printf("%-28s %12s %12s %8s %s\n", "kernel", "serial ms", "parallel ms",
                "speedup", "bitwise");

    {
        std::vector<double> a, b;
        const double ts = time_ms([&] { a = loss_values_serial(data, q); }, 5);
        const double tp = time_ms([&] { b = loss_values(data, q); }, 5);
        std::printf("%-28s %12.3f %12.3f %8.2f %s\n", "loss_values", ts, tp, ts / tp,
                    a == b ? "yes" : "NO");
    }
    {
        double a = 0, b = 0;
        const double ts = time_ms([&] { a = empirical_distortion_serial(data, q); }, 5);
        const double tp = time_ms([&] { b = empirical_distortion(data, q); }, 5);
        std::printf("%-28s %12.3f %12.3f %8.2f %s\n", "empirical_distortion", ts, tp,
                    ts / tp, a == b ? "yes" : "NO");
    }
    {
        const std::vector<double> values = loss_values(data, q);
        const BlockPartition part{n, 101, n / 101};
        std::vector<double> a, b;
        const double ts = time_ms([&] { a = block_means_serial(values, part); }, 50);
        const double tp = time_ms([&] { b = block_means(values, part); }, 50);
        std::printf("%-28s %12.3f %12.3f %8.2f %s\n", "block_means", ts, tp, ts / tp,
                    a == b ? "yes" : "NO");
    }
    return 0;
}
