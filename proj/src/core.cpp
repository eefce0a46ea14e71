#include "momq/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "momq/rng.hpp"

namespace momq {

Quantizer Quantizer::from(std::vector<Point> centers) {
    if (centers.empty())
        throw std::invalid_argument("quantizer needs at least one center");
    const std::size_t d = centers.front().size();
    for (const auto& c : centers) {
        if (c.size() != d)
            throw std::invalid_argument("quantizer centers have mixed dimensions");
        for (double v : c)
            if (!std::isfinite(v))
                throw std::invalid_argument("quantizer center has non-finite coordinate");
    }
    return Quantizer{std::move(centers), d};
}

double squared_norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double squared_distance(const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double dot(const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

namespace {

void check_dim(const Point& x, const Quantizer& a) {
    if (x.size() != a.dim)
        throw std::invalid_argument("point dimension does not match quantizer");
}

} // namespace

std::size_t voronoi_index(const Point& x, const Quantizer& a) {
    check_dim(x, a);
    std::size_t best = 0;
    double best_d = squared_distance(x, a.centers[0]);
    for (std::size_t j = 1; j < a.centers.size(); ++j) {
        const double d = squared_distance(x, a.centers[j]);
        if (d < best_d) { // strict: ties keep the smaller index
            best_d = d;
            best = j;
        }
    }
    return best;
}

double loss_l(const Point& x, const Quantizer& a) {
    check_dim(x, a);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : a.centers) {
        const double v = -2.0 * dot(x, c) + squared_norm(c);
        if (v < best) best = v;
    }
    return best;
}

std::vector<double> loss_values_serial(const Dataset& data, const Quantizer& a) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out[i] = loss_l(data.points[i], a);
    return out;
}

std::vector<double> loss_values(const Dataset& data, const Quantizer& a) {
    if (!data.points.empty()) check_dim(data.points.front(), a);
    std::vector<double> out(data.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = loss_l(data.points[static_cast<std::size_t>(i)], a);
    return out;
}

namespace {

double min_sq_dist(const Point& x, const Quantizer& a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : a.centers) {
        const double d = squared_distance(x, c);
        if (d < best) best = d;
    }
    return best;
}

} // namespace

double empirical_distortion_serial(const Dataset& data, const Quantizer& a) {
    if (data.points.empty())
        throw std::invalid_argument("empirical_distortion: empty dataset");
    check_dim(data.points.front(), a);
    std::vector<double> d(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        d[i] = min_sq_dist(data.points[i], a);
    double s = 0.0;
    for (double v : d) s += v; // fixed accumulation order
    return s / static_cast<double>(data.size());
}

double empirical_distortion(const Dataset& data, const Quantizer& a) {
    if (data.points.empty())
        throw std::invalid_argument("empirical_distortion: empty dataset");
    check_dim(data.points.front(), a);
    std::vector<double> d(data.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] = min_sq_dist(data.points[static_cast<std::size_t>(i)], a);
    double s = 0.0;
    for (double v : d) s += v; // same order as the serial path
    return s / static_cast<double>(data.size());
}

std::vector<double> empirical_cell_masses(const Dataset& data, const Quantizer& a) {
    if (data.points.empty())
        throw std::invalid_argument("empirical_cell_masses: empty dataset");
    std::vector<std::size_t> counts(a.size(), 0);
    for (const auto& p : data.points) ++counts[voronoi_index(p, a)];
    std::vector<double> masses(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        masses[j] = static_cast<double>(counts[j]) / static_cast<double>(data.size());
    return masses;
}

MomentSummary moment_summary(const Dataset& data) {
    if (data.points.empty())
        throw std::invalid_argument("moment_summary: empty dataset");
    const std::size_t d = data.dim();
    const double n = static_cast<double>(data.size());

    MomentSummary out;
    out.mean.assign(d, 0.0);
    for (const auto& p : data.points)
        for (std::size_t i = 0; i < d; ++i) out.mean[i] += p[i];
    for (std::size_t i = 0; i < d; ++i) out.mean[i] /= n;

    for (const auto& p : data.points) out.second_moment += squared_norm(p);
    out.second_moment /= n;

    // covariance (d <= 64 at desk scale, dense is fine)
    std::vector<double> cov(d * d, 0.0);
    for (const auto& p : data.points)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov[i * d + j] += (p[i] - out.mean[i]) * (p[j] - out.mean[j]);
    for (double& v : cov) v /= n;

    for (std::size_t i = 0; i < d; ++i) out.trace_cov += cov[i * d + i];

    if (out.trace_cov <= 0.0) {
        out.lambda_max = 0.0;
        return out;
    }

    // power iteration with a fixed-seed start vector
    rng::Counter gen(0x706f776572ULL);
    std::vector<double> v(d), w(d);
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = gen.next_double() + 0.5;
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    double lambda = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        for (std::size_t i = 0; i < d; ++i) {
            w[i] = 0.0;
            for (std::size_t j = 0; j < d; ++j) w[i] += cov[i * d + j] * v[j];
        }
        double wn = 0.0;
        for (double x : w) wn += x * x;
        wn = std::sqrt(wn);
        if (wn == 0.0) break;
        const double next = wn; // ||Cov v|| with unit v
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / wn;
        if (std::abs(next - lambda) <= 1e-9 * std::max(next, 1e-300)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    out.lambda_max = lambda;
    return out;
}

} // namespace momq
