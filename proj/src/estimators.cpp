#include "momq/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "momq/rng.hpp"

namespace momq {

BlockPolicy EstimatorConfig::block_policy() const {
    switch (kind) {
        case EstimatorKind::erm:
            throw std::logic_error("erm uses no block partition");
        case EstimatorKind::mom_magnitude:
            return BlockPolicy{PolicyKind::magnitude_m, delta, {}};
        case EstimatorKind::mom_pmin:
            return BlockPolicy{PolicyKind::pmin_constrained, delta, {}};
        case EstimatorKind::mom_free:
            return BlockPolicy{PolicyKind::parameter_free, delta, {}};
    }
    throw std::logic_error("unreachable estimator kind");
}

namespace {

double min_sq_dist(const Point& x, const std::vector<Point>& centers) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, squared_distance(x, c));
    return best;
}

std::vector<Point> seed_kpp(const Dataset& data, std::size_t k, rng::Counter& gen) {
    std::vector<Point> centers;
    centers.push_back(data.points[gen.next_u64() % data.size()]);
    std::vector<double> d2(data.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            d2[i] = min_sq_dist(data.points[i], centers);
            total += d2[i];
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = gen.next_u64() % data.size();
        } else {
            const double u = gen.next_double() * total;
            double acc = 0.0;
            pick = data.size() - 1;
            for (std::size_t i = 0; i < data.size(); ++i) {
                acc += d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(data.points[pick]);
    }
    return centers;
}

std::vector<Point> seed_random_points(const Dataset& data, std::size_t k, rng::Counter& gen) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates for k distinct indices
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + gen.next_u64() % (idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    std::vector<Point> centers;
    for (std::size_t i = 0; i < k; ++i) centers.push_back(data.points[idx[i]]);
    return centers;
}

std::vector<Point> seed_grid_1d(const Dataset& data, std::size_t k) {
    if (data.dim() != 1)
        throw std::invalid_argument("grid_1d seeding requires one-dimensional data");
    double lo = data.points.front()[0];
    double hi = lo;
    for (const auto& p : data.points) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    std::vector<Point> centers;
    for (std::size_t j = 0; j < k; ++j) {
        const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
        centers.push_back({lo + t * (hi - lo)});
    }
    return centers;
}

void project_to_ball(std::vector<Point>& centers, double radius) {
    for (auto& c : centers) {
        const double norm = std::sqrt(squared_norm(c));
        if (norm > radius) {
            const double scale = radius / norm;
            for (double& v : c) v *= scale;
        }
    }
}

struct Criterion {
    const Dataset& data;
    EstimatorKind kind;
    const BlockPartition* part; // null for erm

    double operator()(const Quantizer& a) const {
        if (kind == EstimatorKind::erm) return empirical_distortion(data, a);
        return mom_criterion(data, a, *part);
    }
};

// Lloyd-style alternation accepted only when the criterion does not
// increase; empty cells re-seed at the point with the largest current loss.
Quantizer refine(const Dataset& data, Quantizer a, const Criterion& crit, int iters,
                 double project_radius) {
    const std::size_t d = data.dim();
    double current = crit(a);
    for (int it = 0; it < iters; ++it) {
        std::vector<double> mass(a.size(), 0.0);
        std::vector<Point> sums(a.size(), Point(d, 0.0));
        for (const auto& p : data.points) {
            const std::size_t j = voronoi_index(p, a);
            mass[j] += 1.0;
            for (std::size_t t = 0; t < d; ++t) sums[j][t] += p[t];
        }
        std::vector<Point> next = a.centers;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (mass[j] > 0.0) {
                for (std::size_t t = 0; t < d; ++t) next[j][t] = sums[j][t] / mass[j];
            } else {
                // re-seed at the worst-covered point
                std::size_t worst = 0;
                double worst_d = -1.0;
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const double dist = min_sq_dist(data.points[i], a.centers);
                    if (dist > worst_d) {
                        worst_d = dist;
                        worst = i;
                    }
                }
                next[j] = data.points[worst];
            }
        }
        if (project_radius > 0.0) project_to_ball(next, project_radius);
        if (next == a.centers) break;
        Quantizer candidate{std::move(next), a.dim};
        const double value = crit(candidate);
        if (value <= current) {
            a = std::move(candidate);
            current = value;
        } else {
            break;
        }
    }
    return a;
}

Quantizer mom_mean_singleton(const Dataset& data, double delta, double project_radius) {
    const std::size_t d = data.dim();
    const std::size_t n = data.size();
    BlockPolicy policy{PolicyKind::scalar_mom, delta, {}};
    std::size_t ell = block_count(policy);
    if (ell > n) {
        ell = (n % 2 == 1) ? n : n - 1; // best feasible odd block count
        if (ell == 0) ell = 1;
    }
    const BlockPartition part{n, ell, n / ell};
    Point center(d);
    std::vector<double> column(n);
    for (std::size_t t = 0; t < d; ++t) {
        for (std::size_t i = 0; i < n; ++i) column[i] = data.points[i][t];
        center[t] = mom(column, part);
    }
    std::vector<Point> centers{std::move(center)};
    if (project_radius > 0.0) project_to_ball(centers, project_radius);
    return Quantizer::from(std::move(centers));
}

DiscreteDistribution empirical_distribution_1d(const Dataset& data) {
    std::vector<double> vals(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) vals[i] = data.points[i][0];
    std::sort(vals.begin(), vals.end());
    std::vector<Point> atoms;
    std::vector<double> weights;
    const double n = static_cast<double>(vals.size());
    std::size_t i = 0;
    while (i < vals.size()) {
        std::size_t j = i;
        while (j < vals.size() && vals[j] == vals[i]) ++j;
        atoms.push_back({vals[i]});
        weights.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    return DiscreteDistribution::from(std::move(atoms), std::move(weights));
}

FitResult finish(const Dataset& data, const Quantizer& chosen, double criterion,
                 std::size_t evaluated, bool feasible, std::size_t ell) {
    FitResult res;
    res.quantizer = chosen;
    res.criterion_value = criterion;
    res.candidates_evaluated = evaluated;
    res.feasible = feasible;
    res.block_count = ell;
    const std::vector<double> masses = empirical_cell_masses(data, chosen);
    double min_mass = 1.0;
    for (double m : masses) min_mass = std::min(min_mass, m);
    double max_norm = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& c : chosen.centers) {
        const double nrm = std::sqrt(squared_norm(c));
        max_norm = std::max(max_norm, nrm);
        min_norm = std::min(min_norm, nrm);
    }
    res.diagnostics["min_cell_mass"] = min_mass;
    res.diagnostics["max_center_norm"] = max_norm;
    res.diagnostics["min_center_norm"] = min_norm;
    return res;
}

} // namespace

Quantizer lloyd_mom_refine(const Dataset& data, Quantizer a, const BlockPartition& part,
                           int iters) {
    Criterion crit{data, EstimatorKind::mom_free, &part};
    return refine(data, std::move(a), crit, iters, 0.0);
}

FitResult fit(const Dataset& data, const EstimatorConfig& config, std::uint64_t seed) {
    if (data.size() < config.k)
        throw std::invalid_argument("fit needs at least k sample points");
    if (config.kind == EstimatorKind::mom_magnitude && !(config.magnitude > 0.0))
        throw std::invalid_argument("mom_magnitude requires the bound M > 0");
    if (config.kind == EstimatorKind::mom_pmin &&
        !(config.pmin > 0.0 && config.pmin < 1.0))
        throw std::invalid_argument("mom_pmin requires p_min in (0,1)");

    if (config.search.exact_1d) {
        if (config.kind != EstimatorKind::erm || data.dim() != 1)
            throw std::invalid_argument("exact_1d search requires d = 1 and the erm kind");
        const DiscreteDistribution emp = empirical_distribution_1d(data);
        const OracleReport report = optimal_quantizer_1d(emp, config.k);
        return finish(data, report.optimal, report.distortion, 1, true, 0);
    }

    BlockPartition part;
    std::size_t ell = 0;
    if (config.kind != EstimatorKind::erm) {
        part = make_partition(data.size(), config.block_policy());
        ell = part.ell;
    }
    const Criterion crit{data, config.kind,
                         config.kind == EstimatorKind::erm ? nullptr : &part};
    const double project_radius =
        config.kind == EstimatorKind::mom_magnitude ? config.magnitude : 0.0;

    const int restarts = std::max(config.search.restarts, 1);
    std::vector<Quantizer> candidates(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < restarts; ++r) {
        rng::Counter gen(rng::derive_seed(seed, 1, static_cast<std::uint64_t>(r)));
        std::vector<Point> init;
        switch (config.search.seeding) {
            case SearchStrategy::Seeding::kpp:
                init = seed_kpp(data, config.k, gen);
                break;
            case SearchStrategy::Seeding::random_points:
                init = seed_random_points(data, config.k, gen);
                break;
            case SearchStrategy::Seeding::grid_1d:
                init = seed_grid_1d(data, config.k);
                break;
        }
        if (project_radius > 0.0) project_to_ball(init, project_radius);
        candidates[static_cast<std::size_t>(r)] =
            refine(data, Quantizer::from(std::move(init)), crit, config.search.max_iters,
                   project_radius);
    }

    if (config.search.include_mom_mean_singleton)
        candidates.push_back(mom_mean_singleton(data, config.delta, project_radius));
    for (const auto& extra : config.search.extra_candidates) {
        Quantizer q = extra;
        if (project_radius > 0.0) project_to_ball(q.centers, project_radius);
        candidates.push_back(std::move(q));
    }

    // serial selection in candidate order, so ties are deterministic
    double best_value = std::numeric_limits<double>::infinity();
    double best_any_value = std::numeric_limits<double>::infinity();
    const Quantizer* best = nullptr;
    const Quantizer* best_any = nullptr;
    for (const auto& cand : candidates) {
        const double value = crit(cand);
        if (value < best_any_value) {
            best_any_value = value;
            best_any = &cand;
        }
        if (config.kind == EstimatorKind::mom_pmin) {
            const std::vector<double> masses = empirical_cell_masses(data, cand);
            const double min_mass = *std::min_element(masses.begin(), masses.end());
            if (min_mass < config.pmin / 2.0) continue;
        }
        if (value < best_value) {
            best_value = value;
            best = &cand;
        }
    }

    if (best == nullptr) {
        // no candidate passed the pmin constraint; flagged best-effort result
        FitResult res = finish(data, *best_any, best_any_value, candidates.size(), false, ell);
        return res;
    }
    return finish(data, *best, best_value, candidates.size(), true, ell);
}

double excess_distortion(const FitResult& fit_result, const DiscreteDistribution& truth,
                         std::size_t k, double* raw_out) {
    const OracleReport oracle = optimal_quantizer_1d(truth, k);
    const double raw = exact_distortion(truth, fit_result.quantizer) - oracle.distortion;
    if (raw_out != nullptr) *raw_out = raw;
    return std::max(raw, 0.0);
}

} // namespace momq
