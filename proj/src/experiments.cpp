#include "momq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "momq/rng.hpp"

namespace momq {

namespace {

using nlohmann::json;

const char* kind_name(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::erm: return "erm";
        case EstimatorKind::mom_magnitude: return "mom-m";
        case EstimatorKind::mom_pmin: return "mom-pmin";
        case EstimatorKind::mom_free: return "mom-free";
    }
    return "?";
}

std::string config_echo(const ExperimentConfig& cfg) {
    json obj;
    obj["name"] = cfg.name;
    obj["trials"] = cfg.trials;
    obj["n_grid"] = cfg.n_grid;
    obj["pmin_grid"] = cfg.pmin_grid;
    obj["delta"] = cfg.delta;
    std::vector<std::string> kinds;
    for (auto k : cfg.kinds) kinds.emplace_back(kind_name(k));
    obj["kinds"] = kinds;
    obj["base_seed"] = cfg.base_seed;
    obj["label"] = cfg.label;
    return obj.dump(2) + "\n";
}

void require_trials(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (cfg.n_grid.empty()) throw std::invalid_argument("n_grid must be nonempty");
}

struct Stats {
    double mean = 0.0, median = 0.0, q10 = 0.0, q90 = 0.0, se = 0.0;
};

double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - std::floor(pos);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// order-independent: statistics come from the sorted copy
Stats summarize(std::vector<double> values) {
    Stats s;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    var /= std::max(n - 1.0, 1.0);
    s.se = std::sqrt(var / n);
    s.median = sorted_quantile(values, 0.5);
    s.q10 = sorted_quantile(values, 0.1);
    s.q90 = sorted_quantile(values, 0.9);
    return s;
}

double binomial_se(double freq, int trials) {
    return std::sqrt(std::max(freq * (1.0 - freq), 0.0) / static_cast<double>(trials));
}

// stream ids keep per-experiment seed sequences disjoint
enum Stream : std::uint64_t {
    kStreamExample = 101,
    kStreamLowerBound = 102,
    kStreamScaling = 103,
    kStreamScalar = 104,
    kStreamQom = 105,
};

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t stream,
                         std::uint64_t cell, std::uint64_t trial) {
    return rng::derive_seed(cfg.base_seed, stream * 1000003ULL + cell, trial);
}

} // namespace

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

ExperimentReport run_example_1_1(const ExperimentConfig& cfg) {
    require_trials(cfg);
    ExperimentReport report;
    report.name = "example11";
    report.config_json = config_echo(cfg);
    report.trials.columns = {"experiment", "n", "trial", "seed", "excess", "heavy_count"};
    report.summary.columns = {"experiment", "n",     "trials",   "freq_excess_one",
                              "closed_form", "abs_diff", "cond_violations"};

    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const std::size_t n = cfg.n_grid[ni];
        const DiscreteDistribution truth = example_1_1(n);
        const SamplerSpec spec = SamplerSpec::from_discrete(truth);
        const double heavy_atom = std::sqrt(static_cast<double>(n));

        const int trials = cfg.trials;
        std::vector<double> excess(static_cast<std::size_t>(trials));
        std::vector<int> heavy(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t seed = trial_seed(cfg, kStreamExample, ni, static_cast<std::uint64_t>(t));
            const Dataset data = sample(spec, n, seed);
            int count = 0;
            for (const auto& p : data.points)
                if (p[0] == heavy_atom) ++count;
            EstimatorConfig ec;
            ec.kind = EstimatorKind::erm;
            ec.k = 2;
            ec.search.exact_1d = true;
            const FitResult fr = fit(data, ec, seed);
            excess[static_cast<std::size_t>(t)] = excess_distortion(fr, truth, 2);
            heavy[static_cast<std::size_t>(t)] = count;
        }

        int ones = 0, cond_viol = 0;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t seed = trial_seed(cfg, kStreamExample, ni, static_cast<std::uint64_t>(t));
            const double e = excess[static_cast<std::size_t>(t)];
            if (std::abs(e - 1.0) < 1e-9) ++ones;
            if (heavy[static_cast<std::size_t>(t)] >= 2 && e > 1e-12) ++cond_viol;
            report.trials.rows.push_back({"example11", std::to_string(n), std::to_string(t),
                                          std::to_string(seed), format_full(e),
                                          std::to_string(heavy[static_cast<std::size_t>(t)])});
        }
        const double freq = static_cast<double>(ones) / static_cast<double>(trials);
        const double closed = std::pow(1.0 - 1.0 / static_cast<double>(n),
                                       static_cast<double>(n));
        report.summary.rows.push_back({"example11", std::to_string(n), std::to_string(trials),
                                       format_full(freq), format_full(closed),
                                       format_full(std::abs(freq - closed)),
                                       std::to_string(cond_viol)});
        const std::string key = "n=" + std::to_string(n);
        report.metrics["freq_excess_one_" + key] = freq;
        report.metrics["closed_form_" + key] = closed;
        report.metrics["cond_violations_" + key] = cond_viol;
    }
    return report;
}

ExperimentReport run_lower_bound(const ExperimentConfig& cfg) {
    require_trials(cfg);
    if (cfg.pmin_grid.empty())
        throw std::invalid_argument("lowerbound needs a nonempty pmin grid");
    ExperimentReport report;
    report.name = "lowerbound";
    report.config_json = config_echo(cfg);
    report.trials.columns = {"experiment", "n", "pmin", "trial", "seed", "excess", "crossed"};
    report.summary.columns = {"experiment", "n",      "pmin",      "delta", "dstar",
                              "threshold",  "trials", "freq_crossed", "mc_se"};

    std::uint64_t cell = 0;
    for (std::size_t n : cfg.n_grid) {
        for (double pmin : cfg.pmin_grid) {
            const double p = 4.0 * pmin;
            if (!(static_cast<double>(n) * pmin > 0.125))
                throw std::invalid_argument("lowerbound needs N * p_min > 1/8");
            const double delta = 1.0 / std::sqrt(8.0 * static_cast<double>(n) * p);
            const DiscreteDistribution truth = lower_bound_family(p, delta);
            const SamplerSpec spec = SamplerSpec::from_discrete(truth);
            const OracleReport oracle = optimal_quantizer_1d(truth, 4);
            const double threshold = delta / 16.0;

            const int trials = cfg.trials;
            std::vector<double> excess(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t seed = trial_seed(cfg, kStreamLowerBound, cell,
                                                      static_cast<std::uint64_t>(t));
                const Dataset data = sample(spec, n, seed);
                EstimatorConfig ec;
                ec.kind = EstimatorKind::erm;
                ec.k = 4;
                ec.search.exact_1d = true;
                const FitResult fr = fit(data, ec, seed);
                excess[static_cast<std::size_t>(t)] = excess_distortion(fr, truth, 4);
            }

            int crossed = 0;
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t seed = trial_seed(cfg, kStreamLowerBound, cell,
                                                      static_cast<std::uint64_t>(t));
                const double e = excess[static_cast<std::size_t>(t)];
                const bool hit = e >= threshold - 1e-12;
                if (hit) ++crossed;
                report.trials.rows.push_back({"lowerbound", std::to_string(n), format_full(pmin),
                                              std::to_string(t), std::to_string(seed),
                                              format_full(e), hit ? "1" : "0"});
            }
            const double freq = static_cast<double>(crossed) / static_cast<double>(trials);
            report.summary.rows.push_back(
                {"lowerbound", std::to_string(n), format_full(pmin), format_full(delta),
                 format_full(oracle.distortion), format_full(threshold), std::to_string(trials),
                 format_full(freq), format_full(binomial_se(freq, trials))});
            const std::string key = "n=" + std::to_string(n) + ",pmin=" + format_full(pmin);
            report.metrics["freq_crossed_" + key] = freq;
            report.metrics["dstar_" + key] = oracle.distortion;
            report.metrics["delta_" + key] = delta;
            ++cell;
        }
    }
    return report;
}

namespace {

std::string scaling_svg(const std::vector<double>& pmins,
                        const std::map<std::pair<double, std::size_t>, double>& cells) {
    // log-log line plot, one polyline per pmin
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [key, v] : cells) {
        if (v <= 0.0) continue;
        const double x = std::log10(key.first * static_cast<double>(key.second));
        const double y = std::log10(v);
        xmin = std::min(xmin, x); xmax = std::max(xmax, x);
        ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
    if (xmax <= xmin) { xmax = xmin + 1.0; }
    if (ymax <= ymin) { ymax = ymin + 1.0; }
    const double w = 640.0, h = 480.0, pad = 60.0;
    auto px = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
    auto py = [&](double y) { return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"470\" text-anchor=\"middle\">log10(N * pmin)</text>\n";
    svg += "<text x=\"15\" y=\"240\" transform=\"rotate(-90 15 240)\" text-anchor=\"middle\">log10(mean excess)</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::size_t ci = 0;
    for (double pmin : pmins) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [key, v] : cells) {
            if (key.first != pmin || v <= 0.0) continue;
            pts.emplace_back(std::log10(pmin * static_cast<double>(key.second)), std::log10(v));
        }
        std::sort(pts.begin(), pts.end());
        if (pts.empty()) continue;
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += colors[ci % 5];
        svg += "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : pts) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
            svg += buf;
        }
        svg += "\"/>\n";
        ++ci;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

ExperimentReport run_scaling(const ExperimentConfig& cfg) {
    require_trials(cfg);
    if (cfg.pmin_grid.empty())
        throw std::invalid_argument("scaling needs a nonempty pmin grid");
    ExperimentReport report;
    report.name = "scaling";
    report.config_json = config_echo(cfg);
    report.trials.columns = {"experiment", "n", "pmin", "kind", "trial",
                             "seed",       "excess", "criterion", "feasible"};
    report.summary.columns = {"experiment",  "n",   "pmin",        "kind", "trials",
                              "mean_excess", "median_excess", "q10", "q90", "mc_se"};

    const double family_delta = 0.25;
    std::vector<EstimatorKind> kinds = cfg.kinds;
    if (kinds.empty()) kinds.push_back(EstimatorKind::mom_pmin);

    std::map<std::pair<double, std::size_t>, double> mean_cells; // first kind only
    std::uint64_t cell = 0;
    for (std::size_t n : cfg.n_grid) {
        for (double pmin : cfg.pmin_grid) {
            const double p = 4.0 * pmin;
            const DiscreteDistribution truth = lower_bound_family(p, family_delta);
            const SamplerSpec spec = SamplerSpec::from_discrete(truth);

            for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
                const EstimatorKind kind = kinds[ki];
                const int trials = cfg.trials;
                std::vector<double> excess(static_cast<std::size_t>(trials));
                std::vector<double> crit(static_cast<std::size_t>(trials));
                std::vector<int> feas(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
                for (int t = 0; t < trials; ++t) {
                    const std::uint64_t seed = trial_seed(cfg, kStreamScaling,
                                                          cell * 16 + ki,
                                                          static_cast<std::uint64_t>(t));
                    const Dataset data = sample(spec, n, seed);
                    EstimatorConfig ec;
                    ec.kind = kind;
                    ec.k = 4;
                    ec.delta = cfg.delta;
                    ec.pmin = pmin;
                    if (kind == EstimatorKind::mom_magnitude)
                        ec.magnitude = std::sqrt(second_moment(truth) / pmin);
                    ec.search.restarts = 5;
                    ec.search.max_iters = 30;
                    if (kind == EstimatorKind::erm) ec.search.exact_1d = true;
                    const FitResult fr = fit(data, ec, seed);
                    excess[static_cast<std::size_t>(t)] = excess_distortion(fr, truth, 4);
                    crit[static_cast<std::size_t>(t)] = fr.criterion_value;
                    feas[static_cast<std::size_t>(t)] = fr.feasible ? 1 : 0;
                }
                for (int t = 0; t < trials; ++t) {
                    const std::uint64_t seed = trial_seed(cfg, kStreamScaling,
                                                          cell * 16 + ki,
                                                          static_cast<std::uint64_t>(t));
                    report.trials.rows.push_back(
                        {"scaling", std::to_string(n), format_full(pmin), kind_name(kind),
                         std::to_string(t), std::to_string(seed),
                         format_full(excess[static_cast<std::size_t>(t)]),
                         format_full(crit[static_cast<std::size_t>(t)]),
                         feas[static_cast<std::size_t>(t)] ? "1" : "0"});
                }
                const Stats st = summarize(excess);
                report.summary.rows.push_back(
                    {"scaling", std::to_string(n), format_full(pmin), kind_name(kind),
                     std::to_string(trials), format_full(st.mean), format_full(st.median),
                     format_full(st.q10), format_full(st.q90), format_full(st.se)});
                if (ki == 0) mean_cells[{pmin, n}] = st.mean;
            }
            ++cell;
        }
    }

    // log-log regression of mean excess against N * pmin (first kind)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& [key, v] : mean_cells) {
        if (v <= 0.0) continue;
        const double x = std::log(key.first * static_cast<double>(key.second));
        const double y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    double slope = 0.0, intercept = 0.0;
    if (m >= 2) {
        const double denom = static_cast<double>(m) * sxx - sx * sx;
        slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
        intercept = (sy - slope * sx) / static_cast<double>(m);
    }
    report.metrics["slope"] = slope;
    report.metrics["intercept"] = intercept;
    report.svg = scaling_svg(cfg.pmin_grid, mean_cells);
    return report;
}

ExperimentReport run_mom_scalar(const ExperimentConfig& cfg) {
    require_trials(cfg);
    ExperimentReport report;
    report.name = "momscalar";
    report.config_json = config_echo(cfg);
    report.trials.columns = {"experiment", "n", "dist", "trial", "seed",
                             "mom_dev",    "mean_dev", "bound"};
    report.summary.columns = {"experiment", "n", "dist", "trials", "bound",
                              "freq_mom_ok", "freq_mean_ok", "mc_se_mom", "mc_se_mean"};

    struct Family {
        std::string tag;
        SamplerSpec spec;
        double mu;
        double sigma;
    };
    std::vector<Family> families;
    families.push_back({"gaussian", SamplerSpec::from_gaussian({0.0}, {1.0}), 0.0, 1.0});
    for (double tail : {2.2, 3.0}) {
        SamplerSpec spec = SamplerSpec::from_pareto(tail, 0.0, 1.0);
        char tag[32];
        std::snprintf(tag, sizeof(tag), "pareto(%.1f)", tail);
        families.push_back({tag, spec, spec.pareto.mean(), std::sqrt(spec.pareto.variance())});
    }

    std::uint64_t cell = 0;
    for (std::size_t n : cfg.n_grid) {
        for (const Family& fam : families) {
            const double bound =
                fam.sigma * std::sqrt(32.0 * std::log(1.0 / cfg.delta) / static_cast<double>(n));
            const int trials = cfg.trials;
            std::vector<double> mom_dev(static_cast<std::size_t>(trials));
            std::vector<double> mean_dev(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t seed = trial_seed(cfg, kStreamScalar, cell,
                                                      static_cast<std::uint64_t>(t));
                const Dataset data = sample(fam.spec, n, seed);
                std::vector<double> values(n);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    values[i] = data.points[i][0];
                    s += values[i];
                }
                mom_dev[static_cast<std::size_t>(t)] =
                    std::abs(mom_mean_estimate(values, cfg.delta) - fam.mu);
                mean_dev[static_cast<std::size_t>(t)] =
                    std::abs(s / static_cast<double>(n) - fam.mu);
            }
            int mom_ok = 0, mean_ok = 0;
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t seed = trial_seed(cfg, kStreamScalar, cell,
                                                      static_cast<std::uint64_t>(t));
                if (mom_dev[static_cast<std::size_t>(t)] <= bound) ++mom_ok;
                if (mean_dev[static_cast<std::size_t>(t)] <= bound) ++mean_ok;
                report.trials.rows.push_back({"momscalar", std::to_string(n), fam.tag,
                                              std::to_string(t), std::to_string(seed),
                                              format_full(mom_dev[static_cast<std::size_t>(t)]),
                                              format_full(mean_dev[static_cast<std::size_t>(t)]),
                                              format_full(bound)});
            }
            const double fm = static_cast<double>(mom_ok) / trials;
            const double fs = static_cast<double>(mean_ok) / trials;
            report.summary.rows.push_back({"momscalar", std::to_string(n), fam.tag,
                                           std::to_string(trials), format_full(bound),
                                           format_full(fm), format_full(fs),
                                           format_full(binomial_se(fm, trials)),
                                           format_full(binomial_se(fs, trials))});
            const std::string key = fam.tag + "_n=" + std::to_string(n);
            report.metrics["freq_mom_ok_" + key] = fm;
            report.metrics["freq_mean_ok_" + key] = fs;
            ++cell;
        }
    }
    return report;
}

ExperimentReport run_uniform_qom(const ExperimentConfig& cfg) {
    require_trials(cfg);
    ExperimentReport report;
    report.name = "uniformqom";
    report.config_json = config_echo(cfg);
    report.trials.columns = {"experiment", "n", "trial", "seed", "sup_dev"};
    report.summary.columns = {"experiment", "n", "alpha", "ell", "quantile_level",
                              "sup_dev_quantile", "se"};

    const double alpha = 0.25;
    const std::size_t ell = 41; // ell*alpha = 10.25, non-integer
    const double quantile_level = 1.0 - std::exp(-alpha * alpha * static_cast<double>(ell) / 2.0);

    const DiscreteDistribution truth = lower_bound_family(0.2, 0.25);
    const OracleReport oracle = optimal_quantizer_1d(truth, 4);
    const double ex2 = second_moment(truth);
    const double m_bar = 4.0 * std::sqrt(2.0 * ex2);
    const double big_m = 10.0 * std::sqrt(ex2 / oracle.pmin);

    // fixed grid of quantizers in A^k_{M, m_bar}
    const std::size_t grid_size = 200;
    std::vector<Quantizer> grid;
    std::vector<double> exact_mean_loss(grid_size);
    {
        rng::Counter gen(rng::derive_seed(cfg.base_seed, kStreamQom, 0));
        for (std::size_t g = 0; g < grid_size; ++g) {
            std::vector<Point> centers;
            centers.push_back({(2.0 * gen.next_double() - 1.0) * m_bar});
            for (int j = 0; j < 3; ++j)
                centers.push_back({(2.0 * gen.next_double() - 1.0) * big_m});
            grid.push_back(Quantizer::from(std::move(centers)));
        }
        for (std::size_t g = 0; g < grid_size; ++g) {
            double e = 0.0;
            for (std::size_t i = 0; i < truth.atoms.size(); ++i)
                e += truth.weights[i] * loss_l(truth.atoms[i], grid[g]);
            exact_mean_loss[g] = e;
        }
    }

    const SamplerSpec spec = SamplerSpec::from_discrete(truth);
    double prev_quantile = std::numeric_limits<double>::infinity();
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const std::size_t n = cfg.n_grid[ni];
        if (n < ell)
            throw std::invalid_argument("uniformqom needs n >= 41");
        const BlockPartition part{n, ell, n / ell};
        const int trials = cfg.trials;
        std::vector<double> sup_dev(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t seed = trial_seed(cfg, kStreamQom, ni + 1,
                                                  static_cast<std::uint64_t>(t));
            const Dataset data = sample(spec, n, seed);
            double sup = -std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < grid_size; ++g) {
                const std::vector<double> losses = loss_values_serial(data, grid[g]);
                const double q = qom(losses, part, QuantileLevel{alpha});
                sup = std::max(sup, exact_mean_loss[g] - q);
            }
            sup_dev[static_cast<std::size_t>(t)] = sup;
        }
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t seed = trial_seed(cfg, kStreamQom, ni + 1,
                                                  static_cast<std::uint64_t>(t));
            report.trials.rows.push_back({"uniformqom", std::to_string(n), std::to_string(t),
                                          std::to_string(seed),
                                          format_full(sup_dev[static_cast<std::size_t>(t)])});
        }
        std::vector<double> sorted = sup_dev;
        std::sort(sorted.begin(), sorted.end());
        const double q = sorted_quantile(sorted, quantile_level);
        // order-statistic bracket as a standard-error proxy
        const double half_width = std::sqrt(quantile_level * (1.0 - quantile_level) /
                                            static_cast<double>(trials));
        const double lo = sorted_quantile(sorted, std::max(quantile_level - half_width, 0.0));
        const double hi = sorted_quantile(sorted, std::min(quantile_level + half_width, 1.0));
        const double se = (hi - lo) / 2.0;
        report.summary.rows.push_back({"uniformqom", std::to_string(n), format_full(alpha),
                                       std::to_string(ell), format_full(quantile_level),
                                       format_full(q), format_full(se)});
        const std::string key = "n=" + std::to_string(n);
        report.metrics["sup_dev_quantile_" + key] = q;
        report.metrics["sup_dev_quantile_se_" + key] = se;
        prev_quantile = q;
    }
    (void)prev_quantile;
    return report;
}

std::vector<std::string> experiment_names() {
    return {"example11", "lowerbound", "scaling", "momscalar", "uniformqom"};
}

ExperimentReport run_named(const ExperimentConfig& cfg) {
    if (cfg.name == "example11") return run_example_1_1(cfg);
    if (cfg.name == "lowerbound") return run_lower_bound(cfg);
    if (cfg.name == "scaling") return run_scaling(cfg);
    if (cfg.name == "momscalar") return run_mom_scalar(cfg);
    if (cfg.name == "uniformqom") return run_uniform_qom(cfg);
    std::string names;
    for (const auto& s : experiment_names()) names += " " + s;
    throw std::invalid_argument("unknown experiment '" + cfg.name + "'; valid names:" + names);
}

namespace {

std::string table_to_json(const Table& t) {
    json arr = json::array();
    for (const auto& row : t.rows) {
        json obj;
        for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

} // namespace

void emit(const ExperimentReport& report, const std::string& outdir,
          const std::string& label, const std::string& format) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(outdir) / report.name / label;
    fs::create_directories(dir);
    if (format == "json") {
        write_file(dir / "trials.json", table_to_json(report.trials));
        write_file(dir / "summary.json", table_to_json(report.summary));
    } else if (format == "csv") {
        write_file(dir / "trials.csv", table_to_csv(report.trials));
        write_file(dir / "summary.csv", table_to_csv(report.summary));
    } else {
        throw std::invalid_argument("unknown format '" + format + "' (expected csv or json)");
    }
    write_file(dir / "config.json", report.config_json);
    if (!report.svg.empty()) write_file(dir / "plot.svg", report.svg);
    if (report.metrics.count("slope")) {
        Table reg;
        reg.columns = {"slope", "intercept"};
        reg.rows.push_back({format_full(report.metrics.at("slope")),
                            format_full(report.metrics.at("intercept"))});
        write_file(dir / "regression.csv", table_to_csv(reg));
    }
}

} // namespace momq
