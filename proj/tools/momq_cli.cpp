#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "momq/experiments.hpp"

namespace {

using namespace momq;
using nlohmann::json;

Dataset read_csv_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
    Dataset data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Point p;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                p.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad number '" + cell + "' on line " +
                                            std::to_string(lineno));
            }
        }
        if (p.empty())
            throw std::invalid_argument("empty row on line " + std::to_string(lineno));
        if (!data.points.empty() && p.size() != data.dim())
            throw std::invalid_argument("inconsistent dimension on line " +
                                        std::to_string(lineno));
        data.points.push_back(std::move(p));
    }
    if (data.points.empty()) throw std::invalid_argument("input file has no points");
    data.generator_tag = "csv:" + path;
    return data;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(static_cast<std::size_t>(std::stoull(cell)));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

std::string point_str(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ',';
        s += format_full(p[i]);
    }
    return s;
}

int cmd_quantize(const std::string& input, std::size_t k, const std::string& estimator,
                 double delta, double magnitude, double pmin, int restarts,
                 std::uint64_t seed, const std::string& format) {
    EstimatorConfig config;
    config.k = k;
    config.delta = delta;
    config.search.restarts = restarts;
    if (estimator == "erm") {
        config.kind = EstimatorKind::erm;
    } else if (estimator == "mom-m") {
        if (magnitude <= 0.0) {
            std::cerr << "momq: mom-m requires --magnitude (the prior bound M on the norms "
                         "of optimal centers)\n";
            return 1;
        }
        config.kind = EstimatorKind::mom_magnitude;
        config.magnitude = magnitude;
    } else if (estimator == "mom-pmin") {
        if (pmin <= 0.0) {
            std::cerr << "momq: mom-pmin requires --pmin (the mass p_min of the lightest "
                         "optimal Voronoi cell)\n";
            return 1;
        }
        config.kind = EstimatorKind::mom_pmin;
        config.pmin = pmin;
    } else if (estimator == "mom-free") {
        config.kind = EstimatorKind::mom_free;
    } else {
        std::cerr << "momq: unknown estimator '" << estimator
                  << "' (expected erm, mom-m, mom-pmin or mom-free)\n";
        return 1;
    }

    const Dataset data = read_csv_points(input);
    if (config.kind == EstimatorKind::erm && data.dim() == 1) config.search.exact_1d = true;
    const FitResult result = fit(data, config, seed);

    if (format == "json") {
        json obj;
        json centers = json::array();
        for (const auto& c : result.quantizer.centers) centers.push_back(c);
        obj["centers"] = centers;
        obj["criterion_value"] = result.criterion_value;
        obj["block_count"] = result.block_count;
        obj["feasible"] = result.feasible;
        obj["candidates_evaluated"] = result.candidates_evaluated;
        obj["diagnostics"] = result.diagnostics;
        std::cout << obj.dump(2) << "\n";
    } else {
        for (const auto& c : result.quantizer.centers) std::cout << point_str(c) << "\n";
        std::cout << "criterion_value," << format_full(result.criterion_value) << "\n";
        std::cout << "block_count," << result.block_count << "\n";
        std::cout << "feasible," << (result.feasible ? 1 : 0) << "\n";
        for (const auto& [key, value] : result.diagnostics)
            std::cout << key << "," << format_full(value) << "\n";
    }
    if (!result.feasible) {
        std::cerr << "momq: no candidate satisfied the p_min/2 cell-mass constraint; "
                     "reporting the best unconstrained fit\n";
        return 2;
    }
    return 0;
}

int cmd_oracle(const std::string& dist, std::size_t k, std::size_t builtin_n,
               double builtin_p, double builtin_delta, const std::string& format) {
    DiscreteDistribution d;
    if (dist == "example-1-1") {
        d = example_1_1(builtin_n);
    } else if (dist == "lower-bound") {
        d = lower_bound_family(builtin_p, builtin_delta);
    } else {
        std::ifstream in(dist);
        if (!in) throw std::invalid_argument("cannot open spec file '" + dist + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const SamplerSpec spec = load_spec_json(ss.str());
        if (spec.family != SamplerSpec::Family::discrete)
            throw std::invalid_argument("exact oracle needs a discrete spec");
        d = spec.discrete;
    }
    const OracleReport report = optimal_quantizer_1d(d, k);

    if (format == "json") {
        json obj;
        json centers = json::array();
        for (const auto& c : report.optimal.centers) centers.push_back(c);
        obj["centers"] = centers;
        obj["distortion"] = report.distortion;
        obj["pmin"] = report.pmin;
        obj["magnitude_M"] = report.magnitude_M;
        obj["delta_gap"] = report.delta_gap;
        obj["radius_R"] = report.radius_R;
        std::cout << obj.dump(2) << "\n";
    } else {
        for (const auto& c : report.optimal.centers) std::cout << point_str(c) << "\n";
        std::cout << "distortion," << format_full(report.distortion) << "\n";
        std::cout << "pmin," << format_full(report.pmin) << "\n";
        std::cout << "magnitude_M," << format_full(report.magnitude_M) << "\n";
        std::cout << "delta_gap," << format_full(report.delta_gap) << "\n";
        std::cout << "radius_R," << format_full(report.radius_R) << "\n";
    }
    return 0;
}

void default_grids(ExperimentConfig& cfg) {
    if (!cfg.n_grid.empty()) return;
    if (cfg.name == "example11") cfg.n_grid = {50, 1000};
    else if (cfg.name == "lowerbound") cfg.n_grid = {1000};
    else if (cfg.name == "scaling") cfg.n_grid = {500, 1000, 2000, 4000, 8000};
    else if (cfg.name == "momscalar") cfg.n_grid = {8000};
    else if (cfg.name == "uniformqom") cfg.n_grid = {500, 1000, 2000};
}

int cmd_experiment(ExperimentConfig cfg, const std::string& outdir,
                   const std::string& format) {
    if (cfg.trials < 1) {
        std::cerr << "momq: --trials must be at least 1\n";
        return 1;
    }
    default_grids(cfg);
    if (cfg.pmin_grid.empty()) {
        if (cfg.name == "lowerbound") cfg.pmin_grid = {0.05};
        else if (cfg.name == "scaling") cfg.pmin_grid = {0.025, 0.05, 0.1};
    }
    const ExperimentReport report = run_named(cfg);
    emit(report, outdir, cfg.label, format);
    std::cout << table_to_csv(report.summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"median-of-means robust k-means quantization"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string outdir = "out";
    std::string format = "csv";
    app.add_option("--seed", seed, "global RNG seed");
    app.add_option("--out", outdir, "output directory for experiment reports");
    app.add_option("--format", format, "output format (csv or json)")
        ->check(CLI::IsMember({"csv", "json"}));

    // quantize
    auto* quantize = app.add_subcommand("quantize", "fit a quantizer to a CSV of points");
    quantize->fallthrough();
    std::string q_input, q_estimator;
    std::size_t q_k = 1;
    double q_delta = 0.05, q_magnitude = 0.0, q_pmin = 0.0;
    int q_restarts = 5;
    quantize->add_option("--input", q_input, "headerless CSV, one point per row")->required();
    quantize->add_option("--k", q_k, "maximum number of centers")->required();
    quantize->add_option("--estimator", q_estimator, "erm | mom-m | mom-pmin | mom-free")
        ->required();
    quantize->add_option("--delta", q_delta, "confidence level");
    quantize->add_option("--magnitude", q_magnitude, "bound M for mom-m");
    quantize->add_option("--pmin", q_pmin, "p_min for mom-pmin");
    quantize->add_option("--restarts", q_restarts, "search restarts");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact 1-D optimal quantizer report");
    oracle->fallthrough();
    std::string o_dist;
    std::size_t o_k = 1, o_n = 4;
    double o_p = 0.2, o_family_delta = 0.0;
    oracle->add_option("--dist", o_dist,
                       "spec.json path, or builtin 'example-1-1' / 'lower-bound'")
        ->required();
    oracle->add_option("--k", o_k, "number of centers")->required();
    oracle->add_option("--n", o_n, "n parameter of the example-1-1 builtin");
    oracle->add_option("--p", o_p, "p parameter of the lower-bound builtin");
    oracle->add_option("--family-delta", o_family_delta,
                       "delta parameter of the lower-bound builtin");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a named experiment");
    experiment->fallthrough();
    ExperimentConfig cfg;
    std::string e_ngrid, e_pmingrid;
    experiment->add_option("--name", cfg.name, "experiment name")->required();
    experiment->add_option("--trials", cfg.trials, "Monte-Carlo trials per grid cell");
    experiment->add_option("--delta", cfg.delta, "confidence level");
    experiment->add_option("--label", cfg.label, "output subdirectory label");
    experiment->add_option("--n-grid", e_ngrid, "comma-separated sample sizes");
    experiment->add_option("--pmin-grid", e_pmingrid, "comma-separated p_min values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (quantize->parsed())
            return cmd_quantize(q_input, q_k, q_estimator, q_delta, q_magnitude, q_pmin,
                                q_restarts, seed, format);
        if (oracle->parsed())
            return cmd_oracle(o_dist, o_k, o_n, o_p, o_family_delta, format);
        if (experiment->parsed()) {
            cfg.base_seed = seed;
            if (!e_ngrid.empty()) cfg.n_grid = parse_size_list(e_ngrid);
            if (!e_pmingrid.empty()) cfg.pmin_grid = parse_double_list(e_pmingrid);
            return cmd_experiment(cfg, outdir, format);
        }
    } catch (const std::exception& e) {
        std::cerr << "momq: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
