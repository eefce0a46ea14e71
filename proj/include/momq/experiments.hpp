#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "momq/estimators.hpp"

namespace momq {

struct ExperimentConfig {
    std::string name;
    int trials = 100;
    std::vector<std::size_t> n_grid;
    std::vector<double> pmin_grid;
    double delta = 0.05;
    std::vector<EstimatorKind> kinds;
    std::uint64_t base_seed = 0;
    std::string label = "run"; // fixed output subdirectory, keeps reruns byte-identical
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
    std::string name;
    Table trials;
    Table summary;
    std::string config_json;
    std::string svg; // empty when the experiment has no plot
    // scalar results for programmatic checks (frequencies, slopes, ...)
    std::map<std::string, double> metrics;
};

// Example 1.1 reproduction: ERM with the exact 1-D oracle, frequency of
// excess distortion exactly 1 vs the closed form (1 - 1/N)^N.
ExperimentReport run_example_1_1(const ExperimentConfig& cfg);

// Five-point lower-bound construction: frequency of ERM excess >= delta/16
// with delta = 1/sqrt(8 N p), p = 4 p_min.
ExperimentReport run_lower_bound(const ExperimentConfig& cfg);

// Excess-distortion scaling of the pmin-constrained MOM estimator over an
// (N, p_min) grid; log-log regression of mean excess against N * p_min.
ExperimentReport run_scaling(const ExperimentConfig& cfg);

// Scalar MOM deviation bound vs the plain sample mean on gaussian and
// Pareto data.
ExperimentReport run_mom_scalar(const ExperimentConfig& cfg);

// Uniform QOM deviation over a fixed finite quantizer grid; quantile of the
// sup deviation per sample size.
ExperimentReport run_uniform_qom(const ExperimentConfig& cfg);

ExperimentReport run_named(const ExperimentConfig& cfg);
std::vector<std::string> experiment_names();

// Writes <outdir>/<name>/<label>/{trials,summary}.{csv|json} plus
// config.json and plot.svg. Byte-identical for identical reports.
void emit(const ExperimentReport& report, const std::string& outdir,
          const std::string& label, const std::string& format);

std::string format_full(double v); // 17 significant digits
std::string table_to_csv(const Table& t);

} // namespace momq
