// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the process exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "momq/experiments.hpp"
#include "momq/rng.hpp"

using namespace momq;

namespace {

namespace fs = std::filesystem;

int failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", index, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double metric(const ExperimentReport& r, const std::string& key) {
    return r.metrics.at(key);
}

double binom_se(double p, int n) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// ---- criterion 1: block-count arithmetic --------------------------------

void criterion_block_counts() {
    const auto clog = [](double x) { return std::max(std::log(x), 1.0); };
    bool ok = true;
    std::string detail;
    for (double delta : {0.5, 0.1, 0.05, 0.01}) {
        const std::size_t want_m =
            8 * static_cast<std::size_t>(std::ceil(clog(2.0 / delta))) + 1;
        const std::size_t want_p =
            12 * static_cast<std::size_t>(std::ceil(clog(6.0 / delta))) + 1;
        const std::size_t want_f =
            32 * static_cast<std::size_t>(std::ceil(clog(4.0 / delta))) + 1;
        const std::size_t got_m = block_count({PolicyKind::magnitude_m, delta, {}});
        const std::size_t got_p = block_count({PolicyKind::pmin_constrained, delta, {}});
        const std::size_t got_f = block_count({PolicyKind::parameter_free, delta, {}});
        if (got_m != want_m || got_p != want_p || got_f != want_f) {
            ok = false;
            detail = "delta=" + fmt(delta);
        }
    }
    report(1, "block-count arithmetic", ok, detail);
}

// ---- criterion 2: scalar MOM sub-Gaussian bound -------------------------

void criterion_scalar_mom() {
    ExperimentConfig cfg;
    cfg.name = "momscalar";
    cfg.trials = 2000;
    cfg.n_grid = {8000};
    cfg.delta = 0.01;
    cfg.base_seed = 2026;
    const ExperimentReport r = run_mom_scalar(cfg);

    bool ok = true;
    std::string detail;
    for (const char* tag : {"gaussian", "pareto(2.2)", "pareto(3.0)"}) {
        const double fail_freq =
            1.0 - metric(r, std::string("freq_mom_ok_") + tag + "_n=8000");
        const double limit = cfg.delta + 3.0 * binom_se(cfg.delta, cfg.trials);
        if (fail_freq > limit) ok = false;
        detail += std::string(tag) + " fail=" + fmt(fail_freq) + " ";
    }
    const double mom_fail = 1.0 - metric(r, "freq_mom_ok_pareto(2.2)_n=8000");
    const double mean_fail = 1.0 - metric(r, "freq_mean_ok_pareto(2.2)_n=8000");
    if (!(mean_fail > mom_fail)) ok = false;
    detail += "pareto(2.2) mean fail=" + fmt(mean_fail);
    report(2, "scalar MOM deviation bound", ok, detail);
}

// ---- criterion 3: two-atom example reproduction -------------------------

void criterion_example_1_1() {
    ExperimentConfig cfg;
    cfg.name = "example11";
    cfg.trials = 10000;
    cfg.n_grid = {50, 1000};
    cfg.base_seed = 31;
    const ExperimentReport r = run_example_1_1(cfg);

    bool ok = true;
    std::string detail;
    for (std::size_t n : cfg.n_grid) {
        const std::string key = "n=" + std::to_string(n);
        const double freq = metric(r, "freq_excess_one_" + key);
        const double closed = metric(r, "closed_form_" + key);
        const double viol = metric(r, "cond_violations_" + key);
        if (std::fabs(freq - closed) > 0.015 || viol != 0.0) ok = false;
        detail += key + " freq=" + fmt(freq) + " closed=" + fmt(closed) + " ";
    }
    report(3, "two-atom example frequencies", ok, detail);
}

// ---- criterion 4: five-point lower-bound construction -------------------

void criterion_lower_bound() {
    const double pmin = 0.05;
    const std::size_t n = 1000;
    const double p = 4.0 * pmin;
    const double delta = 1.0 / std::sqrt(8.0 * static_cast<double>(n) * p);
    const DiscreteDistribution truth = lower_bound_family(p, delta);
    const OracleReport oracle = optimal_quantizer_1d(truth, 4);

    bool ok = true;
    std::string detail;
    if (std::fabs(oracle.distortion - (1.0 - delta) / 32.0) > 1e-12) {
        ok = false;
        detail += "D(A*)=" + fmt(oracle.distortion) + " ";
    }

    // mirror image of the optimum: the positive pair merged instead
    const double r = 1.0 / std::sqrt(p);
    FitResult mirrored;
    mirrored.quantizer = Quantizer::from({{-r}, {-0.5 * r}, {0.0}, {0.75 * r}});
    const double mirror_excess = excess_distortion(mirrored, truth, 4);
    if (std::fabs(mirror_excess - delta / 16.0) > 1e-12) {
        ok = false;
        detail += "mirror excess=" + fmt(mirror_excess) + " ";
    }

    ExperimentConfig cfg;
    cfg.name = "lowerbound";
    cfg.trials = 5000;
    cfg.n_grid = {n};
    cfg.pmin_grid = {pmin};
    cfg.base_seed = 47;
    const ExperimentReport rep = run_lower_bound(cfg);
    const double freq =
        metric(rep, "freq_crossed_n=1000,pmin=" + format_full(pmin));
    if (freq < 0.15) ok = false;
    detail += "crossing freq=" + fmt(freq);
    report(4, "lower-bound construction", ok, detail);
}

// ---- criterion 5: excess-distortion scaling exponent --------------------

void criterion_scaling() {
    ExperimentConfig cfg;
    cfg.name = "scaling";
    cfg.trials = 400;
    cfg.n_grid = {500, 1000, 2000, 4000, 8000};
    cfg.pmin_grid = {0.025, 0.05, 0.1};
    cfg.delta = 0.05;
    cfg.base_seed = 59;
    const ExperimentReport r = run_scaling(cfg);
    const double slope = metric(r, "slope");
    const bool ok = slope >= -0.70 && slope <= -0.30;
    report(5, "scaling exponent", ok, "slope=" + fmt(slope));
}

// ---- criterion 6: exact 1-D oracle properties ---------------------------

double brute_force_distortion(const DiscreteDistribution& dist, std::size_t k) {
    std::vector<std::pair<double, double>> aw;
    for (std::size_t i = 0; i < dist.atoms.size(); ++i)
        aw.emplace_back(dist.atoms[i][0], dist.weights[i]);
    std::sort(aw.begin(), aw.end());
    const std::size_t s = aw.size();

    const auto cell_cost = [&](std::size_t i, std::size_t j) {
        double W = 0.0, S = 0.0;
        for (std::size_t t = i; t <= j; ++t) {
            W += aw[t].second;
            S += aw[t].second * aw[t].first;
        }
        const double c = S / W;
        double sse = 0.0;
        for (std::size_t t = i; t <= j; ++t)
            sse += aw[t].second * (aw[t].first - c) * (aw[t].first - c);
        return sse;
    };

    double best = std::numeric_limits<double>::infinity();
    const auto recurse = [&](auto&& self, std::size_t start, std::size_t cells_left,
                             double acc) -> void {
        if (acc >= best) return;
        best = std::min(best, acc + cell_cost(start, s - 1));
        if (cells_left == 1 || start + 1 == s) return;
        for (std::size_t j = start; j + 1 < s; ++j)
            self(self, j + 1, cells_left - 1, acc + cell_cost(start, j));
    };
    recurse(recurse, 0, std::min(k, s), 0.0);
    return best;
}

DiscreteDistribution random_discrete(rng::Counter& gen, std::size_t max_atoms) {
    const std::size_t s = 2 + (gen.next_u64() % (max_atoms - 1));
    std::set<long long> used;
    std::vector<Point> atoms;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        long long key;
        double x;
        do {
            x = std::floor(gen.next_normal() * 1000.0) / 100.0;
            key = static_cast<long long>(std::llround(x * 100.0));
        } while (!used.insert(key).second);
        atoms.push_back({x});
        const double w = 0.05 + gen.next_double();
        weights.push_back(w);
        total += w;
    }
    for (auto& w : weights) w /= total;
    double sum = 0.0;
    for (double w : weights) sum += w;
    weights.back() += 1.0 - sum;
    return DiscreteDistribution::from(std::move(atoms), std::move(weights));
}

void criterion_oracle() {
    rng::Counter gen(61);
    bool ok = true;
    std::string detail;
    double worst_gap = 0.0, worst_centroid = 0.0;
    for (int rep = 0; rep < 200 && ok; ++rep) {
        const DiscreteDistribution d = random_discrete(gen, 12);
        for (std::size_t k = 1; k <= 4; ++k) {
            const OracleReport r = optimal_quantizer_1d(d, k);
            const double gap = std::fabs(r.distortion - brute_force_distortion(d, k));
            const double cdev = centroid_check(d, r.optimal);
            worst_gap = std::max(worst_gap, gap);
            worst_centroid = std::max(worst_centroid, cdev);
            if (gap > 1e-10 || cdev > 1e-10 || !magnitude_bound_check(r, d) ||
                !(r.delta_gap >= 0.0)) {
                ok = false;
                detail = "rep=" + std::to_string(rep) + " k=" + std::to_string(k);
                break;
            }
        }
    }
    if (ok)
        detail = "max DP gap=" + fmt(worst_gap) +
                 " max centroid dev=" + fmt(worst_centroid);
    report(6, "exact oracle properties", ok, detail);
}

// ---- criterion 7: MOM/QOM algebra ---------------------------------------

void criterion_mom_algebra() {
    rng::Counter gen(67);
    bool ok = true;
    std::string detail;
    for (int rep = 0; rep < 10000 && ok; ++rep) {
        const std::size_t ell = 2 * (gen.next_u64() % 10) + 3; // odd
        const std::size_t m = 1 + (gen.next_u64() % 4);
        std::vector<double> v(ell * m), neg;
        for (auto& x : v) x = gen.next_normal() * 4.0;
        for (double x : v) neg.push_back(-x);
        const BlockPartition part{v.size(), ell, m};

        if (mom(neg, part) != -mom(v, part)) {
            ok = false;
            detail = "median symmetry rep=" + std::to_string(rep);
            break;
        }
        if (qom(v, part, {0.5}) != mom(v, part)) {
            ok = false;
            detail = "median quantile rep=" + std::to_string(rep);
            break;
        }
        double alpha = gen.next_double();
        const double la = alpha * static_cast<double>(ell);
        if (std::fabs(la - std::round(la)) > 1e-6 &&
            qom(v, part, {alpha}) != -qom(neg, part, {1.0 - alpha})) {
            ok = false;
            detail = "quantile duality rep=" + std::to_string(rep);
            break;
        }
        if (m >= 2) {
            const std::size_t block = gen.next_u64() % ell;
            // reversal keeps block membership; means of small integers are
            // order-independent, so any change is a real invariance failure
            std::vector<double> ints(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                ints[i] = std::floor(v[i]);
            auto ints_shuffled = ints;
            std::reverse(ints_shuffled.begin() + static_cast<std::ptrdiff_t>(block * m),
                         ints_shuffled.begin() +
                             static_cast<std::ptrdiff_t>((block + 1) * m));
            if (mom(ints, part) != mom(ints_shuffled, part)) {
                ok = false;
                detail = "permutation invariance rep=" + std::to_string(rep);
                break;
            }
        }
    }
    report(7, "MOM/QOM algebra", ok, detail);
}

// ---- criterion 8: quantile-ratio tail bound -----------------------------

void criterion_quantile_ratio() {
    bool ok = true;
    std::string detail;
    const std::size_t ell = 41;
    const int trials = 20000;
    for (double alpha : {0.25, 0.75}) {
        const BlockPartition part{ell, ell, 1};
        int crossed = 0;
        for (int t = 0; t < trials; ++t) {
            rng::Counter gen(rng::derive_seed(71, alpha < 0.5 ? 1 : 2,
                                              static_cast<std::uint64_t>(t)));
            std::vector<double> v(ell);
            for (auto& x : v) x = -std::log(gen.next_open()); // Exponential(1)
            const double q = qom(v, part, {1.0 - alpha});
            if (q >= 2.0 / alpha) ++crossed;
        }
        const double freq = static_cast<double>(crossed) / trials;
        const double limit = std::exp(-alpha * static_cast<double>(ell) / 6.0) +
                             3.0 * binom_se(freq, trials);
        if (freq > limit) ok = false;
        detail += "alpha=" + fmt(alpha) + " freq=" + fmt(freq) +
                  " limit=" + fmt(limit) + " ";
    }
    report(8, "quantile-ratio tail bound", ok, detail);
}

// ---- criterion 9: CLI determinism ---------------------------------------

std::string run_cmd(const std::string& args, int* exit_code) {
    const std::string cmd = std::string(MOMQ_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        *exit_code = -1;
        return "";
    }
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = ::pclose(pipe);
    *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_cli_determinism() {
    const fs::path base = fs::temp_directory_path() /
                          ("momq_accept_" + std::to_string(static_cast<unsigned>(::getpid())));
    fs::remove_all(base);
    fs::create_directories(base);

    struct Job {
        const char* name;
        const char* extra;
    };
    const Job jobs[] = {
        {"example11", "--n-grid 50"},
        {"lowerbound", "--n-grid 1000 --pmin-grid 0.05"},
        {"scaling", "--n-grid 500,1000 --pmin-grid 0.05,0.1"},
        {"momscalar", "--n-grid 1000"},
        {"uniformqom", "--n-grid 500"},
    };

    bool ok = true;
    std::string detail;
    for (const Job& job : jobs) {
        const std::string flags = std::string("--seed 5 experiment --name ") + job.name +
                                  " --trials 3 " + job.extra;
        int rc1 = 0, rc2 = 0;
        const std::string out1 =
            run_cmd("--out " + (base / "a").string() + " " + flags, &rc1);
        const std::string out2 =
            run_cmd("--out " + (base / "b").string() + " " + flags, &rc2);
        if (rc1 != 0 || rc2 != 0 || out1 != out2) {
            ok = false;
            detail = std::string(job.name) + " stdout/exit mismatch";
            break;
        }
        const fs::path da = base / "a" / job.name / "run";
        const fs::path db = base / "b" / job.name / "run";
        for (const auto& entry : fs::directory_iterator(da)) {
            const std::string fname = entry.path().filename().string();
            if (slurp(entry.path()) != slurp(db / fname)) {
                ok = false;
                detail = std::string(job.name) + "/" + fname + " differs";
                break;
            }
        }
        if (!ok) break;
    }
    fs::remove_all(base);
    report(9, "CLI determinism", ok, detail);
}

} // namespace

int main() {
    criterion_block_counts();
    criterion_scalar_mom();
    criterion_example_1_1();
    criterion_lower_bound();
    criterion_scaling();
    criterion_oracle();
    criterion_mom_algebra();
    criterion_quantile_ratio();
    criterion_cli_determinism();
    if (failures != 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
