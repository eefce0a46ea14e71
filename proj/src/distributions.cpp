#include "momq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "momq/rng.hpp"

namespace momq {

DiscreteDistribution DiscreteDistribution::from(std::vector<Point> atoms,
                                                std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size())
        throw std::invalid_argument("discrete distribution needs matching atoms and weights");
    const std::size_t d = atoms.front().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != d)
            throw std::invalid_argument("discrete atoms have mixed dimensions");
        for (double v : atoms[i])
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite atom coordinate");
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("all weights must be positive");
        sum += weights[i];
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if (atoms[i] == atoms[j])
                throw std::invalid_argument("discrete atoms must be distinct");
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("weights must sum to 1 (got " + std::to_string(sum) + ")");
    return DiscreteDistribution{std::move(atoms), std::move(weights), d};
}

double ParetoSpec::mean() const {
    return shift + scale * tail_index / (tail_index - 1.0);
}

double ParetoSpec::variance() const {
    const double a = tail_index;
    return scale * scale * a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
}

SamplerSpec SamplerSpec::from_discrete(DiscreteDistribution d) {
    SamplerSpec s;
    s.family = Family::discrete;
    s.dim = d.dim;
    s.discrete = std::move(d);
    return s;
}

SamplerSpec SamplerSpec::from_gaussian(Point mean, Point cov_diag) {
    SamplerSpec s;
    s.family = Family::gaussian;
    s.dim = mean.size();
    s.gaussian = GaussianSpec{std::move(mean), std::move(cov_diag)};
    s.validate();
    return s;
}

SamplerSpec SamplerSpec::from_pareto(double tail_index, double shift, double scale) {
    SamplerSpec s;
    s.family = Family::pareto;
    s.dim = 1;
    s.pareto = ParetoSpec{tail_index, shift, scale};
    s.validate();
    return s;
}

SamplerSpec SamplerSpec::from_mixture(std::vector<double> weights,
                                      std::vector<SamplerSpec> components) {
    SamplerSpec s;
    s.family = Family::mixture;
    s.mixture_weights = std::move(weights);
    s.mixture_components = std::move(components);
    if (s.mixture_components.empty()) throw std::invalid_argument("empty mixture");
    s.dim = s.mixture_components.front().dim;
    s.validate();
    return s;
}

void SamplerSpec::validate() const {
    switch (family) {
        case Family::discrete:
            if (discrete.dim != dim) throw std::invalid_argument("discrete spec dim mismatch");
            break;
        case Family::gaussian:
            if (gaussian.mean.size() != dim || gaussian.cov_diag.size() != dim)
                throw std::invalid_argument("gaussian spec dim mismatch");
            for (double v : gaussian.cov_diag)
                if (v < 0.0) throw std::invalid_argument("negative gaussian variance");
            break;
        case Family::pareto:
            if (dim != 1) throw std::invalid_argument("pareto spec is one-dimensional");
            if (!(pareto.tail_index > 2.0))
                throw std::invalid_argument("pareto tail_index must exceed 2 (finite second moment)");
            if (!(pareto.scale > 0.0)) throw std::invalid_argument("pareto scale must be positive");
            break;
        case Family::mixture: {
            if (mixture_components.size() != mixture_weights.size() || mixture_components.empty())
                throw std::invalid_argument("mixture needs matching weights and components");
            double sum = 0.0;
            for (double w : mixture_weights) {
                if (!(w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("mixture weights must sum to 1");
            for (const auto& c : mixture_components) {
                if (c.dim != dim) throw std::invalid_argument("mixture component dim mismatch");
                c.validate();
            }
            break;
        }
    }
}

namespace {

void draw_point(const SamplerSpec& spec, rng::Counter& gen, Point& out) {
    switch (spec.family) {
        case SamplerSpec::Family::discrete: {
            const double u = gen.next_double();
            double acc = 0.0;
            std::size_t pick = spec.discrete.atoms.size() - 1;
            for (std::size_t i = 0; i < spec.discrete.weights.size(); ++i) {
                acc += spec.discrete.weights[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            out = spec.discrete.atoms[pick];
            return;
        }
        case SamplerSpec::Family::gaussian: {
            out.resize(spec.dim);
            for (std::size_t i = 0; i < spec.dim; ++i)
                out[i] = spec.gaussian.mean[i] +
                         std::sqrt(spec.gaussian.cov_diag[i]) * gen.next_normal();
            return;
        }
        case SamplerSpec::Family::pareto: {
            const double u = gen.next_open();
            out.assign(1, spec.pareto.shift +
                              spec.pareto.scale * std::pow(u, -1.0 / spec.pareto.tail_index));
            return;
        }
        case SamplerSpec::Family::mixture: {
            const double u = gen.next_double();
            double acc = 0.0;
            std::size_t pick = spec.mixture_components.size() - 1;
            for (std::size_t i = 0; i < spec.mixture_weights.size(); ++i) {
                acc += spec.mixture_weights[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            draw_point(spec.mixture_components[pick], gen, out);
            return;
        }
    }
}

std::string family_tag(const SamplerSpec& spec) {
    switch (spec.family) {
        case SamplerSpec::Family::discrete: return "discrete";
        case SamplerSpec::Family::gaussian: return "gaussian";
        case SamplerSpec::Family::pareto: return "pareto";
        case SamplerSpec::Family::mixture: return "mixture";
    }
    return "unknown";
}

} // namespace

Dataset sample(const SamplerSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample size must be at least 1");
    spec.validate();
    rng::Counter gen(seed);
    Dataset data;
    data.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) draw_point(spec, gen, data.points[i]);
    data.seed = seed;
    data.generator_tag = family_tag(spec);
    return data;
}

DiscreteDistribution example_1_1(std::size_t n) {
    if (n < 2) throw std::invalid_argument("example_1_1 needs n >= 2");
    const double nn = static_cast<double>(n);
    return DiscreteDistribution::from({{0.0}, {std::sqrt(nn)}}, {1.0 - 1.0 / nn, 1.0 / nn});
}

DiscreteDistribution lower_bound_family(double p, double family_delta) {
    if (!(p > 0.0 && p < 0.5))
        throw std::invalid_argument("lower_bound_family needs p in (0, 1/2)");
    if (!(family_delta > -0.5 && family_delta < 0.5))
        throw std::invalid_argument("lower_bound_family needs delta in (-1/2, 1/2)");
    const double r = 1.0 / std::sqrt(p);
    const double lo = p * (1.0 - family_delta) / 4.0;
    const double hi = p * (1.0 + family_delta) / 4.0;
    return DiscreteDistribution::from(
        {{-r}, {-0.5 * r}, {0.0}, {0.5 * r}, {r}},
        {lo, lo, 1.0 - p, hi, hi});
}

namespace {

struct SortedAtoms {
    std::vector<double> x;   // ascending
    std::vector<double> w;
    std::vector<double> pw;  // prefix sums of w, w*x, w*x^2
    std::vector<double> pwx;
    std::vector<double> pwx2;

    // weighted SSE of atoms i..j (inclusive) about their centroid
    double cost(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        const double W = pw[j + 1] - pw[i];
        const double S = pwx[j + 1] - pwx[i];
        const double Q = pwx2[j + 1] - pwx2[i];
        return std::max(0.0, Q - S * S / W);
    }

    double centroid(std::size_t i, std::size_t j) const {
        const double W = pw[j + 1] - pw[i];
        return (pwx[j + 1] - pwx[i]) / W;
    }

    double mass(std::size_t i, std::size_t j) const { return pw[j + 1] - pw[i]; }
};

SortedAtoms sort_atoms(const DiscreteDistribution& dist) {
    const std::size_t s = dist.atoms.size();
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist.atoms[a][0] < dist.atoms[b][0];
    });
    SortedAtoms sa;
    sa.x.resize(s);
    sa.w.resize(s);
    for (std::size_t i = 0; i < s; ++i) {
        sa.x[i] = dist.atoms[order[i]][0];
        sa.w[i] = dist.weights[order[i]];
    }
    sa.pw.assign(s + 1, 0.0);
    sa.pwx.assign(s + 1, 0.0);
    sa.pwx2.assign(s + 1, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        sa.pw[i + 1] = sa.pw[i] + sa.w[i];
        sa.pwx[i + 1] = sa.pwx[i] + sa.w[i] * sa.x[i];
        sa.pwx2[i + 1] = sa.pwx2[i] + sa.w[i] * sa.x[i] * sa.x[i];
    }
    return sa;
}

struct DpResult {
    double cost = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> cells; // inclusive atom ranges
};

// Exact partition DP over sorted atoms. f[r][i] is the best cost of
// covering atoms i..s-1 with exactly r nonempty contiguous cells; equal
// costs prefer the smaller cell end, which makes the leftmost boundary
// smallest recursively.
DpResult partition_dp(const SortedAtoms& sa, std::size_t k) {
    const std::size_t s = sa.x.size();
    const std::size_t kk = std::min(k, s);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> f(kk + 1, std::vector<double>(s + 1, inf));
    std::vector<std::vector<std::size_t>> choice(kk + 1, std::vector<std::size_t>(s + 1, 0));
    for (std::size_t r = 0; r <= kk; ++r) f[r][s] = 0.0;
    for (std::size_t r = 1; r <= kk; ++r) {
        for (std::size_t i = s; i-- > 0;) {
            double best = inf;
            std::size_t best_j = i;
            for (std::size_t j = i; j < s; ++j) {
                if (s - 1 - j < r - 1) break; // not enough atoms for the remaining cells
                const double v = sa.cost(i, j) + f[r - 1][j + 1];
                if (v < best) {
                    best = v;
                    best_j = j;
                }
            }
            f[r][i] = best;
            choice[r][i] = best_j;
        }
    }
    DpResult res;
    res.cost = f[kk][0];
    std::size_t i = 0;
    for (std::size_t r = kk; r >= 1 && i < s; --r) {
        const std::size_t j = choice[r][i];
        res.cells.emplace_back(i, j);
        i = j + 1;
    }
    return res;
}

double dp_cost_only(const SortedAtoms& sa, std::size_t k) {
    return partition_dp(sa, k).cost;
}

} // namespace

OracleReport optimal_quantizer_1d(const DiscreteDistribution& dist, std::size_t k) {
    if (dist.dim != 1)
        throw std::invalid_argument("exact oracle is 1-D only");
    if (k < 1) throw std::invalid_argument("k must be at least 1");

    const SortedAtoms sa = sort_atoms(dist);
    const DpResult dp = partition_dp(sa, k);

    OracleReport report;
    std::vector<Point> centers;
    double pmin = 1.0;
    double mag = 0.0;
    for (const auto& [i, j] : dp.cells) {
        const double c = sa.centroid(i, j);
        centers.push_back({c});
        pmin = std::min(pmin, sa.mass(i, j));
        mag = std::max(mag, std::abs(c));
    }
    report.optimal = Quantizer::from(std::move(centers));
    report.distortion = dp.cost;
    report.pmin = pmin;
    report.magnitude_M = mag;

    if (k >= 2) {
        report.delta_gap = dp_cost_only(sa, k - 1) - dp.cost;
        if (report.delta_gap < 0.0) report.delta_gap = 0.0;
    } else {
        // D over the empty quantizer is undefined; report an infinite gap
        report.delta_gap = std::numeric_limits<double>::infinity();
    }

    // R: smallest centered atom norm whose second-moment tail is <= gap/64
    const double mu = sa.pwx.back();
    std::vector<std::pair<double, double>> centered; // (|x - mu|, w)
    centered.reserve(sa.x.size());
    for (std::size_t i = 0; i < sa.x.size(); ++i)
        centered.emplace_back(std::abs(sa.x[i] - mu), sa.w[i]);
    std::sort(centered.begin(), centered.end());
    const double budget = report.delta_gap / 64.0;
    report.radius_R = centered.back().first;
    for (const auto& [r, _] : centered) {
        double tail = 0.0;
        for (const auto& [rr, ww] : centered)
            if (rr > r) tail += ww * rr * rr;
        if (tail <= budget) {
            report.radius_R = r;
            break;
        }
    }
    return report;
}

double exact_distortion(const DiscreteDistribution& dist, const Quantizer& a) {
    if (dist.dim != a.dim)
        throw std::invalid_argument("distribution and quantizer dimensions differ");
    double total = 0.0;
    for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : a.centers)
            best = std::min(best, squared_distance(dist.atoms[i], c));
        total += dist.weights[i] * best;
    }
    return total;
}

double centroid_check(const DiscreteDistribution& dist, const Quantizer& a) {
    if (dist.dim != a.dim)
        throw std::invalid_argument("distribution and quantizer dimensions differ");
    const std::size_t d = dist.dim;
    std::vector<double> mass(a.size(), 0.0);
    std::vector<Point> sums(a.size(), Point(d, 0.0));
    for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
        const std::size_t j = voronoi_index(dist.atoms[i], a);
        mass[j] += dist.weights[i];
        for (std::size_t t = 0; t < d; ++t)
            sums[j][t] += dist.weights[i] * dist.atoms[i][t];
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (mass[j] <= 0.0) continue;
        double dev2 = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
            const double diff = a.centers[j][t] - sums[j][t] / mass[j];
            dev2 += diff * diff;
        }
        worst = std::max(worst, std::sqrt(dev2));
    }
    return worst;
}

double second_moment(const DiscreteDistribution& dist) {
    double s = 0.0;
    for (std::size_t i = 0; i < dist.atoms.size(); ++i)
        s += dist.weights[i] * squared_norm(dist.atoms[i]);
    return s;
}

Point mean(const DiscreteDistribution& dist) {
    Point m(dist.dim, 0.0);
    for (std::size_t i = 0; i < dist.atoms.size(); ++i)
        for (std::size_t t = 0; t < dist.dim; ++t)
            m[t] += dist.weights[i] * dist.atoms[i][t];
    return m;
}

bool magnitude_bound_check(const OracleReport& report, const DiscreteDistribution& dist) {
    const double bound = std::sqrt(second_moment(dist) / report.pmin);
    for (const auto& c : report.optimal.centers)
        if (std::sqrt(squared_norm(c)) > bound + 1e-9) return false;
    return true;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) ok = true;
        if (!ok)
            throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
    }
}

Point parse_point(const json& arr) {
    Point p;
    for (const auto& v : arr) p.push_back(v.get<double>());
    return p;
}

SamplerSpec parse_spec(const json& obj) {
    if (!obj.is_object()) throw std::invalid_argument("spec must be a JSON object");
    reject_unknown(obj, {"family", "params", "dim"}, "spec");
    const std::string family = obj.at("family").get<std::string>();
    const json& params = obj.at("params");
    const auto dim = obj.at("dim").get<std::size_t>();

    if (family == "discrete") {
        reject_unknown(params, {"atoms", "weights"}, "discrete params");
        std::vector<Point> atoms;
        for (const auto& a : params.at("atoms")) atoms.push_back(parse_point(a));
        std::vector<double> weights;
        for (const auto& w : params.at("weights")) weights.push_back(w.get<double>());
        auto spec = SamplerSpec::from_discrete(DiscreteDistribution::from(atoms, weights));
        if (spec.dim != dim) throw std::invalid_argument("spec dim does not match atoms");
        return spec;
    }
    if (family == "gaussian") {
        reject_unknown(params, {"mean", "cov_diag"}, "gaussian params");
        auto spec = SamplerSpec::from_gaussian(parse_point(params.at("mean")),
                                               parse_point(params.at("cov_diag")));
        if (spec.dim != dim) throw std::invalid_argument("spec dim does not match mean");
        return spec;
    }
    if (family == "pareto") {
        reject_unknown(params, {"tail_index", "shift", "scale"}, "pareto params");
        if (dim != 1) throw std::invalid_argument("pareto spec requires dim 1");
        return SamplerSpec::from_pareto(params.at("tail_index").get<double>(),
                                        params.value("shift", 0.0),
                                        params.value("scale", 1.0));
    }
    if (family == "mixture") {
        reject_unknown(params, {"components"}, "mixture params");
        std::vector<double> weights;
        std::vector<SamplerSpec> components;
        for (const auto& c : params.at("components")) {
            reject_unknown(c, {"weight", "spec"}, "mixture component");
            weights.push_back(c.at("weight").get<double>());
            components.push_back(parse_spec(c.at("spec")));
        }
        auto spec = SamplerSpec::from_mixture(std::move(weights), std::move(components));
        if (spec.dim != dim) throw std::invalid_argument("spec dim does not match components");
        return spec;
    }
    throw std::invalid_argument("unknown family '" + family + "'");
}

json spec_json(const SamplerSpec& spec) {
    json obj;
    obj["dim"] = spec.dim;
    switch (spec.family) {
        case SamplerSpec::Family::discrete: {
            obj["family"] = "discrete";
            json atoms = json::array();
            for (const auto& a : spec.discrete.atoms) atoms.push_back(a);
            obj["params"] = {{"atoms", atoms}, {"weights", spec.discrete.weights}};
            break;
        }
        case SamplerSpec::Family::gaussian:
            obj["family"] = "gaussian";
            obj["params"] = {{"mean", spec.gaussian.mean}, {"cov_diag", spec.gaussian.cov_diag}};
            break;
        case SamplerSpec::Family::pareto:
            obj["family"] = "pareto";
            obj["params"] = {{"tail_index", spec.pareto.tail_index},
                             {"shift", spec.pareto.shift},
                             {"scale", spec.pareto.scale}};
            break;
        case SamplerSpec::Family::mixture: {
            obj["family"] = "mixture";
            json comps = json::array();
            for (std::size_t i = 0; i < spec.mixture_components.size(); ++i)
                comps.push_back({{"weight", spec.mixture_weights[i]},
                                 {"spec", spec_json(spec.mixture_components[i])}});
            obj["params"] = {{"components", comps}};
            break;
        }
    }
    return obj;
}

} // namespace

SamplerSpec load_spec_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid spec JSON: ") + e.what());
    }
    try {
        return parse_spec(obj);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid spec: ") + e.what());
    }
}

std::string spec_to_json(const SamplerSpec& spec) { return spec_json(spec).dump(2); }

} // namespace momq
