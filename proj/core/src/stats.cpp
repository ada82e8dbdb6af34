#include "otdf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "otdf/errors.hpp"
#include "otdf/parallel.hpp"
#include "otdf/rng.hpp"
#include "otdf/special.hpp"

namespace otdf {

namespace {

double log_poisson(int n, double k) {
    if (k == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return n * std::log(k) - k - log_factorial(n);
}

// Histogram compressed to (count value, multiplicity) bins with the three
// Poisson masses precomputed; every likelihood evaluation is then a short
// loop over unique count values.
struct LikelihoodTable {
    struct Bin {
        double weight;
        double pa;  // Pois(n; k0)
        double pb;  // Pois(n; k1)
        double pc;  // Pois(n; k2)
    };
    std::vector<Bin> bins;
    double total_weight = 0.0;

    LikelihoodTable(const CountHistogram& hist, const MixtureModel& model) {
        std::map<int, double> mult;
        for (int n : hist.counts) {
            if (n < 0) throw StatsError("histogram counts must be nonnegative");
            mult[n] += 1.0;
        }
        build(mult, model);
    }

    LikelihoodTable(const std::map<int, double>& mult, const MixtureModel& model) {
        build(mult, model);
    }

    void build(const std::map<int, double>& mult, const MixtureModel& model) {
        for (const auto& [n, w] : mult) {
            Bin b;
            b.weight = w;
            b.pa = std::exp(log_poisson(n, model.k0));
            b.pb = std::exp(log_poisson(n, model.k1));
            b.pc = std::exp(log_poisson(n, model.k2));
            if (b.pa == 0.0 && b.pb == 0.0 && b.pc == 0.0) {
                throw FitError("mle_populations: count " + std::to_string(n) +
                               " has zero probability under the mixture model");
            }
            bins.push_back(b);
            total_weight += w;
        }
    }

    double loglik(double p0, double p1) const {
        const double p2 = 1.0 - p0 - p1;
        double l = 0.0;
        for (const auto& b : bins) {
            const double f = p0 * b.pa + p1 * b.pb + p2 * b.pc;
            if (f <= 0.0) return -std::numeric_limits<double>::infinity();
            l += b.weight * std::log(f);
        }
        return l;
    }

    // Gradient and Hessian of the log-likelihood in (p0, p1).
    void derivatives(double p0, double p1, std::array<double, 2>& grad,
                     std::array<std::array<double, 2>, 2>& hess) const {
        const double p2 = 1.0 - p0 - p1;
        grad = {0.0, 0.0};
        hess = {{{0.0, 0.0}, {0.0, 0.0}}};
        for (const auto& b : bins) {
            const double f = p0 * b.pa + p1 * b.pb + p2 * b.pc;
            const double d0 = b.pa - b.pc;
            const double d1 = b.pb - b.pc;
            grad[0] += b.weight * d0 / f;
            grad[1] += b.weight * d1 / f;
            hess[0][0] -= b.weight * d0 * d0 / (f * f);
            hess[0][1] -= b.weight * d0 * d1 / (f * f);
            hess[1][1] -= b.weight * d1 * d1 / (f * f);
        }
        hess[1][0] = hess[0][1];
    }
};

PopulationEstimate maximize(const LikelihoodTable& table) {
    // 21 x 21 grid pre-scan over the simplex to seed the ascent away from
    // boundary traps.
    double best_p0 = 1.0 / 3.0, best_p1 = 1.0 / 3.0;
    double best_l = -std::numeric_limits<double>::infinity();
    constexpr int kGrid = 21;
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid - i; ++j) {
            const double p0 = static_cast<double>(i) / (kGrid - 1);
            const double p1 = static_cast<double>(j) / (kGrid - 1);
            const double l = table.loglik(p0, p1);
            if (l > best_l) {
                best_l = l;
                best_p0 = p0;
                best_p1 = p1;
            }
        }
    }

    // Open-simplex transform p = (e^{z0}, e^{z1}, 1) / S and damped Newton
    // ascent; large |z| means a boundary solution.
    constexpr double kZMax = 34.0;
    auto clamp_interior = [](double p) { return std::min(std::max(p, 1e-12), 1.0 - 1e-12); };
    double z0 = std::log(clamp_interior(best_p0) / clamp_interior(1.0 - best_p0 - best_p1));
    double z1 = std::log(clamp_interior(best_p1) / clamp_interior(1.0 - best_p0 - best_p1));

    auto unpack = [](double za, double zb) {
        const double m = std::max({za, zb, 0.0});
        const double ea = std::exp(za - m);
        const double eb = std::exp(zb - m);
        const double ec = std::exp(-m);
        const double s = ea + eb + ec;
        return std::array<double, 3>{ea / s, eb / s, ec / s};
    };

    std::array<double, 2> grad{};
    std::array<std::array<double, 2>, 2> hess{};
    double l_cur = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        const auto p = unpack(z0, z1);
        l_cur = table.loglik(p[0], p[1]);
        table.derivatives(p[0], p[1], grad, hess);

        // Chain rule to z-space.
        const double j00 = p[0] * (1.0 - p[0]);
        const double j01 = -p[0] * p[1];
        const double j11 = p[1] * (1.0 - p[1]);
        const double g0 = j00 * grad[0] + j01 * grad[1];
        const double g1 = j01 * grad[0] + j11 * grad[1];
        const double gnorm = std::sqrt(g0 * g0 + g1 * g1);
        if (gnorm < 1e-8) break;
        // Gauss-Newton Hessian in z (curvature term of the reparametrization
        // dropped); always negative semidefinite.
        const double h00 = j00 * (hess[0][0] * j00 + hess[0][1] * j01) +
                           j01 * (hess[1][0] * j00 + hess[1][1] * j01);
        const double h01 = j00 * (hess[0][0] * j01 + hess[0][1] * j11) +
                           j01 * (hess[1][0] * j01 + hess[1][1] * j11);
        const double h11 = j01 * (hess[0][0] * j01 + hess[0][1] * j11) +
                           j11 * (hess[1][0] * j01 + hess[1][1] * j11);
        double det = h00 * h11 - h01 * h01;
        double dz0, dz1;
        if (std::abs(det) > 1e-300) {
            dz0 = (-h11 * g0 + h01 * g1) / det;
            dz1 = (h01 * g0 - h00 * g1) / det;
        } else {
            dz0 = g0;
            dz1 = g1;
        }
        // Backtracking line search on the ascent direction.
        double step = 1.0;
        const double dir_dot = dz0 * g0 + dz1 * g1;
        if (dir_dot <= 0.0) {
            dz0 = g0;
            dz1 = g1;
        }
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const double nz0 = std::clamp(z0 + step * dz0, -kZMax, kZMax);
            const double nz1 = std::clamp(z1 + step * dz1, -kZMax, kZMax);
            const auto np = unpack(nz0, nz1);
            const double nl = table.loglik(np[0], np[1]);
            if (nl >= l_cur || (nz0 == z0 && nz1 == z1)) {
                z0 = nz0;
                z1 = nz1;
                accepted = nl > l_cur;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no uphill move left at the working precision
    }

    const auto p = unpack(z0, z1);
    PopulationEstimate est;
    est.p0 = p[0];
    est.p1 = p[1];
    est.p2 = p[2];
    est.log_likelihood = table.loglik(p[0], p[1]);
    est.boundary = std::abs(z0) >= kZMax || std::abs(z1) >= kZMax;
    return est;
}

double statistic_from_tables(Statistic stat, const std::vector<const LikelihoodTable*>& tables) {
    switch (stat) {
        case Statistic::kParityAmplitude: {
            const double p1a = maximize(*tables[0]).p1;
            const double p1b = maximize(*tables[1]).p1;
            return parity_stats(p1a, p1b).amplitude;
        }
        case Statistic::kEvenPopulation:
            return 1.0 - maximize(*tables[0]).p1;
        case Statistic::kFidelity: {
            const double p1a = maximize(*tables[0]).p1;
            const double p1b = maximize(*tables[1]).p1;
            const double even = 1.0 - maximize(*tables[2]).p1;
            return bell_fidelity(even, parity_stats(p1a, p1b).amplitude);
        }
    }
    throw StatsError("unknown statistic");
}

std::size_t datasets_required(Statistic stat) {
    switch (stat) {
        case Statistic::kParityAmplitude: return 2;
        case Statistic::kEvenPopulation: return 1;
        case Statistic::kFidelity: return 3;
    }
    return 0;
}

}  // namespace

void MixtureModel::validate() const {
    if (!(k0 > k1 && k1 > k2 && k2 >= 0.0)) {
        throw ConfigError("MixtureModel: means must satisfy k0 > k1 > k2 >= 0");
    }
}

double mixture_pmf(int n, double p0, double p1, const MixtureModel& model) {
    if (n < 0) throw StatsError("mixture_pmf: count must be nonnegative");
    if (!(p0 >= 0.0 && p1 >= 0.0 && p0 + p1 <= 1.0 + 1e-12)) {
        throw StatsError("mixture_pmf: (p0, p1) outside the probability simplex");
    }
    const double p2 = std::max(0.0, 1.0 - p0 - p1);
    return p0 * std::exp(log_poisson(n, model.k0)) + p1 * std::exp(log_poisson(n, model.k1)) +
           p2 * std::exp(log_poisson(n, model.k2));
}

PopulationEstimate mle_populations(const CountHistogram& hist, const MixtureModel& model) {
    if (hist.counts.empty()) throw FitError("mle_populations: empty histogram");
    model.validate();
    LikelihoodTable table(hist, model);
    return maximize(table);
}

CountHistogram sample_counts(const std::array<double, 3>& p, const MixtureModel& model,
                             int shots, std::uint64_t seed) {
    if (shots < 1) throw StatsError("sample_counts: shots must be >= 1");
    const double sum = p[0] + p[1] + p[2];
    if (!(p[0] >= 0.0 && p[1] >= 0.0 && p[2] >= 0.0 && std::abs(sum - 1.0) < 1e-9)) {
        throw StatsError("sample_counts: populations must form a probability vector");
    }
    model.validate();
    Rng rng(seed);
    const PoissonSampler samplers[3] = {PoissonSampler(model.k0), PoissonSampler(model.k1),
                                        PoissonSampler(model.k2)};
    CountHistogram hist;
    hist.counts.reserve(shots);
    for (int i = 0; i < shots; ++i) {
        const double u = rng.uniform();
        const int which = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
        hist.counts.push_back(samplers[which].sample(rng));
    }
    return hist;
}

ParityStats parity_stats(double p1_at_quarter, double p1_at_three_quarter) {
    if (!(p1_at_quarter >= 0.0 && p1_at_quarter <= 1.0 && p1_at_three_quarter >= 0.0 &&
          p1_at_three_quarter <= 1.0)) {
        throw StatsError("parity_stats: inputs must be probabilities");
    }
    ParityStats s;
    s.parity_plus = 1.0 - 2.0 * p1_at_quarter;
    s.parity_minus = 1.0 - 2.0 * p1_at_three_quarter;
    s.amplitude = 0.5 * (s.parity_plus - s.parity_minus);
    return s;
}

double bell_fidelity(double even_population, double amplitude) {
    if (!(even_population >= 0.0 && even_population <= 1.0)) {
        throw StatsError("bell_fidelity: even population must be in [0, 1]");
    }
    return 0.5 * (even_population + amplitude);
}

std::pair<double, double> jeffreys_interval(int successes, int trials, double level) {
    if (successes < 0 || trials < successes) {
        throw StatsError("jeffreys_interval: need 0 <= successes <= trials");
    }
    if (!(level > 0.0 && level < 1.0)) throw StatsError("jeffreys_interval: bad level");
    const double a = successes + 0.5;
    const double b = trials - successes + 0.5;
    const double tail = 0.5 * (1.0 - level);
    const double lo = successes == 0 ? 0.0 : beta_quantile(a, b, tail);
    const double hi = successes == trials ? 1.0 : beta_quantile(a, b, 1.0 - tail);
    return {lo, hi};
}

double evaluate_statistic(Statistic stat, const std::vector<Dataset>& datasets) {
    if (datasets.size() != datasets_required(stat)) {
        throw StatsError("evaluate_statistic: wrong number of datasets for statistic");
    }
    std::vector<LikelihoodTable> tables;
    tables.reserve(datasets.size());
    for (const auto& ds : datasets) {
        ds.model.validate();
        tables.emplace_back(ds.hist, ds.model);
    }
    std::vector<const LikelihoodTable*> ptrs;
    for (const auto& t : tables) ptrs.push_back(&t);
    return statistic_from_tables(stat, ptrs);
}

BootstrapResult bootstrap(const std::vector<Dataset>& datasets, int n_boot, std::uint64_t seed,
                          Statistic stat) {
    if (n_boot < 100) throw BootstrapError("bootstrap: n_boot must be >= 100");
    if (datasets.size() != datasets_required(stat)) {
        throw BootstrapError("bootstrap: wrong number of datasets for statistic");
    }
    for (const auto& ds : datasets) {
        if (ds.hist.counts.empty()) throw BootstrapError("bootstrap: empty dataset");
        ds.model.validate();
    }

    // Original data as compressed bins; resampling draws bin indices with
    // probability proportional to multiplicity.
    struct Source {
        std::vector<int> values;
        std::vector<double> cum;  // cumulative multiplicity
        int shots;
        const MixtureModel* model;
    };
    std::vector<Source> sources;
    for (const auto& ds : datasets) {
        std::map<int, double> mult;
        for (int n : ds.hist.counts) mult[n] += 1.0;
        Source s;
        s.shots = ds.hist.shots();
        s.model = &ds.model;
        double cum = 0.0;
        for (const auto& [n, w] : mult) {
            s.values.push_back(n);
            cum += w;
            s.cum.push_back(cum);
        }
        sources.push_back(std::move(s));
    }

    BootstrapResult out;
    out.n_boot = n_boot;
    out.point = evaluate_statistic(stat, datasets);

    std::vector<double> reps(n_boot, std::numeric_limits<double>::quiet_NaN());
    parallel_for(static_cast<std::size_t>(n_boot), [&](std::size_t rep) {
        Rng rng = Rng::child(seed, rep);
        try {
            std::vector<LikelihoodTable> tables;
            tables.reserve(sources.size());
            for (const auto& src : sources) {
                std::map<int, double> mult;
                const double total = src.cum.back();
                for (int i = 0; i < src.shots; ++i) {
                    const double u = rng.uniform() * total;
                    const auto it = std::lower_bound(src.cum.begin(), src.cum.end(), u);
                    const std::size_t idx =
                        std::min(static_cast<std::size_t>(it - src.cum.begin()),
                                 src.values.size() - 1);
                    mult[src.values[idx]] += 1.0;
                }
                tables.emplace_back(mult, *src.model);
            }
            std::vector<const LikelihoodTable*> ptrs;
            for (const auto& t : tables) ptrs.push_back(&t);
            reps[rep] = statistic_from_tables(stat, ptrs);
        } catch (const StatsError&) {
            // dropped replicate, counted below
        }
    });

    std::vector<double> kept;
    kept.reserve(reps.size());
    for (double r : reps) {
        if (std::isnan(r)) ++out.dropped;
        else kept.push_back(r);
    }
    if (out.dropped > n_boot / 100) {
        throw BootstrapError("bootstrap: more than 1% of replicates failed");
    }
    double sum = 0.0;
    for (double r : kept) sum += r;
    out.mean = sum / kept.size();
    std::sort(kept.begin(), kept.end());
    auto quantile = [&](double q) {
        const double pos = q * (kept.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= kept.size()) return kept.back();
        const double frac = pos - i;
        return kept[i] * (1.0 - frac) + kept[i + 1] * frac;
    };
    out.lo = quantile(0.16);
    out.hi = quantile(0.84);
    return out;
}

CountFile load_count_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open count file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CountFile out;
    // JSON object form carries an optional per-dataset model.
    auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("count file JSON parse error: ") + e.what());
        }
        if (!j.contains("counts") || !j["counts"].is_array()) {
            throw ConfigError("count file: missing \"counts\" array");
        }
        for (const auto& v : j["counts"]) {
            const int n = v.get<int>();
            if (n < 0) throw ConfigError("count file: negative count");
            out.hist.counts.push_back(n);
        }
        if (j.contains("model")) {
            MixtureModel m;
            m.k0 = j["model"].at("k0").get<double>();
            m.k1 = j["model"].at("k1").get<double>();
            m.k2 = j["model"].at("k2").get<double>();
            m.validate();
            out.model = m;
        }
        return out;
    }
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(line.substr(pos), &used);
        } catch (...) {
            throw ConfigError("count file: non-integer line \"" + line + "\"");
        }
        if (n < 0) throw ConfigError("count file: negative count");
        out.hist.counts.push_back(n);
    }
    if (out.hist.counts.empty()) throw ConfigError("count file: no counts in " + path);
    return out;
}

}  // namespace otdf
