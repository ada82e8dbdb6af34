#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace otdf {

// Three-Poissonian detection model: mean photon counts for two bright, one
// bright, and two dark ions. The means are calibration inputs and are never
// fitted.
struct MixtureModel {
    double k0 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;

    void validate() const;
};

struct CountHistogram {
    std::vector<int> counts;  // one entry per repetition

    int shots() const { return static_cast<int>(counts.size()); }
};

struct PopulationEstimate {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double log_likelihood = 0.0;
    bool boundary = false;  // optimum on the simplex boundary
};

// PMF(n; p0, p1) = p0 Pois(n; k0) + p1 Pois(n; k1) + (1-p0-p1) Pois(n; k2),
// evaluated with log-domain factorials.
double mixture_pmf(int n, double p0, double p1, const MixtureModel& model);

// Maximum-likelihood populations for a histogram under fixed mixture means.
PopulationEstimate mle_populations(const CountHistogram& hist, const MixtureModel& model);

// Forward sampler: subspace chosen per shot from (p0, p1, p2), then a Poisson
// draw at the matching mean. Bit-identical across platforms for a fixed seed.
CountHistogram sample_counts(const std::array<double, 3>& p, const MixtureModel& model,
                             int shots, std::uint64_t seed);

struct ParityStats {
    double parity_plus = 0.0;
    double parity_minus = 0.0;
    double amplitude = 0.0;
};

// Pi = 1 - 2 P1 at each analysis phase; A = (Pi+ - Pi-)/2.
ParityStats parity_stats(double p1_at_quarter, double p1_at_three_quarter);

// F = (P0' + P2' + A)/2.
double bell_fidelity(double even_population, double amplitude);

// Central Beta(k + 1/2, n - k + 1/2) quantile interval; lo = 0 at k = 0 and
// hi = 1 at k = n by convention.
std::pair<double, double> jeffreys_interval(int successes, int trials, double level);

enum class Statistic {
    kParityAmplitude,  // datasets: {phi = pi/4, phi = 3 pi/4}
    kEvenPopulation,   // datasets: {no-analysis populations}
    kFidelity,         // datasets: {pi/4, 3 pi/4, populations}
};

// Detection means can differ between datasets (different detection
// durations), so each histogram carries its own model.
struct Dataset {
    CountHistogram hist;
    MixtureModel model;
};

double evaluate_statistic(Statistic stat, const std::vector<Dataset>& datasets);

struct BootstrapResult {
    double point = 0.0;
    double mean = 0.0;
    double lo = 0.0;   // central 68% interval
    double hi = 0.0;
    int n_boot = 0;
    int dropped = 0;
};

// Resamples each histogram with replacement to its original size, re-runs the
// MLE pipeline per replicate. Replicate seeds derive from (seed, index), so
// results do not depend on scheduling.
BootstrapResult bootstrap(const std::vector<Dataset>& datasets, int n_boot, std::uint64_t seed,
                          Statistic stat);

// Count-data file: either one nonnegative integer per line, or a JSON object
// {"counts": [...], "model": {"k0":..., "k1":..., "k2":...}} (format v1).
struct CountFile {
    CountHistogram hist;
    std::optional<MixtureModel> model;
};

CountFile load_count_file(const std::string& path);

}  // namespace otdf
