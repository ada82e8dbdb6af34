#include "otdf/rng.hpp"

#include <algorithm>
#include <cmath>

#include "otdf/errors.hpp"

namespace otdf {

PoissonSampler::PoissonSampler(double mean) : mean_(mean) {
    if (!(mean >= 0.0)) throw StatsError("PoissonSampler: mean must be >= 0");
    // Cover the bulk plus a generous tail; the residual mass lands on the
    // last bin via the >= search below.
    const int nmax = static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean + 1.0) + 15.0));
    cdf_.resize(static_cast<std::size_t>(nmax) + 1);
    double logp = -mean;  // log P(0)
    double cum = std::exp(logp);
    cdf_[0] = cum;
    for (int n = 1; n <= nmax; ++n) {
        logp += std::log(mean) - std::log(static_cast<double>(n));
        cum += std::exp(logp);
        cdf_[static_cast<std::size_t>(n)] = cum;
    }
}

int PoissonSampler::sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<int>(cdf_.size()) - 1;
    return static_cast<int>(it - cdf_.begin());
}

}  // namespace otdf
