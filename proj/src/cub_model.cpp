#include "cubifs/cub_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cubifs {

namespace {

constexpr double kParamFloor = 1e-6; // EM keeps (pi, xi) this far from {0,1}

double clamp01(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0,1) from the top 53 bits, identical on every platform.
double next_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::vector<double> binomial_row(int n) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
    for (int k = 1; k <= n; ++k)
        row[static_cast<std::size_t>(k)] =
            row[static_cast<std::size_t>(k - 1)] * static_cast<double>(n - k + 1) / static_cast<double>(k);
    return row;
}

} // namespace

void CubParams::validate() const {
    if (!(pi >= 0.0 && pi <= 1.0) || !std::isfinite(pi))
        throw domain_error("pi must lie in [0,1], got " + std::to_string(pi));
    if (!(xi >= 0.0 && xi <= 1.0) || !std::isfinite(xi))
        throw domain_error("xi must lie in [0,1], got " + std::to_string(xi));
}

std::vector<double> shifted_binomial_pmf(const RatingScale& scale, double xi) {
    scale.validate();
    if (!(xi >= 0.0 && xi <= 1.0) || !std::isfinite(xi))
        throw domain_error("xi must lie in [0,1], got " + std::to_string(xi));
    const int m = scale.m;
    const std::vector<double> choose = binomial_row(m - 1);
    std::vector<double> pmf(static_cast<std::size_t>(m));
    for (int r = 1; r <= m; ++r)
        pmf[static_cast<std::size_t>(r - 1)] =
            choose[static_cast<std::size_t>(r - 1)] * std::pow(xi, m - r) * std::pow(1.0 - xi, r - 1);
    return pmf;
}

std::vector<double> cub_pmf(const RatingScale& scale, const CubParams& params) {
    params.validate();
    std::vector<double> pmf = shifted_binomial_pmf(scale, params.xi);
    const double uniform_share = (1.0 - params.pi) / static_cast<double>(scale.m);
    for (double& p : pmf)
        p = params.pi * p + uniform_share;
    return pmf;
}

std::vector<int> sample(const RatingScale& scale, const CubParams& params, std::size_t n,
                        std::uint64_t seed) {
    if (n == 0)
        throw domain_error("sample size must be at least 1");
    const std::vector<double> pmf = cub_pmf(scale, params);
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::uint64_t state = seed;
    std::mt19937_64 gen(splitmix64(state));
    std::vector<int> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = next_unit(gen);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out[j] = static_cast<int>(it - cdf.begin()) + 1;
    }
    return out;
}

double gini_index(const FrequencyTable& freq, const RatingScale& scale) {
    scale.validate();
    freq.validate();
    if (freq.m() != scale.m)
        throw domain_error("frequency table has " + std::to_string(freq.m()) +
                           " categories, scale has " + std::to_string(scale.m));
    double sumsq = 0.0;
    for (double f : freq.freqs)
        sumsq += f * f;
    const double m = static_cast<double>(scale.m);
    return m / (m - 1.0) * (1.0 - sumsq);
}

double preliminary_pi(const FrequencyTable& freq, const RatingScale& scale, double xi) {
    if (!(xi > 0.0 && xi < 1.0))
        throw domain_error("preliminary pi requires 0 < xi < 1, got " + std::to_string(xi));
    const double g_obs = gini_index(freq, scale);
    const FrequencyTable sb =
        FrequencyTable::from_probabilities(shifted_binomial_pmf(scale, xi));
    const double g_sb = gini_index(sb, scale);
    if (g_sb >= 1.0 - 1e-12)
        throw estimation_error("shifted Binomial at xi=" + std::to_string(xi) +
                               " is too close to uniform, Gini relation degenerate");
    const double ratio = (1.0 - g_obs) / (1.0 - g_sb);
    return clamp01(std::sqrt(std::max(ratio, 0.0)), 0.0, 1.0);
}

CubParams moment_init(const FrequencyTable& freq, const RatingScale& scale) {
    scale.validate();
    freq.validate();
    const double m = static_cast<double>(scale.m);
    double mean = 0.0;
    for (int r = 1; r <= scale.m; ++r)
        mean += static_cast<double>(r) * freq.freq(r);
    CubParams init;
    init.xi = clamp01((m - mean) / (m - 1.0), 0.01, 0.99);
    try {
        init.pi = clamp01(preliminary_pi(freq, scale, init.xi), 0.05, 0.95);
    } catch (const estimation_error&) {
        init.pi = 0.5;
    }
    return init;
}

std::vector<std::int64_t> category_counts(const std::vector<int>& ratings,
                                          const RatingScale& scale) {
    scale.validate();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(scale.m), 0);
    for (int r : ratings) {
        if (!scale.contains(r))
            throw domain_error("rating " + std::to_string(r) + " outside 1.." +
                               std::to_string(scale.m));
        ++counts[static_cast<std::size_t>(r - 1)];
    }
    return counts;
}

double log_likelihood_counts(const std::vector<std::int64_t>& counts, const RatingScale& scale,
                             const CubParams& params) {
    if (static_cast<int>(counts.size()) != scale.m)
        throw domain_error("count vector size mismatches scale");
    const std::vector<double> pmf = cub_pmf(scale, params);
    long double acc = 0.0L;
    for (int r = 1; r <= scale.m; ++r) {
        const std::int64_t c = counts[static_cast<std::size_t>(r - 1)];
        if (c == 0)
            continue;
        const double p = pmf[static_cast<std::size_t>(r - 1)];
        if (!(p > 0.0))
            throw numerical_error("observed category " + std::to_string(r) +
                                  " has zero probability under (pi=" + std::to_string(params.pi) +
                                  ", xi=" + std::to_string(params.xi) + ")");
        acc += static_cast<long double>(c) * std::log(static_cast<long double>(p));
    }
    return static_cast<double>(acc);
}

double log_likelihood(const std::vector<int>& ratings, const RatingScale& scale,
                      const CubParams& params) {
    return log_likelihood_counts(category_counts(ratings, scale), scale, params);
}

FitResult fit_em_counts(const std::vector<std::int64_t>& counts, const RatingScale& scale,
                        const EmOptions& options) {
    scale.validate();
    if (options.tolerance <= 0.0 || options.max_iter < 1)
        throw domain_error("EM needs a positive tolerance and max_iter >= 1");
    int distinct = 0;
    std::int64_t n = 0;
    for (std::int64_t c : counts) {
        if (c < 0)
            throw domain_error("negative category count");
        if (c > 0)
            ++distinct;
        n += c;
    }
    if (distinct < 2)
        throw degenerate_data_error("EM needs at least 2 distinct observed categories, got " +
                                    std::to_string(distinct));

    const double m = static_cast<double>(scale.m);
    CubParams cur = moment_init(FrequencyTable::from_counts(counts), scale);
    cur.pi = clamp01(cur.pi, kParamFloor, 1.0 - kParamFloor);
    cur.xi = clamp01(cur.xi, kParamFloor, 1.0 - kParamFloor);

    FitResult result;
    double prev_ll = log_likelihood_counts(counts, scale, cur);
    if (!std::isfinite(prev_ll))
        throw numerical_error("non-finite log-likelihood at EM start");
    result.loglik_trace.push_back(prev_ll);

    for (int it = 1; it <= options.max_iter; ++it) {
        const std::vector<double> b = shifted_binomial_pmf(scale, cur.xi);
        const double uniform_share = (1.0 - cur.pi) / m;
        long double tau_sum = 0.0L;
        long double tau_shift = 0.0L; // sum of tau_j * (m - r_j)
        for (int r = 1; r <= scale.m; ++r) {
            const std::int64_t c = counts[static_cast<std::size_t>(r - 1)];
            if (c == 0)
                continue;
            const double br = b[static_cast<std::size_t>(r - 1)];
            const double tau = cur.pi * br / (cur.pi * br + uniform_share);
            tau_sum += static_cast<long double>(c) * tau;
            tau_shift += static_cast<long double>(c) * tau * (m - static_cast<double>(r));
        }
        cur.pi = clamp01(static_cast<double>(tau_sum / static_cast<long double>(n)),
                         kParamFloor, 1.0 - kParamFloor);
        cur.xi = clamp01(static_cast<double>(tau_shift / ((m - 1.0) * tau_sum)),
                         kParamFloor, 1.0 - kParamFloor);

        const double ll = log_likelihood_counts(counts, scale, cur);
        if (!std::isfinite(ll))
            throw numerical_error("non-finite log-likelihood at EM iteration " + std::to_string(it));
        result.loglik_trace.push_back(ll);
        result.iterations = it;
        if (std::abs(ll - prev_ll) < options.tolerance) {
            result.converged = true;
            break;
        }
        prev_ll = ll;
    }

    result.params = cur;
    result.loglik = result.loglik_trace.back();
    return result;
}

FitResult fit_em(const std::vector<int>& ratings, const RatingScale& scale,
                 const EmOptions& options) {
    return fit_em_counts(category_counts(ratings, scale), scale, options);
}

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t state = base;
    const std::uint64_t a = splitmix64(state);
    state = stream;
    const std::uint64_t b = splitmix64(state);
    state = a ^ (b + 0x9e3779b97f4a7c15ULL);
    return splitmix64(state);
}

} // namespace cubifs
