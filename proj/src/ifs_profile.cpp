#include "cubifs/ifs_profile.hpp"

#include <algorithm>
#include <cmath>

namespace cubifs {

namespace {

void check_fuzzy_inputs(const FrequencyTable& freq, const RatingScale& scale) {
    scale.validate();
    freq.validate();
    if (freq.m() != scale.m)
        throw domain_error("frequency table has " + std::to_string(freq.m()) +
                           " categories, scale has " + std::to_string(scale.m));
}

void check_pi_hat(double pi_hat) {
    if (!(pi_hat >= 0.0 && pi_hat <= 1.0) || !std::isfinite(pi_hat))
        throw domain_error("pi_hat must lie in [0,1], got " + std::to_string(pi_hat));
}

double increment(const FrequencyTable& freq, int r) {
    return std::max(freq.F(r) - freq.F(r - 1), 0.0);
}

} // namespace

const char* to_string(FuzzyVariant v) {
    return v == FuzzyVariant::zani ? "zani" : "cub";
}

FuzzyProfile membership_zani(const FrequencyTable& freq, const RatingScale& scale) {
    check_fuzzy_inputs(freq, scale);
    const int m = scale.m;
    const double below = freq.F(scale.l_b);
    if (below >= 1.0 - 1e-12)
        throw degenerate_data_error("no mass above the negative block (F(l_b) = 1)");

    FuzzyProfile p;
    p.variant = FuzzyVariant::zani;
    p.mu.assign(static_cast<std::size_t>(m), 0.0);
    p.nu.assign(static_cast<std::size_t>(m), 0.0);
    const double denom = 1.0 - below;
    double acc = 0.0;
    for (int r = scale.l_b + 1; r < scale.u_b; ++r) {
        acc = std::min(acc + increment(freq, r) / denom, 1.0);
        p.mu[static_cast<std::size_t>(r - 1)] = acc;
    }
    for (int r = scale.u_b; r <= m; ++r)
        p.mu[static_cast<std::size_t>(r - 1)] = 1.0;
    p.u = uncertainty_profile(p.mu, p.nu);
    return p;
}

CurvePart membership_cub(const FrequencyTable& freq, const RatingScale& scale, double pi_hat) {
    check_fuzzy_inputs(freq, scale);
    scale.require_fuzzy();
    check_pi_hat(pi_hat);
    if (scale.i_p != scale.l_b + 1)
        throw domain_error("cub membership requires l_b = i_p - 1");

    const int m = scale.m;
    CurvePart part;
    part.values.assign(static_cast<std::size_t>(m), 0.0);
    const double at_ip = (1.0 - pi_hat) / static_cast<double>(m);
    part.values[static_cast<std::size_t>(scale.i_p - 1)] = at_ip;

    const bool has_block = scale.u_b - 1 > scale.i_p;
    const double denom = freq.F(scale.u_b - 1) - freq.F(scale.i_p);
    if (has_block && denom <= 0.0) {
        // Zero-mass positive block: increments are 0, the profile stays at
        // mu(i_p) and jumps at u_b.
        part.degenerate_block = true;
        for (int r = scale.i_p + 1; r < scale.u_b; ++r)
            part.values[static_cast<std::size_t>(r - 1)] = at_ip;
    } else {
        double acc = at_ip;
        for (int r = scale.i_p + 1; r < scale.u_b; ++r) {
            acc = std::min(acc + pi_hat * increment(freq, r) / denom, 1.0);
            part.values[static_cast<std::size_t>(r - 1)] = acc;
        }
    }
    for (int r = scale.u_b; r <= m; ++r)
        part.values[static_cast<std::size_t>(r - 1)] = 1.0;
    return part;
}

CurvePart nonmembership_cub(const FrequencyTable& freq, const RatingScale& scale, double pi_hat) {
    check_fuzzy_inputs(freq, scale);
    scale.require_fuzzy();
    check_pi_hat(pi_hat);
    if (scale.i_p != scale.l_b + 1)
        throw domain_error("cub non-membership requires l_b = i_p - 1");

    const int m = scale.m;
    CurvePart part;
    part.values.assign(static_cast<std::size_t>(m), 0.0);
    const double at_ip = (1.0 - pi_hat) / static_cast<double>(m);
    part.values[static_cast<std::size_t>(scale.i_p - 1)] = at_ip;

    const double denom = freq.F(scale.l_b) - freq.F(1);
    if (denom <= 0.0) {
        part.degenerate_block = true;
        for (int r = 2; r <= scale.l_b; ++r)
            part.values[static_cast<std::size_t>(r - 1)] = at_ip;
    } else {
        double acc = at_ip; // anchored at nu(i_p), walking down
        for (int r = scale.l_b; r >= 2; --r) {
            acc = std::min(acc + pi_hat * increment(freq, r) / denom, 1.0);
            part.values[static_cast<std::size_t>(r - 1)] = acc;
        }
    }
    part.values[0] = 1.0;
    return part;
}

std::vector<double> uncertainty_profile(const std::vector<double>& mu,
                                        const std::vector<double>& nu) {
    if (mu.size() != nu.size() || mu.empty())
        throw domain_error("mu and nu must share a nonempty length");
    std::vector<double> u(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] + nu[i] > 1.0 + 1e-12)
            throw consistency_error("mu + nu exceeds 1 at category " + std::to_string(i + 1) +
                                    " (mu=" + std::to_string(mu[i]) + ", nu=" + std::to_string(nu[i]) +
                                    ")");
        u[i] = 1.0 - mu[i] - nu[i];
    }
    return u;
}

FuzzyProfile build_profile(const FrequencyTable& freq, const RatingScale& scale,
                           FuzzyVariant variant, std::optional<double> pi_hat,
                           std::string item_id) {
    FuzzyProfile p;
    if (variant == FuzzyVariant::zani) {
        p = membership_zani(freq, scale);
    } else {
        if (!pi_hat)
            throw domain_error("cub_ifs profile requires pi_hat" +
                               (item_id.empty() ? std::string() : " for item " + item_id));
        CurvePart mu = membership_cub(freq, scale, *pi_hat);
        CurvePart nu = nonmembership_cub(freq, scale, *pi_hat);
        p.variant = FuzzyVariant::cub_ifs;
        p.pi_hat = *pi_hat;
        p.mu = std::move(mu.values);
        p.nu = std::move(nu.values);
        p.degenerate_mu = mu.degenerate_block;
        p.degenerate_nu = nu.degenerate_block;
        p.u = uncertainty_profile(p.mu, p.nu);
    }
    p.item_id = std::move(item_id);
    p.validate(scale);
    return p;
}

void FuzzyProfile::validate(const RatingScale& scale) const {
    const std::size_t m = static_cast<std::size_t>(scale.m);
    if (mu.size() != m || nu.size() != m || u.size() != m)
        throw consistency_error("profile size mismatches scale");
    for (std::size_t i = 0; i < m; ++i) {
        if (mu[i] < -1e-12 || mu[i] > 1.0 + 1e-12 || nu[i] < -1e-12 || nu[i] > 1.0 + 1e-12)
            throw consistency_error("profile value outside [0,1] at category " +
                                    std::to_string(i + 1));
        if (i > 0 && mu[i] + 1e-12 < mu[i - 1])
            throw consistency_error("mu decreases at category " + std::to_string(i + 1));
        if (i > 0 && nu[i] > nu[i - 1] + 1e-12)
            throw consistency_error("nu increases at category " + std::to_string(i + 1));
        if (mu[i] + nu[i] > 1.0 + 1e-12)
            throw consistency_error("mu + nu exceeds 1 at category " + std::to_string(i + 1));
        if (std::abs(u[i] - (1.0 - mu[i] - nu[i])) > 1e-12)
            throw consistency_error("u is not the residual at category " + std::to_string(i + 1));
    }
    if (std::abs(mu.back() - 1.0) > 1e-12)
        throw consistency_error("mu(m) must equal 1");
    if (variant == FuzzyVariant::zani) {
        for (double v : nu)
            if (v != 0.0)
                throw consistency_error("zani profiles carry no non-membership");
    } else {
        if (!pi_hat)
            throw consistency_error("cub_ifs profile is missing pi_hat");
        if (std::abs(nu.front() - 1.0) > 1e-12)
            throw consistency_error("nu(1) must equal 1 for cub_ifs");
        for (int r = 1; r <= scale.i_p - 1; ++r)
            if (mu[static_cast<std::size_t>(r - 1)] != 0.0)
                throw consistency_error("mu must vanish below the indifference point");
    }
}

} // namespace cubifs
