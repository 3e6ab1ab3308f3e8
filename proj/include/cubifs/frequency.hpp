#pragma once

#include <cstdint>
#include <vector>

#include "cubifs/errors.hpp"

namespace cubifs {

/// Relative frequencies f_r and empirical distribution function F(r) of one
/// item over categories 1..m. `n` is the sample size behind the table
/// (0 for theoretical distributions).
struct FrequencyTable {
    std::vector<double> freqs; // f_r at index r-1
    std::vector<double> cdf;   // F(r) at index r-1
    std::int64_t n = 0;

    int m() const { return static_cast<int>(freqs.size()); }

    /// f_r, 1-based category index.
    double freq(int r) const { return freqs[static_cast<std::size_t>(r - 1)]; }

    /// F(r), 1-based; F(0) = 0 by convention.
    double F(int r) const { return r <= 0 ? 0.0 : cdf[static_cast<std::size_t>(r - 1)]; }

    static FrequencyTable from_counts(const std::vector<std::int64_t>& counts);
    static FrequencyTable from_probabilities(std::vector<double> probs, std::int64_t n = 0);

    /// Checks f_r >= 0, sum(f) == 1 and CDF consistency within 1e-12.
    void validate() const;
};

} // namespace cubifs
