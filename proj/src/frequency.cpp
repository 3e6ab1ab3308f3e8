#include "cubifs/frequency.hpp"

#include <cmath>
#include <string>

namespace cubifs {

namespace {

std::vector<double> accumulate_cdf(const std::vector<double>& freqs) {
    std::vector<double> cdf(freqs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        acc += freqs[i];
        cdf[i] = acc;
    }
    if (!cdf.empty())
        cdf.back() = 1.0; // pin the top against accumulated rounding
    return cdf;
}

} // namespace

FrequencyTable FrequencyTable::from_counts(const std::vector<std::int64_t>& counts) {
    if (counts.empty())
        throw domain_error("frequency table needs at least one category");
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0)
            throw domain_error("negative count in frequency table");
        total += c;
    }
    if (total == 0)
        throw domain_error("frequency table needs at least one observation");
    FrequencyTable t;
    t.n = total;
    t.freqs.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        t.freqs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    t.cdf = accumulate_cdf(t.freqs);
    return t;
}

FrequencyTable FrequencyTable::from_probabilities(std::vector<double> probs, std::int64_t n) {
    FrequencyTable t;
    t.freqs = std::move(probs);
    t.n = n;
    t.cdf = accumulate_cdf(t.freqs);
    t.validate();
    return t;
}

void FrequencyTable::validate() const {
    if (freqs.empty() || cdf.size() != freqs.size())
        throw domain_error("frequency table is empty or cdf size mismatches");
    double sum = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (!(freqs[i] >= 0.0))
            throw domain_error("negative relative frequency at category " + std::to_string(i + 1));
        sum += freqs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw domain_error("relative frequencies sum to " + std::to_string(sum) + ", expected 1");
    double prev = 0.0;
    double partial = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        if (cdf[i] + 1e-12 < prev)
            throw domain_error("cdf decreases at category " + std::to_string(i + 1));
        partial += freqs[i];
        if (std::abs(cdf[i] - partial) > 1e-12)
            throw domain_error("cdf does not accumulate the frequencies at category " +
                               std::to_string(i + 1));
        prev = cdf[i];
    }
    if (std::abs(cdf.back() - 1.0) > 1e-12)
        throw domain_error("cdf does not reach 1");
}

} // namespace cubifs
