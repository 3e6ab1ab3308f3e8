#pragma once

#include "cubifs/errors.hpp"

namespace cubifs {

/// An m-point ordinal scale, oriented "the greater the score, the higher the
/// feeling". Categories are 1..m. `i_p` is the indifference category, `l_b`
/// the last category treated as a negative choice and `u_b` the first
/// category with crisp (full) membership.
struct RatingScale {
    int m = 7;
    int i_p = 4;
    int l_b = 3;
    int u_b = 7;

    /// Balanced scale for odd m >= 5: i_p = (m+1)/2, l_b = i_p - 1, u_b = m.
    static RatingScale balanced(int m);

    /// Enforces m > 3 and 1 <= l_b < i_p < u_b <= m. Throws domain_error.
    void validate() const;

    /// True when the scale supports fuzzy profiles: odd m >= 5 with the
    /// indifference point at the mid category.
    bool fuzzy_capable() const;

    /// Throws domain_error unless fuzzy_capable().
    void require_fuzzy() const;

    bool contains(int r) const { return r >= 1 && r <= m; }
};

inline RatingScale RatingScale::balanced(int m) {
    if (m < 5 || m % 2 == 0)
        throw domain_error("balanced scale requires odd m >= 5, got m=" + std::to_string(m));
    RatingScale s;
    s.m = m;
    s.i_p = (m + 1) / 2;
    s.l_b = s.i_p - 1;
    s.u_b = m;
    return s;
}

inline void RatingScale::validate() const {
    if (m <= 3)
        throw domain_error("rating scale requires m > 3, got m=" + std::to_string(m));
    if (!(1 <= l_b && l_b < i_p && i_p < u_b && u_b <= m))
        throw domain_error("rating scale bounds must satisfy 1 <= l_b < i_p < u_b <= m (got l_b=" +
                           std::to_string(l_b) + ", i_p=" + std::to_string(i_p) + ", u_b=" +
                           std::to_string(u_b) + ", m=" + std::to_string(m) + ")");
}

inline bool RatingScale::fuzzy_capable() const {
    return m >= 5 && m % 2 == 1 && i_p == (m + 1) / 2;
}

inline void RatingScale::require_fuzzy() const {
    validate();
    if (!fuzzy_capable())
        throw domain_error("fuzzy profiles require an odd scale with m >= 5 and i_p = (m+1)/2");
}

} // namespace cubifs
