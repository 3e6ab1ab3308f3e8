#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cubifs/frequency.hpp"
#include "cubifs/rating_scale.hpp"

namespace cubifs {

/// Marker for a missing rating inside RatingMatrix rows.
inline constexpr int missing_rating = 0;

/// n respondents x K items of integer ratings (1..m, or missing_rating).
struct RatingMatrix {
    std::vector<std::string> items;
    std::vector<std::vector<int>> rows;
    RatingScale scale;

    std::size_t item_count() const { return items.size(); }
    std::size_t respondent_count() const { return rows.size(); }

    /// Index of an item id; throws domain_error if absent.
    std::size_t item_index(const std::string& item_id) const;

    bool row_complete(std::size_t j) const;
};

struct RowIssue {
    std::int64_t line = 0; // 1-based line number in the file
    std::string item;
    std::string value;
    std::string reason;
};

struct ValidationReport {
    std::int64_t total_rows = 0; // data rows seen (accepted + rejected)
    std::int64_t accepted_rows = 0;
    std::int64_t rejected_rows = 0;
    std::int64_t missing_cells = 0;
    std::vector<RowIssue> issues;

    std::string summary() const;
};

/// Out-of-range cells reject the whole row (strict) or are coerced to
/// missing (lenient).
enum class RangePolicy { strict, lenient };

struct LoadResult {
    RatingMatrix matrix;
    ValidationReport report;
};

/// Parses a comma-separated file with a header row of item names and one
/// row per respondent. Cells equal to `missing_token` (after trimming)
/// become missing ratings.
LoadResult load_csv(std::istream& in, const RatingScale& scale,
                    const std::string& missing_token = "",
                    RangePolicy policy = RangePolicy::strict);

LoadResult load_csv_file(const std::string& path, const RatingScale& scale,
                         const std::string& missing_token = "",
                         RangePolicy policy = RangePolicy::strict);

/// Writes the matrix back out in the same dialect load_csv reads.
void save_csv(const RatingMatrix& matrix, std::ostream& out,
              const std::string& missing_token = "");

void save_csv_file(const RatingMatrix& matrix, const std::string& path,
                   const std::string& missing_token = "");

/// Per-category counts of one item's non-missing ratings.
std::vector<std::int64_t> item_counts(const RatingMatrix& matrix, std::size_t item);

/// Relative frequencies of one item over its non-missing ratings.
FrequencyTable item_frequencies(const RatingMatrix& matrix, std::size_t item);
FrequencyTable item_frequencies(const RatingMatrix& matrix, const std::string& item_id);

/// Rows without any missing rating (listwise deletion for aggregation).
RatingMatrix complete_cases(const RatingMatrix& matrix);

} // namespace cubifs
