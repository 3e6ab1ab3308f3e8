#include "cubifs/survey.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace cubifs {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const std::size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return {};
    const std::size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// One line of comma-separated fields; double quotes guard commas and are
// escaped by doubling. Embedded newlines are not supported.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

bool parse_int(const std::string& s, int& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

std::string strip_bom(std::string s) {
    if (s.size() >= 3 && s[0] == '\xEF' && s[1] == '\xBB' && s[2] == '\xBF')
        return s.substr(3);
    return s;
}

} // namespace

std::size_t RatingMatrix::item_index(const std::string& item_id) const {
    const auto it = std::find(items.begin(), items.end(), item_id);
    if (it == items.end())
        throw domain_error("unknown item '" + item_id + "'");
    return static_cast<std::size_t>(it - items.begin());
}

bool RatingMatrix::row_complete(std::size_t j) const {
    const std::vector<int>& row = rows[j];
    return std::none_of(row.begin(), row.end(), [](int r) { return r == missing_rating; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "rows=" << total_rows << " accepted=" << accepted_rows << " rejected=" << rejected_rows
       << " missing_cells=" << missing_cells;
    return os.str();
}

LoadResult load_csv(std::istream& in, const RatingScale& scale, const std::string& missing_token,
                    RangePolicy policy) {
    scale.validate();
    LoadResult result;
    result.matrix.scale = scale;

    std::string line;
    std::int64_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1)
            line = strip_bom(line);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;

        std::vector<std::string> fields = split_csv_line(line);
        for (std::string& f : fields)
            f = trim(f);

        if (!have_header) {
            std::set<std::string> seen;
            for (const std::string& f : fields) {
                if (f.empty())
                    throw validation_error("empty item name in header (line 1)");
                if (!seen.insert(f).second)
                    throw validation_error("duplicate item name '" + f + "' in header");
            }
            result.matrix.items = std::move(fields);
            have_header = true;
            continue;
        }

        ++result.report.total_rows;
        const std::size_t k_expected = result.matrix.items.size();
        if (fields.size() != k_expected) {
            ++result.report.rejected_rows;
            result.report.issues.push_back(
                {line_no, "", "", "expected " + std::to_string(k_expected) + " fields, got " +
                                    std::to_string(fields.size())});
            continue;
        }

        std::vector<int> row(k_expected, missing_rating);
        bool rejected = false;
        std::int64_t row_missing = 0;
        for (std::size_t k = 0; k < k_expected && !rejected; ++k) {
            const std::string& cell = fields[k];
            if (cell == missing_token) {
                row[k] = missing_rating;
                ++row_missing;
                continue;
            }
            int value = 0;
            if (!parse_int(cell, value)) {
                result.report.issues.push_back(
                    {line_no, result.matrix.items[k], cell, "unparseable cell"});
                rejected = true;
                continue;
            }
            if (!scale.contains(value)) {
                if (policy == RangePolicy::strict) {
                    result.report.issues.push_back({line_no, result.matrix.items[k], cell,
                                                    "rating out of range 1.." +
                                                        std::to_string(scale.m)});
                    rejected = true;
                } else {
                    result.report.issues.push_back({line_no, result.matrix.items[k], cell,
                                                    "rating out of range, coerced to missing"});
                    row[k] = missing_rating;
                    ++row_missing;
                }
                continue;
            }
            row[k] = value;
        }

        if (rejected) {
            ++result.report.rejected_rows;
        } else {
            ++result.report.accepted_rows;
            result.report.missing_cells += row_missing;
            result.matrix.rows.push_back(std::move(row));
        }
    }

    if (!have_header)
        throw domain_error("empty input: no header row");
    if (result.report.total_rows == 0)
        throw domain_error("no data rows after the header");
    if (result.report.accepted_rows == 0)
        throw validation_error("all " + std::to_string(result.report.total_rows) +
                               " rows were rejected; first issue: " +
                               (result.report.issues.empty() ? std::string("unknown")
                                                             : result.report.issues[0].reason));
    return result;
}

LoadResult load_csv_file(const std::string& path, const RatingScale& scale,
                         const std::string& missing_token, RangePolicy policy) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw domain_error("cannot open input file '" + path + "'");
    return load_csv(in, scale, missing_token, policy);
}

void save_csv(const RatingMatrix& matrix, std::ostream& out, const std::string& missing_token) {
    for (std::size_t k = 0; k < matrix.items.size(); ++k) {
        if (k)
            out << ',';
        out << csv_escape(matrix.items[k]);
    }
    out << '\n';
    for (const std::vector<int>& row : matrix.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k)
                out << ',';
            if (row[k] == missing_rating)
                out << csv_escape(missing_token);
            else
                out << row[k];
        }
        out << '\n';
    }
}

void save_csv_file(const RatingMatrix& matrix, const std::string& path,
                   const std::string& missing_token) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw domain_error("cannot open output file '" + path + "'");
    save_csv(matrix, out, missing_token);
}

std::vector<std::int64_t> item_counts(const RatingMatrix& matrix, std::size_t item) {
    if (item >= matrix.item_count())
        throw domain_error("item index " + std::to_string(item) + " out of range");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(matrix.scale.m), 0);
    for (const std::vector<int>& row : matrix.rows) {
        const int r = row[item];
        if (r == missing_rating)
            continue;
        if (!matrix.scale.contains(r))
            throw domain_error("rating " + std::to_string(r) + " outside the scale for item " +
                               matrix.items[item]);
        ++counts[static_cast<std::size_t>(r - 1)];
    }
    return counts;
}

FrequencyTable item_frequencies(const RatingMatrix& matrix, std::size_t item) {
    const std::vector<std::int64_t> counts = item_counts(matrix, item);
    std::int64_t observed = 0;
    for (std::int64_t c : counts)
        observed += c;
    if (observed == 0)
        throw domain_error("item " + matrix.items[item] + " has no observed ratings");
    return FrequencyTable::from_counts(counts);
}

FrequencyTable item_frequencies(const RatingMatrix& matrix, const std::string& item_id) {
    return item_frequencies(matrix, matrix.item_index(item_id));
}

RatingMatrix complete_cases(const RatingMatrix& matrix) {
    RatingMatrix out;
    out.items = matrix.items;
    out.scale = matrix.scale;
    for (std::size_t j = 0; j < matrix.respondent_count(); ++j)
        if (matrix.row_complete(j))
            out.rows.push_back(matrix.rows[j]);
    return out;
}

} // namespace cubifs
