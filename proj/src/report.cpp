#include "cubifs/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace cubifs {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string sanitize_filename(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("item") : out;
}

RatingMatrix select_items(const RatingMatrix& matrix, const std::vector<std::size_t>& keep) {
    RatingMatrix out;
    out.scale = matrix.scale;
    for (std::size_t k : keep)
        out.items.push_back(matrix.items[k]);
    out.rows.reserve(matrix.rows.size());
    for (const std::vector<int>& row : matrix.rows) {
        std::vector<int> r;
        r.reserve(keep.size());
        for (std::size_t k : keep)
            r.push_back(row[k]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

} // namespace

void RunConfig::validate() const {
    scale.validate();
    if (digits < 0)
        throw domain_error("rounding digits must be >= 0");
    if (em.tolerance <= 0.0 || em.max_iter < 1)
        throw domain_error("EM needs a positive tolerance and max_iter >= 1");
    for (const auto& [item, pi] : pi_overrides)
        if (!(pi >= 0.0 && pi <= 1.0))
            throw domain_error("pi override for '" + item + "' must lie in [0,1]");
}

std::optional<double> RunConfig::pi_override_for(const std::string& item_id) const {
    auto it = pi_overrides.find(item_id);
    if (it != pi_overrides.end())
        return it->second;
    it = pi_overrides.find("*");
    if (it != pi_overrides.end())
        return it->second;
    return std::nullopt;
}

Cell Cell::of(std::string v) {
    Cell c;
    c.kind = Kind::text;
    c.text = std::move(v);
    return c;
}

Cell Cell::of(double v) {
    Cell c;
    c.kind = Kind::number;
    c.number = v;
    return c;
}

Cell Cell::of(std::int64_t v) {
    Cell c;
    c.kind = Kind::integer;
    c.integer = v;
    return c;
}

std::string format_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    std::string s(buf);
    // A value that rounds to zero keeps no sign.
    if (!s.empty() && s[0] == '-' &&
        s.find_first_not_of("0.", 1) == std::string::npos)
        s.erase(0, 1);
    return s;
}

void write_tsv(const Table& table, std::ostream& out, int digits) {
    out << "# table: " << table.name << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c)
            out << '\t';
        out << table.columns[c];
    }
    out << '\n';
    for (const std::vector<Cell>& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out << '\t';
            switch (row[c].kind) {
            case Cell::Kind::text: out << row[c].text; break;
            case Cell::Kind::number: out << format_fixed(row[c].number, digits); break;
            case Cell::Kind::integer: out << row[c].integer; break;
            }
        }
        out << '\n';
    }
}

namespace {

ordered_json table_doc(const Table& table) {
    ordered_json doc;
    doc["table"] = table.name;
    doc["columns"] = table.columns;
    ordered_json rows = ordered_json::array();
    for (const std::vector<Cell>& row : table.rows) {
        ordered_json r = ordered_json::array();
        for (const Cell& cell : row) {
            switch (cell.kind) {
            case Cell::Kind::text: r.push_back(cell.text); break;
            case Cell::Kind::number: r.push_back(cell.number); break;
            case Cell::Kind::integer: r.push_back(cell.integer); break;
            }
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

} // namespace

std::string table_to_json(const Table& table) {
    return table_doc(table).dump(2) + "\n";
}

std::string tables_to_json(const std::vector<Table>& tables) {
    ordered_json doc;
    ordered_json arr = ordered_json::array();
    for (const Table& t : tables)
        arr.push_back(table_doc(t));
    doc["tables"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::vector<ItemFit> fit_all_items(const RatingMatrix& matrix, const EmOptions& options) {
    std::vector<ItemFit> fits;
    fits.reserve(matrix.item_count());
    for (std::size_t k = 0; k < matrix.item_count(); ++k) {
        ItemFit f;
        f.item = matrix.items[k];
        try {
            f.fit = fit_em_counts(item_counts(matrix, k), matrix.scale, options);
            f.ok = true;
        } catch (const std::exception& e) {
            f.ok = false;
            f.error = e.what();
        }
        fits.push_back(std::move(f));
    }
    return fits;
}

std::vector<FuzzyProfile> profiles_for(const RatingMatrix& matrix, const RunConfig& config,
                                       FuzzyVariant variant, const std::vector<ItemFit>& fits) {
    std::vector<FuzzyProfile> profiles;
    profiles.reserve(matrix.item_count());
    for (std::size_t k = 0; k < matrix.item_count(); ++k) {
        const std::string& item = matrix.items[k];
        const FrequencyTable freq = item_frequencies(matrix, k);
        std::optional<double> pi_hat;
        if (variant == FuzzyVariant::cub_ifs) {
            pi_hat = config.pi_override_for(item);
            if (!pi_hat) {
                if (k < fits.size() && fits[k].ok)
                    pi_hat = fits[k].fit.params.pi;
                else
                    throw numerical_error("no pi_hat for item " + item + ": " +
                                          (k < fits.size() ? fits[k].error : "item was not fitted"));
            }
        }
        profiles.push_back(build_profile(freq, config.scale, variant, pi_hat, item));
    }
    return profiles;
}

PipelineScores run_scores(const RatingMatrix& matrix, const RunConfig& config,
                          FuzzyVariant variant, WeightMode mode,
                          const std::vector<FuzzyProfile>& profiles) {
    const RatingMatrix complete = complete_cases(matrix);
    PipelineScores out;
    out.variant = variant;
    out.respondents_used = static_cast<std::int64_t>(complete.respondent_count());
    out.respondents_dropped =
        static_cast<std::int64_t>(matrix.respondent_count() - complete.respondent_count());
    if (complete.respondent_count() == 0)
        throw degenerate_data_error("no complete rows left for aggregation");

    const std::vector<double> g = fuzzy_proportions(profiles, complete, mode);
    out.weights = log_inverse_weights(g, mode, config.strict_weights);

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(complete.respondent_count());
    for (const std::vector<int>& row : complete.rows)
        pairs.push_back(iwam_respondent(profiles, out.weights, row));
    out.scores = final_scores(pairs);
    return out;
}

Table parameters_table(const std::vector<ItemFit>& fits) {
    Table t;
    t.name = "parameters";
    t.columns = {"item", "pi", "xi", "1-pi", "1-xi", "loglik", "iterations"};
    for (const ItemFit& f : fits) {
        if (!f.ok)
            continue;
        const CubParams& p = f.fit.params;
        t.rows.push_back({Cell::of(f.item), Cell::of(p.pi), Cell::of(p.xi), Cell::of(1.0 - p.pi),
                          Cell::of(1.0 - p.xi), Cell::of(f.fit.loglik),
                          Cell::of(static_cast<std::int64_t>(f.fit.iterations))});
    }
    return t;
}

namespace {

Table curve_table(const std::string& name, const std::vector<std::vector<FuzzyProfile>>& variants,
                  int m, const std::vector<double> FuzzyProfile::*curve) {
    Table t;
    t.name = name;
    t.columns = {"item", "variant"};
    for (int r = 1; r <= m; ++r)
        t.columns.push_back("R" + std::to_string(r));
    if (variants.empty())
        return t;
    const std::size_t items = variants.front().size();
    for (std::size_t i = 0; i < items; ++i) {
        for (const std::vector<FuzzyProfile>& group : variants) {
            const FuzzyProfile& p = group[i];
            std::vector<Cell> row{Cell::of(p.item_id), Cell::of(std::string(to_string(p.variant)))};
            for (double v : p.*curve)
                row.push_back(Cell::of(v));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

} // namespace

Table membership_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m) {
    return curve_table("membership", variants, m, &FuzzyProfile::mu);
}

Table nonmembership_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m) {
    return curve_table("nonmembership", variants, m, &FuzzyProfile::nu);
}

Table uncertainty_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m) {
    return curve_table("uncertainty", variants, m, &FuzzyProfile::u);
}

Table weights_table(const std::vector<std::string>& items,
                    const std::vector<WeightVector>& weight_sets) {
    Table t;
    t.name = "weights";
    t.columns = {"weights"};
    for (const std::string& item : items)
        t.columns.push_back(item);
    for (const WeightVector& w : weight_sets) {
        std::vector<Cell> row{Cell::of(std::string(to_string(w.mode)))};
        for (double v : w.weights)
            row.push_back(Cell::of(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table scores_table(const std::vector<PipelineScores>& pipelines) {
    Table t;
    t.name = "scores";
    t.columns = {"variant", "weights", "mu_bar", "nu_bar", "u_bar", "respondents"};
    for (const PipelineScores& p : pipelines) {
        t.rows.push_back({Cell::of(std::string(to_string(p.variant))),
                          Cell::of(std::string(to_string(p.weights.mode))),
                          Cell::of(p.scores.mu_bar), Cell::of(p.scores.nu_bar),
                          Cell::of(p.scores.u_bar), Cell::of(p.respondents_used)});
    }
    return t;
}

Table profile_series(const FuzzyProfile& profile, int m) {
    Table t;
    t.name = "profile_" + profile.item_id;
    t.columns = {"item", "variant", "r", "mu", "nu", "u"};
    for (int r = 1; r <= m; ++r) {
        t.rows.push_back({Cell::of(profile.item_id), Cell::of(std::string(to_string(profile.variant))),
                          Cell::of(static_cast<std::int64_t>(r)), Cell::of(profile.mu_at(r)),
                          Cell::of(profile.nu_at(r)), Cell::of(profile.u_at(r))});
    }
    return t;
}

ReportBundle build_report(const RatingMatrix& matrix, const RunConfig& config) {
    config.validate();
    const std::vector<ItemFit> fits = fit_all_items(matrix, config.em);

    // Items stay in the bundle when they fitted or carry an override.
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < matrix.item_count(); ++k)
        if (fits[k].ok || config.pi_override_for(matrix.items[k]))
            usable.push_back(k);
    if (usable.empty())
        throw degenerate_data_error("no item could be fitted or overridden");

    const RatingMatrix sub = select_items(matrix, usable);
    std::vector<ItemFit> sub_fits;
    for (std::size_t k : usable)
        sub_fits.push_back(fits[k]);

    const std::vector<FuzzyProfile> zani = profiles_for(sub, config, FuzzyVariant::zani, sub_fits);
    const std::vector<FuzzyProfile> cub =
        profiles_for(sub, config, FuzzyVariant::cub_ifs, sub_fits);

    const PipelineScores zani_scores =
        run_scores(sub, config, FuzzyVariant::zani, WeightMode::membership_proportions, zani);
    const PipelineScores cub_scores =
        run_scores(sub, config, FuzzyVariant::cub_ifs, WeightMode::uncertainty_proportions, cub);

    ReportBundle bundle;
    bundle.tables.push_back(parameters_table(fits));
    bundle.tables.push_back(membership_table({zani, cub}, config.scale.m));
    bundle.tables.push_back(nonmembership_table({zani, cub}, config.scale.m));
    bundle.tables.push_back(uncertainty_table({zani, cub}, config.scale.m));
    bundle.tables.push_back(weights_table(sub.items, {zani_scores.weights, cub_scores.weights}));
    bundle.tables.push_back(scores_table({zani_scores, cub_scores}));
    for (const FuzzyProfile& p : cub)
        bundle.series.push_back(profile_series(p, config.scale.m));
    return bundle;
}

std::vector<std::string> write_bundle(const ReportBundle& bundle, const std::string& dir,
                                      const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const char* ext = config.format == OutputFormat::tsv ? ".tsv" : ".json";

    std::vector<std::string> written;
    auto emit = [&](const Table& table, const std::string& basename) {
        const std::string name = basename + ext;
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out)
            throw domain_error("cannot write '" + name + "' under " + dir);
        if (config.format == OutputFormat::tsv)
            write_tsv(table, out, config.digits);
        else
            out << table_to_json(table);
        written.push_back(name);
    };

    for (std::size_t i = 0; i < bundle.tables.size(); ++i)
        emit(bundle.tables[i], "table" + std::to_string(i + 1) + "_" + bundle.tables[i].name);
    for (const Table& series : bundle.series)
        emit(series, sanitize_filename(series.name));
    return written;
}

} // namespace cubifs
