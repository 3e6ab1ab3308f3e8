#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cubifs/aggregation.hpp"
#include "cubifs/cub_model.hpp"
#include "cubifs/ifs_profile.hpp"
#include "cubifs/survey.hpp"

namespace cubifs {

enum class OutputFormat { tsv, json };

/// Everything a pipeline run needs beyond the input file.
struct RunConfig {
    RatingScale scale{};
    FuzzyVariant variant = FuzzyVariant::cub_ifs;
    WeightMode weight_mode = WeightMode::uncertainty_proportions;
    EmOptions em{};
    std::uint64_t seed = 1;
    std::string missing_token;
    RangePolicy range_policy = RangePolicy::strict;
    OutputFormat format = OutputFormat::tsv;
    int digits = 4;
    bool compare = false;
    bool strict_weights = false;
    std::map<std::string, double> pi_overrides; // item id (or "*") -> pi_hat

    void validate() const;

    /// Override lookup: exact item id first, then the "*" wildcard.
    std::optional<double> pi_override_for(const std::string& item_id) const;
};

/// One report table: a name, column headers and typed cells. Profile series
/// share the same shape so every emitted document validates against one
/// schema.
struct Cell {
    enum class Kind { text, number, integer };
    Kind kind = Kind::text;
    std::string text;
    double number = 0.0;
    std::int64_t integer = 0;

    static Cell of(std::string v);
    static Cell of(double v);
    static Cell of(std::int64_t v);
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Fixed-point decimal formatting with round-half-even ties, locale-free.
std::string format_fixed(double value, int digits);

void write_tsv(const Table& table, std::ostream& out, int digits);
std::string table_to_json(const Table& table);

/// {"tables": [...]} document wrapping several tables (the stdout shape of
/// the JSON format).
std::string tables_to_json(const std::vector<Table>& tables);

// ---------------------------------------------------------------------------
// Pipeline pieces shared by the CLI subcommands.

struct ItemFit {
    std::string item;
    FitResult fit;
    bool ok = false;
    std::string error;
};

/// EM fit of every item from its non-missing ratings; failures are captured
/// per item instead of aborting the batch.
std::vector<ItemFit> fit_all_items(const RatingMatrix& matrix, const EmOptions& options);

/// One variant's profiles for all items. pi_hat per item comes from the
/// config override when present, otherwise from `fits` (error if that item
/// failed to fit). The zani variant needs no pi_hat.
std::vector<FuzzyProfile> profiles_for(const RatingMatrix& matrix, const RunConfig& config,
                                       FuzzyVariant variant, const std::vector<ItemFit>& fits);

/// Weights + scores of one (variant, weight mode) pipeline over the
/// complete-case rows.
struct PipelineScores {
    FuzzyVariant variant;
    WeightVector weights;
    ScoreTriple scores;
    std::int64_t respondents_used = 0;
    std::int64_t respondents_dropped = 0;
};

PipelineScores run_scores(const RatingMatrix& matrix, const RunConfig& config,
                          FuzzyVariant variant, WeightMode mode,
                          const std::vector<FuzzyProfile>& profiles);

// ---------------------------------------------------------------------------
// Table builders mirroring the published layout.

Table parameters_table(const std::vector<ItemFit>& fits);
Table membership_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m);
Table nonmembership_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m);
Table uncertainty_table(const std::vector<std::vector<FuzzyProfile>>& variants, int m);
Table weights_table(const std::vector<std::string>& items,
                    const std::vector<WeightVector>& weight_sets);
Table scores_table(const std::vector<PipelineScores>& pipelines);
Table profile_series(const FuzzyProfile& profile, int m);

struct ReportBundle {
    std::vector<Table> tables; // the six report tables, in order
    std::vector<Table> series; // one per item
};

/// Full run: fit, fuzzify (both variants), weights and scores for both
/// canonical pipelines, plus plot-ready per-item series.
ReportBundle build_report(const RatingMatrix& matrix, const RunConfig& config);

/// Writes one file per table/series under `dir` (created if needed), with
/// the extension matching config.format. Returns the file names written.
std::vector<std::string> write_bundle(const ReportBundle& bundle, const std::string& dir,
                                      const RunConfig& config);

} // namespace cubifs
