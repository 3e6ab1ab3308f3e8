// Command-line front end: fit, fuzzify, weights, scores, simulate, report.
//
// Exit codes: 0 success, 2 usage, 3 validation (bad input data),
// 4 numerical (fit or aggregation failure), 1 internal.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cubifs/report.hpp"

namespace {

using namespace cubifs;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

struct CliState {
    RunConfig config;
    int scale_m = 7;
    int ip = 0; // 0 = derive from m
    int lb = 0;
    int ub = 0;
    std::string variant = "cub";
    std::string weights = "u";
    std::string format = "tsv";
    bool lenient_range = false;
    std::vector<std::string> pi_override_args;

    std::string input_path;
    std::string output_path; // simulate CSV / report directory
    std::vector<std::string> item_args;
    std::int64_t simulate_n = 0;
};

CLI::Option* with_env(CLI::Option* opt, const std::string& flag) {
    std::string env = "CUBIFS_";
    for (char c : flag)
        env.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return opt->envname(env);
}

void add_scale_options(CLI::App* cmd, CliState& st) {
    with_env(cmd->add_option("--scale-m", st.scale_m, "Number of categories (default 7)"),
             "scale-m");
    with_env(cmd->add_option("--ip", st.ip, "Indifference category (default (m+1)/2)"), "ip");
    with_env(cmd->add_option("--lb", st.lb, "Last negative category (default ip-1)"), "lb");
    with_env(cmd->add_option("--ub", st.ub, "First crisp-membership category (default m)"), "ub");
}

void add_output_options(CLI::App* cmd, CliState& st) {
    with_env(cmd->add_option("--format", st.format, "Output format: tsv | json")
                 ->check(CLI::IsMember({"tsv", "json"})),
             "format");
    with_env(cmd->add_option("--digits", st.config.digits, "Rounding digits in TSV mode"),
             "digits");
}

void add_pipeline_options(CLI::App* cmd, CliState& st) {
    with_env(cmd->add_option("--variant", st.variant, "Fuzzy variant: zani | cub")
                 ->check(CLI::IsMember({"zani", "cub"})),
             "variant");
    with_env(cmd->add_option("--weights", st.weights, "Weight proportions: mu | u")
                 ->check(CLI::IsMember({"mu", "u"})),
             "weights");
    with_env(cmd->add_option("--tol", st.config.em.tolerance, "EM log-likelihood tolerance"),
             "tol");
    with_env(cmd->add_option("--max-iter", st.config.em.max_iter, "EM iteration cap"), "max-iter");
    with_env(cmd->add_option("--seed", st.config.seed, "Seed for randomized steps"), "seed");
    with_env(cmd->add_option("--missing-token", st.config.missing_token,
                             "Cell marking a missing rating (default empty)"),
             "missing-token");
    with_env(cmd->add_flag("--lenient-range", st.lenient_range,
                           "Coerce out-of-range ratings to missing instead of rejecting rows"),
             "lenient-range");
    with_env(cmd->add_option("--pi-override", st.pi_override_args,
                             "ITEM=VALUE: use this pi_hat instead of fitting (\"*\" = all items)"),
             "pi-override");
    with_env(cmd->add_flag("--compare", st.config.compare,
                           "Run both the zani and cub pipelines"),
             "compare");
    with_env(cmd->add_flag("--strict-weights", st.config.strict_weights,
                           "Fail on fuzzy proportions outside (0,1) instead of clamping"),
             "strict-weights");
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw domain_error("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size())
        throw domain_error("cannot parse " + what + " from '" + s + "'");
    return v;
}

void finalize_config(CliState& st) {
    RatingScale scale;
    scale.m = st.scale_m;
    scale.i_p = st.ip > 0 ? st.ip : (st.scale_m + 1) / 2;
    scale.l_b = st.lb > 0 ? st.lb : scale.i_p - 1;
    scale.u_b = st.ub > 0 ? st.ub : st.scale_m;
    st.config.scale = scale;
    st.config.variant = st.variant == "zani" ? FuzzyVariant::zani : FuzzyVariant::cub_ifs;
    st.config.weight_mode = st.weights == "mu" ? WeightMode::membership_proportions
                                               : WeightMode::uncertainty_proportions;
    st.config.format = st.format == "tsv" ? OutputFormat::tsv : OutputFormat::json;
    st.config.range_policy = st.lenient_range ? RangePolicy::lenient : RangePolicy::strict;
    for (const std::string& arg : st.pi_override_args) {
        const std::size_t eq = arg.find('=');
        if (eq == std::string::npos || eq == 0)
            throw domain_error("--pi-override expects ITEM=VALUE, got '" + arg + "'");
        st.config.pi_overrides[arg.substr(0, eq)] =
            parse_double(arg.substr(eq + 1), "pi override");
    }
    st.config.validate();
}

LoadResult load_input(const CliState& st) {
    LoadResult loaded = load_csv_file(st.input_path, st.config.scale, st.config.missing_token,
                                      st.config.range_policy);
    std::cerr << "loaded " << st.input_path << ": " << loaded.report.summary() << "\n";
    for (const RowIssue& issue : loaded.report.issues)
        std::cerr << "  line " << issue.line
                  << (issue.item.empty() ? std::string() : " item " + issue.item)
                  << (issue.value.empty() ? std::string() : " value '" + issue.value + "'") << ": "
                  << issue.reason << "\n";
    return loaded;
}

void emit_tables(const std::vector<Table>& tables, const RunConfig& config) {
    if (config.format == OutputFormat::tsv) {
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (i)
                std::cout << "\n";
            write_tsv(tables[i], std::cout, config.digits);
        }
    } else {
        std::cout << tables_to_json(tables);
    }
}

// Variant/weight pipelines requested by the config: the two canonical
// pairings under --compare, otherwise the configured one.
std::vector<std::pair<FuzzyVariant, WeightMode>> requested_pipelines(const RunConfig& config) {
    if (config.compare)
        return {{FuzzyVariant::zani, WeightMode::membership_proportions},
                {FuzzyVariant::cub_ifs, WeightMode::uncertainty_proportions}};
    return {{config.variant, config.weight_mode}};
}

bool needs_fitting(const RatingMatrix& matrix, const RunConfig& config,
                   const std::vector<std::pair<FuzzyVariant, WeightMode>>& pipelines) {
    const bool any_cub = std::any_of(pipelines.begin(), pipelines.end(), [](const auto& p) {
        return p.first == FuzzyVariant::cub_ifs;
    });
    if (!any_cub)
        return false;
    return std::any_of(matrix.items.begin(), matrix.items.end(), [&](const std::string& item) {
        return !config.pi_override_for(item).has_value();
    });
}

int cmd_fit(CliState& st) {
    finalize_config(st);
    const LoadResult loaded = load_input(st);
    const std::vector<ItemFit> fits = fit_all_items(loaded.matrix, st.config.em);
    emit_tables({parameters_table(fits)}, st.config);
    int failures = 0;
    for (const ItemFit& f : fits)
        if (!f.ok) {
            std::cerr << "fit failed for item " << f.item << ": " << f.error << "\n";
            ++failures;
        }
    return failures == 0 ? 0 : kExitNumerical;
}

int cmd_fuzzify(CliState& st) {
    finalize_config(st);
    const LoadResult loaded = load_input(st);
    const auto pipelines = requested_pipelines(st.config);
    std::vector<ItemFit> fits;
    if (needs_fitting(loaded.matrix, st.config, pipelines))
        fits = fit_all_items(loaded.matrix, st.config.em);

    std::vector<std::vector<FuzzyProfile>> groups;
    for (const auto& [variant, mode] : pipelines) {
        (void)mode;
        groups.push_back(profiles_for(loaded.matrix, st.config, variant, fits));
    }
    for (const std::vector<FuzzyProfile>& group : groups)
        for (const FuzzyProfile& p : group)
            if (p.degenerate_mu || p.degenerate_nu)
                std::cerr << "warning: zero-mass normalizing block for item " << p.item_id
                          << " (" << to_string(p.variant) << ")\n";

    const int m = st.config.scale.m;
    emit_tables({membership_table(groups, m), nonmembership_table(groups, m),
                 uncertainty_table(groups, m)},
                st.config);
    return 0;
}

int cmd_weights_scores(CliState& st, bool include_scores) {
    finalize_config(st);
    const LoadResult loaded = load_input(st);
    const auto pipelines = requested_pipelines(st.config);
    std::vector<ItemFit> fits;
    if (needs_fitting(loaded.matrix, st.config, pipelines))
        fits = fit_all_items(loaded.matrix, st.config.em);

    std::vector<WeightVector> weight_sets;
    std::vector<PipelineScores> results;
    for (const auto& [variant, mode] : pipelines) {
        const std::vector<FuzzyProfile> profiles =
            profiles_for(loaded.matrix, st.config, variant, fits);
        PipelineScores ps = run_scores(loaded.matrix, st.config, variant, mode, profiles);
        if (ps.weights.clamped)
            std::cerr << "warning: fuzzy proportions clamped before logging ("
                      << to_string(variant) << " pipeline)\n";
        if (ps.respondents_dropped > 0)
            std::cerr << "note: " << ps.respondents_dropped
                      << " respondents dropped (incomplete rows)\n";
        weight_sets.push_back(ps.weights);
        results.push_back(std::move(ps));
    }

    std::vector<Table> tables{weights_table(loaded.matrix.items, weight_sets)};
    if (include_scores)
        tables.push_back(scores_table(results));
    emit_tables(tables, st.config);
    return 0;
}

int cmd_simulate(CliState& st) {
    finalize_config(st);
    if (st.item_args.empty())
        throw domain_error("simulate needs at least one --item NAME=PI,XI");
    if (st.simulate_n < 1)
        throw domain_error("simulate needs -n >= 1");

    RatingMatrix matrix;
    matrix.scale = st.config.scale;
    std::vector<CubParams> params;
    for (const std::string& arg : st.item_args) {
        const std::size_t eq = arg.find('=');
        const std::size_t comma = arg.find(',', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || eq == 0 || comma == std::string::npos)
            throw domain_error("--item expects NAME=PI,XI, got '" + arg + "'");
        matrix.items.push_back(arg.substr(0, eq));
        CubParams p;
        p.pi = parse_double(arg.substr(eq + 1, comma - eq - 1), "pi");
        p.xi = parse_double(arg.substr(comma + 1), "xi");
        p.validate();
        params.push_back(p);
    }

    const std::size_t n = static_cast<std::size_t>(st.simulate_n);
    std::vector<std::vector<int>> columns;
    for (std::size_t k = 0; k < params.size(); ++k)
        columns.push_back(sample(matrix.scale, params[k], n,
                                 derive_stream_seed(st.config.seed, k)));
    matrix.rows.assign(n, std::vector<int>(params.size()));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < params.size(); ++k)
            matrix.rows[j][k] = columns[k][j];

    if (st.output_path.empty() || st.output_path == "-")
        save_csv(matrix, std::cout, st.config.missing_token);
    else
        save_csv_file(matrix, st.output_path, st.config.missing_token);
    return 0;
}

int cmd_report(CliState& st) {
    finalize_config(st);
    const LoadResult loaded = load_input(st);
    const ReportBundle bundle = build_report(loaded.matrix, st.config);
    const std::vector<std::string> files = write_bundle(bundle, st.output_path, st.config);
    for (const std::string& f : files)
        std::cout << f << "\n";
    for (const Table& t : bundle.tables)
        if (t.name == "parameters" && t.rows.size() < loaded.matrix.item_count()) {
            std::cerr << "warning: some items are missing from the parameter table "
                         "(per-item fit failures)\n";
            return kExitNumerical;
        }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CUB mixture fitting and intuitionistic-fuzzy satisfaction scoring"};
    app.require_subcommand(1);

    CliState st;

    CLI::App* fit = app.add_subcommand("fit", "Fit (pi, xi) per item by EM");
    fit->add_option("input", st.input_path, "Ratings CSV")->required();

    CLI::App* fuzzify = app.add_subcommand("fuzzify", "Per-item membership/non-membership/uncertainty tables");
    fuzzify->add_option("input", st.input_path, "Ratings CSV")->required();

    CLI::App* weights = app.add_subcommand("weights", "Item weights from fuzzy proportions");
    weights->add_option("input", st.input_path, "Ratings CSV")->required();

    CLI::App* scores = app.add_subcommand("scores", "Weights plus final satisfaction scores");
    scores->add_option("input", st.input_path, "Ratings CSV")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Write a synthetic ratings CSV");
    simulate->add_option("--item", st.item_args, "NAME=PI,XI (repeatable)")->required();
    simulate->add_option("-n,--rows", st.simulate_n, "Number of respondents")->required();
    simulate->add_option("-o,--output", st.output_path, "Output CSV path (default stdout)");

    CLI::App* report = app.add_subcommand("report", "Full table bundle plus per-item series");
    report->add_option("input", st.input_path, "Ratings CSV")->required();
    report->add_option("-o,--out", st.output_path, "Output directory")->required();

    for (CLI::App* cmd : {fit, fuzzify, weights, scores, report}) {
        add_scale_options(cmd, st);
        add_pipeline_options(cmd, st);
        add_output_options(cmd, st);
    }
    add_scale_options(simulate, st);
    add_output_options(simulate, st);
    with_env(simulate->add_option("--seed", st.config.seed, "Sampling seed"), "seed");
    with_env(simulate->add_option("--missing-token", st.config.missing_token,
                                  "Token written for missing cells"),
             "missing-token");

    try {
        app.parse(argc, argv);
        if (fit->parsed())
            return cmd_fit(st);
        if (fuzzify->parsed())
            return cmd_fuzzify(st);
        if (weights->parsed())
            return cmd_weights_scores(st, false);
        if (scores->parsed())
            return cmd_weights_scores(st, true);
        if (simulate->parsed())
            return cmd_simulate(st);
        if (report->parsed())
            return cmd_report(st);
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const cubifs::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cubifs::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const cubifs::degenerate_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const cubifs::numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const cubifs::estimation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const cubifs::consistency_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
