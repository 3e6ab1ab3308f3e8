#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cubifs/survey.hpp"
#include "oracles.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string& cli_bin() {
    static const std::string bin = [] {
        const char* env = std::getenv("CUBIFS_CLI_BIN");
        REQUIRE_MESSAGE(env != nullptr, "CUBIFS_CLI_BIN must point at the cubifs binary");
        return std::string(env);
    }();
    return bin;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "cubifs_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd =
        "'" + cli_bin() + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

struct ParsedTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<ParsedTable> parse_tsv_tables(const std::string& text) {
    std::vector<ParsedTable> tables;
    std::istringstream in(text);
    std::string line;
    bool expecting_header = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.rfind("# table: ", 0) == 0) {
            tables.push_back({line.substr(9), {}, {}});
            expecting_header = true;
        } else if (!tables.empty()) {
            if (expecting_header) {
                tables.back().columns = split_tabs(line);
                expecting_header = false;
            } else {
                tables.back().rows.push_back(split_tabs(line));
            }
        }
    }
    return tables;
}

const ParsedTable& find_table(const std::vector<ParsedTable>& tables, const std::string& name) {
    for (const ParsedTable& t : tables)
        if (t.name == name)
            return t;
    REQUIRE_MESSAGE(false, "table not found: ", name);
    static ParsedTable dummy;
    return dummy;
}

std::map<std::string, std::vector<double>>
rows_by_key(const ParsedTable& t, std::size_t key_col, std::size_t first_value_col,
            const std::string& variant_filter = {}) {
    std::map<std::string, std::vector<double>> out;
    for (const std::vector<std::string>& row : t.rows) {
        if (!variant_filter.empty() && row[1] != variant_filter)
            continue;
        std::vector<double> values;
        for (std::size_t c = first_value_col; c < row.size(); ++c)
            values.push_back(std::stod(row[c]));
        out[row[key_col]] = values;
    }
    return out;
}

// CSV whose per-item marginals match the published tables; rows are the
// zip of per-item rating columns expanded from exact counts.
fs::path survey_like_csv(std::int64_t n) {
    const fs::path path = work_dir() / "survey_like.csv";
    if (fs::exists(path))
        return path;
    std::vector<std::vector<int>> cols;
    for (int item = 0; item < paper::kItems; ++item) {
        const std::vector<std::int64_t> counts = oracles::consistent_counts(item, n);
        std::vector<int> col;
        col.reserve(static_cast<std::size_t>(n));
        for (int r = 1; r <= 7; ++r)
            col.insert(col.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(r - 1)]),
                       r);
        REQUIRE(static_cast<std::int64_t>(col.size()) == n);
        cols.push_back(std::move(col));
    }
    std::ofstream out(path, std::ios::binary);
    for (int item = 0; item < paper::kItems; ++item)
        out << (item ? "," : "") << paper::item_names[static_cast<std::size_t>(item)];
    out << "\n";
    for (std::int64_t j = 0; j < n; ++j) {
        for (int item = 0; item < paper::kItems; ++item)
            out << (item ? "," : "") << cols[static_cast<std::size_t>(item)][static_cast<std::size_t>(j)];
        out << "\n";
    }
    return path;
}

std::string pi_override_flags() {
    std::string flags;
    for (int item = 0; item < paper::kItems; ++item) {
        std::ostringstream os;
        os << " --pi-override " << paper::item_names[static_cast<std::size_t>(item)] << "="
           << paper::pi_hat[static_cast<std::size_t>(item)];
        flags += os.str();
    }
    return flags;
}

} // namespace

TEST_CASE("simulate is deterministic and honors degenerate parameters") {
    const fs::path a = work_dir() / "sim_a.csv";
    const fs::path b = work_dir() / "sim_b.csv";
    const std::string args = "simulate --item q=1,0 -n 10 --seed 5 -o ";
    CHECK(run_cli(args + "'" + a.string() + "'").exit_code == 0);
    CHECK(run_cli(args + "'" + b.string() + "'").exit_code == 0);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text == "q\n7\n7\n7\n7\n7\n7\n7\n7\n7\n7\n");

    CHECK(run_cli("simulate --item q=2,0 -n 5").exit_code == 2); // pi out of range
    CHECK(run_cli("simulate --item q=0.5,0.5 -n 0").exit_code != 0);
}

TEST_CASE("simulate then fit recovers the generating parameters") {
    const fs::path csv = work_dir() / "sim_fit.csv";
    REQUIRE(run_cli("simulate --item willingn=0.8567,0.1167 -n 50000 --seed 11 -o '" +
                    csv.string() + "'")
                .exit_code == 0);
    const RunResult fit = run_cli("fit '" + csv.string() + "'");
    REQUIRE(fit.exit_code == 0);
    const std::vector<ParsedTable> tables = parse_tsv_tables(fit.out);
    const ParsedTable& params = find_table(tables, "parameters");
    REQUIRE(params.rows.size() == 1);
    CHECK(params.rows[0][0] == "willingn");
    CHECK(std::stod(params.rows[0][1]) == doctest::Approx(0.8567).epsilon(0.025));
    CHECK(std::stod(params.rows[0][2]) == doctest::Approx(0.1167).epsilon(0.2)); // +-0.02 abs
    CHECK(std::abs(std::stod(params.rows[0][1]) - 0.8567) <= 0.02);
    CHECK(std::abs(std::stod(params.rows[0][2]) - 0.1167) <= 0.02);
    // 1-pi and 1-xi columns are consistent
    CHECK(std::stod(params.rows[0][3]) ==
          doctest::Approx(1.0 - std::stod(params.rows[0][1])).epsilon(1e-9));
}

TEST_CASE("fit reports per-item failures without aborting the batch") {
    const fs::path csv = work_dir() / "partial.csv";
    {
        std::ofstream out(csv, std::ios::binary);
        out << "good,stuck\n";
        oracles::SplitMix rng(51);
        for (int j = 0; j < 400; ++j)
            out << rng.uniform_int(1, 7) << ",4\n";
    }
    const RunResult r = run_cli("fit '" + csv.string() + "'");
    CHECK(r.exit_code == 4);
    const std::vector<ParsedTable> tables = parse_tsv_tables(r.out);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].rows.size() == 1);
    CHECK(tables[0].rows[0][0] == "good");
    CHECK(r.err.find("stuck") != std::string::npos);
}

TEST_CASE("usage and validation exit codes") {
    CHECK(run_cli("fit '" + (work_dir() / "does_not_exist.csv").string() + "'").exit_code == 2);
    const fs::path empty = work_dir() / "empty.csv";
    std::ofstream(empty).close();
    CHECK(run_cli("fit '" + empty.string() + "'").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("fit").exit_code == 2);

    const fs::path junk = work_dir() / "junk.csv";
    {
        std::ofstream out(junk, std::ios::binary);
        out << "a,b\nx,y\nz,w\n";
    }
    CHECK(run_cli("fit '" + junk.string() + "'").exit_code == 3);

    // even scales can be fitted but carry no indifference point to fuzzify
    const fs::path six = work_dir() / "six.csv";
    {
        std::ofstream out(six, std::ios::binary);
        out << "a\n";
        oracles::SplitMix rng(53);
        for (int j = 0; j < 200; ++j)
            out << rng.uniform_int(1, 6) << "\n";
    }
    CHECK(run_cli("fit '" + six.string() + "' --scale-m 6").exit_code == 0);
    CHECK(run_cli("fuzzify '" + six.string() + "' --scale-m 6 --pi-override '*=0.5'").exit_code ==
          2);
}

TEST_CASE("fuzzify reproduces the published tables via overrides") {
    const fs::path csv = survey_like_csv(200000);
    const RunResult r = run_cli("fuzzify '" + csv.string() + "' --compare" + pi_override_flags());
    REQUIRE(r.exit_code == 0);
    const std::vector<ParsedTable> tables = parse_tsv_tables(r.out);
    REQUIRE(tables.size() == 3);

    const auto zani_mu = rows_by_key(find_table(tables, "membership"), 0, 2, "zani");
    const auto cub_mu = rows_by_key(find_table(tables, "membership"), 0, 2, "cub");
    const auto cub_nu = rows_by_key(find_table(tables, "nonmembership"), 0, 2, "cub");
    const auto cub_u = rows_by_key(find_table(tables, "uncertainty"), 0, 2, "cub");

    for (int item = 0; item < paper::kItems; ++item) {
        const auto idx = static_cast<std::size_t>(item);
        const std::string& name = paper::item_names[idx];
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(zani_mu.at(name)[static_cast<std::size_t>(3 + k)] -
                           paper::zani_mu[idx][static_cast<std::size_t>(k)]) < 5e-4);
            CHECK(std::abs(cub_mu.at(name)[static_cast<std::size_t>(3 + k)] -
                           paper::cub_mu[idx][static_cast<std::size_t>(k)]) < 5e-4);
            CHECK(std::abs(cub_nu.at(name)[static_cast<std::size_t>(1 + k)] -
                           paper::cub_nu[idx][static_cast<std::size_t>(k)]) < 5e-4);
        }
        for (int rr = 0; rr < 7; ++rr)
            CHECK(std::abs(cub_u.at(name)[static_cast<std::size_t>(rr)] -
                           paper::cub_u[idx][static_cast<std::size_t>(rr)]) < 1e-3);
        CHECK(cub_mu.at(name)[6] == 1.0);
        CHECK(cub_nu.at(name)[0] == 1.0);
    }
}

TEST_CASE("fuzzify limit overrides") {
    const fs::path csv = survey_like_csv(200000);
    const RunResult crisp = run_cli("fuzzify '" + csv.string() + "' --pi-override '*=1'");
    REQUIRE(crisp.exit_code == 0);
    const auto mu1 = rows_by_key(find_table(parse_tsv_tables(crisp.out), "membership"), 0, 2);
    const auto nu1 = rows_by_key(find_table(parse_tsv_tables(crisp.out), "nonmembership"), 0, 2);
    for (int item = 0; item < paper::kItems; ++item) {
        const std::string& name = paper::item_names[static_cast<std::size_t>(item)];
        CHECK(mu1.at(name)[3] == 0.0);
        CHECK(nu1.at(name)[3] == 0.0);
    }

    const RunResult flat = run_cli("fuzzify '" + csv.string() + "' --pi-override '*=0'");
    REQUIRE(flat.exit_code == 0);
    const auto mu0 = rows_by_key(find_table(parse_tsv_tables(flat.out), "membership"), 0, 2);
    for (int item = 0; item < paper::kItems; ++item) {
        const std::string& name = paper::item_names[static_cast<std::size_t>(item)];
        for (int r = 4; r <= 6; ++r)
            CHECK(mu0.at(name)[static_cast<std::size_t>(r - 1)] ==
                  doctest::Approx(1.0 / 7).epsilon(1e-3));
    }
}

TEST_CASE("identical item columns earn equal weights") {
    const fs::path csv = work_dir() / "identical.csv";
    {
        std::ofstream out(csv, std::ios::binary);
        out << "a,b,c\n";
        oracles::SplitMix rng(52);
        for (int j = 0; j < 300; ++j) {
            const int r = rng.uniform_int(1, 7);
            out << r << "," << r << "," << r << "\n";
        }
    }
    const RunResult r = run_cli("weights '" + csv.string() + "' --variant zani --weights mu");
    REQUIRE(r.exit_code == 0);
    const std::vector<ParsedTable> tables = parse_tsv_tables(r.out);
    const ParsedTable& w = find_table(tables, "weights");
    REQUIRE(w.rows.size() == 1);
    for (std::size_t c = 1; c <= 3; ++c)
        CHECK(w.rows[0][c] == "0.3333"); // exactly 1/3 each, rounded at emission
}

TEST_CASE("scores command emits weights then scores, honoring --compare") {
    const fs::path csv = survey_like_csv(200000);
    const RunResult r = run_cli("scores '" + csv.string() + "' --compare" + pi_override_flags());
    REQUIRE(r.exit_code == 0);
    const std::vector<ParsedTable> tables = parse_tsv_tables(r.out);
    REQUIRE(tables.size() == 2);
    CHECK(tables[0].name == "weights");
    CHECK(tables[1].name == "scores");
    CHECK(tables[0].rows.size() == 2);
    CHECK(tables[1].rows.size() == 2);
    // zani row carries zero non-membership; every u_bar is the residual
    for (const std::vector<std::string>& row : tables[1].rows) {
        const double mu = std::stod(row[2]);
        const double nu = std::stod(row[3]);
        const double u = std::stod(row[4]);
        CHECK(std::abs(u - (1.0 - mu - nu)) < 2e-4); // rounded emission
        if (row[0] == "zani")
            CHECK(nu == 0.0);
    }
}

TEST_CASE("json output validates against the shipped schema") {
    const fs::path csv = survey_like_csv(200000);
    const RunResult r =
        run_cli("fuzzify '" + csv.string() + "' --format json" + pi_override_flags());
    REQUIRE(r.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    const char* schema_dir = std::getenv("CUBIFS_SCHEMA_DIR");
    REQUIRE(schema_dir != nullptr);
    const nlohmann::json schema =
        nlohmann::json::parse(slurp(fs::path(schema_dir) / "report.schema.json"));
    std::string why;
    CHECK_MESSAGE(schema_check::document_valid(schema, doc, &why), why);
    CHECK(doc["tables"].size() == 3);
}

TEST_CASE("report writes a deterministic bundle of six tables plus series") {
    const fs::path csv = survey_like_csv(200000);
    const fs::path dir_a = work_dir() / "bundle_a";
    const fs::path dir_b = work_dir() / "bundle_b";
    const std::string base = "report '" + csv.string() + "'" + pi_override_flags();
    const RunResult a = run_cli(base + " -o '" + dir_a.string() + "'");
    const RunResult b = run_cli(base + " -o '" + dir_b.string() + "'");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.out == b.out);

    std::vector<std::string> files;
    std::istringstream lines(a.out);
    for (std::string line; std::getline(lines, line);)
        if (!line.empty())
            files.push_back(line);
    CHECK(files.size() == 6 + static_cast<std::size_t>(paper::kItems));
    int tables = 0;
    int series = 0;
    for (const std::string& f : files) {
        CHECK(slurp(dir_a / f) == slurp(dir_b / f));
        if (f.rfind("table", 0) == 0)
            ++tables;
        if (f.rfind("profile_", 0) == 0)
            ++series;
    }
    CHECK(tables == 6);
    CHECK(series == paper::kItems);
}

TEST_CASE("full pipeline on the synthetic survey fixture") {
    // data/synthetic2002.csv carries marginals consistent with the published
    // 2002 analysis (fits, profiles, weights and scores); the pipeline must
    // land on the published numbers end to end.
    const char* data_dir = std::getenv("CUBIFS_DATA_DIR");
    REQUIRE(data_dir != nullptr);
    const fs::path csv = fs::path(data_dir) / "synthetic2002.csv";
    REQUIRE(fs::exists(csv));

    const RunResult fit = run_cli("fit '" + csv.string() + "'");
    REQUIRE(fit.exit_code == 0);
    const std::vector<ParsedTable> fit_tables = parse_tsv_tables(fit.out);
    const auto params = rows_by_key(find_table(fit_tables, "parameters"), 0, 1);
    for (int item = 0; item < paper::kItems; ++item) {
        const auto idx = static_cast<std::size_t>(item);
        CHECK(std::abs(params.at(paper::item_names[idx])[0] - paper::pi_hat[idx]) <= 1e-3);
        CHECK(std::abs(params.at(paper::item_names[idx])[1] - paper::xi_hat[idx]) <= 1e-3);
    }

    const RunResult sc = run_cli("scores '" + csv.string() + "' --compare");
    REQUIRE(sc.exit_code == 0);
    const std::vector<ParsedTable> tables = parse_tsv_tables(sc.out);
    const ParsedTable& weights = find_table(tables, "weights");
    REQUIRE(weights.rows.size() == 2);
    for (int item = 0; item < paper::kItems; ++item) {
        const auto idx = static_cast<std::size_t>(item);
        CHECK(std::abs(std::stod(weights.rows[0][idx + 1]) - paper::weights_zani_mf[idx]) <= 5e-4);
        CHECK(std::abs(std::stod(weights.rows[1][idx + 1]) - paper::weights_fuzzy_uf[idx]) <= 5e-4);
    }
    const ParsedTable& scores = find_table(tables, "scores");
    REQUIRE(scores.rows.size() == 2);
    CHECK(scores.rows[0][5] == "2179"); // all rows complete
    for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(std::stod(scores.rows[0][static_cast<std::size_t>(c + 2)]) -
                       paper::scores_zani[static_cast<std::size_t>(c)]) <= 5e-4);
        CHECK(std::abs(std::stod(scores.rows[1][static_cast<std::size_t>(c + 2)]) -
                       paper::scores_fuzzy_uf[static_cast<std::size_t>(c)]) <= 5e-4);
    }
}

TEST_CASE("environment variables override flags") {
    const fs::path csv = survey_like_csv(200000);
    const std::string cmd = "CUBIFS_DIGITS=2 '" + cli_bin() + "' fuzzify '" + csv.string() +
                            "' --pi-override '*=0.5' > '" + (work_dir() / "env_out.txt").string() +
                            "' 2> /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string out = slurp(work_dir() / "env_out.txt");
    const std::vector<ParsedTable> tables = parse_tsv_tables(out);
    const ParsedTable& mu = find_table(tables, "membership");
    // columns are (item, variant, R1..R7); R4 holds (1-0.5)/7 = 0.0714...,
    // two decimal places under the env override
    CHECK(mu.rows[0][5] == "0.07");
}
