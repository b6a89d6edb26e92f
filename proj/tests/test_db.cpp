#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace delve;
using delve::testing::temp_dir;

namespace {

std::filesystem::path write_csv(const std::string& name, const std::string& content) {
    auto path = temp_dir("csv") / name;
    write_file(path, content);
    return path;
}

}  // namespace

TEST_CASE("ingest_csv loads rows and infers types") {
    Database db = Database::open_memory();
    auto path = write_csv("t.csv", "a,b\n1,x\n2,y\n3,z\n");
    CHECK(db.ingest_csv(path, "t") == 3);
    auto details = db.table_details({"t"});
    REQUIRE(details.size() == 1);
    REQUIRE(details[0].columns.size() == 2);
    CHECK(details[0].columns[0].declared_type == "INTEGER");
    CHECK(details[0].columns[1].declared_type == "TEXT");
    CHECK(details[0].columns[0].samples == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("one non-numeric cell makes the whole column text") {
    Database db = Database::open_memory();
    auto path = write_csv("u.csv", "n\n1\n2\noops\n4\n");
    db.ingest_csv(path, "u");
    CHECK(db.table_details({"u"})[0].columns[0].declared_type == "TEXT");
}

TEST_CASE("ragged rows fail with the line number") {
    Database db = Database::open_memory();
    auto path = write_csv("r.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_WITH_AS(db.ingest_csv(path, "r"), doctest::Contains("line 3"), Error);
}

TEST_CASE("empty csv and name collisions are rejected") {
    Database db = Database::open_memory();
    CHECK_THROWS_AS(db.ingest_csv(write_csv("e.csv", ""), "e"), Error);
    auto path = write_csv("c.csv", "a\n1\n");
    db.ingest_csv(path, "c");
    CHECK_THROWS_WITH_AS(db.ingest_csv(path, "c"), doctest::Contains("already exists"), Error);
}

TEST_CASE("quoted csv fields support commas, quotes, and newlines") {
    Database db = Database::open_memory();
    auto path = write_csv("q.csv", "a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",plain\n");
    CHECK(db.ingest_csv(path, "q") == 2);
    auto result = db.execute_sql("SELECT a, b FROM q ORDER BY a", 10);
    REQUIRE(result.rows.size() == 2);
    CHECK(*result.rows[1][0] == "x,y");
    CHECK(*result.rows[1][1] == "he said \"hi\"");
    CHECK(*result.rows[0][0] == "multi\nline");
}

TEST_CASE("get_tables lists tables with descriptions") {
    Database db = Database::open_memory();
    CHECK(db.get_tables().empty());
    db.ingest_csv(write_csv("a.csv", "x\n1\n"), "alpha");
    db.ingest_csv(write_csv("b.csv", "y\n2\n"), "beta");
    auto tables = db.get_tables();
    REQUIRE(tables.size() == 2);
    CHECK(tables[0].first == "alpha");
    CHECK(tables[0].second.find("1 rows") != std::string::npos);
    db.set_table_description("alpha", "hand-written note");
    CHECK(db.get_tables()[0].second == "hand-written note");
}

TEST_CASE("closed connections surface as errors") {
    Database db;  // default-constructed: not connected
    CHECK_THROWS_WITH_AS(db.get_tables(), doctest::Contains("closed"), Error);
}

TEST_CASE("table_details validates names and handles the empty list") {
    Database db = Database::open_memory();
    db.ingest_csv(write_csv("k.csv", "x\n1\n"), "known");
    CHECK(db.table_details({}).empty());
    CHECK_THROWS_WITH_AS(db.table_details({"nope"}), doctest::Contains("nope"), Error);
}

TEST_CASE("a 31-column table yields a 31-column descriptor") {
    Database db = Database::open_memory();
    std::string header, row;
    for (int i = 0; i < 31; ++i) {
        header += (i ? "," : "") + std::string("col") + std::to_string(i);
        row += (i ? "," : "") + std::to_string(i);
    }
    db.ingest_csv(write_csv("wide.csv", header + "\n" + row + "\n"), "wide");
    CHECK(db.table_details({"wide"})[0].columns.size() == 31);
}

TEST_CASE("execute_sql basics") {
    Database db = Database::open_memory();
    auto result = db.execute_sql("SELECT 1 AS one", 10);
    CHECK(result.columns == std::vector<std::string>{"one"});
    REQUIRE(result.rows.size() == 1);
    CHECK(*result.rows[0][0] == "1");
    CHECK(result.total_row_count == 1);
    CHECK_FALSE(result.truncated);
}

TEST_CASE("row limits truncate while total_row_count counts everything") {
    Database db = Database::open_memory();
    std::string csv = "n\n";
    for (int i = 0; i < 120; ++i) csv += std::to_string(i) + "\n";
    db.ingest_csv(write_csv("big.csv", csv), "big");
    auto result = db.execute_sql("SELECT n FROM big", 50);
    CHECK(result.rows.size() == 50);
    CHECK(result.total_row_count == 120);
    CHECK(result.truncated);
}

TEST_CASE("multi-statement batches are rejected") {
    Database db = Database::open_memory();
    CHECK_THROWS_WITH_AS(db.execute_sql("SELECT 1; SELECT 2", 10),
                         doctest::Contains("one SQL statement"), Error);
    CHECK_NOTHROW(db.execute_sql("SELECT 1;", 10));  // trailing semicolon is fine
}

TEST_CASE("write statements are rejected") {
    Database db = Database::open_memory();
    db.ingest_csv(write_csv("w.csv", "x\n1\n"), "w");
    CHECK_THROWS_WITH_AS(db.execute_sql("DELETE FROM w", 10), doctest::Contains("read-only"), Error);
}

TEST_CASE("sql errors carry the engine message") {
    Database db = Database::open_memory();
    CHECK_THROWS_WITH_AS(db.execute_sql("SELEKT nonsense", 10), doctest::Contains("SQL error"),
                         Error);
}

TEST_CASE("long cells are elided at the configured limit") {
    Database db = Database::open_memory();
    std::string big(500, 'z');
    auto result = db.execute_sql("SELECT '" + big + "' AS t", 10, 100);
    CHECK(result.rows[0][0]->size() < 130);
    CHECK(result.rows[0][0]->find("...[truncated]") != std::string::npos);
}

TEST_CASE("backtick identifiers are normalized") {
    Database db = Database::open_memory();
    db.ingest_csv(write_csv("n.csv", "x\n7\n"), "norm");
    auto result = db.execute_sql("SELECT `x` FROM `norm`", 10);
    CHECK(*result.rows[0][0] == "7");
}

// --- summary statistics ------------------------------------------------------

TEST_CASE("column summary of the worked example [5,5,7]") {
    TableResult t;
    t.columns = {"v"};
    t.rows = {{std::optional<std::string>("5")},
              {std::optional<std::string>("5")},
              {std::optional<std::string>("7")}};
    t.total_row_count = 3;
    auto s = column_summaries(t);
    REQUIRE(s.size() == 1);
    CHECK(s[0].distinct_pct == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(s[0].top_values.size() == 2);
    CHECK(s[0].top_values[0] == std::pair<std::string, long long>{"5", 2});
    CHECK(s[0].top_values[1] == std::pair<std::string, long long>{"7", 1});
    REQUIRE(s[0].numeric.has_value());
    CHECK(s[0].numeric->min == 5);
    CHECK(s[0].numeric->max == 7);
    CHECK(s[0].numeric->median == 5);
    CHECK(s[0].numeric->mean == doctest::Approx(17.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empty results produce the degenerate summary") {
    TableResult t;
    t.columns = {"v"};
    auto s = column_summaries(t);
    CHECK(s[0].distinct_pct == 0.0);
    CHECK(s[0].top_values.empty());
    CHECK_FALSE(s[0].numeric.has_value());
}

TEST_CASE("nulls count as a distinct value and stay out of numeric stats") {
    TableResult t;
    t.columns = {"v"};
    t.rows = {{std::optional<std::string>("2")}, {std::nullopt}, {std::optional<std::string>("4")}};
    t.total_row_count = 3;
    auto s = column_summaries(t);
    CHECK(s[0].distinct_pct == doctest::Approx(1.0));  // {2, 4, NULL}
    REQUIRE(s[0].numeric.has_value());
    CHECK(s[0].numeric->mean == doctest::Approx(3.0));
    CHECK(s[0].numeric->min == 2);
    bool has_null_entry = false;
    for (const auto& [v, n] : s[0].top_values)
        if (v == "NULL" && n == 1) has_null_entry = true;
    CHECK(has_null_entry);
}

TEST_CASE("even-count medians average the middle pair; top-5 ties break by value") {
    TableResult t;
    t.columns = {"v"};
    for (const char* v : {"1", "2", "3", "4"})
        t.rows.push_back({std::optional<std::string>(v)});
    t.total_row_count = 4;
    auto s = column_summaries(t);
    CHECK(s[0].numeric->median == doctest::Approx(2.5));
    // all counts equal -> lexicographic order, capped at 5
    TableResult ties;
    ties.columns = {"w"};
    for (const char* v : {"b", "a", "d", "c", "f", "e", "g"})
        ties.rows.push_back({std::optional<std::string>(v)});
    ties.total_row_count = 7;
    auto st = column_summaries(ties);
    REQUIRE(st[0].top_values.size() == 5);
    CHECK(st[0].top_values[0].first == "a");
    CHECK(st[0].top_values[4].first == "e");
}

TEST_CASE("summaries are invariant under row permutation") {
    std::mt19937 rng(42);
    for (int iter = 0; iter < 20; ++iter) {
        TableResult t = delve::testing::make_random_table(rng, 80);
        auto base = column_summaries(t);
        TableResult shuffled = t;
        std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
        CHECK(column_summaries(shuffled) == base);
    }
}

TEST_CASE("summaries match the naive oracle on random tables") {
    std::mt19937 rng(2024);
    for (int iter = 0; iter < 100; ++iter) {
        TableResult t = delve::testing::make_random_table(rng, 300);
        std::string why;
        bool ok = delve::testing::summaries_match(column_summaries(t),
                                                  delve::testing::oracle_summaries(t), &why);
        INFO("iteration ", iter, ": ", why);
        CHECK(ok);
    }
}

TEST_CASE("truncated results refine distinct_pct over the full result") {
    Database db = Database::open_memory();
    std::string csv = "v\n";
    for (int i = 0; i < 120; ++i) csv += std::to_string(i % 60) + "\n";
    db.ingest_csv(write_csv("d.csv", csv), "d");
    std::string sql = "SELECT v FROM d";
    auto result = db.execute_sql(sql, 50);
    REQUIRE(result.truncated);
    auto pure = column_summaries(result);
    CHECK(pure[0].distinct_pct == doctest::Approx(1.0));  // first 50 rows are all distinct
    auto full = column_summaries_full(db, sql, result);
    CHECK(full[0].distinct_pct == doctest::Approx(0.5));  // 60 distinct over 120 rows
}

TEST_CASE("render_answer carries the preview annotation and stats lines") {
    Database db = Database::open_memory();
    std::string csv = "n,t\n";
    for (int i = 0; i < 120; ++i) csv += std::to_string(i % 7) + ",word\n";
    db.ingest_csv(write_csv("ra.csv", csv), "ra");
    auto result = db.execute_sql("SELECT n, t FROM ra", 50);
    auto text = render_answer(result, column_summaries_full(db, "SELECT n, t FROM ra", result));
    CHECK(text.find("showing 50 of 120 rows") != std::string::npos);
    CHECK(text.find("Column statistics:") != std::string::npos);
    CHECK(text.find("min=") != std::string::npos);
    CHECK(text.find("median=") != std::string::npos);

    // all-text columns emit no numeric stats line
    auto text_only = db.execute_sql("SELECT t FROM ra", 10);
    auto block = render_stats_block(column_summaries(text_only));
    CHECK(block.find("min=") == std::string::npos);
    CHECK(block.find("top5=") != std::string::npos);
}

TEST_CASE("session pool hands out independent connections") {
    auto dir = temp_dir("pool");
    auto dsn = (dir / "store.db").string();
    {
        Database db = Database::open(dsn);
        db.ingest_csv(write_csv("p.csv", "x\n5\n"), "p");
    }
    SessionPool pool(dsn);
    Database a = pool.acquire();
    Database b = pool.acquire();
    CHECK(*a.execute_sql("SELECT x FROM p", 5).rows[0][0] == "5");
    CHECK(*b.execute_sql("SELECT x FROM p", 5).rows[0][0] == "5");
}
