#include <doctest.h>

#include <cstdlib>

#include "helpers.hpp"

// CLI-level contracts: exit codes and the eval output file. These spawn the
// built binary, so they live behind the same fixture dir the acceptance
// suite uses.

using namespace delve;
using delve::testing::temp_dir;

namespace {

int cli(const std::string& args) {
    std::string cmd = std::string(DELVE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path golden() { return DELVE_FIXTURE_DIR "/golden"; }

}  // namespace

TEST_CASE("ingest exit codes: success, missing file, collision") {
    auto ws = temp_dir("cli_ingest");
    std::string dsn = (ws / "db.sqlite").string();
    CHECK(cli("ingest --csv " + (golden() / "toy_conflict.csv").string() + " --table events --dsn " +
              dsn) == 0);
    CHECK(cli("ingest --csv /nonexistent.csv --table t --dsn " + dsn) == 2);
    CHECK(cli("ingest --csv " + (golden() / "toy_conflict.csv").string() + " --table events --dsn " +
              dsn) == 2);  // name collision
}

TEST_CASE("run exit codes: invalid config names the field; replay needs fixtures") {
    auto ws = temp_dir("cli_run");
    write_file(ws / "bad_config.json", R"({"max_layers": 0, "first_layer_questions": 2,
        "per_layer_questions": 5, "thesis_interval": 2, "insight_cap": 30,
        "executor_turn_cap": 15, "result_row_limit": 50, "cell_char_limit": 200,
        "report_word_cap": 3000, "topic": "t"})");
    CHECK(cli("run --config " + (ws / "bad_config.json").string() + " --out " +
              (ws / "out1").string()) == 2);
    // replay without fixtures or cache is a provider configuration error
    CHECK(cli("run --topic t --mode replay --out " + (ws / "out2").string() + " --search-fixtures " +
              (golden() / "search_fixtures.json").string()) == 3);
}

TEST_CASE("live mode without credentials is a provider error") {
    auto ws = temp_dir("cli_live");
    // scrub any ambient key for the child process
    std::string cmd = "env -u DELVE_API_KEY " DELVE_CLI_PATH
                      " run --topic t --mode live --out " +
                      (ws / "out").string() + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 3);
}

TEST_CASE("eval writes a scores file for insight recall") {
    auto ws = temp_dir("cli_eval");
    write_file(ws / "predicted.json", R"({"insights": ["violence rose", "aid narrowed"]})");
    write_file(ws / "gold.json",
               R"({"insights": [{"id": "g1", "text": "violence increased"}],
                   "reference_summary": "violence increased overall"})");
    json fixtures = {{"responses", json::array()}};
    // 2 pair ratings + summary call + 1 summary-pair rating
    fixtures["responses"].push_back({{"template_id", "insightbench_eval"},
                                     {"response", "<rating>8</rating>"}});
    fixtures["responses"].push_back({{"template_id", "insightbench_eval"},
                                     {"response", "<rating>4</rating>"}});
    fixtures["responses"].push_back({{"template_id", "summary_prompt"},
                                     {"response", "Violence increased across the period."}});
    fixtures["responses"].push_back({{"template_id", "insightbench_eval"},
                                     {"response", "<rating>9</rating>"}});
    write_file(ws / "fixtures.json", fixtures.dump());

    auto out = ws / "scores.json";
    CHECK(cli("eval --predicted " + (ws / "predicted.json").string() + " --gold " +
              (ws / "gold.json").string() + " --fixtures " + (ws / "fixtures.json").string() +
              " --out " + out.string()) == 0);
    json scores = json::parse(read_file(out));
    CHECK(scores["insight_recall"]["mean"].get<double>() == doctest::Approx(0.8));
    CHECK(scores["summary"]["score"].get<double>() == doctest::Approx(0.9));
}

TEST_CASE("eval with no inputs is a usage error") {
    auto ws = temp_dir("cli_eval_empty");
    write_file(ws / "fixtures.json", R"({"responses": []})");
    CHECK(cli("eval --fixtures " + (ws / "fixtures.json").string()) == 2);
}

TEST_CASE("externally computed scores pass through eval untouched") {
    auto ws = temp_dir("cli_eval_race");
    write_file(ws / "fixtures.json", R"({"responses": []})");
    write_file(ws / "external.json", R"({"overall": 52.6, "comp": 52.5})");
    auto out = ws / "scores.json";
    CHECK(cli("eval --race-scores " + (ws / "external.json").string() + " --fixtures " +
              (ws / "fixtures.json").string() + " --out " + out.string()) == 0);
    json scores = json::parse(read_file(out));
    CHECK(scores["race"]["overall"].get<double>() == doctest::Approx(52.6));
}

namespace {

// Clone the golden fixture with only the first n scripted responses, to force
// failures at chosen pipeline stages.
std::filesystem::path truncated_golden_fixture(const std::filesystem::path& dir, size_t keep) {
    json fixture = json::parse(read_file(golden() / "llm_fixtures.json"));
    json out = {{"responses", json::array()}};
    for (size_t i = 0; i < fixture["responses"].size() && i < keep; ++i)
        out["responses"].push_back(fixture["responses"][i]);
    auto path = dir / ("fixtures_" + std::to_string(keep) + ".json");
    write_file(path, out.dump());
    return path;
}

int golden_run(const std::filesystem::path& ws, const std::filesystem::path& fixtures,
               const std::string& out_name) {
    std::string dsn = (ws / "db.sqlite").string();
    if (!std::filesystem::exists(dsn))
        cli("ingest --csv " + (golden() / "toy_conflict.csv").string() + " --table events --dsn " +
            dsn);
    return cli("run --config " + (golden() / "config.json").string() + " --out " +
               (ws / out_name).string() + " --dsn " + dsn + " --mode replay --fixtures " +
               fixtures.string() + " --search-fixtures " +
               (golden() / "search_fixtures.json").string());
}

}  // namespace

TEST_CASE("exit codes distinguish exploration aborts from report aborts") {
    auto ws = temp_dir("cli_aborts");
    json full = json::parse(read_file(golden() / "llm_fixtures.json"));
    size_t total = full["responses"].size();

    // enough script for warm start + layer 1 only: layer 2 aborts exploration
    auto early = truncated_golden_fixture(ws, 9);
    CHECK(golden_run(ws, early, "out_explore") == 4);

    // everything except the final polish: exploration completes, report stage fails
    auto late = truncated_golden_fixture(ws, total - 1);
    CHECK(golden_run(ws, late, "out_report") == 5);

    // the full fixture still runs clean end to end
    CHECK(golden_run(ws, golden() / "llm_fixtures.json", "out_full") == 0);
}
