#include <doctest.h>

#include "helpers.hpp"

#include "delve/http_provider.hpp"
#include "delve/service.hpp"

using namespace delve;
using delve::testing::Script;
using delve::testing::temp_dir;

TEST_CASE("live backends refuse to construct without credentials") {
    CHECK_THROWS_AS(HttpChatProvider("https://api.example", ""), Error);
    CHECK_THROWS_AS(HttpSearchBackend("https://search.example", ""), Error);
}

namespace {

std::string make_service_db() {
    auto dir = temp_dir("svcdb");
    auto dsn = (dir / "events.db").string();
    Database db = Database::open(dsn);
    std::string csv = "year,event_type,fatalities\n";
    for (int i = 0; i < 12; ++i)
        csv += std::to_string(2020 + i % 3) + ",Battles," + std::to_string(i % 4) + "\n";
    auto csv_path = dir / "events.csv";
    write_file(csv_path, csv);
    db.ingest_csv(csv_path, "events");
    return dsn;
}

}  // namespace

TEST_CASE("executor service answers questions over HTTP") {
    std::string dsn = make_service_db();
    Script s;
    s.add("executor_main",
          "Thought: count by year\nAction: execute_sql(\"SELECT year, COUNT(*) AS n FROM events "
          "GROUP BY year\")");
    s.add("executor_main", "Action: stop()");
    // second request: malformed model behavior ends unanswered
    for (int i = 0; i < 15; ++i) s.add("executor_main", "Thought: no move\nAction: get_tables()");
    LlmGateway gw(s.provider());
    ResearchConfig cfg;
    cfg.search_date_cutoff = Date{2024, 11, 18};
    ExecutorService service(dsn, gw, cfg);
    int port = service.start_async();

    httplib::Client client("127.0.0.1", port);

    auto health = client.Get("/healthz");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto res = client.Post("/answer", json{{"question", "How many events per year?"}}.dump(),
                           "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    json body = json::parse(res->body);
    CHECK(body["sql"].get<std::string>().find("GROUP BY year") != std::string::npos);
    CHECK(body["answer"].get<std::string>().find("Column statistics:") != std::string::npos);
    CHECK(body["stats"].get<std::string>().find("distinct_pct") != std::string::npos);

    // malformed request: in-band 400, service stays up
    auto bad = client.Post("/answer", "not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body).contains("error"));

    // a run that never executes SQL: in-band error, service alive
    auto unanswered = client.Post("/answer", json{{"question", "stuck run"}}.dump(),
                                  "application/json");
    REQUIRE(unanswered);
    CHECK(unanswered->status == 422);

    auto health2 = client.Get("/healthz");
    REQUIRE(health2);
    CHECK(health2->status == 200);

    service.stop();
}

TEST_CASE("database failures surface in-band and leave the service alive") {
    // a dsn pointing at a directory cannot be opened as a database
    auto dir = temp_dir("svc_bad_dsn");
    std::filesystem::create_directories(dir / "not_a_db");
    Script s;
    LlmGateway gw(s.provider());
    ResearchConfig cfg;
    ExecutorService service((dir / "not_a_db").string(), gw, cfg);
    int port = service.start_async();
    httplib::Client client("127.0.0.1", port);
    auto res = client.Post("/answer", json{{"question", "anything"}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 500);
    CHECK(json::parse(res->body).contains("error"));
    auto health = client.Get("/healthz");
    REQUIRE(health);
    CHECK(health->status == 200);
    service.stop();
}
