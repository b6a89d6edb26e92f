// delve: autonomous research runs over a relational database and the web.
//
// Subcommands: ingest (CSV -> table), run (research + report), eval (score
// articles/insights), serve (executor as an HTTP endpoint).
//
// Exit codes: 0 success, 2 config/input error, 3 provider configuration
// error, 4 exploration aborted, 5 report stage failed.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "delve/delve.hpp"
#include "delve/http_provider.hpp"
#include "delve/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitProvider = 3;
constexpr int kExitExploration = 4;
constexpr int kExitReport = 5;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

struct GatewayOptions {
    std::string mode = "live";
    std::string fixtures;
    std::string cache_dir;
    std::string model = env_or("DELVE_MODEL", "default");
};

// Builds the gateway for the requested mode. Replay never touches the
// network: it needs either a recorded cache directory or a scripted fixture
// file.
std::unique_ptr<delve::LlmGateway> make_gateway(const GatewayOptions& opt) {
    delve::ModelRouting routing;
    routing.default_model = opt.model;
    if (opt.mode == "replay") {
        if (!opt.fixtures.empty()) {
            auto provider = delve::ScriptedProvider::from_file(opt.fixtures);
            return std::make_unique<delve::LlmGateway>(provider, delve::GatewayMode::live,
                                                       std::nullopt, routing);
        }
        if (opt.cache_dir.empty())
            throw delve::Error("replay mode needs --fixtures or --cache");
        return std::make_unique<delve::LlmGateway>(std::make_shared<delve::NullProvider>(),
                                                   delve::GatewayMode::replay, opt.cache_dir,
                                                   routing);
    }
    std::shared_ptr<delve::Provider> provider;
    if (!opt.fixtures.empty()) {
        provider = delve::ScriptedProvider::from_file(opt.fixtures);
    } else {
        std::string key = env_or("DELVE_API_KEY", "");
        if (key.empty())
            throw delve::Error("live mode requires DELVE_API_KEY (or pass --fixtures)");
        provider = std::make_shared<delve::HttpChatProvider>(
            env_or("DELVE_API_BASE", "https://api.openai.com"), key);
    }
    if (opt.mode == "record") {
        if (opt.cache_dir.empty()) throw delve::Error("record mode needs --cache");
        return std::make_unique<delve::LlmGateway>(provider, delve::GatewayMode::record,
                                                   opt.cache_dir, routing);
    }
    return std::make_unique<delve::LlmGateway>(provider, delve::GatewayMode::live, std::nullopt,
                                               routing);
}

std::shared_ptr<delve::SearchBackend> make_search(const std::string& fixtures,
                                                  const std::string& mode) {
    if (!fixtures.empty()) return delve::FixtureSearchBackend::from_file(fixtures);
    if (mode == "replay")
        throw delve::Error("replay mode needs --search-fixtures (no network in replay)");
    std::string key = env_or("DELVE_SEARCH_KEY", "");
    if (key.empty())
        throw delve::Error("live search requires DELVE_SEARCH_KEY (or pass --search-fixtures)");
    return std::make_shared<delve::HttpSearchBackend>(
        env_or("DELVE_SEARCH_URL", "https://google.serper.dev"), key);
}

delve::ResearchConfig load_config(const std::string& path, std::string& topic_out) {
    delve::ResearchConfig cfg;
    if (!path.empty()) {
        delve::json j = delve::json::parse(delve::read_file(path));
        cfg = j.get<delve::ResearchConfig>();
        if (j.contains("topic")) topic_out = j["topic"].get<std::string>();
    }
    return cfg;
}

int cmd_ingest(const std::string& csv_path, const std::string& table, const std::string& dsn) {
    try {
        auto db = delve::Database::open(dsn);
        long long rows = db.ingest_csv(csv_path, table);
        std::cout << rows << " rows loaded into table '" << table << "'\n";
        return kExitOk;
    } catch (const delve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_run(std::string topic, const std::string& config_path, const std::string& out_dir,
            GatewayOptions gw_opt, const std::string& search_fixtures, const std::string& dsn,
            const std::vector<std::string>& blocklist, const std::string& cutoff) {
    delve::ResearchConfig cfg;
    try {
        cfg = load_config(config_path, topic);
        for (const auto& d : blocklist) cfg.blocked_domains.insert(d);
        if (!cutoff.empty()) {
            auto date = delve::Date::parse(cutoff);
            if (!date) throw delve::Error("invalid --cutoff date, expected YYYY-MM-DD");
            cfg.search_date_cutoff = date;
        }
        cfg = delve::validate_config(cfg);
        if (delve::trim(topic).empty()) throw delve::Error("a topic is required (--topic or config)");
    } catch (const delve::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    delve::RunStore store(out_dir);
    if (gw_opt.mode == "record" && gw_opt.cache_dir.empty())
        gw_opt.cache_dir = store.cache_dir().string();

    std::unique_ptr<delve::LlmGateway> gateway;
    std::shared_ptr<delve::SearchBackend> search;
    try {
        gateway = make_gateway(gw_opt);
        search = make_search(search_fixtures, gw_opt.mode);
    } catch (const delve::Error& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    delve::Database db;
    try {
        db = delve::Database::open(dsn);
    } catch (const delve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    delve::OrchestratorDeps deps{*gateway, db, *search};
    deps.store = &store;
    deps.progress = [](const delve::ProgressEvent& ev) {
        std::cerr << "[" << ev.phase << " L" << ev.layer << "] " << ev.message << "\n";
    };

    delve::RunRecord run;
    try {
        run = delve::run_research(topic, cfg, deps);
    } catch (const delve::Error& e) {
        std::cerr << "exploration failed: " << e.what() << "\n";
        return kExitExploration;
    }
    if (run.aborted) {
        std::cerr << "exploration aborted; partial run record persisted in " << out_dir << "\n";
        return kExitExploration;
    }

    try {
        auto artifacts = delve::run_report_pipeline(*gateway, *search, run, cfg);
        run.final_report = artifacts.final_report.markdown;
        store.save_run(run);
        store.save_report_artifacts(artifacts.plan, artifacts.drafts, artifacts.criticisms,
                                    artifacts.revised, artifacts.final_report.markdown,
                                    artifacts.citations_json());
        store.save_meta("report_finished_at");
        std::cout << store.report_path().string() << "\n";
        return kExitOk;
    } catch (const delve::Error& e) {
        std::cerr << "report stage failed: " << e.what() << "\n";
        store.save_run(run);
        return kExitReport;
    }
}

int cmd_eval(const std::string& article_path, const std::string& reference_path,
             const std::string& task, const std::string& predicted_path,
             const std::string& gold_path, const std::string& race_path,
             const std::string& out_path, GatewayOptions gw_opt) {
    std::unique_ptr<delve::LlmGateway> gateway;
    try {
        gateway = make_gateway(gw_opt);
    } catch (const delve::Error& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    delve::json scores = delve::json::object();
    try {
        if (!article_path.empty() && !reference_path.empty()) {
            std::string article = delve::read_file(article_path);
            std::string reference = delve::read_file(reference_path);
            auto criteria = delve::derive_criteria(*gateway, reference, task);
            auto graded = delve::grade(*gateway, article, criteria, task);
            delve::json crit_json = delve::json::array();
            for (const auto& cs : graded.scores)
                crit_json.push_back({{"name", cs.name},
                                     {"score", cs.score},
                                     {"scored", cs.scored},
                                     {"explanation", cs.explanation}});
            scores["criteria"] = {{"scores", crit_json},
                                  {"mean", graded.mean},
                                  {"flags", graded.flags}};
            auto db_use = delve::db_use_ratio(*gateway, article, task);
            delve::json claims = delve::json::array();
            for (const auto& c : db_use.claims)
                claims.push_back({{"text", c.text}, {"attribution", c.attribution}});
            scores["db_use"] = {{"ratio", db_use.ratio},
                                {"claims", claims},
                                {"excluded", db_use.excluded},
                                {"flags", db_use.flags}};
        }
        if (!predicted_path.empty() && !gold_path.empty()) {
            delve::json pred = delve::json::parse(delve::read_file(predicted_path));
            delve::json gold = delve::json::parse(delve::read_file(gold_path));
            auto texts = [](const delve::json& j) {
                std::vector<std::string> out;
                const delve::json& arr = j.is_array() ? j : j.at("insights");
                for (const auto& item : arr) {
                    if (item.is_string()) out.push_back(item.get<std::string>());
                    else out.push_back(item.at("text").get<std::string>());
                }
                return out;
            };
            auto predicted = texts(pred);
            auto gold_texts = texts(gold);
            auto recall = delve::insight_recall(*gateway, predicted, gold_texts);
            scores["insight_recall"] = {{"per_gold", recall.per_gold},
                                        {"mean", recall.mean},
                                        {"degenerate_judge", recall.degenerate_judge},
                                        {"flags", recall.flags}};
            if (gold.is_object() && gold.contains("reference_summary")) {
                std::string summary = delve::summarize(*gateway, predicted);
                auto sscore = delve::summary_score(*gateway, summary,
                                                   gold["reference_summary"].get<std::string>());
                scores["summary"] = {{"generated", summary}, {"score", sscore.mean}};
            }
        }
        if (!race_path.empty()) {
            // externally computed scores are carried through for reporting only
            scores["race"] = delve::json::parse(delve::read_file(race_path));
        }
        if (scores.empty()) {
            std::cerr << "nothing to evaluate: pass --article with --reference, and/or "
                         "--predicted with --gold\n";
            return kExitUsage;
        }
    } catch (const delve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::string rendered = scores.dump(2) + "\n";
    if (out_path.empty()) std::cout << rendered;
    else delve::write_file(out_path, rendered);
    return kExitOk;
}

int cmd_serve(const std::string& dsn, int port, GatewayOptions gw_opt,
              const std::string& config_path) {
    std::unique_ptr<delve::LlmGateway> gateway;
    try {
        gateway = make_gateway(gw_opt);
    } catch (const delve::Error& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }
    delve::ResearchConfig cfg;
    try {
        std::string unused_topic;
        cfg = delve::validate_config(load_config(config_path, unused_topic));
        delve::Database probe = delve::Database::open(dsn);
        probe.get_tables();  // fail fast on unreachable stores
    } catch (const delve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    delve::ExecutorService service(dsn, *gateway, cfg);
    std::cerr << "serving executor on port " << port << "\n";
    if (!service.listen("0.0.0.0", port)) {
        std::cerr << "error: cannot bind port " << port << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delve: deep research over relational databases and the web"};
    app.require_subcommand(1);

    GatewayOptions gw;
    std::string search_fixtures;

    auto add_gateway_opts = [&](CLI::App* cmd) {
        cmd->add_option("--mode", gw.mode, "live|record|replay")
            ->check(CLI::IsMember({"live", "record", "replay"}));
        cmd->add_option("--fixtures", gw.fixtures, "scripted LLM fixture file");
        cmd->add_option("--cache", gw.cache_dir, "model-call cache directory");
        cmd->add_option("--model", gw.model, "default model id");
    };

    // ingest
    std::string csv_path, table, dsn = env_or("DELVE_DSN", ":memory:");
    auto* ingest = app.add_subcommand("ingest", "load a CSV file into a database table");
    ingest->add_option("--csv", csv_path, "CSV file with a header row")->required();
    ingest->add_option("--table", table, "target table name")->required();
    ingest->add_option("--dsn", dsn, "database path")->required();

    // run
    std::string topic, config_path, out_dir = "out";
    std::vector<std::string> blocklist;
    std::string cutoff;
    auto* run = app.add_subcommand("run", "run research and generate the report");
    run->add_option("--topic", topic, "research topic");
    run->add_option("--config", config_path, "research config JSON");
    run->add_option("--out", out_dir, "output directory (run store)");
    run->add_option("--dsn", dsn, "database path");
    run->add_option("--search-fixtures", search_fixtures, "search fixture file");
    run->add_option("--blocklist", blocklist, "blocked domains")->delimiter(',');
    run->add_option("--cutoff", cutoff, "search date cutoff (YYYY-MM-DD)");
    add_gateway_opts(run);

    // eval
    std::string article_path, reference_path, task, predicted_path, gold_path, race_path, out_path;
    auto* eval = app.add_subcommand("eval", "score articles and insight sets");
    eval->add_option("--article", article_path, "generated article (markdown)");
    eval->add_option("--reference", reference_path, "reference article (markdown)");
    eval->add_option("--task", task, "research task prompt");
    eval->add_option("--predicted", predicted_path, "predicted insights JSON");
    eval->add_option("--gold", gold_path, "gold insights JSON");
    eval->add_option("--race-scores", race_path, "externally computed scores to carry through");
    eval->add_option("--out", out_path, "scores output file (default stdout)");
    add_gateway_opts(eval);

    // serve
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "serve the executor as an HTTP endpoint");
    serve->add_option("--dsn", dsn, "database path")->required();
    serve->add_option("--port", port, "listen port");
    serve->add_option("--config", config_path, "research config JSON");
    add_gateway_opts(serve);

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) return cmd_ingest(csv_path, table, dsn);
    if (run->parsed())
        return cmd_run(topic, config_path, out_dir, gw, search_fixtures, dsn, blocklist, cutoff);
    if (eval->parsed())
        return cmd_eval(article_path, reference_path, task, predicted_path, gold_path, race_path, out_path, gw);
    if (serve->parsed()) return cmd_serve(dsn, port, gw, config_path);
    return kExitUsage;
}
