#pragma once
// Executor service mode: exposes the database agent as a request/response
// endpoint so external agents can query the database in natural language.
// One isolated executor run per request; per-request failures are returned
// in-band and the service stays up.

#include <httplib.h>

#include <atomic>
#include <thread>

#include "delve/executor.hpp"

namespace delve {

// Request:  POST /answer {"question": "...", "context": "..."?}
// Response: {"answer": "...", "sql": "...", "stats": "..."} or {"error": "..."}
class ExecutorService {
public:
    ExecutorService(std::string dsn, LlmGateway& gateway, ResearchConfig cfg)
        : pool_(std::move(dsn)), gateway_(gateway), cfg_(std::move(cfg)) {
        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"status\":\"ok\"}", "application/json");
        });
        server_.Post("/answer", [this](const httplib::Request& req, httplib::Response& res) {
            handle_answer(req, res);
        });
    }

    // Blocks; serves until stop() is called.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    // Binds an ephemeral port and serves on a background thread.
    int start_async(const std::string& host = "127.0.0.1") {
        int port = server_.bind_to_any_port(host);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ~ExecutorService() { stop(); }

private:
    void handle_answer(const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("question") || !body["question"].is_string() ||
            trim(body["question"].get<std::string>()).empty()) {
            res.status = 400;
            res.set_content(json{{"error", "request body must be JSON with a 'question' string"}}.dump(),
                            "application/json");
            return;
        }
        try {
            Database session = pool_.acquire();
            ExecutorDeps deps{gateway_, session, nullptr, SqlDialect::sqlite};
            ExplorationQuestion q{body["question"].get<std::string>(), Destination::database};
            std::vector<PriorTurn> history;
            if (body.contains("context") && body["context"].is_string())
                history.push_back({"(context)", {}, body["context"].get<std::string>()});
            static std::atomic<long long> seq{0};
            std::string rid = "svc-" + std::to_string(++seq);
            auto [rec, tr] = answer_question(q, history, cfg_, deps, rid, 1);
            if (!rec.answered) {
                res.status = 422;
                res.set_content(json{{"error", "no SQL could be executed for this question"}}.dump(),
                                "application/json");
                return;
            }
            json out = {{"answer", rec.answer},
                        {"sql", rec.sql},
                        {"stats", render_stats_block(rec.summaries)}};
            res.set_content(out.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    }

    httplib::Server server_;
    SessionPool pool_;
    LlmGateway& gateway_;
    ResearchConfig cfg_;
    std::thread thread_;
};

}  // namespace delve
