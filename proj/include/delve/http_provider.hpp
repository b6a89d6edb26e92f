#pragma once
// Live backends over HTTP: a chat-completion model provider and a
// Serper-style search backend. Kept out of gateway.hpp so offline builds and
// tests do not pull in the HTTP stack.

#include <httplib.h>

#include "delve/gateway.hpp"
#include "delve/web.hpp"

namespace delve {

// Chat-completion wire format: message list in, text out.
class HttpChatProvider : public Provider {
public:
    HttpChatProvider(std::string base_url, std::string api_key)
        : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
        if (api_key_.empty()) throw Error("live provider requires an API key");
    }

    std::string name() const override { return "http:" + base_url_; }

    ProviderResult complete(const ModelRequest& req) override {
        httplib::Client client(base_url_);
        client.set_read_timeout(120, 0);
        httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
        json payload = {{"model", req.model},
                        {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})}};
        auto res = client.Post("/v1/chat/completions", headers, payload.dump(), "application/json");
        if (!res) return ProviderResult::failure("transport error: " + httplib::to_string(res.error()));
        if (res->status != 200)
            return ProviderResult::failure("HTTP " + std::to_string(res->status) + ": " + res->body);
        json body = json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.contains("choices") || body["choices"].empty())
            return ProviderResult::failure("malformed completion response");
        return ProviderResult::success(
            body["choices"][0]["message"]["content"].get<std::string>());
    }

private:
    std::string base_url_;
    std::string api_key_;
};

// Search API backend: query in, ranked results out.
class HttpSearchBackend : public SearchBackend {
public:
    HttpSearchBackend(std::string base_url, std::string api_key)
        : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
        if (api_key_.empty()) throw Error("live search requires an API key");
    }

    std::string name() const override { return "http:" + base_url_; }

    std::vector<SearchResult> search(const std::string& query) override {
        httplib::Client client(base_url_);
        client.set_read_timeout(60, 0);
        httplib::Headers headers = {{"X-API-KEY", api_key_}};
        json payload = {{"q", query}};
        auto res = client.Post("/search", headers, payload.dump(), "application/json");
        if (!res) throw Error("search transport error: " + httplib::to_string(res.error()));
        if (res->status != 200) throw Error("search HTTP " + std::to_string(res->status));
        json body = json::parse(res->body, nullptr, false);
        if (body.is_discarded()) throw Error("malformed search response");
        std::vector<SearchResult> out;
        if (body.contains("organic")) {
            for (const auto& r : body["organic"]) {
                SearchResult sr;
                sr.url = r.value("link", "");
                sr.title = r.value("title", "");
                sr.snippet = r.value("snippet", "");
                if (r.contains("date")) sr.published = Date::parse(r["date"].get<std::string>());
                out.push_back(std::move(sr));
            }
        }
        return out;
    }

private:
    std::string base_url_;
    std::string api_key_;
};

}  // namespace delve
