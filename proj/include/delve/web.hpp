#pragma once
// Web retrieval with leakage controls (domain blocklist + publish-date
// cutoff) and the warm-start adapter that produces the preliminary report
// and the initial insight bank before database exploration begins.

#include <memory>
#include <string>
#include <vector>

#include "delve/core.hpp"
#include "delve/gateway.hpp"

namespace delve {

struct SearchResult {
    std::string url;
    std::string title;
    std::string snippet;
    std::optional<Date> published;
    std::optional<std::string> page_text;
    bool date_unknown = false;  // kept despite an active cutoff

    bool operator==(const SearchResult&) const = default;
};

class SearchBackend {
public:
    virtual ~SearchBackend() = default;
    virtual std::string name() const = 0;
    virtual std::vector<SearchResult> search(const std::string& query) = 0;
};

// Deterministic backend reading a local results file:
//   {"results": {"<query>": [{"url", "title", "snippet", "date"?, "page_text"?}]}}
// Unknown queries yield an empty list, not an error.
class FixtureSearchBackend : public SearchBackend {
public:
    explicit FixtureSearchBackend(const json& fixture) {
        if (!fixture.contains("results") || !fixture["results"].is_object())
            throw Error("search fixture needs a 'results' object");
        results_ = fixture["results"];
    }

    static std::shared_ptr<FixtureSearchBackend> from_file(const std::filesystem::path& path) {
        return std::make_shared<FixtureSearchBackend>(json::parse(read_file(path)));
    }

    std::string name() const override { return "fixture"; }

    std::vector<SearchResult> search(const std::string& query) override {
        std::vector<SearchResult> out;
        if (!results_.contains(query)) return out;
        for (const auto& r : results_[query]) {
            SearchResult sr;
            sr.url = r.value("url", "");
            sr.title = r.value("title", "");
            sr.snippet = r.value("snippet", "");
            if (r.contains("date")) sr.published = Date::parse(r["date"].get<std::string>());
            if (r.contains("page_text")) sr.page_text = r["page_text"].get<std::string>();
            out.push_back(std::move(sr));
        }
        return out;
    }

private:
    json results_;
};

// Page fetches are capped for prompt budget.
inline constexpr size_t kPageTextLimit = 8000;

// Applies the leakage controls to a backend's raw results: blocked domains
// are removed by host suffix match; when a cutoff is set, results with a
// known publish date on or after it are removed and undated results pass
// with a flag.
inline std::vector<SearchResult> search(SearchBackend& backend, const std::string& query,
                                        const ResearchConfig& cfg) {
    if (trim(query).empty()) throw Error("empty search query");
    std::vector<SearchResult> out;
    for (auto& r : backend.search(query)) {
        std::string host = url_host(r.url);
        bool blocked = false;
        for (const auto& domain : cfg.blocked_domains) {
            if (host_blocked(host, domain)) { blocked = true; break; }
        }
        if (blocked) continue;
        if (cfg.search_date_cutoff) {
            if (r.published) {
                if (!(*r.published < *cfg.search_date_cutoff)) continue;
            } else {
                r.date_unknown = true;
            }
        }
        if (r.page_text && r.page_text->size() > kPageTextLimit)
            r.page_text = r.page_text->substr(0, kPageTextLimit);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string render_search_results(const std::vector<SearchResult>& results) {
    std::string out;
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out += "[" + std::to_string(i + 1) + "] " + r.title + "\nURL: " + r.url + "\n";
        if (r.published) out += "Published: " + r.published->to_string() + "\n";
        out += r.snippet + "\n";
        if (r.page_text) out += *r.page_text + "\n";
        out += "\n";
    }
    return out;
}

struct WarmStartOutput {
    std::string report;  // r0
    std::vector<Insight> insights;
    bool degraded = false;
};

// Adapter contract for the warm-start phase: topic in, preliminary report
// plus starting insights out. External research systems plug in here.
class WarmStartAdapter {
public:
    virtual ~WarmStartAdapter() = default;
    virtual WarmStartOutput warm_start(const std::string& topic, const ResearchConfig& cfg) = 0;
};

// Built-in fallback: one model call generates 3-8 search queries, results
// are fetched and merged in (query index, rank) order, one more call
// synthesizes the report and 5-15 bullet insights. If every search comes
// back empty the output is a minimal topic statement flagged degraded.
class BuiltinWarmStart : public WarmStartAdapter {
public:
    BuiltinWarmStart(LlmGateway& gateway, SearchBackend& search_backend)
        : gateway_(gateway), search_(search_backend) {}

    WarmStartOutput warm_start(const std::string& topic, const ResearchConfig& cfg) override {
        ojson queries = gateway_.complete_structured("warmstart_queries", {{"topic", topic}},
                                                     "warmstart_queries");
        std::vector<SearchResult> merged;
        for (const auto& q : queries) {
            auto results = search(search_, q.get<std::string>(), cfg);
            merged.insert(merged.end(), results.begin(), results.end());
        }
        if (merged.empty()) {
            WarmStartOutput out;
            out.report = "# " + topic + "\n\nNo web evidence was available for this topic.\n";
            out.degraded = true;
            return out;
        }
        ojson synth = gateway_.complete_structured(
            "warmstart_synthesis",
            {{"topic", topic}, {"results", render_search_results(merged)}}, "warmstart_synthesis");
        WarmStartOutput out;
        out.report = synth["report_markdown"].get<std::string>();
        int n = 0;
        for (const auto& text : synth["insights"]) {
            Insight ins;
            ins.id = "w" + std::to_string(++n);
            ins.text = text.get<std::string>();
            ins.provenance = Provenance::warmstart;
            ins.layer_created = 0;
            validate_insight(ins);
            out.insights.push_back(std::move(ins));
        }
        return out;
    }

private:
    LlmGateway& gateway_;
    SearchBackend& search_;
};

}  // namespace delve
