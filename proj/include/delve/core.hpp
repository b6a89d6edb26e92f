#pragma once
// Domain types shared across the pipeline, their JSON round-trips, and the
// configuration surface with its validation rules.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delve/util.hpp"

namespace delve {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enumerations

enum class Provenance { warmstart, database, internet };
enum class Destination { database, internet };
enum class CitationKind { insight, web };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::warmstart: return "warmstart";
        case Provenance::database: return "database";
        case Provenance::internet: return "internet";
    }
    return "warmstart";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
    if (s == "warmstart") return Provenance::warmstart;
    if (s == "database") return Provenance::database;
    if (s == "internet") return Provenance::internet;
    return std::nullopt;
}

inline std::string to_string(Destination d) {
    return d == Destination::database ? "database" : "internet";
}

inline std::optional<Destination> destination_from_string(std::string_view s) {
    if (s == "database") return Destination::database;
    if (s == "internet") return Destination::internet;
    return std::nullopt;
}

inline std::string to_string(CitationKind k) {
    return k == CitationKind::insight ? "insight" : "web";
}

// ---------------------------------------------------------------------------
// Configuration

struct ResearchConfig {
    int max_layers = 5;             // m
    int first_layer_questions = 2;
    int per_layer_questions = 5;    // n
    int thesis_interval = 2;        // p
    int insight_cap = 30;
    int executor_turn_cap = 15;
    int result_row_limit = 50;
    int cell_char_limit = 200;
    int report_word_cap = 3000;
    int section_target_words = 700;
    bool enable_view_queries = false;  // inductive SELECT * channel (deep-research profile)
    int view_query_budget = 2;
    std::optional<Date> search_date_cutoff;
    std::set<std::string> blocked_domains;

    bool operator==(const ResearchConfig&) const = default;
};

// Returns the config unchanged; throws Error naming the first violated field.
inline ResearchConfig validate_config(const ResearchConfig& cfg) {
    if (cfg.max_layers < 1) throw Error("max_layers must be >= 1");
    if (cfg.first_layer_questions < 1) throw Error("first_layer_questions must be >= 1");
    if (cfg.per_layer_questions < 1) throw Error("per_layer_questions must be >= 1");
    if (cfg.thesis_interval < 1) throw Error("thesis_interval must be >= 1");
    if (cfg.thesis_interval > cfg.max_layers) throw Error("thesis_interval exceeds max_layers");
    if (cfg.insight_cap < 1) throw Error("insight_cap must be >= 1");
    if (cfg.executor_turn_cap < 1) throw Error("executor_turn_cap must be >= 1");
    if (cfg.result_row_limit < 1) throw Error("result_row_limit must be >= 1");
    if (cfg.cell_char_limit < 1) throw Error("cell_char_limit must be >= 1");
    if (cfg.report_word_cap < 1) throw Error("report_word_cap must be >= 1");
    if (cfg.section_target_words < 1) throw Error("section_target_words must be >= 1");
    if (cfg.view_query_budget < 1) throw Error("view_query_budget must be >= 1");
    return cfg;
}

// ---------------------------------------------------------------------------
// Exploration types

struct ExplorationQuestion {
    std::string text;
    Destination destination = Destination::database;

    bool operator==(const ExplorationQuestion&) const = default;
};

struct NumericStats {
    double min = 0, max = 0, median = 0, mean = 0;
    bool operator==(const NumericStats&) const = default;
};

struct ColumnSummary {
    std::string column;
    double distinct_pct = 0;  // unique/rows, 0 for empty results
    std::vector<std::pair<std::string, long long>> top_values;  // descending count
    std::optional<NumericStats> numeric;

    bool operator==(const ColumnSummary&) const = default;
};

struct QueryRecord {
    std::string id;
    ExplorationQuestion question;
    std::string sql;     // empty for internet-destination records
    std::string answer;  // includes the rendered statistics block for database records
    std::vector<ColumnSummary> summaries;
    std::optional<std::string> revised_sql;
    std::optional<std::string> revised_answer;
    std::optional<std::string> follow_up;  // present iff revised_sql present
    int layer = 1;
    bool answered = true;
    bool revision_failed = false;

    const std::string& final_sql() const { return revised_sql ? *revised_sql : sql; }
    const std::string& final_answer() const { return revised_answer ? *revised_answer : answer; }

    bool operator==(const QueryRecord&) const = default;
};

struct Insight {
    std::string id;
    std::string text;
    Provenance provenance = Provenance::warmstart;
    std::vector<std::string> evidence;  // QueryRecord ids; non-empty when provenance=database
    int layer_created = 0;

    bool operator==(const Insight&) const = default;
};

struct InsightBank {
    std::vector<Insight> insights;
    int cap = 30;

    bool operator==(const InsightBank&) const = default;
};

struct Thesis {
    std::string title;  // at most 10 whitespace-delimited words
    std::string research_strategy;
    int version = 1;
    int layer_produced = 0;

    bool operator==(const Thesis&) const = default;
};

// ---------------------------------------------------------------------------
// Report types

struct CitationEntry {
    int id = 0;
    CitationKind kind = CitationKind::insight;
    std::string content;
    std::string origin;  // insight id or URL

    bool operator==(const CitationEntry&) const = default;
};

struct SectionSpec {
    std::string section_id;
    std::string heading;
    std::string purpose;
    std::vector<int> must_include_evidence_ids;
    std::vector<std::string> key_points;
    std::vector<std::string> storytelling_moves;
    std::vector<std::string> web_queries;  // at most 3

    bool operator==(const SectionSpec&) const = default;
};

struct ReportPlan {
    std::string lede_strategy;
    std::vector<std::string> key_findings;
    std::vector<SectionSpec> sections;
    std::string closing_strategy;

    bool operator==(const ReportPlan&) const = default;
};

struct Criticism {
    std::string original_sentence;  // verbatim from the criticized draft
    std::string note;

    bool operator==(const Criticism&) const = default;
};

struct SectionDraft {
    std::string section_id;
    std::string heading;
    std::string body;  // markdown, inline [N] markers
    std::vector<int> used_citations;
    std::vector<Criticism> unresolved_criticisms;

    bool operator==(const SectionDraft&) const = default;
};

// ---------------------------------------------------------------------------
// Run record

struct TranscriptEntry {
    std::string record_id;
    std::string text;

    bool operator==(const TranscriptEntry&) const = default;
};

struct RunRecord {
    std::string run_id;
    std::string topic;
    ResearchConfig config;
    std::string warm_report;  // r0
    std::vector<Insight> warm_insights;
    bool warmstart_degraded = false;
    std::vector<InsightBank> bank_snapshots;  // index 0 = B_0, index i = after layer i
    std::vector<Thesis> thesis_history;
    std::vector<int> thesis_event_layers;  // layers where the thesis module fired
    std::vector<QueryRecord> records;
    std::vector<TranscriptEntry> transcripts;
    std::vector<std::string> flags;  // degraded-path notes
    int completed_layers = 0;
    bool aborted = false;
    std::string final_report;  // r, filled by the report pipeline

    const InsightBank& final_bank() const { return bank_snapshots.back(); }
    std::optional<Thesis> final_thesis() const {
        if (thesis_history.empty()) return std::nullopt;
        return thesis_history.back();
    }
    const QueryRecord* find_record(const std::string& id) const {
        for (const auto& r : records)
            if (r.id == id) return &r;
        return nullptr;
    }

    bool operator==(const RunRecord&) const = default;
};

// ---------------------------------------------------------------------------
// JSON serialization (stable formats; RunRecord persists as a directory of
// these plus a transcript log)

inline void to_json(json& j, const Date& d) { j = d.to_string(); }
inline void from_json(const json& j, Date& d) {
    auto parsed = Date::parse(j.get<std::string>());
    if (!parsed) throw Error("invalid date: " + j.get<std::string>());
    d = *parsed;
}

inline void to_json(json& j, const ResearchConfig& c) {
    j = json{{"max_layers", c.max_layers},
             {"first_layer_questions", c.first_layer_questions},
             {"per_layer_questions", c.per_layer_questions},
             {"thesis_interval", c.thesis_interval},
             {"insight_cap", c.insight_cap},
             {"executor_turn_cap", c.executor_turn_cap},
             {"result_row_limit", c.result_row_limit},
             {"cell_char_limit", c.cell_char_limit},
             {"report_word_cap", c.report_word_cap},
             {"section_target_words", c.section_target_words},
             {"enable_view_queries", c.enable_view_queries},
             {"view_query_budget", c.view_query_budget},
             {"blocked_domains", c.blocked_domains}};
    if (c.search_date_cutoff) j["search_date_cutoff"] = *c.search_date_cutoff;
}
inline void from_json(const json& j, ResearchConfig& c) {
    c = ResearchConfig{};
    j.at("max_layers").get_to(c.max_layers);
    j.at("first_layer_questions").get_to(c.first_layer_questions);
    j.at("per_layer_questions").get_to(c.per_layer_questions);
    j.at("thesis_interval").get_to(c.thesis_interval);
    j.at("insight_cap").get_to(c.insight_cap);
    j.at("executor_turn_cap").get_to(c.executor_turn_cap);
    j.at("result_row_limit").get_to(c.result_row_limit);
    j.at("cell_char_limit").get_to(c.cell_char_limit);
    j.at("report_word_cap").get_to(c.report_word_cap);
    if (j.contains("section_target_words")) j.at("section_target_words").get_to(c.section_target_words);
    if (j.contains("enable_view_queries")) j.at("enable_view_queries").get_to(c.enable_view_queries);
    if (j.contains("view_query_budget")) j.at("view_query_budget").get_to(c.view_query_budget);
    if (j.contains("blocked_domains")) j.at("blocked_domains").get_to(c.blocked_domains);
    if (j.contains("search_date_cutoff")) c.search_date_cutoff = j.at("search_date_cutoff").get<Date>();
}

inline void to_json(json& j, const ExplorationQuestion& q) {
    j = json{{"question", q.text}, {"destination", to_string(q.destination)}};
}
inline void from_json(const json& j, ExplorationQuestion& q) {
    j.at("question").get_to(q.text);
    auto d = destination_from_string(j.at("destination").get<std::string>());
    if (!d) throw Error("invalid destination: " + j.at("destination").get<std::string>());
    q.destination = *d;
}

inline void to_json(json& j, const NumericStats& s) {
    j = json{{"min", s.min}, {"max", s.max}, {"median", s.median}, {"mean", s.mean}};
}
inline void from_json(const json& j, NumericStats& s) {
    j.at("min").get_to(s.min);
    j.at("max").get_to(s.max);
    j.at("median").get_to(s.median);
    j.at("mean").get_to(s.mean);
}

inline void to_json(json& j, const ColumnSummary& c) {
    json top = json::array();
    for (const auto& [v, n] : c.top_values) top.push_back(json::array({v, n}));
    j = json{{"column", c.column}, {"distinct_pct", c.distinct_pct}, {"top_values", top}};
    if (c.numeric) j["numeric"] = *c.numeric;
}
inline void from_json(const json& j, ColumnSummary& c) {
    c = ColumnSummary{};
    j.at("column").get_to(c.column);
    j.at("distinct_pct").get_to(c.distinct_pct);
    for (const auto& e : j.at("top_values"))
        c.top_values.emplace_back(e.at(0).get<std::string>(), e.at(1).get<long long>());
    if (j.contains("numeric")) c.numeric = j.at("numeric").get<NumericStats>();
}

inline void to_json(json& j, const QueryRecord& r) {
    j = json{{"id", r.id},
             {"question", r.question},
             {"sql", r.sql},
             {"answer", r.answer},
             {"summaries", r.summaries},
             {"layer", r.layer},
             {"answered", r.answered},
             {"revision_failed", r.revision_failed}};
    if (r.revised_sql) j["revised_sql"] = *r.revised_sql;
    if (r.revised_answer) j["revised_answer"] = *r.revised_answer;
    if (r.follow_up) j["follow_up"] = *r.follow_up;
}
inline void from_json(const json& j, QueryRecord& r) {
    r = QueryRecord{};
    j.at("id").get_to(r.id);
    j.at("question").get_to(r.question);
    j.at("sql").get_to(r.sql);
    j.at("answer").get_to(r.answer);
    j.at("summaries").get_to(r.summaries);
    j.at("layer").get_to(r.layer);
    j.at("answered").get_to(r.answered);
    j.at("revision_failed").get_to(r.revision_failed);
    if (j.contains("revised_sql")) r.revised_sql = j.at("revised_sql").get<std::string>();
    if (j.contains("revised_answer")) r.revised_answer = j.at("revised_answer").get<std::string>();
    if (j.contains("follow_up")) r.follow_up = j.at("follow_up").get<std::string>();
}

inline void to_json(json& j, const Insight& i) {
    j = json{{"id", i.id},
             {"text", i.text},
             {"provenance", to_string(i.provenance)},
             {"evidence", i.evidence},
             {"layer_created", i.layer_created}};
}
inline void from_json(const json& j, Insight& i) {
    j.at("id").get_to(i.id);
    j.at("text").get_to(i.text);
    auto p = provenance_from_string(j.at("provenance").get<std::string>());
    if (!p) throw Error("invalid provenance: " + j.at("provenance").get<std::string>());
    i.provenance = *p;
    j.at("evidence").get_to(i.evidence);
    j.at("layer_created").get_to(i.layer_created);
}

inline void to_json(json& j, const InsightBank& b) {
    j = json{{"insights", b.insights}, {"cap", b.cap}};
}
inline void from_json(const json& j, InsightBank& b) {
    j.at("insights").get_to(b.insights);
    j.at("cap").get_to(b.cap);
}

inline void to_json(json& j, const Thesis& t) {
    j = json{{"title", t.title},
             {"research_strategy", t.research_strategy},
             {"version", t.version},
             {"layer_produced", t.layer_produced}};
}
inline void from_json(const json& j, Thesis& t) {
    j.at("title").get_to(t.title);
    j.at("research_strategy").get_to(t.research_strategy);
    j.at("version").get_to(t.version);
    j.at("layer_produced").get_to(t.layer_produced);
}

inline void to_json(json& j, const CitationEntry& c) {
    j = json{{"id", c.id}, {"kind", to_string(c.kind)}, {"content", c.content}, {"origin", c.origin}};
}
inline void from_json(const json& j, CitationEntry& c) {
    j.at("id").get_to(c.id);
    c.kind = j.at("kind").get<std::string>() == "web" ? CitationKind::web : CitationKind::insight;
    j.at("content").get_to(c.content);
    j.at("origin").get_to(c.origin);
}

inline void to_json(json& j, const SectionSpec& s) {
    j = json{{"section_id", s.section_id},
             {"heading", s.heading},
             {"purpose", s.purpose},
             {"must_include_evidence_ids", s.must_include_evidence_ids},
             {"key_points", s.key_points},
             {"storytelling_moves", s.storytelling_moves},
             {"web_queries", s.web_queries}};
}
inline void from_json(const json& j, SectionSpec& s) {
    j.at("section_id").get_to(s.section_id);
    j.at("heading").get_to(s.heading);
    j.at("purpose").get_to(s.purpose);
    j.at("must_include_evidence_ids").get_to(s.must_include_evidence_ids);
    j.at("key_points").get_to(s.key_points);
    j.at("storytelling_moves").get_to(s.storytelling_moves);
    j.at("web_queries").get_to(s.web_queries);
}

inline void to_json(json& j, const ReportPlan& p) {
    j = json{{"lede_strategy", p.lede_strategy},
             {"key_findings", p.key_findings},
             {"sections", p.sections},
             {"closing_strategy", p.closing_strategy}};
}
inline void from_json(const json& j, ReportPlan& p) {
    j.at("lede_strategy").get_to(p.lede_strategy);
    j.at("key_findings").get_to(p.key_findings);
    j.at("sections").get_to(p.sections);
    j.at("closing_strategy").get_to(p.closing_strategy);
}

inline void to_json(json& j, const Criticism& c) {
    j = json{{"original_sentence", c.original_sentence}, {"note", c.note}};
}
inline void from_json(const json& j, Criticism& c) {
    j.at("original_sentence").get_to(c.original_sentence);
    j.at("note").get_to(c.note);
}

inline void to_json(json& j, const SectionDraft& d) {
    j = json{{"section_id", d.section_id},
             {"heading", d.heading},
             {"body", d.body},
             {"used_citations", d.used_citations},
             {"unresolved_criticisms", d.unresolved_criticisms}};
}
inline void from_json(const json& j, SectionDraft& d) {
    j.at("section_id").get_to(d.section_id);
    j.at("heading").get_to(d.heading);
    j.at("body").get_to(d.body);
    j.at("used_citations").get_to(d.used_citations);
    if (j.contains("unresolved_criticisms"))
        j.at("unresolved_criticisms").get_to(d.unresolved_criticisms);
}

inline void to_json(json& j, const TranscriptEntry& t) {
    j = json{{"record_id", t.record_id}, {"text", t.text}};
}
inline void from_json(const json& j, TranscriptEntry& t) {
    j.at("record_id").get_to(t.record_id);
    j.at("text").get_to(t.text);
}

inline void to_json(json& j, const RunRecord& r) {
    j = json{{"run_id", r.run_id},
             {"topic", r.topic},
             {"config", r.config},
             {"warm_report", r.warm_report},
             {"warm_insights", r.warm_insights},
             {"warmstart_degraded", r.warmstart_degraded},
             {"bank_snapshots", r.bank_snapshots},
             {"thesis_history", r.thesis_history},
             {"thesis_event_layers", r.thesis_event_layers},
             {"records", r.records},
             {"transcripts", r.transcripts},
             {"flags", r.flags},
             {"completed_layers", r.completed_layers},
             {"aborted", r.aborted},
             {"final_report", r.final_report}};
}
inline void from_json(const json& j, RunRecord& r) {
    j.at("run_id").get_to(r.run_id);
    j.at("topic").get_to(r.topic);
    j.at("config").get_to(r.config);
    j.at("warm_report").get_to(r.warm_report);
    j.at("warm_insights").get_to(r.warm_insights);
    j.at("warmstart_degraded").get_to(r.warmstart_degraded);
    j.at("bank_snapshots").get_to(r.bank_snapshots);
    j.at("thesis_history").get_to(r.thesis_history);
    j.at("thesis_event_layers").get_to(r.thesis_event_layers);
    j.at("records").get_to(r.records);
    j.at("transcripts").get_to(r.transcripts);
    j.at("flags").get_to(r.flags);
    j.at("completed_layers").get_to(r.completed_layers);
    j.at("aborted").get_to(r.aborted);
    j.at("final_report").get_to(r.final_report);
}

// Validation used by consolidation and the warm start when admitting insights.
inline void validate_insight(const Insight& i) {
    if (trim(i.text).empty()) throw Error("insight text must be non-empty");
    if (i.provenance == Provenance::database && i.evidence.empty())
        throw Error("database insight requires evidence");
}

}  // namespace delve
