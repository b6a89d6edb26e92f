#pragma once
// The layered exploration loop: planner question generation, routing to
// database/internet executors, the per-layer query consistency pass, insight
// consolidation with displacement, and the thesis schedule. Execution order
// is deterministic (question order within a layer), which keeps scripted and
// replayed runs byte-stable.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delve/core.hpp"
#include "delve/db.hpp"
#include "delve/executor.hpp"
#include "delve/gateway.hpp"
#include "delve/store.hpp"
#include "delve/web.hpp"

namespace delve {

struct LayerState {
    int layer = 0;
    std::vector<ExplorationQuestion> questions;
    std::vector<QueryRecord> records;
    InsightBank bank_before;
    InsightBank bank_after;
    std::optional<Thesis> thesis;
};

struct ProgressEvent {
    std::string phase;
    int layer = 0;
    std::string message;
};

struct OrchestratorDeps {
    LlmGateway& gateway;
    Database& db;
    SearchBackend& search;
    CodeRunner* runner = nullptr;
    WarmStartAdapter* warmstart = nullptr;  // defaults to the built-in fallback
    RunStore* store = nullptr;
    std::function<void(const ProgressEvent&)> progress;
    SqlDialect dialect = SqlDialect::sqlite;
};

// ---------------------------------------------------------------------------
// Prompt context builders

inline std::string describe_database(Database& db) {
    std::vector<std::string> lines;
    for (const auto& [name, desc] : db.get_tables()) lines.push_back(name + ": " + desc);
    return lines.empty() ? "(no tables)" : join(lines, "\n");
}

inline std::string insights_digest(const InsightBank& bank) {
    std::string out;
    for (const auto& ins : bank.insights) out += "- [" + ins.id + "] " + ins.text + "\n";
    return out.empty() ? "(none yet)" : out;
}

inline std::string dialogue_digest(const std::vector<QueryRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += "L" + std::to_string(rec.layer) + " [" + to_string(rec.question.destination) + "] " +
               rec.question.text;
        if (rec.answered) out += " => " + elide(trim(rec.final_answer()), 160);
        else out += " => (unanswered)";
        out += "\n";
    }
    return out.empty() ? "(none yet)" : out;
}

// ---------------------------------------------------------------------------
// Question generation

namespace detail {

inline std::vector<ExplorationQuestion> parse_questions(const ojson& items, int budget) {
    std::vector<ExplorationQuestion> out;
    for (const auto& item : items) {
        if (static_cast<int>(out.size()) >= budget) break;  // budget enforced by truncation
        ExplorationQuestion q;
        q.text = item["question"].get<std::string>();
        q.destination = *destination_from_string(item["destination"].get<std::string>());
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace detail

// First-layer questions come from the preliminary report (or the topic alone
// when the warm start was degraded).
inline std::vector<ExplorationQuestion> initial_questions(LlmGateway& gateway,
                                                          const std::string& topic,
                                                          const std::string& r0,
                                                          const std::string& db_description,
                                                          int budget) {
    if (budget < 1) throw Error("question budget must be >= 1");
    Bindings b{{"topic", topic},
               {"db_description", db_description},
               {"num_questions", std::to_string(budget)}};
    if (!trim(r0).empty()) b["article"] = r0;
    ojson items = gateway.complete_structured("initial_questions", b, "questions");
    return detail::parse_questions(items, budget);
}

// Subsequent layers generate from the current bank and thesis; the thesis
// block renders only when a thesis exists.
inline std::vector<ExplorationQuestion> layer_questions(LlmGateway& gateway,
                                                        const InsightBank& bank,
                                                        const std::optional<Thesis>& thesis,
                                                        const std::string& topic,
                                                        const std::string& db_description,
                                                        const std::string& dialogue,
                                                        int budget) {
    if (budget < 1) throw Error("question budget must be >= 1");
    Bindings b{{"max_questions", std::to_string(budget)},
               {"db_description", db_description},
               {"global_insights", insights_digest(bank)},
               {"dialogue_turns", dialogue},
               {"topic", topic}};
    if (thesis) {
        b["thesis"] = thesis->title;
        b["research_strategy"] = thesis->research_strategy;
    }
    ojson items = gateway.complete_structured("exploration_question_direct_gen", b, "questions");
    return detail::parse_questions(items, budget);
}

// Inductive "view" channel: SELECT * slices derived from prior findings, on
// which summary statistics do the discovering.
inline std::vector<std::string> view_queries(LlmGateway& gateway,
                                             const std::vector<QueryRecord>& prior_db_records,
                                             const std::string& topic,
                                             const std::string& db_description, int budget) {
    if (prior_db_records.empty())
        throw Error("view queries require at least one prior database record");
    if (budget < 1) throw Error("view query budget must be >= 1");
    Bindings b{{"max_questions", std::to_string(budget)},
               {"db_description", db_description},
               {"dialogue_turns", dialogue_digest(prior_db_records)},
               {"topic", topic}};
    ojson items = gateway.complete_structured("exploration_direct_SQL_gen", b, "view_sql",
                                              /*retries=*/1);
    std::vector<std::string> out;
    for (const auto& q : items) {
        if (static_cast<int>(out.size()) >= budget) break;
        out.push_back(q.get<std::string>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Query consistency module

namespace detail {

inline const std::set<std::string>& sql_keyword_allowlist() {
    static const std::set<std::string> kw = {
        "select", "from",  "where",  "group",    "by",     "order",   "limit",  "offset",
        "and",    "or",    "not",    "in",       "like",   "ilike",   "as",     "on",
        "join",   "inner", "left",   "right",    "outer",  "having",  "case",   "when",
        "then",   "else",  "end",    "between",  "is",     "null",    "asc",    "desc",
        "union",  "all",   "cast",   "distinct", "count",  "sum",     "avg",    "min",
        "max",    "exists","with",   "over",     "partition", "strftime", "substr",
        "length", "round", "coalesce", "sql",    "sqls",   "predicate", "predicates",
        "query",  "queries", "filter", "filters", "column", "columns", "value", "values"};
    return kw;
}

// Identifier-ish tokens outside string literals, lowercased.
inline std::set<std::string> sql_identifiers(const std::string& sql) {
    std::set<std::string> out;
    bool in_string = false;
    std::string token;
    for (size_t i = 0; i <= sql.size(); ++i) {
        char c = i < sql.size() ? sql[i] : ' ';
        if (in_string) {
            if (c == '\'') in_string = false;
            continue;
        }
        if (c == '\'') { in_string = true; token.clear(); continue; }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            token += c;
        } else if (!token.empty()) {
            out.insert(to_lower(token));
            token.clear();
        }
    }
    return out;
}

// A token counts as column-like when it is all lowercase and carries a digit
// or underscore; plain English words pass through. This is the lintable
// proxy for "no new variables" in follow-up instructions.
inline bool looks_columnish(const std::string& token) {
    bool has_mark = false;
    for (char c : token) {
        if (std::isupper(static_cast<unsigned char>(c))) return false;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') has_mark = true;
    }
    return has_mark && token.size() > 1;
}

inline std::optional<std::string> follow_up_lint(const std::string& follow_up,
                                                 const std::set<std::string>& known_idents) {
    std::string token;
    for (size_t i = 0; i <= follow_up.size(); ++i) {
        char c = i < follow_up.size() ? follow_up[i] : ' ';
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            token += c;
            continue;
        }
        if (!token.empty()) {
            std::string lower = to_lower(token);
            if (looks_columnish(token) && !known_idents.count(lower) &&
                !sql_keyword_allowlist().count(lower))
                return "follow-up references column '" + token + "' absent from the layer SQLs";
            token.clear();
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct ConsistencyOutcome {
    std::map<std::string, std::string> follow_ups;  // record id -> follow-up text
    bool skipped = false;
    std::vector<std::string> flags;
};

inline constexpr int kMaxConsistencyExamples = 5;

// Standardizes SQL predicates across this layer's database records, using
// bank-linked question-query pairs as unmodifiable example nodes. Follow-ups
// that reference columns absent from the layer SQLs are dropped.
inline ConsistencyOutcome consistency_pass(LlmGateway& gateway,
                                           const std::vector<QueryRecord>& layer_records,
                                           const InsightBank& bank, const RunRecord& run) {
    ConsistencyOutcome out;
    std::vector<const QueryRecord*> targets;
    for (const auto& rec : layer_records)
        if (rec.question.destination == Destination::database && rec.answered && !rec.sql.empty())
            targets.push_back(&rec);
    if (targets.empty()) throw Error("consistency pass requires at least one database record");

    ojson input = ojson::object();
    std::set<std::string> known_idents;
    int examples = 0;
    for (auto it = bank.insights.rbegin(); it != bank.insights.rend(); ++it) {
        if (examples >= kMaxConsistencyExamples) break;
        if (it->provenance != Provenance::database || it->evidence.empty()) continue;
        const QueryRecord* rec = run.find_record(it->evidence.front());
        if (!rec || rec->final_sql().empty()) continue;
        ojson node = ojson::object();
        node["query"] = rec->question.text;
        node["SQL"] = rec->final_sql();
        node["example_node"] = true;
        node["note"] = "no need to generate follow_up_question";
        input["example_node_" + std::to_string(examples++)] = node;
        auto ids = detail::sql_identifiers(rec->final_sql());
        known_idents.insert(ids.begin(), ids.end());
    }
    std::map<std::string, std::string> key_to_record;
    for (size_t i = 0; i < targets.size(); ++i) {
        std::string key = "query" + std::to_string(i);
        ojson node = ojson::object();
        node["previous_queries"] = nullptr;
        node["query"] = targets[i]->question.text;
        node["SQL"] = targets[i]->sql;
        input[key] = node;
        key_to_record[key] = targets[i]->id;
        auto ids = detail::sql_identifiers(targets[i]->sql);
        known_idents.insert(ids.begin(), ids.end());
    }

    ojson response;
    try {
        response = gateway.complete_structured("query_consistency_module",
                                               {{"input", input.dump(2)}}, "consistency");
    } catch (const SchemaError& e) {
        out.skipped = true;
        out.flags.push_back(std::string("consistency pass skipped: ") + e.what());
        return out;
    }

    for (auto it = response.begin(); it != response.end(); ++it) {
        auto mapping = key_to_record.find(it.key());
        if (mapping == key_to_record.end()) continue;  // example nodes are never assigned
        if (it.value().is_null()) continue;
        std::string follow_up = it.value().get<std::string>();
        if (auto lint = detail::follow_up_lint(follow_up, known_idents)) {
            out.flags.push_back("follow-up dropped for " + mapping->second + ": " + *lint);
            continue;
        }
        out.follow_ups[mapping->second] = follow_up;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Insight consolidation

// Merges this layer's answered findings into the bank via the filter call.
// The candidate pool is existing insights plus the records' effective
// answers; the filter may rewrite texts and displace weaker entries, capped
// at the bank limit. Validation failures leave the bank unchanged (flagged).
inline InsightBank consolidate(LlmGateway& gateway, const InsightBank& bank,
                               const std::vector<QueryRecord>& new_records,
                               const std::optional<Thesis>& thesis, int cap,
                               const std::string& topic, const std::string& db_description,
                               int layer, int& insight_counter, std::vector<std::string>& flags) {
    std::vector<const QueryRecord*> answered;
    for (const auto& rec : new_records)
        if (rec.answered && !trim(rec.final_answer()).empty()) answered.push_back(&rec);
    if (answered.empty()) return bank;  // nothing to consolidate

    ojson input = ojson::object();
    std::map<std::string, const Insight*> existing;
    for (const auto& ins : bank.insights) {
        input[ins.id] = ins.text;
        existing[ins.id] = &ins;
    }
    std::map<std::string, const QueryRecord*> candidates;
    for (const QueryRecord* rec : answered) {
        std::string key = "cand-" + rec->id;
        input[key] = rec->final_answer();
        candidates[key] = rec;
    }

    auto validator = [&](const ojson& selected) -> std::optional<std::string> {
        for (const auto& pair : selected) {
            const std::string id = pair[0].get<std::string>();
            if (!existing.count(id) && !candidates.count(id))
                return "unknown node_id '" + id + "'";
        }
        if (static_cast<int>(selected.size()) > cap)
            return "selected " + std::to_string(selected.size()) + " insights, cap is " +
                   std::to_string(cap);
        return std::nullopt;
    };
    // over-selection with valid ids is fixable by truncation; unknown ids are not
    auto fixer = [&](const ojson& selected) -> std::optional<ojson> {
        for (const auto& pair : selected) {
            const std::string id = pair[0].get<std::string>();
            if (!existing.count(id) && !candidates.count(id)) return std::nullopt;
        }
        ojson trimmed = ojson::array();
        for (const auto& pair : selected) {
            if (static_cast<int>(trimmed.size()) >= cap) break;
            trimmed.push_back(pair);
        }
        return trimmed;
    };

    Bindings b{{"max_num_insights", std::to_string(cap)},
               {"topic", topic},
               {"db_description", db_description},
               {"input", input.dump(2)}};
    if (thesis) b["thesis"] = thesis->title;

    ojson selected;
    try {
        selected = gateway.complete_structured("insight_bank_filter", b, "insight_filter",
                                               /*retries=*/3, validator, fixer);
    } catch (const SchemaError& e) {
        flags.push_back(std::string("bank unchanged at layer ") + std::to_string(layer) + ": " +
                        e.what());
        return bank;
    }

    InsightBank out;
    out.cap = cap;
    for (const auto& pair : selected) {
        const std::string id = pair[0].get<std::string>();
        const std::string text = pair[1].get<std::string>();
        if (auto it = existing.find(id); it != existing.end()) {
            Insight kept = *it->second;
            kept.text = text;  // the filter may rewrite
            out.insights.push_back(std::move(kept));
        } else {
            const QueryRecord* rec = candidates.at(id);
            Insight ins;
            ins.id = "b" + std::to_string(++insight_counter);
            ins.text = text;
            ins.provenance = rec->question.destination == Destination::database
                                 ? Provenance::database
                                 : Provenance::internet;
            ins.evidence = {rec->id};
            ins.layer_created = layer;
            validate_insight(ins);
            out.insights.push_back(std::move(ins));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Thesis schedule

// Generates the initial thesis at layer p; selects the first (model-ranked)
// candidate. Zero candidates leave the thesis absent, flagged.
inline std::optional<Thesis> make_thesis(LlmGateway& gateway, const InsightBank& bank,
                                         const std::string& topic,
                                         const std::string& db_description, int layer,
                                         const ResearchConfig& cfg,
                                         std::vector<std::string>& flags) {
    if (layer != cfg.thesis_interval)
        throw Error("thesis generation is scheduled at layer " +
                    std::to_string(cfg.thesis_interval) + ", not layer " + std::to_string(layer));
    Bindings b{{"db_description", db_description},
               {"topic", topic},
               {"context", insights_digest(bank)}};
    ojson candidates;
    try {
        candidates = gateway.complete_structured("thesis_generation", b, "thesis_candidates");
    } catch (const SchemaError& e) {
        flags.push_back(std::string("thesis generation failed: ") + e.what());
        return std::nullopt;
    }
    if (candidates.empty()) {
        flags.push_back("thesis absent: generation returned zero candidates");
        return std::nullopt;
    }
    Thesis t;
    t.title = candidates[0]["thesis"].get<std::string>();
    t.research_strategy = candidates[0]["research_strategy"].get<std::string>();
    t.version = 1;
    t.layer_produced = layer;
    return t;
}

// Refines the current thesis every p layers; Confirm keeps the title and
// still bumps the version. Failures leave the current thesis unchanged.
inline Thesis refine_thesis(LlmGateway& gateway, const Thesis& current, const InsightBank& bank,
                            const std::string& topic, const std::string& db_description,
                            int layer, const ResearchConfig& cfg,
                            std::vector<std::string>& flags) {
    int p = cfg.thesis_interval;
    if (layer < 2 * p || layer % p != 0)
        throw Error("thesis refinement is scheduled at layers 2p, 3p, ...");
    Bindings b{{"db_description", db_description},
               {"topic", topic},
               {"current_thesis", current.title},
               {"current_research_strategy", current.research_strategy},
               {"context", insights_digest(bank)}};
    ojson refined;
    try {
        refined = gateway.complete_structured("thesis_refinement", b, "thesis_refined");
    } catch (const SchemaError& e) {
        flags.push_back(std::string("thesis unchanged at layer ") + std::to_string(layer) + ": " +
                        e.what());
        return current;
    }
    Thesis t;
    t.title = refined["thesis"].get<std::string>();
    t.research_strategy = refined["research_strategy"].get<std::string>();
    t.version = current.version + 1;
    t.layer_produced = layer;
    return t;
}

// ---------------------------------------------------------------------------
// The full exploration run

namespace detail {

inline QueryRecord answer_internet_question(const ExplorationQuestion& q, LlmGateway& gateway,
                                            SearchBackend& backend, const ResearchConfig& cfg,
                                            const std::string& record_id, int layer) {
    QueryRecord rec;
    rec.id = record_id;
    rec.question = q;
    rec.layer = layer;
    auto results = search(backend, q.text, cfg);
    if (results.empty()) {
        rec.answered = false;
        return rec;
    }
    rec.answer = gateway.complete_text(
        "internet_answer", {{"question", q.text}, {"results", render_search_results(results)}});
    rec.answered = true;
    return rec;
}

inline int recover_insight_counter(const RunRecord& run) {
    int max_n = 0;
    for (const auto& bank : run.bank_snapshots) {
        for (const auto& ins : bank.insights) {
            if (ins.id.size() > 1 && ins.id[0] == 'b') {
                bool digits = true;
                for (size_t i = 1; i < ins.id.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(ins.id[i]))) { digits = false; break; }
                if (digits) max_n = std::max(max_n, std::stoi(ins.id.substr(1)));
            }
        }
    }
    return max_n;
}

}  // namespace detail

// Executes warm start then layers 1..m; returns the run record with B_m and
// t_m. Report generation runs separately from the returned record. Any
// unrecoverable gateway failure aborts with the partial record persisted.
inline RunRecord run_research(const std::string& topic, const ResearchConfig& config,
                              OrchestratorDeps& deps) {
    ResearchConfig cfg = validate_config(config);
    auto notify = [&](const std::string& phase, int layer, const std::string& msg) {
        if (deps.progress) deps.progress({phase, layer, msg});
    };

    RunRecord run;
    int start_layer = 1;
    if (deps.store) {
        // resume from the last completed barrier when the same run is present
        if (auto prior = deps.store->load_run();
            prior && prior->topic == topic && prior->config == cfg && !prior->aborted &&
            !prior->bank_snapshots.empty()) {
            run = *prior;
            start_layer = run.completed_layers + 1;
            notify("resume", run.completed_layers, "resuming after layer barrier");
        }
    }

    ExecutorDeps exec_deps{deps.gateway, deps.db, deps.runner, deps.dialect};

    if (run.bank_snapshots.empty()) {
        run.topic = topic;
        run.config = cfg;
        run.run_id = "run-" + sha256_hex(topic + json(cfg).dump()).substr(0, 12);
        if (deps.store) {
            deps.store->save_config(cfg, topic);
            deps.store->save_meta("started_at");
        }

        notify("warmstart", 0, "running warm start");
        BuiltinWarmStart fallback(deps.gateway, deps.search);
        WarmStartAdapter* adapter = deps.warmstart ? deps.warmstart : &fallback;
        WarmStartOutput warm = adapter->warm_start(topic, cfg);
        run.warm_report = warm.report;
        run.warm_insights = warm.insights;
        run.warmstart_degraded = warm.degraded;
        if (warm.degraded) run.flags.push_back("warm start degraded: no search results");

        InsightBank b0;
        b0.cap = cfg.insight_cap;
        for (const auto& ins : warm.insights) {
            if (static_cast<int>(b0.insights.size()) >= cfg.insight_cap) break;
            b0.insights.push_back(ins);
        }
        run.bank_snapshots.push_back(std::move(b0));
        if (deps.store) deps.store->save_warmstart(run);
    }

    int insight_counter = detail::recover_insight_counter(run);
    std::optional<Thesis> thesis = run.final_thesis();

    for (int layer = start_layer; layer <= cfg.max_layers; ++layer) {
        try {
            std::string db_desc = describe_database(deps.db);
            InsightBank bank = run.bank_snapshots.back();
            int budget = layer == 1 ? cfg.first_layer_questions : cfg.per_layer_questions;
            notify("questions", layer, "generating up to " + std::to_string(budget) + " questions");

            std::vector<ExplorationQuestion> questions =
                layer == 1 ? initial_questions(deps.gateway, topic, run.warm_report, db_desc, budget)
                           : layer_questions(deps.gateway, bank, thesis, topic, db_desc,
                                             dialogue_digest(run.records), budget);

            std::vector<QueryRecord> layer_records;
            int qi = 0;
            for (const auto& q : questions) {
                std::string rid = "q" + std::to_string(layer) + "-" + std::to_string(qi++);
                if (q.destination == Destination::database) {
                    auto [rec, tr] = answer_question(q, {}, cfg, exec_deps, rid, layer);
                    run.transcripts.push_back({rid, render_transcript(tr)});
                    if (!rec.answered) run.flags.push_back("record " + rid + " unanswered");
                    layer_records.push_back(std::move(rec));
                } else {
                    QueryRecord rec = detail::answer_internet_question(q, deps.gateway, deps.search,
                                                                       cfg, rid, layer);
                    if (!rec.answered)
                        run.flags.push_back("record " + rid + " unanswered (no web results)");
                    layer_records.push_back(std::move(rec));
                }
            }

            if (cfg.enable_view_queries) {
                std::vector<QueryRecord> prior_db;
                for (const auto& rec : run.records)
                    if (rec.question.destination == Destination::database && rec.answered)
                        prior_db.push_back(rec);
                if (!prior_db.empty()) {
                    auto sqls = view_queries(deps.gateway, prior_db, topic, db_desc,
                                             cfg.view_query_budget);
                    int vi = 0;
                    for (const auto& sql : sqls) {
                        std::string rid =
                            "q" + std::to_string(layer) + "-view" + std::to_string(vi++);
                        QueryRecord rec;
                        rec.id = rid;
                        rec.question = {"Inductive view: " + sql, Destination::database};
                        rec.layer = layer;
                        try {
                            TableResult result =
                                deps.db.execute_sql(sql, cfg.result_row_limit, cfg.cell_char_limit);
                            auto summaries = column_summaries_full(deps.db, sql, result);
                            rec.sql = sql;
                            rec.summaries = summaries;
                            rec.answer = render_answer(result, summaries);
                        } catch (const Error& e) {
                            rec.answered = false;
                            run.flags.push_back("view query failed: " + std::string(e.what()));
                        }
                        layer_records.push_back(std::move(rec));
                    }
                }
            }

            bool any_db = false;
            for (const auto& rec : layer_records)
                if (rec.question.destination == Destination::database && rec.answered) any_db = true;
            if (any_db) {
                notify("consistency", layer, "running query consistency pass");
                ConsistencyOutcome outcome =
                    consistency_pass(deps.gateway, layer_records, bank, run);
                for (const auto& f : outcome.flags) run.flags.push_back(f);
                for (auto& rec : layer_records) {
                    auto it = outcome.follow_ups.find(rec.id);
                    if (it == outcome.follow_ups.end()) continue;
                    auto [revised, tr] =
                        apply_follow_up_with_transcript(rec, it->second, cfg, exec_deps);
                    run.transcripts.push_back({rec.id + "-rev", render_transcript(tr)});
                    if (revised.revision_failed)
                        run.flags.push_back("revision failed for record " + rec.id);
                    rec = std::move(revised);
                }
            }

            notify("consolidate", layer, "consolidating insight bank");
            bank = consolidate(deps.gateway, bank, layer_records, thesis, cfg.insight_cap, topic,
                               db_desc, layer, insight_counter, run.flags);

            if (layer % cfg.thesis_interval == 0) {
                run.thesis_event_layers.push_back(layer);
                notify("thesis", layer, thesis ? "refining thesis" : "generating thesis");
                if (!thesis && layer == cfg.thesis_interval) {
                    thesis = make_thesis(deps.gateway, bank, topic, db_desc, layer, cfg, run.flags);
                } else if (thesis) {
                    thesis = refine_thesis(deps.gateway, *thesis, bank, topic, db_desc, layer, cfg,
                                           run.flags);
                } else {
                    run.flags.push_back("thesis event at layer " + std::to_string(layer) +
                                        " skipped: no current thesis");
                }
                if (thesis && thesis->layer_produced == layer) run.thesis_history.push_back(*thesis);
            }

            for (auto& rec : layer_records) run.records.push_back(std::move(rec));
            run.bank_snapshots.push_back(std::move(bank));
            run.completed_layers = layer;
            if (deps.store) deps.store->save_layer(run, layer);
        } catch (const Error& e) {
            run.aborted = true;
            run.flags.push_back("aborted at layer " + std::to_string(layer) + ": " + e.what());
            if (deps.store) deps.store->save_run(run);
            notify("abort", layer, e.what());
            return run;
        }
    }
    if (deps.store) deps.store->save_meta("exploration_finished_at");
    return run;
}

}  // namespace delve
