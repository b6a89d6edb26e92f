#pragma once
// The ReAct-style executor: one natural-language question in, one executed
// SQL query plus a statistics-bearing answer out. Failed SQL and malformed
// actions become observations and the loop continues; the turn cap always
// terminates it.

#include <string>
#include <utility>
#include <vector>

#include "delve/core.hpp"
#include "delve/db.hpp"
#include "delve/gateway.hpp"

namespace delve {

enum class ActionKind { get_tables, retrieve_tables_details, execute_sql, execute_python_from_sql, stop };

struct Action {
    ActionKind kind = ActionKind::stop;
    std::vector<std::string> table_names;  // retrieve_tables_details
    std::string sql;                       // execute_sql / execute_python_from_sql
    std::string program;                   // execute_python_from_sql
};

struct ActionParse {
    bool ok = false;
    Action action;
    std::string error;
    std::string thought;
    std::string action_text;  // the raw action call as written
};

struct TranscriptStep {
    std::string thought;
    std::string action_text;
    std::string observation;
};

struct ExecutorTranscript {
    std::vector<TranscriptStep> steps;
    std::string final_sql;
    std::string final_answer;
    int turn_count = 0;
    bool stopped = false;  // stop() invoked (vs. turn-cap fallback)
};

// Pluggable post-processing backend for execute_python_from_sql. None is
// wired by default; the action then reports itself unavailable.
class CodeRunner {
public:
    virtual ~CodeRunner() = default;
    virtual ProviderResult run(const TableResult& sql_results, const std::string& python_code) = 0;
};

namespace detail {

// Reads a quoted string starting at body[i] ('"' or '\''), honoring
// backslash escapes and triple-quoted \"\"\" blocks.
inline bool read_quoted(const std::string& body, size_t& i, std::string& out, std::string& err) {
    if (i >= body.size() || (body[i] != '"' && body[i] != '\'')) {
        err = "expected a quoted string argument";
        return false;
    }
    char q = body[i];
    bool triple = body.compare(i, 3, std::string(3, q)) == 0;
    size_t start = i + (triple ? 3 : 1);
    std::string close = triple ? std::string(3, q) : std::string(1, q);
    out.clear();
    size_t j = start;
    while (j < body.size()) {
        if (!triple && body[j] == '\\' && j + 1 < body.size()) {
            char e = body[j + 1];
            if (e == 'n') out += '\n';
            else if (e == 't') out += '\t';
            else out += e;
            j += 2;
            continue;
        }
        if (body.compare(j, close.size(), close) == 0) {
            i = j + close.size();
            return true;
        }
        out += body[j++];
    }
    err = "unterminated string argument";
    return false;
}

inline void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

}  // namespace detail

// Total over arbitrary input: returns a parsed Action or a typed error,
// never throws. Tolerates "Thought:" prose; rejects multiple actions.
inline ActionParse parse_action(const std::string& text) {
    ActionParse out;
    size_t first = text.find("Action:");
    if (first == std::string::npos) {
        out.error = "no Action found; write exactly one Action: <action>(<args>)";
        return out;
    }
    if (text.find("Action:", first + 7) != std::string::npos) {
        out.error = "multiple Actions in one turn; perform exactly one Action";
        return out;
    }
    size_t thought_pos = text.find("Thought:");
    if (thought_pos != std::string::npos && thought_pos < first)
        out.thought = trim(text.substr(thought_pos + 8, first - thought_pos - 8));

    size_t i = first + 7;
    detail::skip_ws(text, i);
    size_t name_start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
    std::string name = text.substr(name_start, i - name_start);
    if (name.empty()) {
        out.error = "no Action found; write exactly one Action: <action>(<args>)";
        return out;
    }

    detail::skip_ws(text, i);
    bool has_parens = i < text.size() && text[i] == '(';
    size_t args_begin = has_parens ? i + 1 : i;

    auto finish_args_end = [&](size_t pos) {
        size_t end = pos;
        detail::skip_ws(text, end);
        out.action_text = trim(text.substr(name_start, end - name_start));
    };

    if (name == "get_tables" || name == "stop") {
        out.action.kind = name == "stop" ? ActionKind::stop : ActionKind::get_tables;
        if (has_parens) {
            size_t j = args_begin;
            detail::skip_ws(text, j);
            if (j >= text.size() || text[j] != ')') {
                out.error = name + "() takes no arguments";
                return out;
            }
            finish_args_end(j + 1);
        } else {
            finish_args_end(i);
        }
        out.ok = true;
        return out;
    }

    if (!has_parens) {
        out.error = name + " requires parenthesized arguments";
        return out;
    }
    size_t j = args_begin;
    detail::skip_ws(text, j);

    if (name == "retrieve_tables_details") {
        out.action.kind = ActionKind::retrieve_tables_details;
        if (j < text.size() && text[j] == '[') {
            ++j;
            while (true) {
                detail::skip_ws(text, j);
                if (j < text.size() && text[j] == ']') { ++j; break; }
                std::string item, err;
                if (!detail::read_quoted(text, j, item, err)) {
                    out.error = "retrieve_tables_details: " + err;
                    return out;
                }
                out.action.table_names.push_back(item);
                detail::skip_ws(text, j);
                if (j < text.size() && text[j] == ',') { ++j; continue; }
            }
        } else {
            std::string item, err;
            if (!detail::read_quoted(text, j, item, err)) {
                out.error = "retrieve_tables_details expects a list of quoted table names";
                return out;
            }
            out.action.table_names.push_back(item);
        }
        detail::skip_ws(text, j);
        if (j >= text.size() || text[j] != ')') {
            out.error = "retrieve_tables_details: missing closing ')'";
            return out;
        }
        if (out.action.table_names.empty()) {
            out.error = "retrieve_tables_details: empty table list";
            return out;
        }
        finish_args_end(j + 1);
        out.ok = true;
        return out;
    }

    if (name == "execute_sql") {
        out.action.kind = ActionKind::execute_sql;
        std::string sql, err;
        if (!detail::read_quoted(text, j, sql, err)) {
            out.error = "execute_sql: " + err;
            return out;
        }
        detail::skip_ws(text, j);
        if (j >= text.size() || text[j] != ')') {
            out.error = "execute_sql takes exactly one quoted SQL argument";
            return out;
        }
        if (trim(sql).empty()) {
            out.error = "execute_sql: empty SQL";
            return out;
        }
        out.action.sql = sql;
        finish_args_end(j + 1);
        out.ok = true;
        return out;
    }

    if (name == "execute_python_from_sql") {
        out.action.kind = ActionKind::execute_python_from_sql;
        std::string sql, prog, err;
        if (!detail::read_quoted(text, j, sql, err)) {
            out.error = "execute_python_from_sql: " + err;
            return out;
        }
        detail::skip_ws(text, j);
        if (j >= text.size() || text[j] != ',') {
            out.error = "execute_python_from_sql takes (sql, python_code)";
            return out;
        }
        ++j;
        detail::skip_ws(text, j);
        if (!detail::read_quoted(text, j, prog, err)) {
            out.error = "execute_python_from_sql: " + err;
            return out;
        }
        detail::skip_ws(text, j);
        if (j >= text.size() || text[j] != ')') {
            out.error = "execute_python_from_sql takes (sql, python_code)";
            return out;
        }
        out.action.sql = sql;
        out.action.program = prog;
        finish_args_end(j + 1);
        out.ok = true;
        return out;
    }

    out.error = "unknown action: " + name;
    return out;
}

struct PriorTurn {
    std::string question;
    std::vector<std::string> action_history;
    std::string response;
};

struct ExecutorDeps {
    LlmGateway& gateway;
    Database& db;
    CodeRunner* runner = nullptr;
    SqlDialect dialect = SqlDialect::sqlite;
};

inline std::string run_post_processing(const std::string& sql, const std::string& program,
                                       const ResearchConfig& cfg, ExecutorDeps& deps) {
    if (!deps.runner) return "post-processing unavailable";
    TableResult result;
    try {
        result = deps.db.execute_sql(sql, cfg.result_row_limit, cfg.cell_char_limit);
    } catch (const Error& e) {
        return std::string(e.what());
    }
    ProviderResult out = deps.runner->run(result, program);
    if (!out.ok) return out.error;
    return elide(out.text, 4000);
}

namespace detail {

inline std::string format_prior_turns(const std::vector<PriorTurn>& history) {
    std::string out;
    for (const auto& turn : history) {
        out += "User Question: " + turn.question + "\n\nAction history:\n";
        for (const auto& line : turn.action_history) out += line + "\n";
        out += "\nAgent Response: " + turn.response + "\n--\n";
    }
    return out;
}

}  // namespace detail

inline std::string render_transcript(const ExecutorTranscript& tr) {
    std::string out;
    for (size_t i = 0; i < tr.steps.size(); ++i) {
        const auto& s = tr.steps[i];
        out += "[turn " + std::to_string(i + 1) + "]\n";
        if (!s.thought.empty()) out += "Thought: " + s.thought + "\n";
        out += "Action: " + s.action_text + "\nObservation: " + s.observation + "\n";
    }
    out += "final_sql: " + tr.final_sql + "\n";
    return out;
}

// Runs the ReAct loop for one database-directed question. The loop never
// exceeds the configured turn cap; stop() designates the most recently
// executed SQL as the final answer, and cap exhaustion falls back to the
// last successfully executed SQL. A run that never executes SQL yields an
// unanswered record.
inline std::pair<QueryRecord, ExecutorTranscript> answer_question(
    const ExplorationQuestion& question, const std::vector<PriorTurn>& history,
    const ResearchConfig& cfg, ExecutorDeps& deps, const std::string& record_id, int layer) {
    if (question.destination != Destination::database)
        throw Error("answer_question handles database-destination questions only");
    if (!deps.db.connected()) throw Error("database connection is closed");

    ExecutorTranscript tr;
    QueryRecord rec;
    rec.id = record_id;
    rec.question = question;
    rec.layer = layer;

    std::string curr_date = cfg.search_date_cutoff ? cfg.search_date_cutoff->to_string()
                                                   : Date::today_utc().to_string();
    std::string prior = detail::format_prior_turns(history);

    std::string last_sql;
    TableResult last_result;
    bool executed = false;
    std::vector<std::string> action_lines;

    while (tr.turn_count < cfg.executor_turn_cap) {
        ++tr.turn_count;
        Bindings b{{"database_type", to_string(deps.dialect)},
                   {"curr_date", curr_date},
                   {"conversation_history", prior},
                   {"question", question.text},
                   {"action_history", join(action_lines, "\n")}};
        std::string text;
        try {
            text = deps.gateway.complete_text("executor_main", b, "react_turn", 0);
        } catch (const CacheMissError&) {
            throw;  // a replay miss must fail the run, not degrade the record
        } catch (const Error& e) {
            tr.steps.push_back({"", "(model unavailable)", e.what()});
            break;
        }

        ActionParse pa = parse_action(text);
        std::string action_text = pa.ok ? pa.action_text : elide(trim(text), 200);
        std::string obs;
        bool done = false;
        if (!pa.ok) {
            obs = "Error: " + pa.error;
        } else {
            switch (pa.action.kind) {
                case ActionKind::get_tables:
                    obs = render_tables_text(deps.db.get_tables());
                    break;
                case ActionKind::retrieve_tables_details:
                    try {
                        obs = render_table_details_text(deps.db.table_details(pa.action.table_names));
                    } catch (const Error& e) {
                        obs = std::string(e.what());
                    }
                    break;
                case ActionKind::execute_sql:
                    try {
                        TableResult result =
                            deps.db.execute_sql(pa.action.sql, cfg.result_row_limit, cfg.cell_char_limit);
                        auto summaries = column_summaries_full(deps.db, pa.action.sql, result);
                        obs = render_answer(result, summaries);
                        last_sql = pa.action.sql;
                        last_result = std::move(result);
                        executed = true;
                    } catch (const Error& e) {
                        obs = std::string(e.what());
                    }
                    break;
                case ActionKind::execute_python_from_sql:
                    obs = run_post_processing(pa.action.sql, pa.action.program, cfg, deps);
                    break;
                case ActionKind::stop:
                    tr.stopped = true;
                    obs = executed ? "Final SQL designated." : "stop() with no executed SQL.";
                    done = true;
                    break;
            }
        }
        tr.steps.push_back({pa.thought, action_text, obs});
        action_lines.push_back("Thought: " + pa.thought);
        action_lines.push_back("Action: " + action_text);
        action_lines.push_back("Observation: " + obs);
        if (done) break;
    }

    if (executed) {
        auto summaries = column_summaries_full(deps.db, last_sql, last_result);
        rec.sql = last_sql;
        rec.summaries = summaries;
        rec.answer = render_answer(last_result, summaries);
        rec.answered = true;
        tr.final_sql = last_sql;
        tr.final_answer = rec.answer;
    } else {
        rec.answered = false;
    }
    return {rec, tr};
}

// Re-runs the loop seeded with the original (question, SQL, answer) as
// context plus the consistency follow-up instruction. Original fields are
// preserved for lineage; a failed revision leaves the record standing with
// revision_failed set.
inline std::pair<QueryRecord, ExecutorTranscript> apply_follow_up_with_transcript(
    const QueryRecord& record, const std::string& follow_up, const ResearchConfig& cfg,
    ExecutorDeps& deps) {
    if (record.sql.empty() || record.answer.empty())
        throw Error("apply_follow_up requires a record with sql and answer");
    if (trim(follow_up).empty()) throw Error("apply_follow_up requires a non-empty follow_up");

    PriorTurn seed;
    seed.question = record.question.text;
    seed.action_history = {"Action: execute_sql(\"" + record.sql + "\")",
                           "Observation: executed and designated as the final SQL"};
    seed.response = record.answer;

    ExplorationQuestion revision_q{follow_up, Destination::database};
    auto [revised, tr] =
        answer_question(revision_q, {seed}, cfg, deps, record.id + "-rev", record.layer);

    QueryRecord out = record;
    if (!revised.answered) {
        out.revision_failed = true;
        return {out, tr};
    }
    out.revised_sql = revised.sql;
    out.revised_answer = revised.answer;
    out.follow_up = follow_up;
    out.summaries = revised.summaries;
    return {out, tr};
}

inline QueryRecord apply_follow_up(const QueryRecord& record, const std::string& follow_up,
                                   const ResearchConfig& cfg, ExecutorDeps& deps) {
    return apply_follow_up_with_transcript(record, follow_up, cfg, deps).first;
}

}  // namespace delve
