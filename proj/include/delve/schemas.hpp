#pragma once
// Structured-output contracts: one validator per schema id. A validator takes
// the raw model text and either produces a normalized JSON value or an error
// string that is fed back to the model on repair retries.
//
// Key order matters for several responses (bank filtering keeps the model's
// selection order), so normalized values use ordered_json.

#include <deque>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "delve/core.hpp"
#include "delve/util.hpp"

namespace delve {

using ojson = nlohmann::ordered_json;

struct SchemaResult {
    std::optional<std::string> error;
    ojson value;

    static SchemaResult ok(ojson v) { return {std::nullopt, std::move(v)}; }
    static SchemaResult fail(std::string msg) { return {std::move(msg), ojson()}; }
};

namespace schemas {

// Strips a ```...``` fence if the payload is wrapped in one.
inline std::string strip_code_fences(const std::string& raw) {
    size_t fence = raw.find("```");
    if (fence == std::string::npos) return raw;
    size_t body_start = raw.find('\n', fence);
    if (body_start == std::string::npos) return raw;
    ++body_start;
    size_t fence_end = raw.find("```", body_start);
    if (fence_end == std::string::npos) return raw;
    return raw.substr(body_start, fence_end - body_start);
}

// Converts python-style literals (None/True/False) and trailing commas to
// strict JSON; both appear in model output because the consistency prompt's
// worked example uses them.
inline std::string python_literals_to_json(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    bool in_string = false;
    char quote = '"';
    for (size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (in_string) {
            out += c;
            if (c == '\\' && i + 1 < in.size()) {
                out += in[++i];
            } else if (c == quote) {
                in_string = false;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            in_string = true;
            quote = c;
            out += c;
            continue;
        }
        auto word_at = [&](const char* w) {
            size_t n = std::strlen(w);
            if (in.compare(i, n, w) != 0) return false;
            bool left_ok = i == 0 || !(std::isalnum(static_cast<unsigned char>(in[i - 1])) || in[i - 1] == '_');
            bool right_ok = i + n >= in.size() ||
                            !(std::isalnum(static_cast<unsigned char>(in[i + n])) || in[i + n] == '_');
            return left_ok && right_ok;
        };
        if (word_at("None")) { out += "null"; i += 3; continue; }
        if (word_at("True")) { out += "true"; i += 3; continue; }
        if (word_at("False")) { out += "false"; i += 4; continue; }
        if (c == ',') {
            // drop trailing commas before a closing bracket
            size_t j = i + 1;
            while (j < in.size() && std::isspace(static_cast<unsigned char>(in[j]))) ++j;
            if (j < in.size() && (in[j] == '}' || in[j] == ']')) continue;
        }
        out += c;
    }
    return out;
}

// Finds and parses the first JSON object/array in free-form model text.
inline std::optional<ojson> extract_json(const std::string& raw, bool python_tolerant = false) {
    std::string text = strip_code_fences(raw);
    if (python_tolerant) text = python_literals_to_json(text);
    size_t start = text.find_first_of("{[");
    if (start == std::string::npos) return std::nullopt;
    // balanced scan so surrounding prose does not break parsing
    char open = text[start], close = open == '{' ? '}' : ']';
    int depth = 0;
    bool in_string = false;
    for (size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == open) ++depth;
        else if (c == close) {
            --depth;
            if (depth == 0) {
                ojson j = ojson::parse(text.substr(start, i - start + 1), nullptr, false);
                if (j.is_discarded()) return std::nullopt;
                return j;
            }
        }
    }
    return std::nullopt;
}

inline std::optional<std::string> nonempty_string(const ojson& j, const char* field, std::string& out) {
    if (!j.contains(field) || !j[field].is_string())
        return std::string("missing string field '") + field + "'";
    out = j[field].get<std::string>();
    if (trim(out).empty()) return std::string("field '") + field + "' is empty";
    return std::nullopt;
}

inline SchemaResult questions_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'questions' list");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("questions") && (*j)["questions"].is_array()) items = (*j)["questions"];
    else return SchemaResult::fail("expected a JSON object with a 'questions' list");
    ojson out = ojson::array();
    for (const auto& item : items) {
        if (!item.is_object()) return SchemaResult::fail("each question must be an object");
        std::string text, dest;
        if (auto e = nonempty_string(item, "question", text)) return SchemaResult::fail(*e);
        if (auto e = nonempty_string(item, "destination", dest)) return SchemaResult::fail(*e);
        if (!destination_from_string(dest))
            return SchemaResult::fail("destination must be 'database' or 'internet', got '" + dest + "'");
        out.push_back(ojson{{"question", text}, {"destination", dest}});
    }
    if (out.empty()) return SchemaResult::fail("questions list is empty");
    return SchemaResult::ok(out);
}

inline SchemaResult view_sql_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'queries' list of SQL strings");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("queries") && (*j)["queries"].is_array()) items = (*j)["queries"];
    else return SchemaResult::fail("expected a JSON object with a 'queries' list of SQL strings");
    ojson out = ojson::array();
    for (const auto& item : items) {
        if (!item.is_string()) return SchemaResult::fail("each query must be a string");
        std::string sql = trim(item.get<std::string>());
        if (!starts_with_ci(sql, "select"))
            return SchemaResult::fail("query must start with SELECT: '" + elide(sql, 60) + "'");
        out.push_back(sql);
    }
    if (out.empty()) return SchemaResult::fail("queries list is empty");
    return SchemaResult::ok(out);
}

inline SchemaResult consistency_schema(const std::string& raw) {
    auto j = extract_json(raw, /*python_tolerant=*/true);
    if (!j || !j->is_object())
        return SchemaResult::fail("expected a JSON object mapping query keys to follow-up decisions");
    ojson out = ojson::object();
    for (auto it = j->begin(); it != j->end(); ++it) {
        const ojson& node = it.value();
        ojson fu = nullptr;
        if (node.is_object() && node.contains("follow_up_question")) {
            const ojson& f = node["follow_up_question"];
            if (f.is_string()) {
                std::string s = trim(f.get<std::string>());
                if (!s.empty() && s != "None" && s != "null") fu = s;
            } else if (!f.is_null()) {
                return SchemaResult::fail("follow_up_question must be a string or None");
            }
        } else if (node.is_string()) {
            std::string s = trim(node.get<std::string>());
            if (!s.empty() && s != "None" && s != "null") fu = s;
        } else if (!node.is_null() && !node.is_object()) {
            return SchemaResult::fail("each node must be an object");
        }
        out[it.key()] = fu;
    }
    return SchemaResult::ok(out);
}

inline SchemaResult insight_filter_schema(const std::string& raw) {
    auto j = extract_json(raw, /*python_tolerant=*/true);
    if (!j) return SchemaResult::fail("expected a JSON dict of node_id to insight text");
    ojson out = ojson::array();
    std::set<std::string> seen;
    auto add = [&](const std::string& id, const ojson& v) -> std::optional<std::string> {
        if (!v.is_string() || trim(v.get<std::string>()).empty())
            return "insight text for node '" + id + "' must be a non-empty string";
        if (seen.insert(id).second) out.push_back(ojson::array({id, v.get<std::string>()}));
        return std::nullopt;  // duplicates deduplicated by id, first occurrence wins
    };
    if (j->is_object()) {
        for (auto it = j->begin(); it != j->end(); ++it)
            if (auto e = add(it.key(), it.value())) return SchemaResult::fail(*e);
    } else if (j->is_array()) {
        for (const auto& item : *j) {
            if (!item.is_object() || !item.contains("node_id") || !item.contains("insight"))
                return SchemaResult::fail("array items need node_id and insight fields");
            if (auto e = add(item["node_id"].get<std::string>(), item["insight"]))
                return SchemaResult::fail(*e);
        }
    } else {
        return SchemaResult::fail("expected a JSON dict of node_id to insight text");
    }
    return SchemaResult::ok(out);
}

inline std::optional<std::string> check_thesis_item(const ojson& item, ojson& out) {
    if (!item.is_object()) return "each candidate must be an object";
    std::string title;
    if (item.contains("thesis") && item["thesis"].is_string()) title = item["thesis"].get<std::string>();
    else if (item.contains("title") && item["title"].is_string()) title = item["title"].get<std::string>();
    else return "candidate missing 'thesis' field";
    title = trim(title);
    if (title.empty()) return "thesis title is empty";
    if (word_count(title) > 10)
        return "thesis title exceeds 10 words: '" + title + "'";
    std::string strategy;
    if (item.contains("research_strategy") && item["research_strategy"].is_string())
        strategy = item["research_strategy"].get<std::string>();
    out = ojson{{"thesis", title}, {"research_strategy", strategy}};
    return std::nullopt;
}

inline SchemaResult thesis_candidates_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'candidates' list");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("candidates") && (*j)["candidates"].is_array()) items = (*j)["candidates"];
    else return SchemaResult::fail("expected a JSON object with a 'candidates' list");
    ojson out = ojson::array();
    for (const auto& item : items) {
        ojson norm;
        if (auto e = check_thesis_item(item, norm)) return SchemaResult::fail(*e);
        out.push_back(norm);
    }
    return SchemaResult::ok(out);  // zero candidates is a valid (flagged) outcome
}

inline SchemaResult thesis_refined_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object()) return SchemaResult::fail("expected a JSON object with 'thesis' field");
    ojson norm;
    if (auto e = check_thesis_item(*j, norm)) return SchemaResult::fail(*e);
    return SchemaResult::ok(norm);
}

inline SchemaResult report_plan_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object()) return SchemaResult::fail("expected a JSON report plan object");
    for (const char* f : {"lede_strategy", "closing_strategy"}) {
        std::string s;
        if (auto e = nonempty_string(*j, f, s)) return SchemaResult::fail(*e);
    }
    if (!j->contains("sections") || !(*j)["sections"].is_array() || (*j)["sections"].empty())
        return SchemaResult::fail("plan needs a non-empty 'sections' array");
    ojson out = ojson::object();
    out["lede_strategy"] = (*j)["lede_strategy"];
    out["key_findings"] = j->contains("key_findings") && (*j)["key_findings"].is_array()
                              ? (*j)["key_findings"]
                              : ojson::array();
    out["closing_strategy"] = (*j)["closing_strategy"];
    ojson sections = ojson::array();
    for (const auto& s : (*j)["sections"]) {
        if (!s.is_object()) return SchemaResult::fail("each section must be an object");
        std::string sid, heading;
        if (auto e = nonempty_string(s, "section_id", sid)) return SchemaResult::fail(*e);
        if (auto e = nonempty_string(s, "heading", heading)) return SchemaResult::fail(*e);
        ojson sec = ojson::object();
        sec["section_id"] = sid;
        sec["heading"] = heading;
        sec["purpose"] = s.contains("purpose") && s["purpose"].is_string() ? s["purpose"] : ojson("");
        ojson ids = ojson::array();
        if (s.contains("must_include_evidence_ids")) {
            if (!s["must_include_evidence_ids"].is_array())
                return SchemaResult::fail("must_include_evidence_ids must be an integer array");
            for (const auto& v : s["must_include_evidence_ids"]) {
                if (!v.is_number_integer())
                    return SchemaResult::fail("must_include_evidence_ids must contain integers");
                ids.push_back(v);
            }
        }
        sec["must_include_evidence_ids"] = ids;
        for (const char* f : {"key_points", "storytelling_moves", "web_queries"}) {
            ojson arr = ojson::array();
            if (s.contains(f)) {
                if (!s[f].is_array()) return SchemaResult::fail(std::string(f) + " must be an array");
                for (const auto& v : s[f]) {
                    if (!v.is_string()) return SchemaResult::fail(std::string(f) + " must contain strings");
                    arr.push_back(v);
                }
            }
            sec[f] = arr;
        }
        sections.push_back(sec);
    }
    out["sections"] = sections;
    return SchemaResult::ok(out);
}

inline SchemaResult section_draft_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object()) return SchemaResult::fail("expected a JSON section draft object");
    std::string sid, heading, body;
    if (auto e = nonempty_string(*j, "section_id", sid)) return SchemaResult::fail(*e);
    if (auto e = nonempty_string(*j, "heading", heading)) return SchemaResult::fail(*e);
    if (auto e = nonempty_string(*j, "section_markdown", body)) return SchemaResult::fail(*e);
    ojson used = ojson::array();
    if (j->contains("used_citations")) {
        if (!(*j)["used_citations"].is_array())
            return SchemaResult::fail("used_citations must be an integer array");
        for (const auto& v : (*j)["used_citations"]) {
            if (!v.is_number_integer()) return SchemaResult::fail("used_citations must contain integers");
            used.push_back(v);
        }
    }
    return SchemaResult::ok(ojson{{"section_id", sid},
                                  {"heading", heading},
                                  {"section_markdown", body},
                                  {"used_citations", used}});
}

inline SchemaResult grounding_schema(const std::string& raw) {
    auto j = extract_json(raw, /*python_tolerant=*/true);
    if (!j || !j->is_object() || !j->contains("is_entailed") || !(*j)["is_entailed"].is_boolean())
        return SchemaResult::fail("expected a JSON object with boolean 'is_entailed'");
    std::string issue;
    for (const char* f : {"issue", "criticism", "note"})
        if (j->contains(f) && (*j)[f].is_string()) { issue = (*j)[f].get<std::string>(); break; }
    bool entailed = (*j)["is_entailed"].get<bool>();
    if (!entailed && trim(issue).empty())
        return SchemaResult::fail("is_entailed=false requires an 'issue' sentence");
    return SchemaResult::ok(ojson{{"is_entailed", entailed}, {"issue", issue}});
}

inline SchemaResult criteria_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'criteria' array");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("criteria") && (*j)["criteria"].is_array()) items = (*j)["criteria"];
    else return SchemaResult::fail("expected a JSON object with a 'criteria' array");
    if (items.empty()) return SchemaResult::fail("criteria array is empty");
    ojson out = ojson::array();
    for (const auto& item : items) {
        std::string name, desc;
        if (auto e = nonempty_string(item, "name", name)) return SchemaResult::fail(*e);
        if (auto e = nonempty_string(item, "description", desc)) return SchemaResult::fail(*e);
        out.push_back(ojson{{"name", name}, {"description", desc}});
    }
    return SchemaResult::ok(out);
}

inline SchemaResult criterion_scores_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'criterion_scores' array");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("criterion_scores") && (*j)["criterion_scores"].is_array())
        items = (*j)["criterion_scores"];
    else return SchemaResult::fail("expected a JSON object with a 'criterion_scores' array");
    if (items.empty()) return SchemaResult::fail("criterion_scores is empty");
    ojson out = ojson::array();
    for (const auto& item : items) {
        std::string name;
        if (auto e = nonempty_string(item, "name", name)) return SchemaResult::fail(*e);
        if (!item.contains("score") || !item["score"].is_number())
            return SchemaResult::fail("criterion '" + name + "' missing numeric score");
        std::string expl;
        if (item.contains("explanation") && item["explanation"].is_string())
            expl = item["explanation"].get<std::string>();
        out.push_back(ojson{{"name", name}, {"score", item["score"].get<double>()}, {"explanation", expl}});
    }
    return SchemaResult::ok(out);
}

inline SchemaResult atomic_claims_schema(const std::string& raw) {
    auto j = extract_json(raw);
    ojson out = ojson::array();
    if (j) {
        ojson items;
        if (j->is_array()) items = *j;
        else {
            for (const char* f : {"claims", "insights", "items", "points"})
                if (j->contains(f) && (*j)[f].is_array()) { items = (*j)[f]; break; }
        }
        for (const auto& item : items)
            if (item.is_string() && !trim(item.get<std::string>()).empty())
                out.push_back(trim(item.get<std::string>()));
    }
    if (out.empty()) {
        // fall back to itemized plain-text lines ("- x", "1. x")
        for (const auto& line : split(raw, '\n')) {
            std::string t = trim(line);
            if (t.size() > 2 && (t[0] == '-' || t[0] == '*')) out.push_back(trim(t.substr(1)));
            else if (t.size() > 3 && std::isdigit(static_cast<unsigned char>(t[0])) &&
                     (t[1] == '.' || t[1] == ')'))
                out.push_back(trim(t.substr(2)));
        }
    }
    if (out.empty()) return SchemaResult::fail("no itemized claims found in response");
    return SchemaResult::ok(out);
}

inline SchemaResult attribution_schema(const std::string& raw) {
    auto j = extract_json(raw);
    std::string label;
    if (j && j->is_object()) {
        if (j->contains("attribution") && (*j)["attribution"].is_string())
            label = to_lower(trim((*j)["attribution"].get<std::string>()));
        else if (j->contains("is_acled") && (*j)["is_acled"].is_boolean())
            label = (*j)["is_acled"].get<bool>() ? "database" : "internet";
    }
    if (label.empty()) {
        std::string lowered = to_lower(raw);
        bool db = lowered.find("database") != std::string::npos ||
                  lowered.find("acled") != std::string::npos;
        bool net = lowered.find("internet") != std::string::npos;
        if (db && !net) label = "database";
        else if (net && !db) label = "internet";
    }
    if (label != "database" && label != "internet")
        return SchemaResult::fail("attribution must be 'database' or 'internet'");
    return SchemaResult::ok(ojson{{"attribution", label}});
}

// Extracts the first <rating>N</rating> with N in 1..10.
inline SchemaResult rating_schema(const std::string& raw) {
    size_t open = raw.find("<rating>");
    if (open == std::string::npos) return SchemaResult::fail("missing <rating></rating> tags");
    size_t start = open + 8;
    size_t close = raw.find("</rating>", start);
    if (close == std::string::npos) return SchemaResult::fail("missing </rating> closing tag");
    std::string inner = trim(raw.substr(start, close - start));
    if (inner.empty() || inner.size() > 2) return SchemaResult::fail("rating must be an integer 1-10");
    for (char c : inner)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return SchemaResult::fail("rating must be an integer 1-10");
    int v = std::stoi(inner);
    if (v < 1 || v > 10) return SchemaResult::fail("rating out of range 1-10");
    return SchemaResult::ok(ojson(v));
}

inline SchemaResult warmstart_queries_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j) return SchemaResult::fail("expected a JSON object with a 'queries' list");
    ojson items;
    if (j->is_array()) items = *j;
    else if (j->contains("queries") && (*j)["queries"].is_array()) items = (*j)["queries"];
    else return SchemaResult::fail("expected a JSON object with a 'queries' list");
    ojson out = ojson::array();
    for (const auto& q : items)
        if (q.is_string() && !trim(q.get<std::string>()).empty()) out.push_back(trim(q.get<std::string>()));
    if (out.empty()) return SchemaResult::fail("queries list is empty");
    if (out.size() > 8) return SchemaResult::fail("at most 8 search queries allowed");
    return SchemaResult::ok(out);
}

inline SchemaResult warmstart_synthesis_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object())
        return SchemaResult::fail("expected a JSON object with report_markdown and insights");
    std::string report;
    if (auto e = nonempty_string(*j, "report_markdown", report)) return SchemaResult::fail(*e);
    if (!j->contains("insights") || !(*j)["insights"].is_array() || (*j)["insights"].empty())
        return SchemaResult::fail("expected a non-empty 'insights' list");
    ojson insights = ojson::array();
    for (const auto& ins : (*j)["insights"]) {
        if (!ins.is_string() || trim(ins.get<std::string>()).empty())
            return SchemaResult::fail("each insight must be a non-empty string");
        insights.push_back(trim(ins.get<std::string>()));
    }
    return SchemaResult::ok(ojson{{"report_markdown", report}, {"insights", insights}});
}

inline SchemaResult title_package_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object()) return SchemaResult::fail("expected a JSON title package object");
    std::string title;
    if (auto e = nonempty_string(*j, "title", title)) return SchemaResult::fail(*e);
    auto get = [&](const char* f) {
        return j->contains(f) && (*j)[f].is_string() ? (*j)[f].get<std::string>() : std::string();
    };
    return SchemaResult::ok(ojson{{"title", title},
                                  {"subtitle", get("subtitle")},
                                  {"editorial_angle", get("editorial_angle")}});
}

inline SchemaResult final_polish_schema(const std::string& raw) {
    auto j = extract_json(raw);
    if (!j || !j->is_object()) return SchemaResult::fail("expected a JSON object with report_markdown");
    std::string report;
    if (auto e = nonempty_string(*j, "report_markdown", report)) return SchemaResult::fail(*e);
    return SchemaResult::ok(ojson(report));
}

inline SchemaResult text_schema(const std::string& raw) {
    std::string t = trim(raw);
    if (t.empty()) return SchemaResult::fail("empty response");
    return SchemaResult::ok(ojson(t));
}

}  // namespace schemas

inline SchemaResult validate_schema(const std::string& schema_id, const std::string& raw) {
    using namespace schemas;
    if (schema_id == "questions") return questions_schema(raw);
    if (schema_id == "view_sql") return view_sql_schema(raw);
    if (schema_id == "consistency") return consistency_schema(raw);
    if (schema_id == "insight_filter") return insight_filter_schema(raw);
    if (schema_id == "thesis_candidates") return thesis_candidates_schema(raw);
    if (schema_id == "thesis_refined") return thesis_refined_schema(raw);
    if (schema_id == "report_plan") return report_plan_schema(raw);
    if (schema_id == "section_draft") return section_draft_schema(raw);
    if (schema_id == "grounding") return grounding_schema(raw);
    if (schema_id == "criteria") return criteria_schema(raw);
    if (schema_id == "criterion_scores") return criterion_scores_schema(raw);
    if (schema_id == "atomic_claims") return atomic_claims_schema(raw);
    if (schema_id == "attribution") return attribution_schema(raw);
    if (schema_id == "rating") return rating_schema(raw);
    if (schema_id == "warmstart_queries") return warmstart_queries_schema(raw);
    if (schema_id == "warmstart_synthesis") return warmstart_synthesis_schema(raw);
    if (schema_id == "title_package") return title_package_schema(raw);
    if (schema_id == "final_polish") return final_polish_schema(raw);
    if (schema_id == "text" || schema_id == "react_turn") return text_schema(raw);
    throw Error("unknown schema: " + schema_id);
}

}  // namespace delve
