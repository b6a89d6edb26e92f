#pragma once
// Shared test machinery: independent statistics oracle (naive full scan),
// the containment entailment oracle with its mirroring judge provider,
// random table generation, an adversarial model provider, and scripted
// provider builders.

#include <unistd.h>

#include <filesystem>
#include <random>
#include <unordered_map>

#include "delve/delve.hpp"

namespace delve::testing {

// ---------------------------------------------------------------------------
// Naive full-scan statistics oracle. Independent of column_summaries: counts
// via hash map, median via full sort, mean via long double accumulation.

inline ColumnSummary oracle_column_summary(const TableResult& t, size_t col) {
    ColumnSummary out;
    out.column = t.columns[col];
    std::unordered_map<std::string, long long> counts;
    std::vector<double> nums;
    bool all_numeric = true;
    long long non_null = 0;
    for (const auto& row : t.rows) {
        std::string key = row[col] ? *row[col] : std::string("NULL");
        counts[key] += 1;
        if (row[col]) {
            ++non_null;
            double v;
            if (parse_number(*row[col], v)) nums.push_back(v);
            else all_numeric = false;
        }
    }
    out.distinct_pct =
        t.rows.empty() ? 0.0 : static_cast<double>(counts.size()) / static_cast<double>(t.rows.size());
    std::vector<std::pair<std::string, long long>> pairs(counts.begin(), counts.end());
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (size_t i = 0; i < pairs.size() && i < 5; ++i) out.top_values.push_back(pairs[i]);
    if (all_numeric && non_null > 0 && static_cast<long long>(nums.size()) == non_null) {
        std::vector<double> sorted = nums;
        std::sort(sorted.begin(), sorted.end());
        NumericStats ns;
        ns.min = sorted.front();
        ns.max = sorted.back();
        size_t n = sorted.size();
        ns.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
        long double acc = 0;
        for (double v : nums) acc += v;
        ns.mean = static_cast<double>(acc / static_cast<long double>(n));
        out.numeric = ns;
    }
    return out;
}

inline std::vector<ColumnSummary> oracle_summaries(const TableResult& t) {
    std::vector<ColumnSummary> out;
    for (size_t c = 0; c < t.columns.size(); ++c) out.push_back(oracle_column_summary(t, c));
    return out;
}

inline bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool summaries_match(const std::vector<ColumnSummary>& got,
                            const std::vector<ColumnSummary>& expected, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (got.size() != expected.size()) return fail("column count mismatch");
    for (size_t i = 0; i < got.size(); ++i) {
        const auto& g = got[i];
        const auto& e = expected[i];
        if (g.column != e.column) return fail("column name mismatch at " + std::to_string(i));
        if (std::fabs(g.distinct_pct - e.distinct_pct) > 1e-12)
            return fail("distinct_pct mismatch in " + g.column);
        if (g.top_values != e.top_values) return fail("top_values mismatch in " + g.column);
        if (g.numeric.has_value() != e.numeric.has_value())
            return fail("numeric presence mismatch in " + g.column);
        if (g.numeric) {
            if (g.numeric->min != e.numeric->min || g.numeric->max != e.numeric->max)
                return fail("min/max mismatch in " + g.column);
            if (!close(g.numeric->median, e.numeric->median, 1e-9))
                return fail("median mismatch in " + g.column);
            if (!close(g.numeric->mean, e.numeric->mean, 1e-9))
                return fail("mean mismatch in " + g.column);
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random table generator (mixed types, duplicate-prone values, nulls, ties)

inline TableResult make_random_table(std::mt19937& rng, size_t max_rows = 400) {
    TableResult t;
    std::uniform_int_distribution<int> ncols_d(1, 6);
    int ncols = ncols_d(rng);
    enum Kind { kInt, kFloat, kText, kMixed, kNullHeavy, kNullLiteral };
    std::vector<int> kinds;
    for (int c = 0; c < ncols; ++c) {
        t.columns.push_back("c" + std::to_string(c));
        kinds.push_back(std::uniform_int_distribution<int>(0, 5)(rng));
    }
    size_t nrows;
    int shape = std::uniform_int_distribution<int>(0, 9)(rng);
    if (shape == 0) nrows = std::uniform_int_distribution<size_t>(0, 3)(rng);
    else nrows = std::uniform_int_distribution<size_t>(4, max_rows)(rng);

    static const char* words[] = {"alpha", "beta", "gamma", "delta", "naïve", "NULL", "x y", ""};
    for (size_t r = 0; r < nrows; ++r) {
        std::vector<std::optional<std::string>> row;
        for (int c = 0; c < ncols; ++c) {
            if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) {
                row.emplace_back(std::nullopt);
                continue;
            }
            switch (kinds[c]) {
                case kInt:
                    row.emplace_back(std::to_string(std::uniform_int_distribution<int>(-20, 20)(rng)));
                    break;
                case kFloat: {
                    double v = std::uniform_int_distribution<int>(-8000, 8000)(rng) / 8.0;
                    row.emplace_back(format_number(v));
                    break;
                }
                case kText:
                    row.emplace_back(words[std::uniform_int_distribution<int>(0, 7)(rng)]);
                    break;
                case kMixed:
                    if (std::uniform_int_distribution<int>(0, 1)(rng))
                        row.emplace_back(std::to_string(std::uniform_int_distribution<int>(0, 5)(rng)));
                    else row.emplace_back(words[std::uniform_int_distribution<int>(0, 7)(rng)]);
                    break;
                case kNullHeavy:
                    if (std::uniform_int_distribution<int>(0, 1)(rng)) row.emplace_back(std::nullopt);
                    else row.emplace_back(std::to_string(std::uniform_int_distribution<int>(0, 3)(rng)));
                    break;
                case kNullLiteral:
                    if (std::uniform_int_distribution<int>(0, 1)(rng)) row.emplace_back("NULL");
                    else row.emplace_back(std::nullopt);
                    break;
            }
        }
        t.rows.push_back(std::move(row));
    }
    t.total_row_count = static_cast<long long>(t.rows.size());
    t.truncated = false;
    return t;
}

// ---------------------------------------------------------------------------
// Containment entailment oracle: a sentence is entailed iff every numeric
// token it carries (citation markers stripped) appears verbatim in the
// source text.

inline std::vector<std::string> numeric_tokens(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[i])) ||
                ((text[i] == ',' || text[i] == '.') && i + 1 < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[i + 1])))))
            ++i;
        out.push_back(text.substr(start, i - start));
    }
    return out;
}

inline bool containment_entailed(const std::string& sentence, const std::string& sources) {
    for (const auto& token : numeric_tokens(strip_citation_markers(sentence)))
        if (sources.find(token) == std::string::npos) return false;
    return true;
}

// Judge provider mirroring the containment oracle: parses SENTENCE/SOURCE
// out of the grounding prompt and answers deterministically.
class ContainmentJudgeProvider : public Provider {
public:
    std::string name() const override { return "containment-judge"; }

    ProviderResult complete(const ModelRequest& req) override {
        if (req.template_id != "citation_grounding")
            return ProviderResult::failure("containment judge only answers citation_grounding");
        auto section = [&](const std::string& label, const std::string& next) {
            size_t a = req.prompt.find(label);
            if (a == std::string::npos) return std::string();
            a += label.size();
            size_t b = req.prompt.find(next, a);
            return trim(req.prompt.substr(a, b == std::string::npos ? b : b - a));
        };
        std::string sentence = section("SENTENCE:\n", "\nSOURCE:");
        std::string sources = req.prompt.substr(req.prompt.find("SOURCE:\n") + 8);
        bool entailed = containment_entailed(sentence, sources);
        json out = {{"is_entailed", entailed}};
        if (!entailed) out["issue"] = "a number in the sentence does not appear in the source";
        return ProviderResult::success(out.dump());
    }
};

// ---------------------------------------------------------------------------
// Scripted provider builder

class Script {
public:
    Script& add(const std::string& template_id, const std::string& response) {
        provider_->push(template_id, response);
        return *this;
    }
    Script& add_json(const std::string& template_id, const json& j) {
        return add(template_id, j.dump());
    }
    std::shared_ptr<ScriptedProvider> provider() { return provider_; }

private:
    std::shared_ptr<ScriptedProvider> provider_ = std::make_shared<ScriptedProvider>();
};

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("delve_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Adversarial provider: seeded random mixture of valid, sloppy, and garbage
// responses per template, for layer-invariant property runs.

class AdversarialProvider : public Provider {
public:
    explicit AdversarialProvider(unsigned seed) : rng_(seed) {}

    std::string name() const override { return "adversarial"; }

    ProviderResult complete(const ModelRequest& req) override {
        const std::string& t = req.template_id;
        if (roll(20) == 0) return ProviderResult::success("");  // empty response
        if (t == "warmstart_queries") return ProviderResult::success(R"({"queries":["q one","q two","q three"]})");
        if (t == "warmstart_synthesis")
            return ProviderResult::success(
                R"({"report_markdown":"# A\ntext\n## B\nmore","insights":["i1","i2","i3","i4","i5"]})");
        if (t == "initial_questions" || t == "exploration_question_direct_gen") return questions();
        if (t == "exploration_direct_SQL_gen") return view_sql();
        if (t == "executor_main") return executor_turn();
        if (t == "query_consistency_module") return consistency(req.prompt);
        if (t == "insight_bank_filter") return filter(req.prompt);
        if (t == "thesis_generation") return thesis(true);
        if (t == "thesis_refinement") return thesis(false);
        if (t == "internet_answer" || t == "summary_prompt")
            return ProviderResult::success("an answer of moderate length");
        return ProviderResult::success("{}");
    }

private:
    int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    ProviderResult questions() {
        int mode = roll(6);
        if (mode == 0) return ProviderResult::success("not json at all");
        if (mode == 1) return ProviderResult::success(R"({"questions":[]})");
        if (mode == 2)
            return ProviderResult::success(R"({"questions":[{"question":"bad dest","destination":"web"}]})");
        json qs = json::array();
        int n = 1 + roll(7);  // may exceed the budget; truncation handles it
        for (int i = 0; i < n; ++i) {
            bool db = roll(4) != 0;
            qs.push_back({{"question", "question " + std::to_string(i) + " about events"},
                          {"destination", db ? "database" : "internet"}});
        }
        return ProviderResult::success(json{{"questions", qs}}.dump());
    }

    ProviderResult view_sql() {
        int mode = roll(4);
        if (mode == 0) return ProviderResult::success(R"({"queries":["UPDATE events SET x=1"]})");
        if (mode == 1) return ProviderResult::success("garbage");
        return ProviderResult::success(R"({"queries":["SELECT * FROM events WHERE fatalities > 2"]})");
    }

    ProviderResult executor_turn() {
        switch (roll(10)) {
            case 0: return ProviderResult::success("Thought: hmm, no action this time");
            case 1: return ProviderResult::success("Action: execute_sql(\"SELECT\") Action: stop()");
            case 2: return ProviderResult::success("Action: drop_table(\"events\")");
            case 3: return ProviderResult::success("Action: execute_sql(\"SELEKT broken\")");
            case 4: return ProviderResult::success("Action: execute_sql(\"DELETE FROM events\")");
            case 5: return ProviderResult::success("Thought: look\nAction: get_tables()");
            case 6: return ProviderResult::success("Action: retrieve_tables_details([\"missing\"])");
            case 7:
                return ProviderResult::success(
                    "Thought: peek\nAction: execute_python_from_sql(\"SELECT 1\", \"print(1)\")");
            case 8: return ProviderResult::success("Thought: done\nAction: stop()");
            default:
                return ProviderResult::success(
                    "Thought: count\nAction: execute_sql(\"SELECT event_type, COUNT(*) AS n FROM "
                    "events GROUP BY event_type\")");
        }
    }

    // keys of the prompt's input object, so selections can be valid sometimes
    static std::vector<std::string> prompt_keys(const std::string& prompt) {
        std::vector<std::string> keys;
        size_t pos = prompt.rfind("# input");
        while (pos != std::string::npos) {
            pos = prompt.find("\n  \"", pos);
            if (pos == std::string::npos) break;
            size_t start = pos + 4;
            size_t end = prompt.find('"', start);
            if (end == std::string::npos) break;
            keys.push_back(prompt.substr(start, end - start));
            pos = end;
        }
        return keys;
    }

    ProviderResult consistency(const std::string& prompt) {
        if (roll(4) == 0) return ProviderResult::success("nonsense");
        auto keys = prompt_keys(prompt);
        json out = json::object();
        for (const auto& k : keys) {
            if (k.rfind("query", 0) != 0) continue;
            if (roll(3) == 0)
                out[k] = {{"follow_up_question",
                           roll(2) ? "Please include fatalities in your SQL predicates"
                                   : "Please include made_up_col_9 in your SQL predicates"}};
            else out[k] = {{"follow_up_question", nullptr}};
        }
        return ProviderResult::success(out.dump());
    }

    ProviderResult filter(const std::string& prompt) {
        int mode = roll(5);
        if (mode == 0) return ProviderResult::success("not json");
        if (mode == 1) return ProviderResult::success(R"({"unknown-node": "text"})");
        auto keys = prompt_keys(prompt);
        json out = json::object();
        int keep = roll(40) + 1;  // sometimes exceeds the cap; the fixer trims
        for (const auto& k : keys) {
            if (static_cast<int>(out.size()) >= keep) break;
            out[k] = "insight derived from " + k;
        }
        if (out.empty() && !keys.empty()) out[keys.front()] = "insight";
        if (out.empty()) return ProviderResult::success("{}");
        return ProviderResult::success(out.dump());
    }

    ProviderResult thesis(bool generation) {
        int mode = roll(5);
        if (mode == 0) return ProviderResult::success("no json");
        if (mode == 1 && generation) return ProviderResult::success(R"({"candidates":[]})");
        if (mode == 2) {
            json t = {{"thesis", "a thesis title that clearly has far too many words in it"},
                      {"research_strategy", "s"}};
            if (generation) return ProviderResult::success(json{{"candidates", {t}}}.dump());
            return ProviderResult::success(t.dump());
        }
        json t = {{"thesis", "Short strong claim"}, {"research_strategy", "build the case"}};
        if (generation) return ProviderResult::success(json{{"candidates", {t}}}.dump());
        return ProviderResult::success(t.dump());
    }

    std::mt19937 rng_;
};

// Small fixture database shared by executor/orchestrator tests.
inline Database make_events_db(int rows = 10) {
    Database db = Database::open_memory();
    auto dir = temp_dir("eventsdb");
    std::string csv = "event_id,year,event_type,actor1,assoc_actor_1,fatalities\n";
    static const char* types[] = {"Battles", "Riots", "Protests"};
    static const char* actors[] = {"Northern Front", "Coastal Guard", "Militia A"};
    for (int i = 0; i < rows; ++i) {
        csv += std::to_string(i + 1) + "," + std::to_string(2020 + i % 3) + "," + types[i % 3] +
               "," + actors[i % 3] + "," + (i % 2 ? "Allied Group" : "") + "," +
               std::to_string(i % 5) + "\n";
    }
    auto path = dir / "events.csv";
    write_file(path, csv);
    db.ingest_csv(path, "events");
    return db;
}

}  // namespace delve::testing
