#pragma once
// Automatic evaluation procedures: reference-induced criteria matching,
// atomic-claim database attribution, and insight/summary scoring with
// pluggable judges. All scores live in closed sets; out-of-set judge output
// is retried, then excluded and flagged rather than coerced.

#include <cmath>
#include <string>
#include <vector>

#include "delve/core.hpp"
#include "delve/gateway.hpp"
#include "delve/report.hpp"

namespace delve {

struct Criterion {
    std::string name;         // 3-6 words (soft-validated)
    std::string description;  // trend-level, 1-2 sentences
    bool name_length_flagged = false;

    bool operator==(const Criterion&) const = default;
};

struct CriterionScore {
    std::string name;
    double score = 0;  // in {0, 0.25, 0.5, 0.75, 1.0}
    std::string explanation;
    bool scored = true;

    bool operator==(const CriterionScore&) const = default;
};

struct AtomicClaim {
    std::string text;
    std::string attribution;  // "database" or "internet"; empty when excluded

    bool operator==(const AtomicClaim&) const = default;
};

inline bool score_in_allowed_set(double s) {
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0})
        if (std::fabs(s - v) < 1e-12) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Reference-induced criteria matching

inline std::vector<Criterion> derive_criteria(LlmGateway& gateway,
                                              const std::string& reference_article,
                                              const std::string& task) {
    if (trim(reference_article).empty()) throw Error("reference article is empty");
    ojson items = gateway.complete_structured(
        "criteria_matching_gen",
        {{"task_prompt", task}, {"reference_article", reference_article}}, "criteria");
    std::vector<Criterion> out;
    for (const auto& item : items) {
        Criterion c;
        c.name = item["name"].get<std::string>();
        c.description = item["description"].get<std::string>();
        int words = word_count(c.name);
        c.name_length_flagged = words < 3 || words > 6;  // soft-validated, kept either way
        out.push_back(std::move(c));
    }
    return out;
}

struct GradeResult {
    std::vector<CriterionScore> scores;
    double mean = 0;  // over scored criteria only
    std::vector<std::string> flags;
};

// Grades the article against every criterion; scores outside the 5-value set
// get one re-ask, persistent offenders are marked unscored and excluded from
// the mean.
inline GradeResult grade(LlmGateway& gateway, const std::string& article,
                         const std::vector<Criterion>& criteria, const std::string& task = "",
                         const std::string& score_reminder = "") {
    if (criteria.empty()) throw Error("grading requires at least one criterion");
    std::string criteria_text;
    for (const auto& c : criteria)
        criteria_text += "Name: " + c.name + "\nDescription: " + c.description + "\n\n";

    auto validator = [&](const ojson& scores) -> std::optional<std::string> {
        for (const auto& item : scores) {
            double s = item["score"].get<double>();
            if (!score_in_allowed_set(s))
                return "score " + format_number(s) + " for criterion '" +
                       item["name"].get<std::string>() +
                       "' is not one of 0, 0.25, 0.5, 0.75, 1.0";
        }
        return std::nullopt;
    };
    // out-of-set scores survive retries as unscored entries, not as errors
    auto fixer = [&](const ojson& scores) -> std::optional<ojson> { return scores; };

    Bindings b{{"task_prompt", task}, {"criteria", criteria_text}, {"generated_article", article}};
    if (!score_reminder.empty()) b["score_reminder"] = score_reminder;
    ojson scored = gateway.complete_structured("criteria_matching_grade", b, "criterion_scores",
                                               /*retries=*/3, validator, fixer);

    GradeResult out;
    std::map<std::string, const ojson*> by_name;
    for (const auto& item : scored) by_name[item["name"].get<std::string>()] = &item;

    double sum = 0;
    int counted = 0;
    for (const auto& c : criteria) {
        CriterionScore cs;
        cs.name = c.name;
        auto it = by_name.find(c.name);
        if (it == by_name.end()) {
            cs.scored = false;
            out.flags.push_back("criterion '" + c.name + "' missing from judge output, excluded");
        } else {
            double s = (*it->second)["score"].get<double>();
            if (!score_in_allowed_set(s)) {
                cs.scored = false;
                out.flags.push_back("criterion '" + c.name + "' scored out of set, excluded");
            } else {
                cs.score = s;
                cs.explanation = (*it->second)["explanation"].get<std::string>();
                sum += s;
                ++counted;
            }
        }
        out.scores.push_back(std::move(cs));
    }
    out.mean = counted == 0 ? 0.0 : sum / counted;
    return out;
}

// ---------------------------------------------------------------------------
// Database-use attribution

// Citation markers are stripped before attribution so bracketed ids cannot
// leak provenance into the decision.
inline std::string strip_citation_markers(const std::string& text) {
    std::string out;
    auto groups = find_marker_groups(text);
    size_t prev = 0;
    for (const auto& g : groups) {
        out += text.substr(prev, g.begin - prev);
        prev = g.end;
    }
    out += text.substr(prev);
    return trim(out);
}

inline std::vector<AtomicClaim> decompose(LlmGateway& gateway, const std::string& article) {
    if (trim(article).empty()) throw Error("article is empty");
    ojson items = gateway.complete_structured("atomic_breakdown", {{"article", article}},
                                              "atomic_claims");
    std::vector<AtomicClaim> out;
    for (const auto& item : items) {
        AtomicClaim claim;
        claim.text = strip_citation_markers(item.get<std::string>());
        if (!claim.text.empty()) out.push_back(std::move(claim));
    }
    if (out.empty()) throw Error("decomposition produced no claims");
    return out;
}

inline std::string attribute(LlmGateway& gateway, const std::string& claim,
                             const std::string& topic) {
    if (trim(claim).empty()) throw Error("claim is empty");
    ojson j = gateway.complete_structured("insight_attribution",
                                          {{"article_topic", topic}, {"evidence", claim}},
                                          "attribution");
    return j["attribution"].get<std::string>();
}

struct DbUseResult {
    std::vector<AtomicClaim> claims;
    double ratio = 0;  // database-labeled / attributed
    int excluded = 0;
    std::vector<std::string> flags;
};

inline DbUseResult db_use_ratio(LlmGateway& gateway, const std::string& article,
                                const std::string& topic) {
    DbUseResult out;
    out.claims = decompose(gateway, article);
    int database = 0, attributed = 0;
    for (auto& claim : out.claims) {
        try {
            claim.attribution = attribute(gateway, claim.text, topic);
            ++attributed;
            if (claim.attribution == "database") ++database;
        } catch (const SchemaError& e) {
            ++out.excluded;  // excluded from the ratio denominator
            out.flags.push_back("claim excluded from attribution: " + std::string(e.what()));
        }
    }
    out.ratio = attributed == 0 ? 0.0 : static_cast<double>(database) / attributed;
    return out;
}

// ---------------------------------------------------------------------------
// Insight- and summary-level scoring

struct InsightRecallResult {
    std::vector<double> per_gold;  // max judge score per gold insight, in [0,1]
    double mean = 0;
    bool degenerate_judge = false;  // >90% of ratings share one value
    std::vector<std::string> flags;
};

// Judge called per (gold, predicted) pair; ratings 1-10 normalize to n/10;
// each gold insight takes its best match; the overall score is their mean.
inline InsightRecallResult insight_recall(LlmGateway& gateway,
                                          const std::vector<std::string>& predicted,
                                          const std::vector<std::string>& gold) {
    if (predicted.empty() || gold.empty())
        throw Error("insight recall requires non-empty predicted and gold lists");
    InsightRecallResult out;
    std::map<int, int> rating_counts;
    int total_ratings = 0;
    for (const auto& g : gold) {
        double best = 0;
        for (const auto& p : predicted) {
            double score = 0;
            try {
                ojson r = gateway.complete_structured(
                    "insightbench_eval", {{"answer", p}, {"gt_answer", g}}, "rating");
                int rating = r.get<int>();
                rating_counts[rating]++;
                ++total_ratings;
                score = rating / 10.0;
            } catch (const SchemaError& e) {
                out.flags.push_back("pair scored 0 (unparsable rating): " + std::string(e.what()));
            }
            best = std::max(best, score);
        }
        out.per_gold.push_back(best);
    }
    double sum = 0;
    for (double v : out.per_gold) sum += v;
    out.mean = sum / out.per_gold.size();
    for (const auto& [rating, count] : rating_counts) {
        if (total_ratings >= 10 && count > 0.9 * total_ratings) {
            out.degenerate_judge = true;
            out.flags.push_back("degenerate judge: rating " + std::to_string(rating) +
                                " covers >90% of " + std::to_string(total_ratings) + " calls");
        }
    }
    return out;
}

inline std::string summarize(LlmGateway& gateway, const std::vector<std::string>& insights) {
    if (insights.empty()) throw Error("summarize requires at least one insight");
    std::string joined;
    for (const auto& i : insights) joined += "- " + i + "\n";
    return gateway.complete_text("summary_prompt", {{"insights", joined}});
}

// Summary-level score: one (generated summary, reference summary) pair run
// through the same judge machinery.
inline InsightRecallResult summary_score(LlmGateway& gateway, const std::string& generated,
                                         const std::string& reference) {
    return insight_recall(gateway, {generated}, {reference});
}

}  // namespace delve
