#pragma once
// The staged editorial pipeline: outline, grounded per-section drafting,
// citation-boundary fact verification, targeted revision, and final polish
// with a programmatic sources appendix.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "delve/core.hpp"
#include "delve/gateway.hpp"
#include "delve/web.hpp"

namespace delve {

// ---------------------------------------------------------------------------
// Sentence segmentation
//
// Boundary rule: '.', '!' or '?' followed by whitespace and a capital letter,
// with an abbreviation stoplist. Deterministic and total.

namespace textseg {

inline const std::set<std::string>& abbreviation_stoplist() {
    static const std::set<std::string> abbr = {
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "mr.",  "mrs.",    "ms.",  "dr.",
        "prof.", "st.", "no.",  "fig.", "eq.", "al.", "approx.", "u.s.", "u.k.", "u.n."};
    return abbr;
}

struct Span {
    size_t begin = 0;
    size_t end = 0;  // half-open
};

inline std::vector<Span> sentence_spans(const std::string& text) {
    std::vector<Span> spans;
    size_t start = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        // the word ending at this punctuation, for the stoplist check
        size_t w = i;
        while (w > start && !std::isspace(static_cast<unsigned char>(text[w - 1]))) --w;
        std::string word = to_lower(text.substr(w, i - w + 1));
        if (abbreviation_stoplist().count(word)) continue;
        size_t j = i + 1;
        bool saw_ws = false;
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) {
            saw_ws = true;
            ++j;
        }
        if (j >= text.size()) {
            spans.push_back({start, i + 1});
            start = i + 1;
            break;
        }
        if (saw_ws && std::isupper(static_cast<unsigned char>(text[j]))) {
            spans.push_back({start, i + 1});
            start = i + 1;
        }
    }
    if (start < text.size()) {
        std::string rest = trim(text.substr(start));
        if (!rest.empty()) spans.push_back({start, text.size()});
    }
    return spans;
}

}  // namespace textseg

inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& span : textseg::sentence_spans(text)) {
        std::string s = trim(text.substr(span.begin, span.end - span.begin));
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Citation markers

struct MarkerGroup {
    size_t begin = 0;
    size_t end = 0;  // half-open, covers "[1][2]" including brackets
    std::vector<int> ids;
};

inline std::vector<MarkerGroup> find_marker_groups(const std::string& text) {
    std::vector<MarkerGroup> groups;
    size_t i = 0;
    auto read_marker = [&](size_t pos, int& id, size_t& end) {
        if (pos >= text.size() || text[pos] != '[') return false;
        size_t j = pos + 1;
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j]))) return false;
        long long v = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
            v = v * 10 + (text[j] - '0');
            ++j;
        }
        if (j >= text.size() || text[j] != ']' || v > 1000000) return false;
        id = static_cast<int>(v);
        end = j + 1;
        return true;
    };
    while (i < text.size()) {
        int id;
        size_t end;
        if (!read_marker(i, id, end)) {
            ++i;
            continue;
        }
        MarkerGroup g;
        g.begin = i;
        g.ids.push_back(id);
        g.end = end;
        // absorb adjacent markers, optionally space-separated
        size_t j = end;
        while (true) {
            size_t k = j;
            while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
            int next_id;
            size_t next_end;
            if (!read_marker(k, next_id, next_end)) break;
            g.ids.push_back(next_id);
            g.end = next_end;
            j = next_end;
        }
        groups.push_back(std::move(g));
        i = groups.back().end;
    }
    return groups;
}

inline std::vector<int> extract_citation_ids(const std::string& text) {
    std::set<int> ids;
    for (const auto& g : find_marker_groups(text)) ids.insert(g.ids.begin(), g.ids.end());
    return std::vector<int>(ids.begin(), ids.end());
}

// ---------------------------------------------------------------------------
// Citation-boundary chunking

struct Chunk {
    std::string span;      // raw text from the previous chunk end through this marker group
    std::string context;   // up to 2 sentences preceding the claim sentence
    std::string sentence;  // the claim-bearing sentence containing the markers
    std::vector<int> ids;
};

// Pure text function: every maximal span ending at a citation marker group
// becomes one chunk; trailing citation-free text is skipped. Chunk spans
// concatenated in order, plus the skipped tail, reconstruct the body.
inline std::vector<Chunk> chunk_at_citations(const std::string& body) {
    std::vector<Chunk> chunks;
    auto groups = find_marker_groups(body);
    if (groups.empty()) return chunks;
    auto spans = textseg::sentence_spans(body);

    size_t prev_end = 0;
    for (const auto& g : groups) {
        Chunk c;
        c.span = body.substr(prev_end, g.end - prev_end);
        c.ids = g.ids;
        size_t anchor = g.end == 0 ? 0 : g.end - 1;
        size_t si = 0;
        for (size_t k = 0; k < spans.size(); ++k) {
            if (anchor >= spans[k].begin && anchor < spans[k].end) {
                si = k;
                break;
            }
            if (spans[k].begin > anchor) break;
            si = k;
        }
        if (!spans.empty()) {
            c.sentence = trim(body.substr(spans[si].begin, spans[si].end - spans[si].begin));
            std::vector<std::string> ctx;
            for (size_t back = si >= 2 ? si - 2 : 0; back < si; ++back)
                ctx.push_back(trim(body.substr(spans[back].begin, spans[back].end - spans[back].begin)));
            c.context = join(ctx, " ");
        }
        prev_end = g.end;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

// ---------------------------------------------------------------------------
// Citation registry

class CitationRegistry {
public:
    int add(CitationKind kind, std::string content, std::string origin) {
        CitationEntry e;
        e.id = static_cast<int>(entries_.size()) + 1;  // ids stay dense 1..N
        e.kind = kind;
        e.content = std::move(content);
        e.origin = std::move(origin);
        entries_.push_back(std::move(e));
        return entries_.back().id;
    }

    const CitationEntry* find(int id) const {
        if (id < 1 || id > static_cast<int>(entries_.size())) return nullptr;
        return &entries_[static_cast<size_t>(id) - 1];
    }

    const std::vector<CitationEntry>& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.size()); }

    std::string valid_ids_text() const {
        std::vector<std::string> ids;
        for (const auto& e : entries_) ids.push_back(std::to_string(e.id));
        return join(ids, ", ");
    }

private:
    std::vector<CitationEntry> entries_;
};

inline CitationRegistry registry_from_bank(const InsightBank& bank) {
    CitationRegistry reg;
    for (const auto& ins : bank.insights) reg.add(CitationKind::insight, ins.text, ins.id);
    return reg;
}

struct TitlePackage {
    std::string title;
    std::string subtitle;
    std::string editorial_angle;
};

struct EvidencePacket {
    std::string section_id;
    std::vector<int> core_ids;  // insight-backed citations, subset of the section's evidence ids
    std::vector<int> web_ids;
};

namespace detail {

inline std::string packet_text(const std::vector<int>& ids, const CitationRegistry& reg) {
    std::string out;
    for (int id : ids) {
        const CitationEntry* e = reg.find(id);
        if (e) out += "[" + std::to_string(id) + "] " + e->content + "\n";
    }
    return out;
}

inline std::string ids_text(const std::vector<int>& core, const std::vector<int>& web) {
    std::vector<std::string> all;
    for (int id : core) all.push_back(std::to_string(id));
    for (int id : web) all.push_back(std::to_string(id));
    return join(all, ", ");
}

inline std::string thesis_text(const std::optional<Thesis>& thesis) {
    return thesis ? thesis->title : "(no thesis; synthesize the strongest central claim)";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stage A: outline

inline TitlePackage make_title_package(LlmGateway& gateway, const std::string& topic,
                                       const std::optional<Thesis>& thesis,
                                       const InsightBank& bank) {
    std::string findings;
    for (const auto& ins : bank.insights) findings += "- " + ins.text + "\n";
    ojson j = gateway.complete_structured("title_package",
                                          {{"topic", topic},
                                           {"thesis", detail::thesis_text(thesis)},
                                           {"findings", findings}},
                                          "title_package");
    return {j["title"].get<std::string>(), j["subtitle"].get<std::string>(),
            j["editorial_angle"].get<std::string>()};
}

// Generates the section-level outline. Evidence ids are restricted to the
// registry built from the bank; per-section web queries are capped at 3
// (repair retry first, structural trim if the model insists).
inline std::pair<ReportPlan, CitationRegistry> plan(LlmGateway& gateway, const std::string& topic,
                                                    const std::optional<Thesis>& thesis,
                                                    const InsightBank& bank, const std::string& r0,
                                                    const TitlePackage& title) {
    if (bank.insights.empty()) throw Error("report planning requires a non-empty insight bank");
    CitationRegistry registry = registry_from_bank(bank);

    std::string digest;
    for (const auto& e : registry.entries())
        digest += "[" + std::to_string(e.id) + "] " + e.content + "\n";

    auto validator = [&](const ojson& p) -> std::optional<std::string> {
        for (const auto& sec : p["sections"]) {
            for (const auto& id : sec["must_include_evidence_ids"]) {
                int v = id.get<int>();
                if (!registry.find(v))
                    return "invalid evidence id " + std::to_string(v) + "; valid ids are " +
                           registry.valid_ids_text();
            }
            if (sec["web_queries"].size() > 3)
                return "section " + sec["section_id"].get<std::string>() +
                       " has more than 3 web_queries";
        }
        return std::nullopt;
    };
    auto fixer = [&](const ojson& p) -> std::optional<ojson> {
        for (const auto& sec : p["sections"])
            for (const auto& id : sec["must_include_evidence_ids"])
                if (!registry.find(id.get<int>())) return std::nullopt;  // ids are not fixable
        ojson fixed = p;
        for (auto& sec : fixed["sections"]) {
            while (sec["web_queries"].size() > 3)
                sec["web_queries"].erase(sec["web_queries"].size() - 1);
        }
        return fixed;
    };

    Bindings b{{"topic", topic},
               {"thesis", detail::thesis_text(thesis)},
               {"title", title.title},
               {"subtitle", title.subtitle},
               {"editorial_angle", title.editorial_angle},
               {"note_digest", digest},
               {"warmstart_text", elide(r0, 4000)},
               {"valid_ids", registry.valid_ids_text()}};
    ojson p = gateway.complete_structured("outline_gen", b, "report_plan", /*retries=*/1,
                                          validator, fixer);
    return {json(p).get<ReportPlan>(), std::move(registry)};
}

// ---------------------------------------------------------------------------
// Web context gathering (between Stages A and B)

inline constexpr int kWebResultsPerQuery = 3;

// Executes each section's web queries through the leakage-controlled search
// path and registers fresh citation entries continuing the id sequence.
inline std::vector<EvidencePacket> gather_web_context(SearchBackend& backend,
                                                      const ReportPlan& report_plan,
                                                      const ResearchConfig& cfg,
                                                      CitationRegistry& registry) {
    std::vector<EvidencePacket> packets;
    for (const auto& sec : report_plan.sections) {
        EvidencePacket packet;
        packet.section_id = sec.section_id;
        packet.core_ids = sec.must_include_evidence_ids;
        std::set<std::string> seen_urls;
        for (const auto& query : sec.web_queries) {
            std::vector<SearchResult> results;
            try {
                results = search(backend, query, cfg);
            } catch (const Error&) {
                continue;  // search failures are non-fatal for drafting
            }
            int used = 0;
            for (const auto& r : results) {
                if (used >= kWebResultsPerQuery) break;
                if (!seen_urls.insert(r.url).second) continue;
                std::string content = r.title + ". " + r.snippet;
                if (r.page_text) content += " " + elide(*r.page_text, 500);
                packet.web_ids.push_back(registry.add(CitationKind::web, content, r.url));
                ++used;
            }
        }
        packets.push_back(std::move(packet));
    }
    return packets;
}

// ---------------------------------------------------------------------------
// Stage B: grounded section drafting

// Drafts one section against its evidence packet. used_citations are
// recomputed from the inline markers; citations outside the allowed set or
// an over-cap word count get one repair retry, then error.
inline SectionDraft draft_section(LlmGateway& gateway, const SectionSpec& spec,
                                  const EvidencePacket& packet, const CitationRegistry& registry,
                                  const std::string& topic, const std::string& thesis,
                                  const std::string& report_title, int target_words) {
    std::set<int> allowed(packet.core_ids.begin(), packet.core_ids.end());
    allowed.insert(packet.web_ids.begin(), packet.web_ids.end());
    for (int id : allowed)
        if (!registry.find(id)) throw Error("packet id " + std::to_string(id) + " not in registry");

    auto validator = [&](const ojson& d) -> std::optional<std::string> {
        std::string body = d["section_markdown"].get<std::string>();
        for (int id : extract_citation_ids(body))
            if (!allowed.count(id))
                return "citation [" + std::to_string(id) + "] is outside ALLOWED_CITATIONS";
        for (const auto& id : d["used_citations"])
            if (!allowed.count(id.get<int>()))
                return "used_citations lists " + std::to_string(id.get<int>()) +
                       ", outside ALLOWED_CITATIONS";
        int words = word_count(body);
        if (words > target_words)
            return "section body has " + std::to_string(words) + " words, hard ceiling is " +
                   std::to_string(target_words);
        return std::nullopt;
    };

    Bindings b{{"topic", topic},
               {"thesis", thesis},
               {"report_title", report_title},
               {"section_id", spec.section_id},
               {"heading", spec.heading},
               {"purpose", spec.purpose},
               {"key_points", join(spec.key_points, "; ")},
               {"storytelling_moves", join(spec.storytelling_moves, "; ")},
               {"allowed", detail::ids_text(packet.core_ids, packet.web_ids)},
               {"core_packet", detail::packet_text(packet.core_ids, registry)},
               {"web_packet", detail::packet_text(packet.web_ids, registry)},
               {"target_words", std::to_string(target_words)}};
    ojson d = gateway.complete_structured("section_draft", b, "section_draft", /*retries=*/1,
                                          validator);

    SectionDraft draft;
    draft.section_id = spec.section_id;
    draft.heading = d["heading"].get<std::string>();
    draft.body = d["section_markdown"].get<std::string>();
    draft.used_citations = extract_citation_ids(draft.body);
    return draft;
}

// ---------------------------------------------------------------------------
// Stage C: sentence-level fact verification

// One entailment call per cited chunk against the concatenation of its cited
// sources. Unresolvable ids produce a structural criticism without a model
// call. Criticisms quote the claim sentence verbatim.
inline std::vector<Criticism> fact_check(LlmGateway& gateway, const SectionDraft& draft,
                                         const CitationRegistry& registry) {
    std::vector<Criticism> out;
    std::set<std::pair<std::string, std::string>> seen;
    auto push = [&](std::string sentence, std::string note) {
        if (seen.insert({sentence, note}).second)
            out.push_back({std::move(sentence), std::move(note)});
    };

    for (const auto& chunk : chunk_at_citations(draft.body)) {
        std::string sources;
        bool structural = false;
        for (int id : chunk.ids) {
            const CitationEntry* e = registry.find(id);
            if (!e) {
                push(chunk.sentence, "citation [" + std::to_string(id) + "] has no source");
                structural = true;
                continue;
            }
            sources += "[" + std::to_string(id) + "] " + e->content + "\n";
        }
        if (structural) continue;
        ojson verdict = gateway.complete_structured("citation_grounding",
                                                    {{"context", chunk.context},
                                                     {"sentence", chunk.sentence},
                                                     {"sources", sources}},
                                                    "grounding");
        if (!verdict["is_entailed"].get<bool>())
            push(chunk.sentence, verdict["issue"].get<std::string>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage D: targeted revision

// Rewrites or removes only the criticized sentences; everything else must
// survive byte-identical. A revision that fails its post-checks after one
// retry is returned unchanged with the criticisms attached unresolved.
inline SectionDraft revise_section(LlmGateway& gateway, const SectionDraft& draft,
                                   const std::vector<Criticism>& criticisms,
                                   const EvidencePacket& packet, const CitationRegistry& registry,
                                   const SectionSpec& spec, const std::string& topic,
                                   const std::string& thesis, const std::string& report_title) {
    if (criticisms.empty()) return draft;
    for (const auto& c : criticisms)
        if (draft.body.find(c.original_sentence) == std::string::npos)
            throw Error("criticism sentence not found in draft: " + elide(c.original_sentence, 80));

    std::set<int> allowed(packet.core_ids.begin(), packet.core_ids.end());
    allowed.insert(packet.web_ids.begin(), packet.web_ids.end());

    std::vector<std::string> original_sentences = split_sentences(draft.body);
    std::map<std::string, int> criticized_counts;
    for (const auto& c : criticisms) criticized_counts[trim(c.original_sentence)]++;
    std::map<std::string, int> uncriticized;
    {
        std::map<std::string, int> remaining = criticized_counts;
        for (const auto& s : original_sentences) {
            auto it = remaining.find(s);
            if (it != remaining.end() && it->second > 0) --it->second;
            else uncriticized[s]++;
        }
    }

    auto validator = [&](const ojson& d) -> std::optional<std::string> {
        std::string body = d["section_markdown"].get<std::string>();
        for (int id : extract_citation_ids(body))
            if (!allowed.count(id))
                return "citation [" + std::to_string(id) + "] is outside ALLOWED_CITATIONS";
        std::map<std::string, int> revised_counts;
        for (const auto& s : split_sentences(body)) revised_counts[s]++;
        for (const auto& [sentence, count] : uncriticized) {
            if (revised_counts[sentence] < count)
                return "uncriticized sentence was altered or dropped: '" + elide(sentence, 80) + "'";
        }
        for (const auto& [sentence, count] : criticized_counts) {
            int allowed_left = uncriticized.count(sentence) ? uncriticized[sentence] : 0;
            if (revised_counts[sentence] > allowed_left)
                return "criticized sentence left unchanged: '" + elide(sentence, 80) + "'";
        }
        return std::nullopt;
    };

    ojson crit_json = ojson::array();
    for (const auto& c : criticisms)
        crit_json.push_back(ojson{{"original_sentence", c.original_sentence}, {"criticism", c.note}});

    Bindings b{{"topic", topic},
               {"thesis", thesis},
               {"report_title", report_title},
               {"section_id", spec.section_id},
               {"heading", spec.heading},
               {"purpose", spec.purpose},
               {"key_points", join(spec.key_points, "; ")},
               {"storytelling_moves", join(spec.storytelling_moves, "; ")},
               {"allowed", detail::ids_text(packet.core_ids, packet.web_ids)},
               {"core_packet", detail::packet_text(packet.core_ids, registry)},
               {"web_packet", detail::packet_text(packet.web_ids, registry)},
               {"previous_draft", draft.body},
               {"criticisms", crit_json.dump(2)}};
    ojson d;
    try {
        d = gateway.complete_structured("section_revision", b, "section_draft", /*retries=*/1,
                                        validator);
    } catch (const SchemaError&) {
        SectionDraft flagged = draft;
        flagged.unresolved_criticisms = criticisms;
        return flagged;
    }

    SectionDraft revised;
    revised.section_id = draft.section_id;
    revised.heading = d["heading"].get<std::string>();
    revised.body = d["section_markdown"].get<std::string>();
    revised.used_citations = extract_citation_ids(revised.body);
    return revised;
}

// ---------------------------------------------------------------------------
// Stage E: polish + programmatic sources appendix

struct FinalReport {
    std::string markdown;       // polished body plus the appended sources section
    std::string body;           // polished body only
    std::vector<int> cited_ids; // ascending, deduplicated
};

inline bool has_conclusion_heading(const std::string& markdown) {
    for (const auto& line : split(markdown, '\n')) {
        std::string t = trim(line);
        if (t.rfind("#", 0) == 0 && to_lower(t).find("conclusion") != std::string::npos)
            return true;
    }
    return false;
}

// Aggregates the revised sections into one document, enforces the word cap
// and citation validity, and appends the sources appendix (cited ids only,
// ascending, one entry each).
inline FinalReport polish(LlmGateway& gateway, const std::vector<SectionDraft>& drafts,
                          const ReportPlan& report_plan, const CitationRegistry& registry,
                          const std::string& topic, const std::string& thesis,
                          const TitlePackage& title, int word_cap) {
    if (drafts.size() != report_plan.sections.size())
        throw Error("polish requires one revised draft per planned section");

    std::string draft_markdown;
    for (const auto& d : drafts) draft_markdown += "## " + d.heading + "\n\n" + d.body + "\n\n";

    std::vector<std::string> all_ids;
    for (const auto& e : registry.entries()) all_ids.push_back(std::to_string(e.id));

    auto validator = [&](const ojson& r) -> std::optional<std::string> {
        std::string body = r.get<std::string>();
        for (int id : extract_citation_ids(body))
            if (!registry.find(id))
                return "citation [" + std::to_string(id) + "] does not exist; valid ids are " +
                       registry.valid_ids_text();
        int words = word_count(body);
        if (words > word_cap)
            return "report body has " + std::to_string(words) + " words, the cap is " +
                   std::to_string(word_cap) + " words";
        if (!has_conclusion_heading(body)) return "missing a conclusion section heading";
        return std::nullopt;
    };

    Bindings b{{"topic", topic},
               {"thesis", thesis},
               {"title", title.title},
               {"subtitle", title.subtitle},
               {"plan_json", json(report_plan).dump(2)},
               {"allowed_citations", join(all_ids, ", ")},
               {"target_total_words", std::to_string(word_cap)},
               {"draft_markdown", draft_markdown}};
    ojson polished = gateway.complete_structured("final_polish", b, "final_polish", /*retries=*/1,
                                                 validator);

    FinalReport out;
    out.body = polished.get<std::string>();
    out.cited_ids = extract_citation_ids(out.body);

    std::string appendix = "## Sources\n\n";
    for (int id : out.cited_ids) {
        const CitationEntry* e = registry.find(id);
        appendix += "[" + std::to_string(id) + "] " + to_string(e->kind) + " — " + e->origin +
                    " — " + elide(e->content, 200) + "\n";
    }
    out.markdown = out.body;
    while (!out.markdown.empty() && out.markdown.back() == '\n') out.markdown.pop_back();
    out.markdown += "\n\n" + appendix;
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline driver

struct ReportArtifacts {
    TitlePackage title;
    ReportPlan plan;
    CitationRegistry registry;
    std::vector<EvidencePacket> packets;
    std::vector<SectionDraft> drafts;
    std::vector<std::vector<Criticism>> criticisms;
    std::vector<SectionDraft> revised;
    FinalReport final_report;

    json citations_json() const {
        return json{{"entries", registry.entries()}, {"cited", final_report.cited_ids}};
    }
};

inline ReportArtifacts run_report_pipeline(LlmGateway& gateway, SearchBackend& search_backend,
                                           const RunRecord& run, const ResearchConfig& cfg) {
    ReportArtifacts art;
    const InsightBank& bank = run.final_bank();
    std::optional<Thesis> thesis = run.final_thesis();
    std::string thesis_text = detail::thesis_text(thesis);

    art.title = make_title_package(gateway, run.topic, thesis, bank);
    auto [report_plan, registry] = plan(gateway, run.topic, thesis, bank, run.warm_report, art.title);
    art.plan = std::move(report_plan);
    art.registry = std::move(registry);
    art.packets = gather_web_context(search_backend, art.plan, cfg, art.registry);

    for (size_t i = 0; i < art.plan.sections.size(); ++i) {
        const SectionSpec& spec = art.plan.sections[i];
        SectionDraft draft = draft_section(gateway, spec, art.packets[i], art.registry, run.topic,
                                           thesis_text, art.title.title, cfg.section_target_words);
        std::vector<Criticism> crits = fact_check(gateway, draft, art.registry);
        SectionDraft revised = revise_section(gateway, draft, crits, art.packets[i], art.registry,
                                              spec, run.topic, thesis_text, art.title.title);
        art.drafts.push_back(std::move(draft));
        art.criticisms.push_back(std::move(crits));
        art.revised.push_back(std::move(revised));
    }

    art.final_report = polish(gateway, art.revised, art.plan, art.registry, run.topic, thesis_text,
                              art.title, cfg.report_word_cap);
    return art;
}

}  // namespace delve
