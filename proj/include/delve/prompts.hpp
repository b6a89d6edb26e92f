#pragma once
// Prompt template catalog and the minimal template engine that renders it.
//
// Engine syntax:
//   {{ name }}            substitute a binding (error if missing)
//   {% if name %} ... {% endif %}   emit block iff binding present and non-empty
//
// Template text is frozen: downstream model behavior depends on the exact
// instruction wording, so edits here are format changes, not refactors.

#include <map>
#include <string>

#include "delve/util.hpp"

namespace delve {

using Bindings = std::map<std::string, std::string>;

namespace prompts {

inline const std::map<std::string, std::string>& catalog() {
    static const std::map<std::string, std::string> templates = {

        {"initial_questions", R"PT(You are conducting research on a goal/topic: "{{ topic }}". The goal here is to extract previously unknown insights by exploring and observing the information in the database with the following description: {{ db_description }}.

Generate up to {{ num_questions }} questions that an investigator will be interested in. You do not need to generate all {{ num_questions }} questions if you believe you only need to ask 1-2 to get started. The questions will be used to generate search queries in the database to help answer them. The questions should be self-contained (include any specific years, months, locations, etc. instead of a reference that requires the reader to know the context) and related to the goal/topic: "{{ topic }}". Investigate any correlations as you see fit. Do not generate overly complex questions. Each question should be investigate one aspect but do not include too many subquestions inside a single question.

IMPORTANT: the questions should be independent of each other. If you believe some questions need to be answered first, only generate those questions and not others that depend on the answers to the first questions.

{% if article %}
Here is more background information on the goal/topic based on the internet: "{{ article }}".
{% endif %}

For each question, also specify a "destination" to indicate where the question should be routed: "database" or "internet".

Output a JSON object with:
- "questions": a list of objects, each with:
  - "question": the question text (self-contained and clearly scoped)
  - "destination": either "internet" or "database"
)PT"},

        {"exploration_question_direct_gen", R"PT(# instruction

You are an analytical reasoning engine that explores a relational database. Your goal is to discover surprising or meaningful insights. Your task
now is to ask new questions based on the table returned. A list of global insights is provided to you. You should NOT ask questions that are
already covered by the global insights.

Ask 1 - {{ max_questions }} specific questions to further explore relevant topics.
   - Generate 1 to {{ max_questions }} questions.
   - You are NOT required to ask all {{ max_questions }} questions.
   - Make each question self-contained and clearly scoped.
   - Follow a step-by-step process:
     1. Identify the question you are interested in.
     2. For database questions, specify the expected output format, the number of columns, and the names of those columns.
     3. Ensure the question is self-contained and clearly scoped.

For each question, also specify a "destination" to indicate where the question should be routed:
- "database": The question can be answered by querying the database (e.g., aggregations, distributions, trends, filters, correlations, rankings,
or any computation over the data).
- "internet": The question requires external context NOT available in the database (e.g., definitions of domain terms, historical context,
industry benchmarks, comparisons with external data, regulatory background, or general domain knowledge).

Most questions should be "database" - only use "internet" when the answer genuinely cannot come from the database.

Output a JSON object with:
- "chain_of_thought": your reasoning about what aspects to explore
- "questions": a list of objects, each with:
  - "question": the question text (self-contained and clearly scoped)
  - "destination": either "internet" or "database"


# input

Description of database content: {{ db_description }}

Global insights: {{ global_insights }}

Conversation history: {{ dialogue_turns }}

Topic/Question you are writing: {{ topic }}

{% if thesis %}
You are building evidence for the following thesis: "{{ thesis }}"

Research strategy: {{ research_strategy }}

Prioritize questions that help build, test, or refine this argument. You may also ask questions that challenge or qualify the thesis - strong analysis addresses counter-arguments.
{% endif %}
)PT"},

        {"exploration_direct_SQL_gen", R"PT(# instruction

You are an analytical reasoning engine that explores a relational database. Your goal is to discover surprising or meaningful insights. Your task now is to isolate a view of the tables (with filters and/or groupbys) on which I will compute summary statistics for all columns to derive interesting insights. Generate a total of 1-{{ max_questions }} number of questions. You don't have to generate the maximum number of questions.

In each question:
- You should return a SQL of form: `SELECT * ...` based on filters and groupbys identified in the past round.
- For instance, if in the previous turn you have identified that categroy A has the most amount of population, then in this turn you might want to investiate `SELECT * FROM category = A.` Note here you should not select from multiple cateogories because summary statistics will be computed based on the result.
- First generate your reasoning and then generate the actual SQL.
- The database is PostgreSQL, so make sure to respect the syntax, such as wrapping tables in double quotes if the table name contains upper case letters.

Output a JSON object with a "queries" list of SQL strings.

# input

Description of database content: {{ db_description }}

Conversation history: {{ dialogue_turns }}

Topic/Question you are writing: {{ topic }}
)PT"},

        {"query_consistency_module", R"PT(# instruction
You are given a list of SQL responses related to the same topic. Your task is to:
1. identify any inconsistencies in the SQL predicates used and standarize any inconsistencies. For the nodes you would like to correct, issue a follow-up question with the desired SQL predicates. You can directly instruct what to modify in the SQLs. DO NOT instruct new variables not seen in the current SQL. DO NOT instruct it correct any variables.
2. Some noes will be given to you as examples. These examples will be marked with "example_node": True, and you do not need to issue a follow-up question for them.
3. make sure the SQLs reflect the conversation context presented in previous_queries. If any SQL appears to have forgotten the conversational context, issue a follow-up question to resolve it.
4. If no follow-up question is needed, set "follow_up_question": None.

Output a JSON following examples.

# input
{
    "example_node_0": {
        "query": "Show me the top 20 countries by the number of missile or artillery attacks that they have targetted by?",
        "SQL": "SELECT country, COUNT(*) AS attack_count FROM events WHERE sub_event_type IN ('Shelling/artillery/missile attack') GROUP BY country ORDER BY attack_count DESC LIMIT 20;",
        "example_node": True,
        "note": "no need to generate follow_up_question"
    },
    "query0": {
        "previous_queries": None,
        "query": "What specific regions or countries in the Middle East have seen the most significant increase in ISIS-related activities in 2025?",
        "SQL": "SELECT region, country, COUNT(*) AS event_count FROM events WHERE year = 2025 AND region = 'Middle East' AND (actor1 IN ISISactor1 OR actor2 IN ISISactor2 OR assoc_actor_2 IN ISISassoc_actor_2 OR actor1 LIKE '%ISIS%' OR assoc_actor_1 LIKE '%ISIS%') GROUP BY region, country ORDER BY event_count DESC;"
    },
    "query1": {
        "previous_queries": None,
        "query": "How have shifts in geopolitical alliances, such as Israel's potential normalization with Saudi Arabia, influenced ISIS activities in the Middle East during 2025?",
        "SQL": "SELECT * FROM event WHERE year = 2025 AND region = 'Middle East' AND (actor1 IN ISISactor1 OR actor2 IN ISISactor2 OR assoc_actor_2 IN ISISassoc_actor_2);"
    }
}
# output
{
    "query0": {
        "query": "What specific regions or countries in the Middle East have seen the most significant increase in ISIS-related activities in 2025?",
        "follow_up_question": None,
    },
    "query1": {
        "query": "How have shifts in geopolitical alliances, such as Israel's potential normalization with Saudi Arabia, influenced ISIS activities in the Middle East during 2025?",
        "follow_up_question": "Please include actor1 LIKE '%ISIS%' OR assoc_actor_1 LIKE '%ISIS%' in your SQL predicates so the actor filters match the other queries."
    }
}

# input
{{ input }}
)PT"},

        {"insight_bank_filter", R"PT(# instruction
You are given a list of insights related to a topic. Your task is to select the most interesting and relevant insights capped at {{ max_num_insights }}.
You should NOT select similar insight twice.

The topic is: {{ topic }}

The database you are using is: {{ db_description }}

{% if thesis %}
## Guiding Thesis
The article being built argues: "{{ thesis }}"

Prioritize insights that are most useful for developing this argument - this includes:
- **Supporting evidence**: findings that directly build or strengthen the thesis
- **Qualifying evidence**: findings that add nuance, scope limits, or important caveats
- **Refuting evidence**: findings that challenge or contradict the thesis - strong analytical articles steel-man
counter-arguments rather than ignore them

Deprioritize insights that are entirely off-topic or redundant with others already selected.
{% endif %}

Output a JSON dict, where each key is a node_id and the value is the insight for that node_id.

# input
{{ input }}
)PT"},

        {"thesis_generation", R"PT(# instruction

You are a senior analyst at a world-class publication (think The Economist, Foreign Affairs, or FiveThirtyEight). You have been given a general
topic and a batch of findings produced by a preliminary data exploration agent.

Your job is NOT to describe what the data shows. Your job is to REASON about what the findings mean - to identify non-obvious patterns, causal
claims, counter-narratives, strategic implications, or surprising tensions - and to distill them into compelling, defensible thesis statements.
Each thesis should be the kind of bold, original argument that could anchor a top-tier analytical article written for a general audience.

Generate at most 3 thesis candidates.

Rules:
- Each thesis is a CONCISE TITLE - maximum 10 words. Think magazine cover line or op-ed headline, NOT a full sentence or a data summary.
- A good thesis takes a POSITION. It argues something. It should be possible to disagree with it. Avoid bland descriptive titles like "Trends in
X" or "Overview of Y."
- Do NOT embed statistics, numbers, or data citations in the thesis title.
- The thesis should capture a non-obvious, thought-provoking argument that would make an informed reader want to read the full article.
- For each thesis, provide a research_strategy: a concrete plan for how a writer should develop this argument into a full analytical article.
Specify what evidence to marshal, what comparisons to draw, what counter-arguments to address, what narrative structure to follow, and what
conclusions to build toward. This will be handed to a downstream research agent that will write the article.
- If the findings in this batch don't support 3 strong theses, output fewer. Quality over quantity.

Output a JSON object with a "candidates" list, each item having "thesis" and "research_strategy" fields.

# input

Description of database content: {{ db_description }}

Topic: {{ topic }}

Below are findings from a preliminary data exploration on this topic. Reason about what these findings reveal - the patterns, tensions, and
implications - and propose up to 3 thesis statements that could each serve as the central argument of a top-tier analytical article.

{{ context }}
)PT"},

        {"thesis_refinement", R"PT(# instruction

You are a senior analyst at a world-class publication (think The Economist, Foreign Affairs, or FiveThirtyEight).

You previously proposed a working thesis to guide research on a topic. Since then, a research agent has gathered
additional findings from the database. Your task is to re-examine that thesis in light of the new evidence and
decide whether to:

  1. Sharpen - narrow or deepen the original argument using new supporting evidence
  2. Pivot - shift to a better-supported or more compelling argument uncovered by the new findings
  3. Confirm - keep the thesis essentially unchanged if the evidence continues to support it strongly

Output exactly one refined thesis and the updated research strategy.

Output a JSON object with "thesis" and "research_strategy" fields.

# input

Description of database content: {{ db_description }}

Topic: {{ topic }}

Current Thesis: {{ current_thesis }}

Current Research strategy: {{ current_research_strategy }}

Current findings:

{{ context }}
)PT"},

        {"outline_gen", R"PT(# instruction

You are planning a publication-ready analytical narrative report.
Design a single flowing report that proves the central claim through evidence.
TREE evidence is the core spine; external context should enrich but not replace it.
This is for readers, not a thesis committee.
Rules:
- The thesis is an internal organizing claim, not a standalone section heading.
- Do not plan separate "Thesis" or "Key Findings" sections.
- Use a narrative arc: opening hook -> escalation/mechanism -> geography/human stakes -> implications.
- Each section should advance the story and hand off naturally to the next.
- Every section must still materially support, test, or sharpen the thesis.
- Prefer 4 substantive sections, each capable of roughly 450-700 words.
- For each section, provide at most 3 web queries in web_queries. Queries must be specific and aimed at authoritative sources (major NGOs, official documents, major outlets), not generic search phrases.
Return JSON only with this schema:
{
  "lede_strategy": "...",
  "key_findings": ["...", "..."],
  "sections": [
    {
      "section_id": "S1",
      "heading": "...",
      "purpose": "...",
      "must_include_evidence_ids": [1,2],
      "key_points": ["..."],
      "storytelling_moves": ["..."],
      "web_queries": ["query 1", "query 2"]
    }
  ],
  "closing_strategy": "..."
}


# input
TOPIC:
{{ topic }}

THESIS:
{{ thesis }}

TITLE PACKAGE:
title: {{ title }}
subtitle: {{ subtitle }}
editorial_angle: {{ editorial_angle }}

CORE EVIDENCE NOTES:
{{ note_digest }}

WARMSTART CONTEXT (optional background hints):
{{ warmstart_text }}

VALID EVIDENCE IDS (must_include_evidence_ids must use only these):
{{ valid_ids }}

Create the report plan now.
)PT"},

        {"section_draft", R"PT(# instruction
You are writing one section of a publication-ready analytical narrative report. Think of medias such as New York Times or the Economist.
Rules:
- TREE evidence is the core spine: prioritize it and explicitly use it.
- Supplemental web context can provide background, reactions, and scene-setting.
- Every factual claim must have inline citation(s) in [N] format.
- Use only citation numbers from ALLOWED_CITATIONS.
- Do not invent citations or facts.
- Do not repeat the section heading inside section_markdown.
- Do not open with phrases like "This section" or "This evidence". Lead with the most consequential finding.
- Move from data -> mechanism -> human stakes -> repercussions.
- Quant style: write numbers like a reporter with evidence, not a methods appendix.
  - Avoid in-line statistical jargon (e.g., "mean", "std", "p-value", "significant", "contemporaneous", "lagging", "correlation
coefficient", "r=") unless the coefficient itself is the only faithful representation of the evidence.
  - Prefer plain-language comparatives first ("about twice as high", "tracked closely", "rose sharply"), then give the exact
numbers in a second clause or sentence.
  - If you include r/lag/etc., translate immediately in plain language and avoid stacking multiple coefficients in one sentence.
  - Prefer one numeric claim per sentence; avoid dense parenthetical math.
  - Avoid meta signposting like "as later sections will detail"; use a natural bridge sentence instead.
- For each evidence citation provided, include at least one substantive use tied to that citation.
- If the web packet contains clearly relevant authoritative sources, use at least 1-2 web citations for context or external
validation. Do not force weak web sources.
- Prefer smooth prose over bullets or mini-subheadings; use internal subheadings only if truly necessary.
- End with a forward-driving sentence that naturally sets up the next section.
- Do not add any Sources/References/Citations section.
Return JSON only:
{
  "section_id": "...",
  "heading": "...",
  "section_markdown": "...",
  "used_citations": [1,2,3]
}

# input
TOPIC:
{{ topic }}

THESIS:
{{ thesis }}

REPORT TITLE:
{{ report_title }}

SECTION SPEC:
- section_id: {{ section_id }}
- heading: {{ heading }}
- purpose: {{ purpose }}
- key_points: {{ key_points }}
- storytelling_moves: {{ storytelling_moves }}

ALLOWED_CITATIONS:
{{ allowed }}

CORE TREE EVIDENCE (mandatory):
{{ core_packet }}

SUPPLEMENTAL WEB CONTEXT (optional):
{{ web_packet }}

TARGET SECTION LENGTH:
{{ target_words }} words (hard ceiling - stay under this)

Draft this section now. Keep it highly analytical, readable, and citation-grounded.
)PT"},

        {"citation_grounding", R"PT(You are a precise fact-checker for data journalism reports.

You will be given a SENTENCE taken from a report and the SOURCE text that the sentence cites. Your job is to determine whether every factual claim in the
SENTENCE is supported (entailed) by the SOURCE. You will be given the context leading up to the citation.

Rules:
- Set is_entailed to true only if every factual claim in the SENTENCE can be directly verified from the SOURCE. Minor rephrasing or summarisation is fine
as long as nothing contains factual errors. For instance, fatality vs. incident count would be a factual difference.
- Set is_entailed to false if the SENTENCE adds, omits, or distorts any fact relative to the SOURCE.
- If is_entailed is false, concisely identify the issue in your output (one sentence).

DO NOT flag:
- Reasonable interpretations or paraphrases of the evidence
- Stylistic differences or summarization

Return JSON only:
{
  "is_entailed": true,
  "issue": "..."
}

# input

CONTEXT:
{{ context }}

SENTENCE:
{{ sentence }}

SOURCE:
{{ sources }}
)PT"},

        {"section_revision", R"PT(# instruction
You are revising one section of a publication-ready analytical narrative report.

You will be given the previous draft and a list of criticisms. Each criticism identifies a specific sentence that
makes a claim not supported by the cited evidence.

Rules:
- Fix ONLY the criticized sentences. Do not rewrite or restructure anything else.
- For each criticism, either:
  a) Rewrite the sentence to remove or qualify the unsupported claim, keeping any supported parts intact, or
  b) Remove the sentence entirely if no part of it is supportable.
- Keep all citations that remain accurate. Do not add new citations outside ALLOWED_CITATIONS.
- Do not invent new facts.
- Preserve the section's structure, flow, and all uncriticized content verbatim.
- Do not add a Sources/References/Citations section.

Return JSON only:
{
  "section_id": "...",
  "heading": "...",
  "section_markdown": "...",
  "used_citations": [1,2,3]
}

# input
TOPIC:
{{ topic }}

THESIS:
{{ thesis }}

REPORT TITLE:
{{ report_title }}

SECTION SPEC:
- section_id: {{ section_id }}
- heading: {{ heading }}
- purpose: {{ purpose }}
- key_points: {{ key_points }}
- storytelling_moves: {{ storytelling_moves }}

ALLOWED_CITATIONS:
{{ allowed }}

CORE TREE EVIDENCE (mandatory):
{{ core_packet }}

SUPPLEMENTAL WEB CONTEXT (optional):
{{ web_packet }}

PREVIOUS DRAFT:
{{ previous_draft }}

CRITICISMS:
{{ criticisms }}

Revise the section now. Change only what the criticisms require.
)PT"},

        {"final_polish", R"PT(# instruction
You are a senior editor polishing a near-final publication-ready report draft. Think of medias such as New York Times or the Economist.
Rules:
- Preserve and improve analytical flow, and add smooth transitions between sections.
- Preserve or expand substance; do not compress the draft into a summary.
- Keep all existing valid citations; do not invent new citation numbers.
- Use only citation numbers listed in ALLOWED_CITATIONS.
- Keep markdown headings and publication-ready prose.
- Do NOT add Sources/References/Citations section (it will be appended programmatically).
- The final polished report body must not exceed {{ target_total_words }} words (excluding the sources appendix). Cut ruthlessly for concision while preserving every cited claim.
- You should include a conclusion section at the end.
- Do not explictly include a "thesis" block
Return JSON only:
{
  "report_markdown": "..."
}

# input
TOPIC:
{{ topic }}

THESIS:
{{ thesis }}

TITLE:
{{ title }}
{{ subtitle }}

PLAN (for structural intent):
{{ plan_json }}

ALLOWED_CITATIONS:
{{ allowed_citations }}

DRAFT REPORT:
{{ draft_markdown }}
)PT"},

        {"criteria_matching_gen", R"PT(# instruction

You are an expert analyst. Given a reference research article, extract a list of evaluation criteria describing
what analytical points a good report on this topic should cover. Focus on general trends and patterns - do not
reference specific numbers, dates, or proper nouns that would make the criteria too narrow.

Read the reference article carefully. Identify the key analytical points it makes - the insights, trends, and
conclusions that a thorough report on this topic should include.

For each criterion:
1. Give it a short **name** (3-6 words)
2. Write a **description** of the general trend or pattern to look for (1-2 sentences, no specific numbers or
dates needed but include e.g. the general trend)

Return as a JSON object with a "criteria" array, each item having "name" and "description" fields.

# input

## Research Task
{{task_prompt}}

## Reference Article
{{reference_article}}
)PT"},

        {"criteria_matching_grade", R"PT(# instruction

You are an expert evaluator of analytical research articles. Given a set of evaluation criteria and a generated
article, grade how well the article addresses each criterion.

For each criterion, assess how well the generated article addresses it on a 0.0-1.0 scale:
- **1.0** - Fully addresses: the article clearly covers this analytical point
- **0.75** - Mostly addresses: covered but with gaps or insufficient depth
- **0.5** - Partially addresses: touches on it but misses key aspects
- **0.25** - Barely addresses: only a brief or tangential mention
- **0.0** - Not addressed: completely absent from the article

Return as a JSON object with fields: criterion_scores (array of {name, score, explanation}).

# input

{% if score_reminder %}
{{ score_reminder }}
{% endif %}
## Research Task
{{task_prompt}}

## Evaluation Criteria
{{criteria}}

## Generated Article
{{generated_article}}
)PT"},

        {"atomic_breakdown", R"PT(Given an input article, your task is to break down the insights in the article into itemized points. Each insight should be self-contained.

Output a JSON object with a "claims" list of strings.

Input article: {{ article }}
)PT"},

        {"insight_attribution", R"PT(You are an expert analyst evaluating whether a piece of evidence from a generated article is derived from ACLED (Armed Conflict
Location & Event Data) data.

Article topic: {{article_topic}}

Evidence to classify: {{evidence}}

ACLED data includes:
- Conflict event counts, incident reports, and event descriptions
- Violence against civilians statistics
- Battle-related data (battles, explosions/remote violence, riots, protests)
- Fatality counts and casualty figures from conflict events
- Geographic conflict data (locations of events, subnational breakdowns)
- Conflict trend analysis and temporal patterns derived from event data
- Armed group activity and actor-level data
- Conflict index scores (e.g., ACLED Conflict Index)
- Data explicitly attributed to ACLED or its datasets

NOT ACLED data:
- General geopolitical analysis or commentary not tied to specific event data
- Economic indicators (GDP, inflation, trade figures)
- Humanitarian statistics from UN agencies (UNHCR refugee counts, OCHA displacement figures) unless explicitly tied to ACLED
- Demographic or census data
- Policy statements, diplomatic actions, or government declarations
- Media reports or journalistic analysis without specific conflict event data
- Academic or think-tank analysis not grounded in ACLED event data
- Data from other conflict databases (e.g., UCDP, GTD, IISS) unless attributed to ACLED

Output a JSON object with an "attribution" field set to either "database" or "internet".
)PT"},

        {"insightbench_eval", R"PT(Below is an instruction that describes a task. Write a response that appropriately completes the request.

### Instruction:
Provided Answer:
{{ answer }}

Ground Truth Answer:
{{ gt_answer }}

Follow these instructions when writing your response:
* On a scale of 1-10, provide a numerical rating for how close the provided answer is to the ground truth answer, with 10 denoting that the provided answer is the same as ground truth answer.
* Your response should contain only the numerical rating. DONOT include anything else like the provided answer, the ground truth answer, or an explanation of your rating scale in your response.
* Wrap your numerical rating inside <rating></rating> tags.
* Check very carefully before answering.
* Follow the output format as shown in the example below:
Example response:
<rating>7</rating>

### Response:
)PT"},

        {"executor_main", R"PT(# instruction
Your task is to write a **{{ database_type }}** query to answer the given question. Follow a step-by-step process:

- User question is contextual. If needed, the current date is {{ curr_date }}
- Start by constructing simple fragments of the **{{ database_type }}** query.
- Execute each fragment to verify its correctness. Adjust as needed based on your the observations.
- Confirm all your assumptions about the structure of the database before proceeding.
- Do NOT repeat the same action, as the results will be the same.
- You will always be shown with a sample of database results. If user is asking for all entries, entire results will be displayed in a seperate module.
- Output one final SQL at the end that contains all results. You can only output one SQL query (not multiple ";" separated queries).
- For stats/visualizations, you should call the execute_python_from_sql action AFTER you have determined the final SQL query.
- Only the latest plot will be shown to you.

Form exactly one "Thought" and perform exactly one "Action", then wait for the "Observation".

Possible actions are:

- get_tables(): Retrieves all the tables with a corresponding short description. **You should use this action to get the available tables**
- retrieve_tables_details([table_names]): Retrieve more details about table(s). The argument should be a list of table names as strigns. // Example: retrieve_tables_details(["table1"]) or retrieve_tables_details(["table1", "table2"])
- execute_sql(sql): Runs a SQL query and returns results.
- execute_python_from_sql(sql, python_code): Executes a Python code based on the results of the SQL query. The argument should be a Python tuple containing the SQL query and the Python code. Your python code can reference the results of the SQL query using the `sql_results` variable, which will be passed in as a pandas dataframe. The two codes should be wrapped in string quotes(") // Example: execute_python_from_sql("SELECT * FROM table1", "print(sql_results)")
- stop(): Marks the last executed SQL query as the final answer and ends the process. You can directly use this if user is not engaged in database-related conversation but instead just chit-chatting.

# input
Prior turn contexts:
--
{% if conversation_history %}{{ conversation_history }}{% endif %}
Current-turn User Question: {{ question }}

{% if action_history %}Action history:

{{ action_history }}
{% endif %}

Output one "Thought" and one "Action":
)PT"},

        {"summary_prompt", R"PT(You are given a list of data insights derived from a dataset analysis.
Write a concise, coherent paragraph (3-5 sentences) that summarizes the key findings.
Focus on the most important patterns and avoid repetition.

Insights:
{{ insights }}
)PT"},

        // The four templates below are artifact plumbing around the catalog:
        // warm-start scaffolding, internet-question answering, and the title
        // package consumed by the outline stage.

        {"warmstart_queries", R"PT(You are preparing preliminary internet research on a topic before a database investigation begins.

Topic: {{ topic }}

Generate 3-8 web search queries that together give broad topical coverage: background, key actors, recent developments, and points of controversy. Queries should be specific enough to retrieve authoritative sources.

Output a JSON object with a "queries" list of strings.
)PT"},

        {"warmstart_synthesis", R"PT(You are synthesizing preliminary internet research into a short structured report and a list of starting insights.

Topic: {{ topic }}

Search results:
{{ results }}

Write a markdown report with at least 2 sections covering what is known about the topic, and extract 5-15 bullet insights (one sentence each, self-contained) that a data investigation should build on.

Output a JSON object with:
- "report_markdown": the report text
- "insights": a list of insight strings
)PT"},

        {"internet_answer", R"PT(Answer the question below using only the search results provided. Be concrete and cite which result supports each point by its URL. If the results do not answer the question, say so.

Question: {{ question }}

Search results:
{{ results }}
)PT"},

        {"title_package", R"PT(You are an editor choosing the packaging for an analytical report.

Topic: {{ topic }}

Thesis: {{ thesis }}

Key findings:
{{ findings }}

Output a JSON object with "title" (a headline), "subtitle" (one supporting line), and "editorial_angle" (one sentence on the framing).
)PT"},
    };
    return templates;
}

}  // namespace prompts

// Renders a catalog template with the given bindings. Conditional blocks are
// kept iff the named binding is present and non-empty; a placeholder outside
// any false block with no binding raises an error naming it.
inline std::string render(const std::string& template_id, const Bindings& bindings) {
    const auto& cat = prompts::catalog();
    auto it = cat.find(template_id);
    if (it == cat.end()) throw Error("unknown template: " + template_id);
    const std::string& body = it->second;

    std::string out;
    out.reserve(body.size());
    std::vector<bool> emit_stack;
    auto emitting = [&] {
        for (bool b : emit_stack)
            if (!b) return false;
        return true;
    };

    size_t i = 0;
    while (i < body.size()) {
        if (body.compare(i, 2, "{{") == 0) {
            size_t end = body.find("}}", i + 2);
            if (end == std::string::npos) throw Error("unterminated placeholder in " + template_id);
            std::string name = trim(body.substr(i + 2, end - i - 2));
            if (emitting()) {
                auto b = bindings.find(name);
                if (b == bindings.end())
                    throw Error("missing binding: " + name + " (template " + template_id + ")");
                out += b->second;
            }
            i = end + 2;
        } else if (body.compare(i, 2, "{%") == 0) {
            size_t end = body.find("%}", i + 2);
            if (end == std::string::npos) throw Error("unterminated tag in " + template_id);
            std::string tag = trim(body.substr(i + 2, end - i - 2));
            if (tag.rfind("if ", 0) == 0) {
                std::string name = trim(tag.substr(3));
                auto b = bindings.find(name);
                bool truthy = b != bindings.end() && !b->second.empty();
                emit_stack.push_back(truthy);
            } else if (tag == "endif") {
                if (emit_stack.empty()) throw Error("unbalanced endif in " + template_id);
                emit_stack.pop_back();
            } else {
                throw Error("unknown tag '" + tag + "' in " + template_id);
            }
            i = end + 2;
            // tags live on their own lines; swallow the trailing newline
            if (i < body.size() && body[i] == '\n') ++i;
        } else {
            if (emitting()) out += body[i];
            ++i;
        }
    }
    if (!emit_stack.empty()) throw Error("unterminated if-block in " + template_id);
    return out;
}

}  // namespace delve
