#pragma once
// On-disk run record: a directory of JSON files (one per layer barrier) plus
// transcript logs. Every barrier persists, so a crashed run resumes at the
// last completed layer. Timestamps live only in meta.json, keeping the rest
// of the tree byte-comparable across replays.

#include <filesystem>
#include <string>

#include "delve/core.hpp"

namespace delve {

class RunStore {
public:
    explicit RunStore(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_);
    }

    const std::filesystem::path& root() const { return root_; }

    void save_config(const ResearchConfig& cfg, const std::string& topic) const {
        json j = cfg;
        j["topic"] = topic;
        write_file(root_ / "config.json", j.dump(2) + "\n");
    }

    void save_warmstart(const RunRecord& run) const {
        write_file(root_ / "warmstart" / "r0.md", run.warm_report);
        json j = {{"insights", run.warm_insights}, {"degraded", run.warmstart_degraded}};
        write_file(root_ / "warmstart" / "insights.json", j.dump(2) + "\n");
        save_run(run);
    }

    void save_layer(const RunRecord& run, int layer) const {
        auto dir = root_ / "layers" / layer_dirname(layer);
        std::vector<QueryRecord> layer_records;
        std::string transcripts;
        for (const auto& rec : run.records)
            if (rec.layer == layer) layer_records.push_back(rec);
        for (const auto& tr : run.transcripts) {
            // transcript ids are prefixed with the record id "q<layer>-..."
            if (tr.record_id.rfind("q" + std::to_string(layer) + "-", 0) == 0)
                transcripts += "=== " + tr.record_id + " ===\n" + tr.text + "\n";
        }
        write_file(dir / "records.json", json(layer_records).dump(2) + "\n");
        write_file(dir / "bank.json", json(run.bank_snapshots.back()).dump(2) + "\n");
        json thesis_j;
        if (auto t = run.final_thesis()) thesis_j = {{"present", true}, {"thesis", *t}};
        else thesis_j = {{"present", false}};
        write_file(dir / "thesis.json", thesis_j.dump(2) + "\n");
        write_file(dir / "transcripts.log", transcripts);
        save_run(run);
    }

    void save_run(const RunRecord& run) const {
        write_file(root_ / "run.json", json(run).dump(2) + "\n");
    }

    std::optional<RunRecord> load_run() const {
        auto path = root_ / "run.json";
        if (!std::filesystem::exists(path)) return std::nullopt;
        return json::parse(read_file(path)).get<RunRecord>();
    }

    void save_report_artifacts(const ReportPlan& plan, const std::vector<SectionDraft>& drafts,
                               const std::vector<std::vector<Criticism>>& criticisms,
                               const std::vector<SectionDraft>& revised,
                               const std::string& report_markdown, const json& citations) const {
        write_file(root_ / "report" / "plan.json", json(plan).dump(2) + "\n");
        write_file(root_ / "report" / "drafts.json", json(drafts).dump(2) + "\n");
        write_file(root_ / "report" / "criticisms.json", json(criticisms).dump(2) + "\n");
        write_file(root_ / "report" / "revised.json", json(revised).dump(2) + "\n");
        write_file(root_ / "report" / "report.md", report_markdown);
        write_file(root_ / "report" / "citations.json", citations.dump(2) + "\n");
    }

    // The single place wall-clock state is allowed to land.
    void save_meta(const std::string& phase) const {
        json meta;
        auto path = root_ / "meta.json";
        if (std::filesystem::exists(path)) meta = json::parse(read_file(path));
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        meta[phase] = buf;
        write_file(path, meta.dump(2) + "\n");
    }

    std::filesystem::path cache_dir() const { return root_ / "cache"; }
    std::filesystem::path report_path() const { return root_ / "report" / "report.md"; }
    std::filesystem::path citations_path() const { return root_ / "report" / "citations.json"; }

    static std::string layer_dirname(int layer) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02d", layer);
        return buf;
    }

private:
    std::filesystem::path root_;
};

}  // namespace delve
