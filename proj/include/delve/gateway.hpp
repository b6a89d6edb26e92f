#pragma once
// Single choke point for model calls: template rendering, structured-output
// validation with repair retries, per-template model routing, and the
// record/replay cache that makes offline runs deterministic.

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "delve/prompts.hpp"
#include "delve/schemas.hpp"
#include "delve/util.hpp"

namespace delve {

struct ModelRequest {
    std::string template_id;
    std::string prompt;
    std::string model;
};

struct ProviderResult {
    bool ok = true;
    std::string text;
    std::string error;

    static ProviderResult success(std::string t) { return {true, std::move(t), {}}; }
    static ProviderResult failure(std::string e) { return {false, {}, std::move(e)}; }
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    virtual ProviderResult complete(const ModelRequest& req) = 0;
};

// Test/replay backend serving responses from an ordered fixture, one FIFO
// queue per template id. Fixture format:
//   {"responses": [{"template_id": "...", "response": "..."}, ...]}
class ScriptedProvider : public Provider {
public:
    ScriptedProvider() = default;

    explicit ScriptedProvider(const ojson& fixture) {
        if (!fixture.contains("responses") || !fixture["responses"].is_array())
            throw Error("scripted fixture needs a 'responses' array");
        for (const auto& r : fixture["responses"]) {
            if (!r.contains("template_id") || !r.contains("response"))
                throw Error("scripted fixture entries need template_id and response");
            push(r["template_id"].get<std::string>(), r["response"].get<std::string>());
        }
    }

    static std::shared_ptr<ScriptedProvider> from_file(const std::filesystem::path& path) {
        ojson j = ojson::parse(read_file(path));
        return std::make_shared<ScriptedProvider>(j);
    }

    void push(const std::string& template_id, std::string response) {
        std::lock_guard<std::mutex> lock(mu_);
        queues_[template_id].push_back(std::move(response));
    }

    std::string name() const override { return "scripted"; }

    ProviderResult complete(const ModelRequest& req) override {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = queues_.find(req.template_id);
        if (it == queues_.end() || it->second.empty())
            return ProviderResult::failure("scripted fixture exhausted for template: " + req.template_id);
        std::string text = std::move(it->second.front());
        it->second.pop_front();
        return ProviderResult::success(std::move(text));
    }

    size_t remaining() const {
        std::lock_guard<std::mutex> lock(mu_);
        size_t n = 0;
        for (const auto& [_, q] : queues_) n += q.size();
        return n;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::deque<std::string>> queues_;
};

// Placeholder backend for pure replay-from-cache gateways.
class NullProvider : public Provider {
public:
    std::string name() const override { return "none"; }
    ProviderResult complete(const ModelRequest& req) override {
        return ProviderResult::failure("no provider configured (requested template: " + req.template_id + ")");
    }
};

enum class GatewayMode { live, record, replay };

struct ModelRouting {
    std::string default_model = "default";
    std::map<std::string, std::string> per_template;

    const std::string& for_template(const std::string& template_id) const {
        auto it = per_template.find(template_id);
        return it == per_template.end() ? default_model : it->second;
    }
};

// One completed model interaction, for observability sinks.
struct ModelCall {
    std::string template_id;
    std::string prompt;
    std::string schema_id;
    std::string model;
    std::string cache_key;
    std::string response;
    bool from_cache = false;
};

using ExtraValidator = std::function<std::optional<std::string>(const ojson&)>;
using LenientFixer = std::function<std::optional<ojson>(const ojson&)>;

class LlmGateway {
public:
    explicit LlmGateway(std::shared_ptr<Provider> provider,
                        GatewayMode mode = GatewayMode::live,
                        std::optional<std::filesystem::path> cache_dir = std::nullopt,
                        ModelRouting routing = {})
        : provider_(std::move(provider)),
          mode_(mode),
          cache_dir_(std::move(cache_dir)),
          routing_(std::move(routing)) {
        if (!provider_) throw Error("gateway requires a provider");
        if (mode_ == GatewayMode::replay) {
            if (!cache_dir_) throw Error("replay mode requires a cache directory");
            if (!std::filesystem::exists(*cache_dir_))
                throw Error("replay cache directory does not exist: " + cache_dir_->string());
        }
        if (mode_ == GatewayMode::record) {
            if (!cache_dir_) throw Error("record mode requires a cache directory");
            std::filesystem::create_directories(*cache_dir_);
        }
    }

    GatewayMode mode() const { return mode_; }

    void set_call_sink(std::function<void(const ModelCall&)> sink) { sink_ = std::move(sink); }

    // Cache keys bind the exact rendered prompt, the output contract, and the
    // model id, so switching any of them invalidates replay.
    static std::string cache_key(const std::string& prompt, const std::string& schema_id,
                                 const std::string& model) {
        return sha256_hex(prompt + '\x1f' + schema_id + '\x1f' + model);
    }

    // Renders the template, obtains a completion, and validates it against the
    // schema (plus an optional caller-supplied validator). On validation
    // failure the model is re-asked with the error appended, up to `retries`
    // times; if a lenient fixer is given it gets the last schema-valid value
    // before the call fails.
    ojson complete_structured(const std::string& template_id, const Bindings& bindings,
                              const std::string& schema_id, int retries = 3,
                              const ExtraValidator& extra = nullptr,
                              const LenientFixer& fixer = nullptr) {
        std::string base_prompt = render(template_id, bindings);
        const std::string& model = routing_.for_template(template_id);
        std::string last_error;
        std::optional<ojson> last_schema_valid;
        for (int attempt = 0; attempt <= retries; ++attempt) {
            std::string prompt = base_prompt;
            if (attempt > 0) {
                prompt += "\n\nYour previous response was invalid: " + last_error +
                          "\nRespond again, strictly following the required output format.";
            }
            std::string response = fetch({template_id, prompt, model}, schema_id);
            SchemaResult parsed = validate_schema(schema_id, response);
            if (parsed.error) {
                last_error = *parsed.error;
                continue;
            }
            if (extra) {
                if (auto err = extra(parsed.value)) {
                    last_error = *err;
                    last_schema_valid = parsed.value;
                    continue;
                }
            }
            return parsed.value;
        }
        if (fixer && last_schema_valid) {
            if (auto fixed = fixer(*last_schema_valid)) return *fixed;
        }
        throw SchemaError("schema '" + schema_id + "' violated after retries (template " +
                          template_id + "): " + last_error);
    }

    std::string complete_text(const std::string& template_id, const Bindings& bindings,
                              const std::string& schema_id = "text", int retries = 3) {
        return complete_structured(template_id, bindings, schema_id, retries).get<std::string>();
    }

private:
    std::string fetch(const ModelRequest& req, const std::string& schema_id) {
        std::string key = cache_key(req.prompt, schema_id, req.model);
        if (mode_ == GatewayMode::replay || mode_ == GatewayMode::record) {
            if (auto cached = cache_get(key)) {
                emit(req, schema_id, key, *cached, true);
                return *cached;
            }
            if (mode_ == GatewayMode::replay)
                throw CacheMissError("replay cache miss for key " + key);
        }
        ProviderResult res = provider_->complete(req);
        if (!res.ok) throw Error("provider error (" + provider_->name() + "): " + res.error);
        if (mode_ == GatewayMode::record) cache_put(key, req, schema_id, res.text);
        emit(req, schema_id, key, res.text, false);
        return res.text;
    }

    void emit(const ModelRequest& req, const std::string& schema_id, const std::string& key,
              const std::string& response, bool from_cache) {
        if (!sink_) return;
        sink_(ModelCall{req.template_id, req.prompt, schema_id, req.model, key, response, from_cache});
    }

    std::optional<std::string> cache_get(const std::string& key) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        if (!cache_dir_) return std::nullopt;
        auto path = *cache_dir_ / (key + ".json");
        if (!std::filesystem::exists(path)) return std::nullopt;
        json entry = json::parse(read_file(path));
        std::string response = entry.at("response").get<std::string>();
        std::lock_guard<std::mutex> lock(mu_);
        memo_[key] = response;
        return response;
    }

    void cache_put(const std::string& key, const ModelRequest& req, const std::string& schema_id,
                   const std::string& response) {
        std::lock_guard<std::mutex> lock(mu_);
        memo_[key] = response;
        if (!cache_dir_) return;
        json entry = {{"template_id", req.template_id},
                      {"model", req.model},
                      {"schema_id", schema_id},
                      {"response", response}};
        write_file(*cache_dir_ / (key + ".json"), entry.dump(2));
    }

    std::shared_ptr<Provider> provider_;
    GatewayMode mode_;
    std::optional<std::filesystem::path> cache_dir_;
    ModelRouting routing_;
    std::function<void(const ModelCall&)> sink_;
    std::mutex mu_;
    std::map<std::string, std::string> memo_;
};

}  // namespace delve
