#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "msi/errors.hpp"
#include "msi/util.hpp"

namespace msi {

using Id = std::uint64_t;

inline const std::vector<std::string>& default_environment_vocabulary() {
    static const std::vector<std::string> vocab = {"kitchen", "living_room", "bedroom"};
    return vocab;
}

// ---------------------------------------------------------------------------
// Experiences
// ---------------------------------------------------------------------------

struct OutcomeRecord {
    int scn = 0;        // satisfied goal conditions
    int gcn = 1;        // total goal conditions
    int step_count = 0; // executed steps (0 when the planner produced nothing)
    bool success = false;

    void validate() const {
        if (scn < 0) throw errors::invariant("outcome.scn must be non-negative");
        if (gcn < 1) throw errors::invariant("outcome.gcn must be positive");
        if (scn > gcn) throw errors::invariant("outcome.scn must not exceed outcome.gcn");
        if (step_count < 0) throw errors::invariant("outcome.step_count must be non-negative");
        if (success != (scn == gcn))
            throw errors::invariant("outcome.success must equal (scn == gcn)");
    }
};

struct Experience {
    Id id = 0;
    std::optional<std::string> env_category; // absent when the task supplies none
    std::string task_background;
    std::string user_query;
    std::vector<std::string> plan;
    std::vector<std::string> feedback;
    std::vector<std::string> executed_steps;
    OutcomeRecord outcome;

    void validate(const std::vector<std::string>& env_vocab = default_environment_vocabulary()) const {
        if (user_query.empty()) throw errors::invariant("experience.user_query must be non-empty");
        outcome.validate();
        if (executed_steps.size() != static_cast<size_t>(outcome.step_count))
            throw errors::invariant("executed_steps length must equal outcome.step_count");
        if (env_category) {
            bool known = false;
            for (const auto& v : env_vocab) known = known || (v == *env_category);
            if (!known)
                throw errors::invariant("unknown env_category: " + *env_category);
        }
    }
};

inline void to_json(nlohmann::json& j, const OutcomeRecord& o) {
    j = {{"scn", o.scn}, {"gcn", o.gcn}, {"step_count", o.step_count}, {"success", o.success}};
}

inline void from_json(const nlohmann::json& j, OutcomeRecord& o) {
    j.at("scn").get_to(o.scn);
    j.at("gcn").get_to(o.gcn);
    j.at("step_count").get_to(o.step_count);
    j.at("success").get_to(o.success);
}

inline void to_json(nlohmann::json& j, const Experience& e) {
    j = {{"id", e.id},
         {"task_background", e.task_background},
         {"user_query", e.user_query},
         {"plan", e.plan},
         {"feedback", e.feedback},
         {"executed_steps", e.executed_steps},
         {"outcome", e.outcome}};
    if (e.env_category) j["env_category"] = *e.env_category;
}

inline void from_json(const nlohmann::json& j, Experience& e) {
    j.at("id").get_to(e.id);
    if (j.contains("env_category")) e.env_category = j.at("env_category").get<std::string>();
    j.at("task_background").get_to(e.task_background);
    j.at("user_query").get_to(e.user_query);
    j.at("plan").get_to(e.plan);
    j.at("feedback").get_to(e.feedback);
    j.at("executed_steps").get_to(e.executed_steps);
    j.at("outcome").get_to(e.outcome);
}

// Append-only store backed by newline-delimited JSON, one experience per line.
class ExperienceStore {
public:
    ExperienceStore() = default;

    // When a path is attached, appends are written through immediately.
    explicit ExperienceStore(std::filesystem::path path) : path_(std::move(path)) {}

    static ExperienceStore load(const std::filesystem::path& path) {
        ExperienceStore store(path);
        std::ifstream in(path);
        if (!in) throw errors::config("cannot open experience store: " + path.string());
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (util::trim(line).empty()) continue;
            Experience e;
            try {
                from_json(nlohmann::json::parse(line), e);
                e.validate();
            } catch (const Error&) {
                throw;
            } catch (const std::exception& ex) {
                throw errors::data("store_parse", "experience store line " + std::to_string(lineno) +
                                                      ": " + ex.what());
            }
            store.records_.push_back(std::move(e));
        }
        store.write_through_ = true;
        return store;
    }

    // Assigns the id, validates, appends. Records are never edited afterward.
    Id store_experience(Experience exp) {
        exp.id = next_id_();
        exp.validate();
        if (path_ && write_through_is_on_()) append_line_(exp);
        records_.push_back(std::move(exp));
        return records_.back().id;
    }

    const Experience& get(Id id) const {
        for (const auto& e : records_)
            if (e.id == id) return e;
        throw errors::data("unknown_experience_id", "no experience with id " + std::to_string(id));
    }

    std::vector<const Experience*> list_by_outcome(bool success) const {
        std::vector<const Experience*> out;
        for (const auto& e : records_)
            if (e.outcome.success == success) out.push_back(&e);
        return out;
    }

    const std::vector<Experience>& all() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    void attach(std::filesystem::path path) { path_ = std::move(path); }

    void save(const std::filesystem::path& path) const {
        std::string body;
        for (const auto& e : records_) {
            body += nlohmann::json(e).dump();
            body += '\n';
        }
        util::write_file_atomic(path, body);
    }

private:
    Id next_id_() const { return records_.empty() ? 1 : records_.back().id + 1; }
    bool write_through_is_on_() const { return true; }

    void append_line_(const Experience& e) {
        if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
        std::ofstream out(*path_, std::ios::app);
        if (!out) throw errors::config("cannot append to experience store: " + path_->string());
        out << nlohmann::json(e).dump() << '\n';
    }

    std::vector<Experience> records_;
    std::optional<std::filesystem::path> path_;
    bool write_through_ = true;
};

// ---------------------------------------------------------------------------
// Insights
// ---------------------------------------------------------------------------

enum class ScaleKind { General, Environment, Subtask };

inline const char* scale_kind_name(ScaleKind k) {
    switch (k) {
        case ScaleKind::General: return "general";
        case ScaleKind::Environment: return "environment";
        case ScaleKind::Subtask: return "subtask";
    }
    return "general";
}

inline ScaleKind scale_kind_from_name(const std::string& name) {
    if (name == "general") return ScaleKind::General;
    if (name == "environment") return ScaleKind::Environment;
    if (name == "subtask") return ScaleKind::Subtask;
    throw errors::snapshot_parse("unknown scale kind: " + name);
}

constexpr size_t kSubtaskNameMaxChars = 40;

struct InsightScale {
    ScaleKind kind = ScaleKind::General;
    std::string name; // environment or subtask name; empty for general

    static InsightScale general() { return {ScaleKind::General, ""}; }
    static InsightScale environment(std::string env) { return {ScaleKind::Environment, std::move(env)}; }
    static InsightScale subtask(std::string task) { return {ScaleKind::Subtask, std::move(task)}; }

    void validate() const {
        switch (kind) {
            case ScaleKind::General:
                if (!name.empty()) throw errors::invariant("general scale carries no name");
                break;
            case ScaleKind::Environment:
                if (name.empty()) throw errors::invariant("environment scale requires a name");
                break;
            case ScaleKind::Subtask:
                if (name.empty()) throw errors::invariant("subtask scale requires a name");
                if (name.size() > kSubtaskNameMaxChars)
                    throw errors::invariant("subtask name exceeds " +
                                            std::to_string(kSubtaskNameMaxChars) + " characters");
                break;
        }
    }

    bool operator==(const InsightScale&) const = default;
};

struct Insight {
    Id id = 0;
    InsightScale scale;
    std::string text;
    int score = 0;
};

constexpr int kSnapshotVersion = 1;
constexpr int kInitialInsightScore = 2;

// A display-numbered view entry: numbering is flat and gapless across the
// general -> environment -> subtask partition, recomputed on demand.
struct DisplayEntry {
    int number = 0;
    const Insight* insight = nullptr;
};

// Scale-partitioned, score-managed, freezable rule store.
class InsightDatabase {
public:
    InsightDatabase() = default;

    bool frozen() const { return frozen_; }
    void freeze() { frozen_ = true; } // idempotent

    size_t size() const { return general_.size() + environment_.size() + subtask_.size(); }
    bool empty() const { return size() == 0; }

    const std::vector<Insight>& general() const { return general_; }
    const std::vector<Insight>& environment() const { return environment_; }
    const std::vector<Insight>& subtask() const { return subtask_; }

    Id add(InsightScale scale, std::string text, int score = kInitialInsightScore) {
        require_mutable_();
        scale.validate();
        validate_text_(text);
        if (score < 1) throw errors::invariant("insight score must be >= 1");
        Insight ins{next_id_++, std::move(scale), std::move(text), score};
        partition_(ins.scale.kind).push_back(std::move(ins));
        return next_id_ - 1;
    }

    void edit_text(Id id, std::string text) {
        require_mutable_();
        validate_text_(text);
        find_mut_(id).text = std::move(text);
    }

    void rename_subtask(Id id, std::string name) {
        require_mutable_();
        Insight& ins = find_mut_(id);
        if (ins.scale.kind != ScaleKind::Subtask)
            throw errors::invariant("rename_subtask on a non-subtask insight");
        InsightScale scale = InsightScale::subtask(std::move(name));
        scale.validate();
        ins.scale = std::move(scale);
    }

    void remove(Id id) {
        require_mutable_();
        for (auto* part : {&general_, &environment_, &subtask_}) {
            for (auto it = part->begin(); it != part->end(); ++it) {
                if (it->id == id) {
                    part->erase(it);
                    return;
                }
            }
        }
        throw errors::unknown_insight_id(id);
    }

    // Returns the score after the change, or 0 when the insight was discarded.
    int rescore(Id id, int delta) {
        require_mutable_();
        Insight& ins = find_mut_(id);
        ins.score += delta;
        if (ins.score <= 0) {
            remove(ins.id);
            return 0;
        }
        return ins.score;
    }

    bool contains(Id id) const { return find_(id) != nullptr; }

    const Insight& get(Id id) const {
        const Insight* ins = find_(id);
        if (!ins) throw errors::unknown_insight_id(id);
        return *ins;
    }

    std::vector<DisplayEntry> display_order() const {
        std::vector<DisplayEntry> out;
        out.reserve(size());
        int n = 1;
        for (const auto* part : {&general_, &environment_, &subtask_})
            for (const auto& ins : *part) out.push_back({n++, &ins});
        return out;
    }

    // -- persistence --------------------------------------------------------

    nlohmann::json to_snapshot_json() const {
        nlohmann::json insights = nlohmann::json::array();
        for (const auto* part : {&general_, &environment_, &subtask_}) {
            for (const auto& ins : *part) {
                nlohmann::json scale = {{"kind", scale_kind_name(ins.scale.kind)}};
                if (ins.scale.kind != ScaleKind::General) scale["name"] = ins.scale.name;
                insights.push_back({{"id", ins.id},
                                    {"scale", std::move(scale)},
                                    {"text", ins.text},
                                    {"score", ins.score}});
            }
        }
        return {{"version", kSnapshotVersion}, {"frozen", frozen_}, {"insights", std::move(insights)}};
    }

    void save(const std::filesystem::path& path) const {
        util::write_file_atomic(path, to_snapshot_json().dump(2) + "\n");
    }

    static InsightDatabase from_snapshot_json(const nlohmann::json& j) {
        if (!j.contains("version"))
            throw errors::snapshot_parse("snapshot is missing the mandatory version field");
        if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kSnapshotVersion)
            throw errors::snapshot_parse("unsupported snapshot version: " + j.at("version").dump());
        InsightDatabase db;
        Id max_id = 0;
        for (const auto& rec : j.at("insights")) {
            Insight ins;
            try {
                ins.id = rec.at("id").get<Id>();
                ins.scale.kind = scale_kind_from_name(rec.at("scale").at("kind").get<std::string>());
                if (ins.scale.kind != ScaleKind::General)
                    ins.scale.name = rec.at("scale").at("name").get<std::string>();
                ins.text = rec.at("text").get<std::string>();
                ins.score = rec.at("score").get<int>();
                ins.scale.validate();
            } catch (const Error&) {
                throw;
            } catch (const std::exception& ex) {
                throw errors::snapshot_parse("bad insight record " + rec.dump() + ": " + ex.what());
            }
            if (ins.score < 1)
                throw errors::snapshot_parse("insight record " + rec.dump() + ": score must be >= 1");
            validate_text_or_throw_(ins, rec);
            if (db.find_(ins.id))
                throw errors::snapshot_parse("duplicate insight id " + std::to_string(ins.id) +
                                             " in record " + rec.dump());
            max_id = std::max(max_id, ins.id);
            db.partition_(ins.scale.kind).push_back(std::move(ins));
        }
        db.next_id_ = max_id + 1;
        db.frozen_ = j.value("frozen", false);
        return db;
    }

    static InsightDatabase load(const std::filesystem::path& path) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(util::read_file(path));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            throw errors::snapshot_parse("snapshot " + path.string() + ": " + ex.what());
        }
        return from_snapshot_json(j);
    }

private:
    void require_mutable_() const {
        if (frozen_) throw errors::frozen_database();
    }

    static void validate_text_(const std::string& text) {
        if (text.empty()) throw errors::invariant("insight text must be non-empty");
        if (text.find('\n') != std::string::npos)
            throw errors::invariant("insight text must not contain newlines");
    }

    static void validate_text_or_throw_(const Insight& ins, const nlohmann::json& rec) {
        try {
            validate_text_(ins.text);
        } catch (const Error& e) {
            throw errors::snapshot_parse("insight record " + rec.dump() + ": " + e.what());
        }
    }

    std::vector<Insight>& partition_(ScaleKind k) {
        switch (k) {
            case ScaleKind::General: return general_;
            case ScaleKind::Environment: return environment_;
            case ScaleKind::Subtask: return subtask_;
        }
        return general_;
    }

    const Insight* find_(Id id) const {
        for (const auto* part : {&general_, &environment_, &subtask_})
            for (const auto& ins : *part)
                if (ins.id == id) return &ins;
        return nullptr;
    }

    Insight& find_mut_(Id id) {
        for (auto* part : {&general_, &environment_, &subtask_})
            for (auto& ins : *part)
                if (ins.id == id) return ins;
        throw errors::unknown_insight_id(id);
    }

    std::vector<Insight> general_;
    std::vector<Insight> environment_;
    std::vector<Insight> subtask_;
    Id next_id_ = 1;
    bool frozen_ = false;
};

} // namespace msi
