#include "sheetloop/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace sheetloop::evalkit {

namespace {

using Json = nlohmann::ordered_json;

const char* kHorizons[] = {"short", "medium", "long"};

std::string horizon_label(const std::string& h) {
    if (h == "short") return "short (2-4)";
    if (h == "medium") return "medium (5-7)";
    return "long (8-10)";
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

EpisodeEval make_eval(const TaskSpec& task, agent::EpisodeResult::Status status,
                      std::vector<Verdict> verdicts) {
    EpisodeEval e;
    e.task_id = task.id;
    e.status = status;
    e.verdicts = std::move(verdicts);
    e.categories = task.categories;
    e.challenges = task.reasoning_challenges;
    for (const auto& item : task.checklist) e.item_categories.push_back(item.category);
    e.horizon = task.horizon_level();
    return e;
}

RunMetrics compute_metrics(const std::vector<EpisodeEval>& episodes) {
    if (episodes.empty()) {
        throw SchemaError("cannot compute metrics over an empty episode list");
    }
    RunMetrics m;
    m.episodes = static_cast<int>(episodes.size());
    for (const auto& c : kManipulationCategories) m.per_category[c] = CategoryRow{};
    for (const auto& c : kReasoningChallenges) m.per_challenge[c] = ChallengeRow{};
    for (const auto* h : kHorizons) m.per_horizon[h] = HorizonRow{};

    int exec_ok = 0;
    int all_pass = 0;
    double sub_sum = 0.0;
    for (const auto& e : episodes) {
        bool done = e.status == agent::EpisodeResult::Status::Done;
        if (done) ++exec_ok;
        size_t passed = static_cast<size_t>(
            std::count_if(e.verdicts.begin(), e.verdicts.end(),
                          [](const Verdict& v) { return v.pass; }));
        bool pass = !e.verdicts.empty() && passed == e.verdicts.size();
        if (pass) ++all_pass;
        double fraction =
            e.verdicts.empty() ? 0.0 : static_cast<double>(passed) / e.verdicts.size();
        sub_sum += fraction;

        for (size_t i = 0; i < e.verdicts.size(); ++i) {
            std::string cat = i < e.item_categories.size() ? e.item_categories[i] : "";
            if (cat.empty()) continue;
            auto it = m.per_category.find(cat);
            if (it == m.per_category.end()) continue;
            ++it->second.items_total;
            if (e.verdicts[i].pass) ++it->second.items_passed;
        }
        for (const auto& ch : e.challenges) {
            auto it = m.per_challenge.find(ch);
            if (it == m.per_challenge.end()) continue;
            ++it->second.episodes;
            it->second.sub_sum += fraction;
        }
        auto hz = m.per_horizon.find(e.horizon);
        if (hz != m.per_horizon.end()) {
            ++hz->second.episodes;
            if (pass) ++hz->second.passed;
            hz->second.sub_sum += fraction;
        }
    }
    m.exec_at_1 = 100.0 * exec_ok / m.episodes;
    m.pass_at_1 = 100.0 * all_pass / m.episodes;
    m.sub_pass_at_1 = 100.0 * sub_sum / m.episodes;
    return m;
}

std::string metrics_json(const RunMetrics& m) {
    Json doc;
    doc["episodes"] = m.episodes;
    doc["exec_at_1"] = m.exec_at_1;
    doc["pass_at_1"] = m.pass_at_1;
    doc["sub_pass_at_1"] = m.sub_pass_at_1;

    Json cats = Json::object();
    for (const auto& name : kManipulationCategories) {
        const CategoryRow& row = m.per_category.at(name);
        cats[name] = Json{{"items", row.items_total},
                          {"passed", row.items_passed},
                          {"rate", row.rate()}};
    }
    doc["categories"] = std::move(cats);

    Json challenges = Json::object();
    for (const auto& name : kReasoningChallenges) {
        const ChallengeRow& row = m.per_challenge.at(name);
        challenges[name] = Json{{"episodes", row.episodes}, {"sub_pass_at_1", row.rate()}};
    }
    doc["challenges"] = std::move(challenges);

    Json horizons = Json::object();
    for (const char* h : kHorizons) {
        const HorizonRow& row = m.per_horizon.at(h);
        horizons[horizon_label(h)] = Json{{"episodes", row.episodes},
                                          {"pass_at_1", row.pass_at_1()},
                                          {"sub_pass_at_1", row.sub_pass_at_1()}};
    }
    doc["horizons"] = std::move(horizons);
    return doc.dump(2) + "\n";
}

std::string metrics_text(const RunMetrics& m) {
    std::string out;
    out += "episodes: " + std::to_string(m.episodes) + "\n";
    out += "Exec@1:    " + pct(m.exec_at_1) + "\n";
    out += "Pass@1:    " + pct(m.pass_at_1) + "\n";
    out += "SubPass@1: " + pct(m.sub_pass_at_1) + "\n";
    out += "\nmanipulation categories (subtask pass rate):\n";
    for (const auto& name : kManipulationCategories) {
        const CategoryRow& row = m.per_category.at(name);
        out += "  " + name + ": " + pct(row.rate()) + " (" + std::to_string(row.items_passed) +
               "/" + std::to_string(row.items_total) + " items)\n";
    }
    out += "\nreasoning challenges (mean SubPass@1):\n";
    for (const auto& name : kReasoningChallenges) {
        const ChallengeRow& row = m.per_challenge.at(name);
        out += "  " + name + ": " + pct(row.rate()) + " (" + std::to_string(row.episodes) +
               " episode(s))\n";
    }
    out += "\nhorizon levels:\n";
    for (const char* h : kHorizons) {
        const HorizonRow& row = m.per_horizon.at(h);
        out += "  " + horizon_label(h) + ": Pass@1 " + pct(row.pass_at_1()) + ", SubPass@1 " +
               pct(row.sub_pass_at_1()) + " (" + std::to_string(row.episodes) +
               " episode(s))\n";
    }
    return out;
}

void emit_report(const RunMetrics& m, const std::string& json_path,
                 const std::string& text_path) {
    {
        std::ofstream out(json_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + json_path + "'");
        out << metrics_json(m);
    }
    {
        std::ofstream out(text_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + text_path + "'");
        out << metrics_text(m);
    }
}

}  // namespace sheetloop::evalkit
