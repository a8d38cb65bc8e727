#include "sheetloop/cli_commands.hpp"

#include "sheetloop/workbook_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace sheetloop::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string read_env(const std::string& var) {
    if (var.empty()) return "";
    const char* v = std::getenv(var.c_str());
    return v ? v : "";
}

std::shared_ptr<llm::Backend> make_backend(const AgentConfig& cfg,
                                           const std::string& replay_override) {
    if (cfg.backend.kind == "replay") {
        std::string script = replay_override.empty() ? cfg.backend.script : replay_override;
        return llm::ReplayBackend::from_file(script);
    }
    llm::HttpBackendConfig http;
    http.endpoint = cfg.backend.endpoint;
    http.model_id = cfg.backend.model_id;
    http.api_key = read_env(cfg.backend.credentials_env);
    http.retries = cfg.backend.retries;
    http.backoff_ms = cfg.backend.backoff_ms;
    return std::make_shared<llm::HttpBackend>(http);
}

retrieval::SnippetRepository load_repository(const AgentConfig& cfg) {
    if (!cfg.index_path.empty() && fs::exists(cfg.index_path)) {
        return retrieval::SnippetRepository::load(cfg.index_path);
    }
    retrieval::HashNgramEmbedder embedder(cfg.embed_dim);
    retrieval::SnippetRepository::BuildParams params;
    params.window_size = cfg.window_size;
    params.stride = cfg.stride;
    params.min_window = cfg.min_window;
    return retrieval::SnippetRepository::build(corpus_files(cfg.corpus_dir), params, embedder,
                                               embedder.id());
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

Json episode_json(const evalkit::TaskSpec& task, const agent::EpisodeResult& ep) {
    Json doc;
    doc["task"] = task.id;
    doc["status"] = agent::to_string(ep.status);
    doc["steps_used"] = ep.steps_used;
    doc["repairs_used"] = ep.repairs_used;
    doc["abort_reason"] = ep.abort_reason;
    Json actions = Json::array();
    Json observations = Json::array();
    for (const auto& turn : ep.history.turns) {
        actions.push_back(turn.action.source);
        observations.push_back(turn.observation.message);
    }
    doc["actions"] = std::move(actions);
    doc["observations"] = std::move(observations);
    return doc;
}

Json verdicts_json(const evalkit::TaskSpec& task, const std::vector<evalkit::Verdict>& vs) {
    Json doc;
    doc["task"] = task.id;
    Json arr = Json::array();
    for (const auto& v : vs) {
        arr.push_back(Json{{"index", v.item_index},
                           {"criterion", evalkit::to_string(task.checklist[v.item_index].criterion)},
                           {"pass", v.pass},
                           {"detail", v.detail}});
    }
    doc["verdicts"] = std::move(arr);
    return doc;
}

struct SuiteEntry {
    std::string task_path;
    std::string replay_path;
    std::string replay_no_informer;
};

std::vector<SuiteEntry> load_suite(const std::string& suite_path) {
    std::ifstream in(suite_path);
    if (!in) throw ConfigError("cannot open suite manifest '" + suite_path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("bad suite JSON: " + std::string(e.what()));
    }
    if (!doc.contains("tasks") || !doc["tasks"].is_array() || doc["tasks"].empty()) {
        throw ConfigError("suite manifest lists no tasks");
    }
    fs::path base = fs::path(suite_path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return std::string{};
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).lexically_normal().string();
    };
    std::vector<SuiteEntry> out;
    for (const auto& tj : doc["tasks"]) {
        SuiteEntry e;
        e.task_path = resolve(tj.value("task", ""));
        e.replay_path = resolve(tj.value("replay", ""));
        e.replay_no_informer = resolve(tj.value("replay_no_informer", ""));
        if (e.task_path.empty()) throw ConfigError("suite entry missing 'task'");
        out.push_back(std::move(e));
    }
    return out;
}

std::string resolve_workbook(const evalkit::TaskSpec& task, const std::string& task_path) {
    fs::path ref(task.workbook_ref);
    if (ref.is_absolute()) return ref.string();
    return (fs::path(task_path).parent_path() / ref).lexically_normal().string();
}

}  // namespace

std::vector<std::string> corpus_files(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw ConfigError("corpus directory '" + dir + "' does not exist");
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("corpus directory '" + dir + "' holds no .txt files");
    return files;
}

TaskRunResult run_task(const evalkit::TaskSpec& task, const std::string& workbook_path,
                       const AgentConfig& cfg, const std::string& replay_override,
                       const std::string& out_dir) {
    TaskRunResult result;
    result.task_id = task.id;

    Workbook wb = load_workbook(workbook_path);
    llm::Transcript transcript;
    llm::Gateway gateway(make_backend(cfg, replay_override), &transcript);
    if (cfg.embedder == "local") {
        gateway.use_local_embedder(retrieval::HashNgramEmbedder(cfg.embed_dim));
    }
    agent::PromptTemplates templates = agent::PromptTemplates::load(cfg.prompt_dir);

    retrieval::SnippetRepository repo;
    if (cfg.options.enable_retriever) repo = load_repository(cfg);

    informer::InformerOptions inf_opts;
    inf_opts.max_evidence_rows = cfg.options.max_evidence_rows;
    inf_opts.temperature = cfg.options.temperature;
    inf_opts.model_id = cfg.options.model_id;
    informer::Informer informer(templates, gateway, inf_opts);

    agent::EpisodeInputs inputs{task.instruction, task.description};
    try {
        result.episode =
            agent::run_episode(inputs, wb, cfg.options, gateway, &informer,
                               cfg.options.enable_retriever ? &repo : nullptr, templates);
    } catch (const llm::GatewayError& e) {
        result.episode.status = agent::EpisodeResult::Status::Aborted;
        result.episode.abort_reason = e.what();
    }

    result.verdicts = evalkit::evaluate_checklist(wb, task);
    result.eval = evalkit::make_eval(task, result.episode.status, result.verdicts);

    if (!out_dir.empty()) {
        fs::path dir = fs::path(out_dir) / task.id;
        write_file(dir / "result.wbk", canonical_bytes(wb));
        write_file(dir / "transcript.json", transcript.to_json());
        write_file(dir / "verdicts.json", verdicts_json(task, result.verdicts).dump(2) + "\n");
        write_file(dir / "episode.json", episode_json(task, result.episode).dump(2) + "\n");
    }
    return result;
}

int cmd_run(const std::string& task_path, const std::string& workbook_path,
            const std::string& config_path, const std::string& out_dir,
            const ModeOverrides& modes) {
    try {
        AgentConfig cfg = AgentConfig::load(config_path);
        modes.apply(cfg);
        cfg.validate();
        evalkit::TaskSpec task = evalkit::TaskSpec::load(task_path);
        std::string wb_path =
            workbook_path.empty() ? resolve_workbook(task, task_path) : workbook_path;
        TaskRunResult r = run_task(task, wb_path, cfg, "", out_dir);
        size_t passed = static_cast<size_t>(std::count_if(
            r.verdicts.begin(), r.verdicts.end(), [](const auto& v) { return v.pass; }));
        std::cout << "task " << r.task_id << ": " << agent::to_string(r.episode.status) << ", "
                  << passed << "/" << r.verdicts.size() << " checklist item(s) pass\n";
        if (!r.episode.abort_reason.empty()) {
            std::cout << "  abort reason: " << r.episode.abort_reason << "\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

namespace {

int bench_once(const std::vector<SuiteEntry>& entries, const AgentConfig& cfg,
               const std::string& out_dir, int workers, evalkit::RunMetrics& metrics_out) {
    std::vector<evalkit::EpisodeEval> evals(entries.size());
    std::vector<std::string> errors(entries.size());

    auto run_one = [&](size_t i) {
        const SuiteEntry& e = entries[i];
        try {
            evalkit::TaskSpec task = evalkit::TaskSpec::load(e.task_path);
            std::string replay = e.replay_path;
            if (!cfg.options.enable_informer && !e.replay_no_informer.empty()) {
                replay = e.replay_no_informer;
            }
            if (cfg.backend.kind == "replay" && replay.empty()) {
                throw ConfigError("suite entry '" + task.id + "' has no replay script");
            }
            if (cfg.backend.kind == "replay" && !cfg.options.enable_informer &&
                e.replay_no_informer.empty()) {
                throw ConfigError("task '" + task.id +
                                  "' lacks a replay_no_informer script for --no-informer");
            }
            TaskRunResult r =
                run_task(task, resolve_workbook(task, e.task_path), cfg, replay, out_dir);
            evals[i] = r.eval;
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
            evalkit::EpisodeEval fail;
            fail.task_id = "entry " + std::to_string(i + 1);
            fail.status = agent::EpisodeResult::Status::Aborted;
            evals[i] = fail;
        }
    };

    if (workers <= 1) {
        for (size_t i = 0; i < entries.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= entries.size()) break;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int hard_failures = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (!errors[i].empty()) {
            ++hard_failures;
            std::cerr << "task entry " << (i + 1) << " failed: " << errors[i] << "\n";
        }
    }

    metrics_out = evalkit::compute_metrics(evals);
    evalkit::emit_report(metrics_out, (fs::path(out_dir) / "metrics.json").string(),
                         (fs::path(out_dir) / "report.txt").string());
    return hard_failures;
}

}  // namespace

int cmd_bench(const std::string& suite_path, const std::string& config_path,
              const std::string& out_dir, const ModeOverrides& modes, int workers,
              bool repr_sweep) {
    try {
        AgentConfig base_cfg = AgentConfig::load(config_path);
        modes.apply(base_cfg);
        base_cfg.validate();
        std::vector<SuiteEntry> entries = load_suite(suite_path);

        if (repr_sweep) {
            static const serde::TableRepr reprs[] = {
                serde::TableRepr::JsonRecords, serde::TableRepr::DFLoader,
                serde::TableRepr::Markdown, serde::TableRepr::Html};
            Json sweep = Json::array();
            std::string table = "repr        Exec@1  Pass@1  SubPass@1\n";
            for (serde::TableRepr r : reprs) {
                AgentConfig cfg = base_cfg;
                cfg.options.table_repr = r;
                std::string sub = (fs::path(out_dir) / (std::string("repr_") +
                                                        serde::to_string(r))).string();
                fs::create_directories(sub);
                evalkit::RunMetrics m;
                bench_once(entries, cfg, sub, workers, m);
                char line[128];
                std::snprintf(line, sizeof(line), "%-11s %-7.1f %-7.1f %.1f\n",
                              serde::to_string(r), m.exec_at_1, m.pass_at_1, m.sub_pass_at_1);
                table += line;
                sweep.push_back(Json{{"repr", serde::to_string(r)},
                                     {"exec_at_1", m.exec_at_1},
                                     {"pass_at_1", m.pass_at_1},
                                     {"sub_pass_at_1", m.sub_pass_at_1}});
            }
            write_file(fs::path(out_dir) / "sweep.json", sweep.dump(2) + "\n");
            write_file(fs::path(out_dir) / "sweep.txt", table);
            std::cout << table;
            return 0;
        }

        fs::create_directories(out_dir);
        evalkit::RunMetrics metrics;
        bench_once(entries, base_cfg, out_dir, workers, metrics);
        std::cout << evalkit::metrics_text(metrics);
        // CI contract: success means at least one full task pass
        return metrics.pass_at_1 > 0.0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_index(const std::string& corpus_dir, const std::string& config_path,
              const std::string& out_path) {
    try {
        AgentConfig cfg = config_path.empty() ? AgentConfig{} : AgentConfig::load(config_path);
        if (!corpus_dir.empty()) cfg.corpus_dir = corpus_dir;
        retrieval::HashNgramEmbedder embedder(cfg.embed_dim);
        retrieval::SnippetRepository::BuildParams params;
        params.window_size = cfg.window_size;
        params.stride = cfg.stride;
        params.min_window = cfg.min_window;
        retrieval::SnippetRepository repo = retrieval::SnippetRepository::build(
            corpus_files(cfg.corpus_dir), params, embedder, embedder.id());
        repo.save(out_path);

        std::cout << "indexed " << repo.size() << " snippet(s) from " << cfg.corpus_dir
                  << " -> " << out_path << "\n";
        auto present = repo.categories();
        std::cout << "category coverage:\n";
        for (const auto& c : evalkit::kManipulationCategories) {
            size_t count = 0;
            for (const auto& s : repo.snippets()) {
                if (s.category == c) ++count;
            }
            std::cout << "  " << c << ": " << count << " snippet(s)\n";
        }
        std::vector<std::string> missing;
        for (const auto& c : evalkit::kManipulationCategories) {
            if (std::find(present.begin(), present.end(), c) == present.end()) {
                missing.push_back(c);
            }
        }
        if (!missing.empty()) {
            std::cout << "warning: no snippets tagged for:";
            for (const auto& c : missing) std::cout << " '" << c << "'";
            std::cout << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_validate(const std::string& fixtures_dir) {
    fs::path base(fixtures_dir);
    if (!fs::is_directory(base)) {
        std::cerr << "error: '" << fixtures_dir << "' is not a directory\n";
        return 2;
    }
    int errors = 0;
    auto report = [&](const fs::path& file, const std::string& err) {
        if (err.empty()) {
            std::cout << "OK    " << file.string() << "\n";
        } else {
            std::cout << "ERROR " << file.string() << ": " << err << "\n";
            ++errors;
        }
    };
    auto each = [&](const char* sub, auto&& check) {
        fs::path dir = base / sub;
        if (!fs::is_directory(dir)) return;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                check(f);
                report(f, "");
            } catch (const std::exception& e) {
                report(f, e.what());
            }
        }
    };

    each("workbooks", [](const fs::path& f) { load_workbook(f.string()); });
    each("tasks", [](const fs::path& f) {
        evalkit::TaskSpec task = evalkit::TaskSpec::load(f.string());
        fs::path wb = f.parent_path() / task.workbook_ref;
        if (!fs::exists(wb.lexically_normal())) {
            throw ConfigError("workbook '" + task.workbook_ref + "' not found");
        }
    });
    each("replay", [](const fs::path& f) { llm::ReplayBackend::from_file(f.string()); });
    each("suites", [](const fs::path& f) { load_suite(f.string()); });
    each("eval", [](const fs::path& f) {
        std::ifstream in(f);
        Json doc;
        in >> doc;
        evalkit::TaskSpec task = evalkit::TaskSpec::parse(doc);
        if (!doc.contains("expected") || !doc["expected"].is_array() ||
            doc["expected"].size() != task.checklist.size()) {
            throw ConfigError("'expected' must list one verdict per checklist item");
        }
        fs::path wb = f.parent_path() / task.workbook_ref;
        if (!fs::exists(wb.lexically_normal())) {
            throw ConfigError("workbook '" + task.workbook_ref + "' not found");
        }
    });

    std::cout << (errors == 0 ? "all fixtures valid\n"
                              : std::to_string(errors) + " fixture error(s)\n");
    return errors == 0 ? 0 : 2;
}

int cmd_report(const std::vector<std::string>& metrics_files, const std::string& out_path) {
    try {
        if (metrics_files.empty()) throw ConfigError("no metrics files given");
        std::string table = "run                          Exec@1  Pass@1  SubPass@1\n";
        for (const auto& file : metrics_files) {
            std::ifstream in(file);
            if (!in) throw ConfigError("cannot open '" + file + "'");
            Json doc;
            in >> doc;
            char line[256];
            std::snprintf(line, sizeof(line), "%-28s %-7.1f %-7.1f %.1f\n",
                          fs::path(file).parent_path().filename().string().c_str(),
                          doc.value("exec_at_1", 0.0), doc.value("pass_at_1", 0.0),
                          doc.value("sub_pass_at_1", 0.0));
            table += line;
        }
        if (!out_path.empty()) write_file(out_path, table);
        std::cout << table;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace sheetloop::cli
