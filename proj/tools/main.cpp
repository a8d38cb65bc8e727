#include "sheetloop/cli_commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace sheetloop;

namespace {

void add_mode_flags(CLI::App* app, cli::ModeOverrides& modes, std::string& repr) {
    app->add_flag_callback("--no-informer",
                           [&modes] { modes.enable_informer = false; },
                           "Disable the Informer (ablation mode)");
    app->add_flag_callback("--no-retriever",
                           [&modes] { modes.enable_retriever = false; },
                           "Disable the Retriever (ablation mode)");
    app->add_option("--repr", repr, "Table representation: json_records|dfloader|markdown|html");
}

bool apply_repr(const std::string& repr, cli::ModeOverrides& modes) {
    if (repr.empty()) return true;
    auto r = serde::table_repr_from(repr);
    if (!r) {
        std::cerr << "unknown --repr '" << repr << "'\n";
        return false;
    }
    modes.table_repr = *r;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheetloop: closed-loop spreadsheet agent and benchmark harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one task end to end");
    std::string run_task_path, run_workbook, run_config, run_out = "out";
    cli::ModeOverrides run_modes;
    std::string run_repr;
    run->add_option("--task", run_task_path, "Task spec JSON")->required();
    run->add_option("--workbook", run_workbook, "Workbook fixture (defaults to the task's)");
    run->add_option("--config", run_config, "Agent config JSON")->required();
    run->add_option("--out", run_out, "Output directory");
    add_mode_flags(run, run_modes, run_repr);

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite and report metrics");
    std::string bench_suite, bench_config, bench_out = "out";
    int bench_workers = 1;
    bool bench_sweep = false;
    cli::ModeOverrides bench_modes;
    std::string bench_repr;
    bench->add_option("--suite", bench_suite, "Suite manifest JSON")->required();
    bench->add_option("--config", bench_config, "Agent config JSON")->required();
    bench->add_option("--out", bench_out, "Output directory");
    bench->add_option("--workers", bench_workers, "Parallel task workers")
        ->check(CLI::Range(1, 64));
    bench->add_flag("--repr-sweep", bench_sweep,
                    "Run the suite once per table representation");
    add_mode_flags(bench, bench_modes, bench_repr);

    // index
    auto* index = app.add_subcommand("index", "Build the snippet repository index");
    std::string index_corpus, index_config, index_out = "index.json";
    index->add_option("--corpus", index_corpus, "Corpus directory");
    index->add_option("--config", index_config, "Agent config JSON");
    index->add_option("--out", index_out, "Index output file");

    // validate
    auto* validate = app.add_subcommand("validate", "Schema-check a fixtures directory");
    std::string validate_dir;
    validate->add_option("--fixtures", validate_dir, "Fixtures directory")->required();

    // report
    auto* report = app.add_subcommand("report", "Tabulate metrics files side by side");
    std::vector<std::string> report_files;
    std::string report_out;
    report->add_option("files", report_files, "metrics.json files")->required();
    report->add_option("--out", report_out, "Write the table here too");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (!apply_repr(run_repr, run_modes)) return 2;
        return cli::cmd_run(run_task_path, run_workbook, run_config, run_out, run_modes);
    }
    if (bench->parsed()) {
        if (!apply_repr(bench_repr, bench_modes)) return 2;
        return cli::cmd_bench(bench_suite, bench_config, bench_out, bench_modes, bench_workers,
                              bench_sweep);
    }
    if (index->parsed()) {
        return cli::cmd_index(index_corpus, index_config, index_out);
    }
    if (validate->parsed()) {
        return cli::cmd_validate(validate_dir);
    }
    if (report->parsed()) {
        return cli::cmd_report(report_files, report_out);
    }
    return 2;
}
