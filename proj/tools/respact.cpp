// respact command-line driver: run suites, recompute reports, serve sessions.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "respact/evalkit.hpp"
#include "respact/prompts.hpp"
#include "respact/session_service.hpp"
#include "respact/user_sim.hpp"

using namespace respact;

namespace {

std::atomic<bool> g_stop{false};

void on_sigint(int) { g_stop = true; }

struct RunOptions {
    std::string layout = "auto";
    std::string tasks = "table1-mix";
    std::string policy = "scripted-respact";
    std::string user = "helpful";
    std::optional<std::size_t> episodes;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t max_steps = 50;
    std::size_t max_invalid = 10;
    std::size_t max_questions = policies::ScriptedConfig{}.max_location_questions;
    std::string out;
    std::string report;
    std::string csv;
    bool dump_world = false;
    std::string data_dir;
    std::string llm_url;
    std::string llm_model = llm::ChatConfig{}.model;
};

int run_command(const RunOptions& o) {
    eval::SuiteConfig cfg;
    cfg.layout = o.layout;
    auto mix = eval::TaskMix::parse(o.tasks);
    if (!mix) {
        std::cerr << "error: " << mix.error() << "\n";
        return 2;
    }
    cfg.mix = *mix;
    auto policy = eval::PolicySpec::parse(o.policy);
    if (!policy) {
        std::cerr << "error: " << policy.error() << "\n";
        return 2;
    }
    cfg.policy = *policy;
    auto persona = persona_from_string(o.user);
    if (!persona) {
        std::cerr << "error: unknown user persona '" << o.user << "'\n";
        return 2;
    }
    cfg.persona = *persona;
    cfg.episodes = o.episodes;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.loop.max_steps = o.max_steps;
    cfg.loop.max_consecutive_invalid = o.max_invalid;
    cfg.scripted.max_location_questions = o.max_questions;
    if (!o.data_dir.empty()) cfg.data_dir = o.data_dir;
    cfg.chat.base_url = o.llm_url;
    cfg.chat.model = o.llm_model;

    if (o.dump_world) {
        auto tasks = eval::make_task_list(cfg.mix, cfg.layout, cfg.episodes, cfg.seed);
        if (!tasks) {
            std::cerr << "error: " << tasks.error() << "\n";
            return 2;
        }
        Json all = Json::array();
        for (const auto& t : *tasks) {
            auto gen = eval::build_world(t);
            if (!gen) {
                std::cerr << "error: " << gen.error() << "\n";
                return 1;
            }
            all.push_back({{"index", t.index},
                           {"layout", t.layout},
                           {"seed", t.seed},
                           {"goal", to_json(t.goal)},
                           {"world", env::to_json(gen->world)},
                           {"oracle_plan", gen->plan}});
        }
        std::cout << all.dump(2) << "\n";
        return 0;
    }

    std::ofstream jsonl;
    eval::SuiteHooks hooks;
    if (!o.out.empty()) {
        jsonl.open(o.out);
        if (!jsonl) {
            std::cerr << "error: cannot write " << o.out << "\n";
            return 1;
        }
        hooks.jsonl = &jsonl;
    }
    hooks.stop = &g_stop;
    std::signal(SIGINT, on_sigint);

    auto result = eval::run_suite(cfg, hooks);
    if (!result) {
        std::cerr << "error: " << result.error() << "\n";
        return 1;
    }
    Json report = eval::to_json(result->report);
    if (result->packs) report["prompt_packs"] = eval::to_json(*result->packs);
    report["interrupted"] = result->interrupted;
    if (!o.report.empty()) {
        std::ofstream(o.report) << report.dump(2) << "\n";
    }
    if (!o.csv.empty()) std::ofstream(o.csv) << eval::to_csv(result->report);
    std::cout << report.dump(2) << "\n";
    return result->interrupted ? 1 : 0;
}

int eval_command(const std::string& path, bool csv) {
    try {
        const auto report = eval::recompute_report(path);
        std::cout << (csv ? eval::to_csv(report) : eval::to_json(report).dump(2) + "\n");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// Writes scripted, successful transcripts as prompt exemplars. Existing files
// are kept.
int exemplars_command(const std::string& out_dir, std::uint64_t seed, std::size_t per_task) {
    namespace fs = std::filesystem;
    for (TaskType type : kAllTaskTypes) {
        const fs::path dir = fs::path(out_dir) / std::string(to_string(type));
        fs::create_directories(dir);
        std::size_t n = 1;
        for (std::uint64_t s = seed; n <= per_task && s < seed + 1000; ++s) {
            const fs::path file = dir / (std::to_string(n) + ".txt");
            if (fs::exists(file)) {
                ++n;
                continue;
            }
            auto tasks = eval::make_task_list({{{type, 1}}}, "auto", std::nullopt, s);
            if (!tasks) return 1;
            auto gen = eval::build_world(tasks->front());
            if (!gen) continue;
            policies::ScriptedReSpActPolicy policy;
            users::HelpfulUser user(gen->plan, gen->world);
            Episode ep = run_episode(gen->world, tasks->front().goal, policy, user);
            if (ep.outcome() != Outcome::Success || ep.counters().invalid_count != 0) continue;
            std::ofstream(file) << prompts::render_transcript(prompts::transcript_of(ep));
            std::cout << "wrote " << file.string() << "\n";
            ++n;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ReSpAct household agents: run episodes, score them, serve sessions"};
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "TOML config file");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a suite of episodes");
    run_cmd->add_option("--layout", run.layout, "auto, kitchen-small or bedroom-small")->capture_default_str();
    run_cmd->add_option("--tasks", run.tasks, "table1-mix, a task type, or pick=3,heat=2")->capture_default_str();
    run_cmd->add_option("--policy", run.policy, "oracle | scripted-respact | llm:<style>[:<pack>|:all]")
        ->capture_default_str();
    run_cmd->add_option("--user", run.user, "helpful | perturbed | unhelpful | human | llm")->capture_default_str();
    run_cmd->add_option("--episodes", run.episodes, "Number of episodes (default: size of the task mix)");
    run_cmd->add_option("--seed", run.seed)->capture_default_str();
    run_cmd->add_option("--workers", run.workers)->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-steps", run.max_steps)->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-invalid", run.max_invalid, "Consecutive invalid acts before abort")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-questions", run.max_questions, "Scripted agent: location questions per search")
        ->capture_default_str();
    run_cmd->add_option("--out", run.out, "JSONL episode log");
    run_cmd->add_option("--report", run.report, "Write the metrics report (JSON) here");
    run_cmd->add_option("--csv", run.csv, "Write per-task success rates (CSV) here");
    run_cmd->add_flag("--dump-world", run.dump_world, "Print the generated worlds and oracle plans, then exit");
    run_cmd->add_option("--data-dir", run.data_dir, "Prompt and exemplar directory");
    run_cmd->add_option("--llm-url", run.llm_url, "Chat endpoint root (default: $RESPACT_LLM_URL)");
    run_cmd->add_option("--llm-model", run.llm_model)->capture_default_str();

    std::string eval_path;
    bool eval_csv = false;
    auto* eval_cmd = app.add_subcommand("eval", "Recompute the metrics report of a JSONL log");
    eval_cmd->add_option("log", eval_path, "JSONL episode log")->required()->check(CLI::ExistingFile);
    eval_cmd->add_flag("--csv", eval_csv, "Per-task CSV instead of JSON");

    service::ServiceConfig serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve interactive sessions over HTTP and WebSocket");
    serve_cmd->add_option("--host", serve.host)->capture_default_str();
    serve_cmd->add_option("--port", serve.port)->capture_default_str();
    serve_cmd->add_option("--static-dir", serve.static_dir, "Directory served at /");
    serve_cmd->add_option("--max-sessions", serve.max_sessions)->capture_default_str();
    serve_cmd->add_option("--reply-timeout", serve.reply_timeout_seconds, "Seconds to wait for a user reply")
        ->capture_default_str();
    serve_cmd->add_flag("--wizard", serve.wizard_enabled, "Allow transcripts to include world state and plan");

    std::string ex_out = prompts::default_data_dir().string() + "/exemplars";
    std::uint64_t ex_seed = 100;
    std::size_t ex_count = 3;
    auto* ex_cmd = app.add_subcommand("exemplars", "Write scripted exemplar transcripts");
    ex_cmd->add_option("--out", ex_out)->capture_default_str();
    ex_cmd->add_option("--seed", ex_seed)->capture_default_str();
    ex_cmd->add_option("--count", ex_count, "Exemplars per task type")->capture_default_str();

    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (print_config) {
        std::cout << app.config_to_str(true, false);
        return 0;
    }
    if (*run_cmd) return run_command(run);
    if (*eval_cmd) return eval_command(eval_path, eval_csv);
    if (*ex_cmd) return exemplars_command(ex_out, ex_seed, ex_count);
    if (*serve_cmd) {
        try {
            return service::serve_forever(serve);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    std::cerr << app.help();
    return 2;
}
