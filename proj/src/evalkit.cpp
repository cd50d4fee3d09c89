#include "respact/evalkit.hpp"

#include <cmath>
#include <deque>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "respact/text.hpp"
#include "respact/user_sim.hpp"

namespace respact::eval {

Expected<double, EmptySample> success_rate(std::span<const Outcome> outcomes) {
    if (outcomes.empty()) return unexpected(EmptySample{"no episodes"});
    std::size_t ok = 0;
    for (Outcome o : outcomes) ok += o == Outcome::Success;
    return 100.0 * static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

Expected<SpeakStats, EmptySample> speak_turn_stats(std::span<const Episode> episodes) {
    std::vector<double> xs;
    for (const Episode& e : episodes)
        if (e.outcome() == Outcome::Success) xs.push_back(static_cast<double>(e.counters().speak_count));
    if (xs.empty()) return unexpected(EmptySample{"no successful episodes"});
    SpeakStats s;
    s.episodes = xs.size();
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

ActionDistribution action_distribution(std::span<const Episode> episodes) {
    std::size_t think = 0, speak = 0, act = 0, invalid = 0;
    for (const Episode& e : episodes) {
        const Counters& c = e.counters();
        think += c.think_count;
        speak += c.speak_count;
        act += c.act_count - c.invalid_count;
        invalid += c.invalid_count;
    }
    ActionDistribution d;
    d.decisions = think + speak + act + invalid;
    if (d.decisions == 0) return d;
    const double n = static_cast<double>(d.decisions);
    d.think = 100.0 * static_cast<double>(think) / n;
    d.speak = 100.0 * static_cast<double>(speak) / n;
    d.act = 100.0 * static_cast<double>(act) / n;
    d.invalid = 100.0 * static_cast<double>(invalid) / n;
    return d;
}

std::map<std::size_t, std::size_t> invalid_histogram(std::span<const Episode> episodes) {
    std::map<std::size_t, std::size_t> h;
    for (const Episode& e : episodes) ++h[e.counters().invalid_count];
    return h;
}

MetricsReport compute_report(std::span<const Episode> episodes) {
    MetricsReport r;
    r.episodes = episodes.size();
    for (const Episode& e : episodes) {
        const bool ok = e.outcome() == Outcome::Success;
        Cell& cell = r.per_task[e.task().type];
        ++cell.total;
        cell.successes += ok;
        ++r.overall.total;
        r.overall.successes += ok;
        if (e.outcome()) ++r.outcomes[*e.outcome()];
    }
    r.actions = action_distribution(episodes);
    r.invalid_histogram = invalid_histogram(episodes);
    if (auto s = speak_turn_stats(episodes)) r.speak_turns = *s;
    r.dialog_acts = dialogue::act_histogram(episodes);
    return r;
}

MetricsReport recompute_report(const std::filesystem::path& jsonl) {
    const auto episodes = read_episodes_jsonl_file(jsonl.string());
    return compute_report(episodes);
}

double weighted_rate(const std::map<TaskType, double>& rates, const std::map<TaskType, std::size_t>& counts) {
    double num = 0, den = 0;
    for (const auto& [t, n] : counts) {
        num += rates.at(t) * static_cast<double>(n);
        den += static_cast<double>(n);
    }
    return den == 0 ? 0.0 : num / den;
}

Expected<PackAggregate, MismatchedTaskLists> aggregate_packs(std::span<const MetricsReport> reports) {
    if (reports.empty()) return unexpected(MismatchedTaskLists{"no reports to aggregate"});
    std::map<TaskType, std::size_t> counts;
    for (const auto& [t, cell] : reports.front().per_task) counts[t] = cell.total;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        std::map<TaskType, std::size_t> other;
        for (const auto& [t, cell] : reports[i].per_task) other[t] = cell.total;
        if (other != counts)
            return unexpected(MismatchedTaskLists{"report " + std::to_string(i) + " covers a different task list"});
    }

    PackAggregate agg;
    agg.packs = reports.size();
    for (const auto& [t, n] : counts) {
        double sum = 0, best = 0;
        for (const auto& r : reports) {
            const double rate = r.per_task.at(t).rate();
            sum += rate;
            best = std::max(best, rate);
        }
        agg.avg[t] = sum / static_cast<double>(reports.size());
        agg.best[t] = best;
    }
    for (const auto& r : reports) agg.avg_overall += r.overall.rate();
    agg.avg_overall /= static_cast<double>(reports.size());
    agg.best_overall = weighted_rate(agg.best, counts);
    return agg;
}

Json to_json(const MetricsReport& r) {
    Json per_task = Json::object();
    for (const auto& [t, c] : r.per_task)
        per_task[std::string(to_string(t))] = {{"successes", c.successes}, {"total", c.total}, {"success_rate", c.rate()}};
    Json outcomes = Json::object();
    for (const auto& [o, n] : r.outcomes) outcomes[std::string(to_string(o))] = n;
    Json hist = Json::object();
    for (const auto& [k, n] : r.invalid_histogram) hist[std::to_string(k)] = n;
    Json acts = Json::object();
    for (const auto& [a, n] : r.dialog_acts) acts[std::string(dialogue::to_string(a))] = n;

    Json j{{"episodes", r.episodes},
           {"per_task", per_task},
           {"overall", {{"successes", r.overall.successes}, {"total", r.overall.total}, {"success_rate", r.overall.rate()}}},
           {"outcomes", outcomes},
           {"action_distribution",
            {{"think", r.actions.think},
             {"speak", r.actions.speak},
             {"act", r.actions.act},
             {"invalid", r.actions.invalid},
             {"decisions", r.actions.decisions}}},
           {"invalid_histogram", hist},
           {"speak_turns", nullptr},
           {"dialog_acts", acts}};
    if (r.speak_turns)
        j["speak_turns"] = {{"mean", r.speak_turns->mean}, {"stddev", r.speak_turns->stddev}, {"episodes", r.speak_turns->episodes}};
    return j;
}

Json to_json(const PackAggregate& a) {
    Json avg = Json::object(), best = Json::object();
    for (const auto& [t, v] : a.avg) avg[std::string(to_string(t))] = v;
    for (const auto& [t, v] : a.best) best[std::string(to_string(t))] = v;
    return {{"packs", a.packs}, {"avg", avg}, {"best", best}, {"avg_overall", a.avg_overall}, {"best_overall", a.best_overall}};
}

std::string to_csv(const MetricsReport& r) {
    std::ostringstream out;
    out.precision(10);
    out << "task,successes,total,success_rate\n";
    for (const auto& [t, c] : r.per_task) out << to_string(t) << ',' << c.successes << ',' << c.total << ',' << c.rate() << '\n';
    out << "all," << r.overall.successes << ',' << r.overall.total << ',' << r.overall.rate() << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------

std::size_t TaskMix::total() const {
    std::size_t n = 0;
    for (const auto& [t, c] : counts) n += c;
    return n;
}

TaskMix TaskMix::benchmark() {
    return TaskMix{{{TaskType::Pick, 24},
                    {TaskType::Clean, 31},
                    {TaskType::Heat, 23},
                    {TaskType::Cool, 21},
                    {TaskType::Examine, 18},
                    {TaskType::PickTwo, 17}}};
}

Expected<TaskMix, std::string> TaskMix::parse(std::string_view spec) {
    const std::string s = text::trim(spec);
    if (s == "table1-mix") return benchmark();
    if (auto t = task_type_from_string(s)) return TaskMix{{{*t, 1}}};
    TaskMix mix;
    std::istringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) return unexpected("bad task mix entry '" + item + "'");
        auto t = task_type_from_string(text::trim(std::string_view(item).substr(0, eq)));
        if (!t) return unexpected("unknown task type in '" + item + "'");
        std::size_t n = 0;
        try {
            n = std::stoul(item.substr(eq + 1));
        } catch (const std::exception&) {
            return unexpected("bad count in '" + item + "'");
        }
        if (n > 0) mix.counts.emplace_back(*t, n);
    }
    if (mix.total() == 0) return unexpected(std::string("task mix is empty"));
    return mix;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Expected<std::vector<TaskSpec>, std::string> make_task_list(const TaskMix& mix, const std::string& layout,
                                                            std::optional<std::size_t> episodes, std::uint64_t seed) {
    std::vector<TaskType> types;
    for (const auto& [t, n] : mix.counts) types.insert(types.end(), n, t);
    if (types.empty()) return unexpected(std::string("task mix is empty"));

    std::mt19937_64 rng(seed);
    if (episodes && *episodes != types.size()) {
        for (std::size_t i = types.size(); i > 1; --i) std::swap(types[i - 1], types[rng() % i]);
        std::vector<TaskType> sized;
        for (std::size_t i = 0; i < *episodes; ++i) sized.push_back(types[i % types.size()]);
        types = std::move(sized);
    }

    std::vector<TaskSpec> out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const TaskType type = types[i];
        const env::LayoutSpec* spec = nullptr;
        if (layout == "auto") {
            std::vector<const env::LayoutSpec*> able;
            for (const auto& l : env::builtin_layouts())
                if (!l.tasks_of(type).empty()) able.push_back(&l);
            if (able.empty()) return unexpected("no built-in layout supports " + std::string(to_string(type)));
            spec = able[rng() % able.size()];
        } else {
            spec = env::find_layout(layout);
            if (spec == nullptr) return unexpected("unknown layout '" + layout + "'");
            if (spec->tasks_of(type).empty())
                return unexpected("layout '" + layout + "' cannot realize " + std::string(to_string(type)) + " tasks");
        }
        const auto templates = spec->tasks_of(type);
        const auto& tmpl = templates[rng() % templates.size()];
        TaskGoal goal{type, tmpl.object_class, tmpl.target_class};
        out.push_back({i, goal, spec->name, splitmix64(seed ^ splitmix64(i))});
    }
    return out;
}

// ---------------------------------------------------------------------------

Expected<PolicySpec, std::string> PolicySpec::parse(std::string_view spec) {
    const std::string s = text::trim(spec);
    PolicySpec p;
    if (s == "oracle") {
        p.kind = Kind::Oracle;
        return p;
    }
    if (s == "scripted-respact" || s == "scripted") {
        p.kind = Kind::Scripted;
        return p;
    }
    if (s.rfind("llm:", 0) == 0) {
        p.kind = Kind::LLM;
        std::string rest = s.substr(4);
        std::string perm;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            perm = rest.substr(colon + 1);
            rest = rest.substr(0, colon);
        }
        auto style = prompts::prompt_style_from_string(rest);
        if (!style) return unexpected("unknown prompt style '" + rest + "' (react, respact, respact-schema)");
        p.style = *style;
        if (!perm.empty() && perm != "all") {
            try {
                p.permutation = std::stoul(perm);
            } catch (const std::exception&) {
                return unexpected("bad pack index '" + perm + "'");
            }
        }
        if (perm.empty()) p.permutation = 0;
        return p;
    }
    return unexpected("unknown policy '" + s + "' (oracle, scripted-respact, llm:<style>[:<pack>|:all])");
}

std::string PolicySpec::str() const {
    switch (kind) {
        case Kind::Oracle: return "oracle";
        case Kind::Scripted: return "scripted-respact";
        case Kind::LLM:
            return "llm:" + std::string(prompts::to_string(style)) + ":" +
                   (permutation ? std::to_string(*permutation) : std::string("all"));
    }
    return "?";
}

Expected<env::GeneratedWorld, std::string> build_world(const TaskSpec& task) {
    const env::LayoutSpec* spec = env::find_layout(task.layout);
    if (spec == nullptr) return unexpected("unknown layout '" + task.layout + "'");
    auto gen = env::generate(*spec, task.goal, task.seed);
    if (!gen) return unexpected(gen.error().reason);
    return std::move(*gen);
}

namespace {

struct Job {
    std::size_t slot;
    const TaskSpec* task;
    std::optional<std::size_t> pack;
};

class Runner {
public:
    Runner(const SuiteConfig& cfg, const SuiteHooks& hooks) : cfg_(cfg), hooks_(hooks) {}

    Expected<SuiteResult, std::string> run() {
        auto tasks = make_task_list(cfg_.mix, cfg_.layout, cfg_.episodes, cfg_.seed);
        if (!tasks) return unexpected(tasks.error());
        tasks_ = std::move(*tasks);

        const bool llm_policy = cfg_.policy.kind == PolicySpec::Kind::LLM;
        if (llm_policy || cfg_.persona == Persona::LLM) {
            try {
                library_ = prompts::PromptLibrary::load(cfg_.data_dir);
            } catch (const std::exception& e) {
                return unexpected(std::string(e.what()));
            }
            chat_ = hooks_.chat;
            if (chat_ == nullptr) {
                try {
                    owned_chat_ = std::make_unique<llm::HttpChatClient>(llm::ChatConfig::from_env(cfg_.chat));
                } catch (const std::exception& e) {
                    return unexpected(std::string(e.what()));
                }
                chat_ = owned_chat_.get();
            }
        }

        std::vector<std::optional<std::size_t>> packs{std::nullopt};
        if (llm_policy) {
            packs.clear();
            if (cfg_.policy.permutation) {
                packs.push_back(*cfg_.policy.permutation);
            } else {
                std::size_t n = SIZE_MAX;
                for (const auto& t : tasks_) n = std::min(n, library_->packs(cfg_.policy.style, t.goal.type).size());
                for (std::size_t p = 0; p < n; ++p) packs.push_back(p);
            }
        }
        for (const auto& p : packs)
            for (const auto& t : tasks_) jobs_.push_back({jobs_.size(), &t, p});
        results_.resize(jobs_.size());

        std::size_t workers = std::max<std::size_t>(1, cfg_.workers);
        if (cfg_.persona == Persona::Human) workers = 1;
        workers = std::min(workers, jobs_.size());
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back([this] { work(); });
        work();
        for (auto& th : pool) th.join();
        if (!error_.empty()) return unexpected(error_);

        SuiteResult out;
        std::map<std::optional<std::size_t>, std::vector<Episode>> by_pack;
        for (std::size_t i = 0; i < results_.size(); ++i) {
            if (!results_[i]) {
                out.interrupted = true;
                continue;
            }
            by_pack[jobs_[i].pack].push_back(*results_[i]);
            out.episodes.push_back(std::move(*results_[i]));
        }
        out.report = compute_report(out.episodes);
        if (llm_policy && !out.interrupted) {
            for (const auto& [p, eps] : by_pack) out.per_pack.push_back(compute_report(eps));
            auto agg = aggregate_packs(out.per_pack);
            if (agg) out.packs = *agg;
        }
        return out;
    }

private:
    void work() {
        while (true) {
            if (hooks_.stop && hooks_.stop->load()) return;
            const std::size_t i = next_.fetch_add(1);
            if (i >= jobs_.size()) return;
            {
                std::lock_guard lock(mu_);
                if (!error_.empty()) return;
            }
            try {
                Episode ep = run_job(jobs_[i]);
                std::lock_guard lock(mu_);
                if (hooks_.progress) hooks_.progress(ep);
                results_[i] = std::move(ep);
                flush();
            } catch (const std::exception& e) {
                std::lock_guard lock(mu_);
                if (error_.empty()) error_ = e.what();
            }
        }
    }

    // Writes the contiguous prefix of finished episodes. Holds mu_.
    void flush() {
        if (hooks_.jsonl == nullptr) return;
        while (written_ < results_.size() && results_[written_]) {
            write_episode_jsonl(*hooks_.jsonl, *results_[written_]);
            ++written_;
        }
        hooks_.jsonl->flush();
    }

    Episode run_job(const Job& job) {
        const TaskSpec& task = *job.task;
        auto gen = build_world(task);
        if (!gen) throw std::runtime_error("task " + std::to_string(task.index) + ": " + gen.error());

        std::unique_ptr<PolicyPort> policy;
        switch (cfg_.policy.kind) {
            case PolicySpec::Kind::Oracle: policy = std::make_unique<policies::OraclePolicy>(gen->plan); break;
            case PolicySpec::Kind::Scripted: policy = std::make_unique<policies::ScriptedReSpActPolicy>(cfg_.scripted); break;
            case PolicySpec::Kind::LLM: {
                auto packs = library_->packs(cfg_.policy.style, task.goal.type);
                if (*job.pack >= packs.size()) throw std::runtime_error("pack index out of range");
                policy = std::make_unique<policies::LLMPolicy>(packs[*job.pack], *chat_);
                break;
            }
        }

        std::unique_ptr<UserPort> user;
        switch (cfg_.persona) {
            case Persona::HelpfulKnowledgeable: user = std::make_unique<users::HelpfulUser>(gen->plan, gen->world); break;
            case Persona::HelpfulPerturbed: user = std::make_unique<users::PerturbedUser>(gen->plan, gen->world); break;
            case Persona::Unhelpful:
                user = std::make_unique<users::UnhelpfulUser>(gen->plan, gen->world, splitmix64(task.seed ^ 0x5eedULL));
                break;
            case Persona::Human:
                user = std::make_unique<users::StreamUser>(hooks_.human_in ? *hooks_.human_in : std::cin,
                                                           hooks_.human_out ? *hooks_.human_out : std::cout);
                break;
            case Persona::LLM:
                user = std::make_unique<users::LLMUser>(gen->plan, library_->user_prompt(Persona::HelpfulKnowledgeable),
                                                        *chat_, Persona::LLM);
                break;
        }

        char id[48];
        if (job.pack)
            std::snprintf(id, sizeof id, "p%zu-ep-%04zu", *job.pack, task.index);
        else
            std::snprintf(id, sizeof id, "ep-%04zu", task.index);
        if (cfg_.persona == Persona::Human)
            (hooks_.human_out ? *hooks_.human_out : std::cout)
                << "\n" << env::initial_observation(gen->world, task.goal) << "\n";
        return run_episode(gen->world, task.goal, *policy, *user, cfg_.loop, nullptr, id, task.seed, cfg_.persona);
    }

    const SuiteConfig& cfg_;
    const SuiteHooks& hooks_;
    std::vector<TaskSpec> tasks_;
    std::vector<Job> jobs_;
    std::vector<std::optional<Episode>> results_;
    std::optional<prompts::PromptLibrary> library_;
    std::unique_ptr<llm::ChatClient> owned_chat_;
    llm::ChatClient* chat_ = nullptr;
    std::atomic<std::size_t> next_{0};
    std::mutex mu_;
    std::size_t written_ = 0;
    std::string error_;
};

}  // namespace

Expected<SuiteResult, std::string> run_suite(const SuiteConfig& cfg, const SuiteHooks& hooks) {
    return Runner(cfg, hooks).run();
}

}  // namespace respact::eval
