#pragma once

// Command-line front end. Data goes to files in the output directory only;
// diagnostics go to stderr. Exit status: 0 ok, 1 validation or input
// failure, 2 numerical failure.

#include <islm/config.hpp>
#include <islm/export.hpp>
#include <islm/run.hpp>
#include <islm/svg.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <vector>

namespace islm::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

struct Overrides {
    std::string config;
    std::string out;
    std::string formats;
    std::string mode;
    std::optional<double> epsilon;
    bool quiet = false;
};

inline std::shared_ptr<spdlog::logger> logger() {
    static std::shared_ptr<spdlog::logger> log = [] {
        auto l = std::make_shared<spdlog::logger>("islm", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("islm: %l: %v");
        return l;
    }();
    return log;
}

inline void configure_logging(bool quiet) {
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("ISLM_LOG"); env && *env) {
        const auto parsed = spdlog::level::from_str(env);
        if (parsed == spdlog::level::off && std::string(env) != "off")
            logger()->warn("ignoring unknown ISLM_LOG level '{}'", env);
        else
            level = parsed;
    }
    if (quiet && level < spdlog::level::err) level = spdlog::level::err;
    logger()->set_level(level);
}

namespace detail {

// Configured times are slow time; the full system runs in t = tau / eps.
inline Scenario to_native(Scenario sc, double eps) {
    sc.horizon /= eps;
    for (auto& st : sc.steps) {
        std::visit(
            [&](auto& s) {
                s.time /= eps;
                if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FiscalDrive>)
                    for (auto& k : s.ramp.knots) k.first /= eps;
            },
            st);
    }
    return sc;
}

inline Ramp to_native(Ramp r, double eps) {
    for (auto& k : r.knots) k.first /= eps;
    return r;
}

inline void to_slow(Trajectory& tr, std::vector<JumpEvent>& jumps, double eps) {
    for (auto& s : tr.samples) s.t *= eps;
    for (auto& j : jumps) {
        j.t_start *= eps;
        j.t_end *= eps;
    }
}

class Session {
public:
    Session(config::RunConfig cfg, Overrides ov, std::string command)
        : cfg_(std::move(cfg)), ov_(std::move(ov)), command_(std::move(command)) {
        dir_ = cfg_.output.dir;
        lock_.emplace(dir_);
    }

    const config::RunConfig& cfg() const { return cfg_; }

    bool csv() const { return cfg_.output.csv; }
    bool json() const { return cfg_.output.json; }
    bool svg() const { return cfg_.output.svg; }

    void write(const std::string& name, const std::string& text) {
        write_file(dir_ / name, text);
        outputs_.push_back(name);
        logger()->info("wrote {}", (dir_ / name).string());
    }

    void write_doc(const std::string& name, const ResultDocument& d) {
        if (json()) write(name, to_json_text(d));
    }

    void finish() {
        Provenance p{command_, ov_.config, config::serialize_config(cfg_), outputs_, utc_timestamp()};
        write_file(dir_ / "provenance.json", provenance_json(p));
    }

    ScenarioOptions scenario_options() const {
        ScenarioOptions o;
        o.validation_y = cfg_.y_range;
        o.validation_r = cfg_.r_range;
        o.solver.rtol = cfg_.simulate.rtol;
        o.solver.atol = cfg_.simulate.atol;
        o.stride = cfg_.simulate.stride / cfg_.model.params.epsilon;
        o.reduced.step = cfg_.simulate.step;
        o.reduced.stride = cfg_.simulate.stride;
        o.reduced.y_range = cfg_.y_range;
        o.reduced.trace = cfg_.trace_options();
        o.reduced.jump_min = cfg_.jump_min;
        o.jumps.jump_min = cfg_.jump_min;
        return o;
    }

    // Runs a scenario in the configured mode; output times are slow time.
    ScenarioResult run(const Scenario& sc, const InitialState& init, Mode mode) const {
        const double eps = cfg_.model.params.epsilon;
        InitialState st = init;
        if (mode == Mode::full_epsilon && init.branch) {
            const auto iso = trace_lm_isocline(cfg_.model, cfg_.y_range, cfg_.trace_options());
            const auto b = static_cast<std::size_t>(*init.branch);
            if (b >= iso.branches.size() || !iso.branches[b].y_range.contains(init.y))
                throw ModelError("branch", branch_label(*init.branch) + " does not extend to y=" + std::to_string(init.y));
            st.r = slaved_rate(cfg_.model, iso.branches[b], init.y, init.r);
        }
        if (mode == Mode::singular_limit) return apply_scenario(cfg_.model, sc, st, mode, scenario_options());
        auto res = apply_scenario(cfg_.model, to_native(sc, eps), st, mode, scenario_options());
        to_slow(res.trajectory, res.jumps, eps);
        for (auto& e : res.events) e.t *= eps;
        return res;
    }

    ResultDocument doc() const {
        ResultDocument d;
        d.command = command_;
        d.spec_id = spec_fingerprint(cfg_.model);
        d.mode = to_string(cfg_.simulate.mode);
        return d;
    }

    LMIsocline isocline() const { return trace_lm_isocline(cfg_.model, cfg_.y_range, cfg_.trace_options()); }

    std::string portrait(const LMIsocline& iso, const Trajectory* tr, const std::vector<JumpEvent>& jumps) const {
        EquilibriumOptions eo;
        eo.fiscal_shift = cfg_.simulate.fiscal_shift;
        const auto eq = find_equilibria(cfg_.model, iso, eo);
        PortraitOptions po;
        po.title = command_ + " " + spec_fingerprint(cfg_.model);
        return render_portrait(is_curve(cfg_.model, cfg_.simulate.fiscal_shift), iso, eq, tr, jumps, po);
    }

private:
    config::RunConfig cfg_;
    Overrides ov_;
    std::string command_;
    std::filesystem::path dir_;
    std::optional<DirectoryLock> lock_;
    std::vector<std::string> outputs_;
};

inline Scenario plain_run(const config::SimulateSettings& s) {
    Scenario sc;
    sc.horizon = s.t_end;
    if (s.fiscal_shift != 0.0) sc.steps.push_back(FiscalShift{0.0, s.fiscal_shift});
    return sc;
}

inline InitialState plain_init(const config::SimulateSettings& s) { return InitialState{s.y0, s.r0, s.branch}; }

// Closed cycle of a long reduced run, as a polyline.
inline std::vector<Point> reduced_loop(const Session& ses, const InitialState& init) {
    const auto res = ses.run(plain_run(ses.cfg().simulate), init, Mode::singular_limit);
    const auto c = detect_cycle(res.trajectory);
    if (!c) return {};
    return cycle_loop(res.trajectory, *c);
}

inline std::vector<LadderEntry> epsilon_ladder(const Session& ses) {
    const auto& cfg = ses.cfg();
    const auto init = plain_init(cfg.simulate);
    const auto ref = reduced_loop(ses, init);
    std::vector<std::future<LadderEntry>> jobs;
    for (double eps : cfg.simulate.epsilon_ladder) {
        jobs.push_back(std::async(std::launch::async, [&, eps] {
            config::RunConfig c = cfg;
            c.model.params.epsilon = eps;
            c.simulate.mode = Mode::full_epsilon;
            LadderEntry e;
            e.epsilon = eps;
            ScenarioOptions o;
            const auto iso = trace_lm_isocline(c.model, c.y_range, c.trace_options());
            InitialState st = init;
            if (st.branch) st.r = slaved_rate(c.model, iso.branches.at(static_cast<std::size_t>(*st.branch)), st.y, st.r);
            o.validation_y = c.y_range;
            o.validation_r = c.r_range;
            o.solver.rtol = c.simulate.rtol;
            o.solver.atol = c.simulate.atol;
            o.stride = c.simulate.stride / eps;
            o.jumps.jump_min = c.jump_min;
            auto res = apply_scenario(c.model, to_native(plain_run(c.simulate), eps), st, Mode::full_epsilon, o);
            to_slow(res.trajectory, res.jumps, eps);
            CycleOptions co;
            co.jumps.jump_min = c.jump_min;
            const auto cyc = detect_cycle(res.trajectory, co);
            if (cyc) {
                e.cycle_found = true;
                e.period = cyc->period;
                e.orientation = cyc->orientation;
                e.jumps_per_period = cyc->jumps.size();
                for (const auto& j : cyc->jumps) e.jump_y.push_back(j.y_at_jump);
                e.hausdorff = ref.empty() ? std::numeric_limits<double>::infinity()
                                          : hausdorff(cycle_loop(res.trajectory, *cyc), ref);
            } else {
                e.hausdorff = std::numeric_limits<double>::infinity();
            }
            return e;
        }));
    }
    std::vector<LadderEntry> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

// The fold producing the requested jump that the ramp reaches first.
inline std::optional<FoldPoint> watched_fold(const LMIsocline& iso, const Ramp& ramp, Direction dir) {
    const FoldKind kind = dir == Direction::up ? FoldKind::lower_knee : FoldKind::upper_knee;
    std::optional<FoldPoint> best;
    double best_t = std::numeric_limits<double>::infinity();
    for (const auto& f : iso.folds) {
        if (f.kind != kind) continue;
        const auto t = islm::detail::first_crossing(ramp, f.y_fold, dir == Direction::up);
        if (t && *t < best_t && ramp.knots.front().second != f.y_fold) {
            best_t = *t;
            best = f;
        }
    }
    return best;
}

inline int cmd_validate(Session& ses) {
    const auto& c = ses.cfg();
    auto d = ses.doc();
    d.validation = validate_properties(c.model, c.y_range, c.r_range, c.validate_grid);
    ses.write_doc("validation.json", d);
    for (const auto& chk : d.validation->checks)
        if (!chk.passed)
            logger()->error("check failed: {} ({} violations, worst margin {} at Y={}, R={})", chk.name, chk.violations,
                            chk.worst_margin, chk.worst_at.y, chk.worst_at.r);
    if (!d.validation->error.empty()) logger()->error("{}", d.validation->error);
    return d.validation->passed() ? kOk : kValidation;
}

inline int cmd_isocline(Session& ses) {
    auto d = ses.doc();
    d.isocline = ses.isocline();
    for (const auto& w : d.isocline->warnings) logger()->warn("{}", w);
    logger()->info("{} branches, {} folds", d.isocline->branches.size(), d.isocline->folds.size());
    ses.write_doc("isocline.json", d);
    if (ses.csv()) ses.write("isocline.csv", isocline_csv(*d.isocline));
    if (ses.svg()) ses.write("portrait.svg", ses.portrait(*d.isocline, nullptr, {}));
    return kOk;
}

inline int cmd_equilibria(Session& ses) {
    auto d = ses.doc();
    const auto iso = ses.isocline();
    EquilibriumOptions eo;
    eo.fiscal_shift = ses.cfg().simulate.fiscal_shift;
    d.equilibria = find_equilibria(ses.cfg().model, iso, eo);
    for (const auto& e : *d.equilibria)
        logger()->info("equilibrium Y={} R={} {} on {}", e.y, e.r, to_string(e.classification), branch_label(e.branch));
    ses.write_doc("equilibria.json", d);
    if (ses.svg()) ses.write("portrait.svg", ses.portrait(iso, nullptr, {}));
    return kOk;
}

inline int cmd_simulate(Session& ses) {
    const auto& c = ses.cfg();
    auto d = ses.doc();
    auto res = ses.run(plain_run(c.simulate), plain_init(c.simulate), c.simulate.mode);
    d.jumps = res.jumps;
    CycleOptions co;
    co.jumps.jump_min = c.jump_min;
    if (auto cyc = detect_cycle(res.trajectory, co)) {
        d.cycle = *cyc;
        logger()->info("cycle: period {} ({}), {} jumps per period", cyc->period, to_string(cyc->orientation),
                       cyc->jumps.size());
    }
    if (!c.simulate.epsilon_ladder.empty()) d.ladder = epsilon_ladder(ses);
    if (ses.csv()) ses.write("trajectory.csv", trajectory_csv(res.trajectory));
    ses.write_doc("simulate.json", d);
    if (ses.svg()) ses.write("portrait.svg", ses.portrait(ses.isocline(), &res.trajectory, res.jumps));
    return kOk;
}

inline int cmd_scenario(Session& ses) {
    const auto& c = ses.cfg();
    if (!c.scenario) throw ModelError("scenario", "the configuration has no scenario section");
    auto d = ses.doc();
    const auto res = ses.run(c.scenario->scenario, c.scenario->initial, c.simulate.mode);
    d.jumps = res.jumps;
    d.events = res.events;
    CycleOptions co;
    co.jumps.jump_min = c.jump_min;
    if (auto cyc = detect_cycle(res.trajectory, co)) d.cycle = *cyc;
    d.negative_rate = rate_sign_report(res.trajectory, res.jumps, c.scenario->touch_tolerance, co);
    for (const auto& e : res.events) logger()->info("t={} {} {}", e.t, e.kind, e.detail);
    if (ses.csv()) ses.write("trajectory.csv", trajectory_csv(res.trajectory));
    ses.write_doc("scenario.json", d);
    if (ses.svg()) ses.write("portrait.svg", ses.portrait(ses.isocline(), &res.trajectory, res.jumps));
    return kOk;
}

inline int cmd_stabilize(Session& ses) {
    const auto& c = ses.cfg();
    if (!c.stabilize) throw ModelError("stabilize", "the configuration has no stabilize section");
    const auto& st = *c.stabilize;
    auto d = ses.doc();
    const auto iso = ses.isocline();
    const auto fold = watched_fold(iso, st.ramp, st.catch_jump);
    if (!fold) throw ModelError("stabilize.ramp", "the ramp never crosses a fold with a jump " + std::string(to_string(st.catch_jump)));
    PlanOptions po;
    po.ms_range_factor = st.ms_range_factor;
    auto plan = plan_stabilization(c.model, iso, *fold, st.instrument, st.margin, po);
    if (!plan.solvable) {
        d.plan = plan;
        ses.write_doc("stabilize.json", d);
        throw NumericalError("stabilization plan has no solution: " + plan.diagnosis);
    }
    ControllerOptions co;
    co.mode = c.simulate.mode;
    co.scenario = ses.scenario_options();
    co.init.branch = st.branch;
    const double eps = c.model.params.epsilon;
    Ramp ramp = st.ramp;
    if (co.mode == Mode::full_epsilon) {
        ramp = to_native(ramp, eps);
        co.tail = st.tail / eps;
        const auto b = st.branch.value_or(0);
        co.init.r = slaved_rate(c.model, iso.branches.at(static_cast<std::size_t>(b)), st.ramp.knots.front().second, 0.0);
        co.init.branch.reset();
    } else {
        co.tail = st.tail;
    }
    auto rep = run_with_controller(c.model, ramp, plan, co);
    if (co.mode == Mode::full_epsilon) {
        to_slow(rep.uncontrolled.trajectory, rep.uncontrolled.jumps, eps);
        to_slow(rep.controlled.trajectory, rep.controlled.jumps, eps);
        rep.t_fire *= eps;
        rep.uncontrolled.max_rate /= eps;
        rep.controlled.max_rate /= eps;
        for (auto& f : plan.fired) f.t *= eps;
    }
    if (rep.late) logger()->warn("controller late: {}", rep.late_reason);
    d.plan = plan;
    d.controller = digest(rep);
    if (ses.csv()) {
        ses.write("uncontrolled.csv", trajectory_csv(rep.uncontrolled.trajectory));
        ses.write("controlled.csv", trajectory_csv(rep.controlled.trajectory));
    }
    ses.write_doc("stabilize.json", d);
    if (ses.svg()) ses.write("portrait.svg", ses.portrait(iso, &rep.controlled.trajectory, rep.controlled.jumps));
    return kOk;
}

inline int cmd_portrait(Session& ses) {
    const auto& c = ses.cfg();
    const auto iso = ses.isocline();
    ScenarioResult res = c.scenario ? ses.run(c.scenario->scenario, c.scenario->initial, c.simulate.mode)
                                    : ses.run(plain_run(c.simulate), plain_init(c.simulate), c.simulate.mode);
    ses.write("portrait.svg", ses.portrait(iso, &res.trajectory, res.jumps));
    auto d = ses.doc();
    d.isocline = iso;
    d.jumps = res.jumps;
    ses.write_doc("portrait.json", d);
    if (ses.csv()) ses.write("trajectory.csv", trajectory_csv(res.trajectory));
    return kOk;
}

inline config::RunConfig effective_config(const Overrides& ov) {
    auto cfg = config::parse_config(ov.config);
    if (!ov.out.empty()) cfg.output.dir = ov.out;
    if (!ov.mode.empty()) cfg.simulate.mode = ov.mode == "full" ? Mode::full_epsilon : Mode::singular_limit;
    if (ov.epsilon) {
        cfg.model.params.epsilon = *ov.epsilon;
        try {
            cfg.model.params.validate();
        } catch (const ModelError& e) {
            throw ModelError("--epsilon", e.what());
        }
    }
    if (!ov.formats.empty()) {
        cfg.output.csv = cfg.output.json = cfg.output.svg = false;
        std::size_t pos = 0;
        while (pos <= ov.formats.size()) {
            const auto end = std::min(ov.formats.find(',', pos), ov.formats.size());
            const auto f = ov.formats.substr(pos, end - pos);
            if (f == "csv")
                cfg.output.csv = true;
            else if (f == "json")
                cfg.output.json = true;
            else if (f == "svg")
                cfg.output.svg = true;
            else
                throw ModelError("--format", "unknown format '" + f + "' (expected csv, json, svg)");
            pos = end + 1;
        }
    }
    return cfg;
}

}  // namespace detail

inline int run_command(int argc, const char* const* argv) {
    CLI::App app{"Slow-fast IS-LM simulator"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Overrides ov;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", ov.config, "run configuration (YAML)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", ov.out, "output directory (overrides output.dir)");
        sub->add_option("--format", ov.formats, "comma-separated subset of csv,json,svg");
        sub->add_option("--mode", ov.mode, "full | reduced")->check(CLI::IsMember({"full", "reduced"}));
        sub->add_option("--epsilon", ov.epsilon, "override the slow-fast ratio");
        sub->add_flag("--quiet", ov.quiet, "only report errors");
    };
    using Handler = int (*)(detail::Session&);
    const std::pair<const char*, const char*> names[] = {
        {"validate", "check the sign conditions on the configured domain"},
        {"isocline", "trace the LM isocline"},
        {"equilibria", "find and classify equilibria"},
        {"simulate", "integrate the full or reduced system"},
        {"scenario", "run a timed fiscal/monetary scenario"},
        {"stabilize", "plan and test the fold-catching controller"},
        {"portrait", "draw the phase portrait"}};
    const Handler handlers[] = {detail::cmd_validate, detail::cmd_isocline, detail::cmd_equilibria, detail::cmd_simulate,
                                detail::cmd_scenario, detail::cmd_stabilize, detail::cmd_portrait};
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : names) {
        subs.push_back(app.add_subcommand(name, help));
        common(subs.back());
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }
    configure_logging(ov.quiet);
    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    const std::string command = names[which].first;
    try {
        auto cfg = detail::effective_config(ov);
        if (command == "portrait") cfg.output.svg = true;
        detail::Session ses(std::move(cfg), ov, command);
        const int rc = handlers[which](ses);
        ses.finish();
        return rc;
    } catch (const NumericalError& e) {
        logger()->error("numerical failure: {}", e.what());
        return kNumerical;
    } catch (const DomainError& e) {
        logger()->error("numerical failure: {}", e.what());
        return kNumerical;
    } catch (const ModelError& e) {
        logger()->error("{}", e.what());
        return kValidation;
    } catch (const IoError& e) {
        logger()->error("{}", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        logger()->error("{}", e.what());
        return kValidation;
    }
}

}  // namespace islm::cli
