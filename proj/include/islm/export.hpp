#pragma once

// Structured result documents (JSON, schema version 1) and the trajectory
// CSV. Every document parses back into an equal in-memory value.

#include <islm/geometry.hpp>
#include <islm/policy.hpp>
#include <islm/trajectory.hpp>
#include <islm/validation.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace islm {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(path.string() + ": " + what), path_(path) {}
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// One rung of the epsilon ladder: a full run compared against the reduced cycle.
struct LadderEntry {
    double epsilon = 0.0;
    bool cycle_found = false;
    double period = 0.0;  ///< slow time
    Orientation orientation = Orientation::counterclockwise;
    std::size_t jumps_per_period = 0;
    std::vector<double> jump_y;
    double hausdorff = 0.0;

    friend bool operator==(const LadderEntry&, const LadderEntry&) = default;
};

struct RunDigest {
    std::vector<JumpEvent> jumps;
    std::size_t watched_jumps = 0;
    double max_rate = 0.0;
    std::size_t samples = 0;

    friend bool operator==(const RunDigest&, const RunDigest&) = default;
};

struct ControllerDigest {
    RunDigest uncontrolled;
    RunDigest controlled;
    bool fired = false;
    double t_fire = 0.0;
    double y_trigger = 0.0;
    bool late = false;
    std::string late_reason;
    double pre_trigger_r = 0.0;
    double band = 0.0;
    double max_deviation = 0.0;
    bool within_band = false;

    friend bool operator==(const ControllerDigest&, const ControllerDigest&) = default;
};

[[nodiscard]] inline ControllerDigest digest(const ControllerReport& r) {
    const auto run = [](const RunSummary& s) {
        return RunDigest{s.jumps, s.watched_jumps, s.max_rate, s.trajectory.samples.size()};
    };
    return ControllerDigest{run(r.uncontrolled), run(r.controlled), r.fired,         r.t_fire,
                            r.y_trigger,         r.late,           r.late_reason,   r.pre_trigger_r,
                            r.band,              r.max_deviation,  r.within_band};
}

struct ResultDocument {
    std::string command;
    std::string spec_id;
    std::string mode;
    std::optional<ValidationReport> validation;
    std::optional<LMIsocline> isocline;
    std::optional<std::vector<Equilibrium>> equilibria;
    std::optional<std::vector<JumpEvent>> jumps;
    std::optional<CycleSummary> cycle;
    std::vector<LadderEntry> ladder;
    std::optional<std::vector<ScenarioEvent>> events;
    std::optional<NegativeRateReport> negative_rate;
    std::optional<StabilizationPlan> plan;
    std::optional<ControllerDigest> controller;

    friend bool operator==(const ResultDocument&, const ResultDocument&) = default;
};

// ---------------------------------------------------------------------------
// Enum names

namespace detail {

template <class E, std::size_t N>
E enum_from(const std::string& s, const std::pair<E, const char*> (&table)[N], const char* what) {
    for (const auto& [e, name] : table)
        if (s == name) return e;
    throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

inline constexpr std::pair<Stability, const char*> kStability[] = {{Stability::stable, "stable"},
                                                                    {Stability::unstable, "unstable"}};
inline constexpr std::pair<FoldKind, const char*> kFoldKind[] = {{FoldKind::lower_knee, "lower-knee"},
                                                                  {FoldKind::upper_knee, "upper-knee"}};
inline constexpr std::pair<BranchEnd::Kind, const char*> kEndKind[] = {{BranchEnd::Kind::boundary, "boundary"},
                                                                        {BranchEnd::Kind::fold, "fold"}};
inline constexpr std::pair<Direction, const char*> kDirection[] = {{Direction::up, "up"}, {Direction::down, "down"}};
inline constexpr std::pair<Orientation, const char*> kOrientation[] = {
    {Orientation::counterclockwise, "counterclockwise"}, {Orientation::clockwise, "clockwise"}};
inline constexpr std::pair<Instrument, const char*> kInstrument[] = {{Instrument::inflation, "inflation"},
                                                                      {Instrument::money_stock, "money-stock"}};
inline constexpr std::pair<EquilibriumClass, const char*> kClass[] = {
    {EquilibriumClass::stable_node, "stable-node"},
    {EquilibriumClass::stable_focus, "stable-focus"},
    {EquilibriumClass::unstable_node, "unstable-node"},
    {EquilibriumClass::unstable_focus, "unstable-focus"},
    {EquilibriumClass::saddle, "saddle"},
    {EquilibriumClass::center_degenerate, "center-degenerate"},
    {EquilibriumClass::focus_degenerate, "focus-degenerate"}};

template <class E, std::size_t N>
const char* enum_name(E e, const std::pair<E, const char*> (&table)[N]) {
    for (const auto& [v, name] : table)
        if (v == e) return name;
    return "?";
}

// Non-finite doubles travel as strings so that they survive the trip.
inline json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double num(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("bad number '" + s + "'");
    }
    return j.get<double>();
}

inline json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline std::vector<double> nums(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(num(x));
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-type conversions, found by argument-dependent lookup.

inline void to_json(json& j, const Interval& v) { j = json::array({detail::num(v.lo), detail::num(v.hi)}); }
inline void from_json(const json& j, Interval& v) { v = {detail::num(j.at(0)), detail::num(j.at(1))}; }

inline void to_json(json& j, const Point& v) { j = json::array({v.y, v.r}); }
inline void from_json(const json& j, Point& v) { v = {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline void to_json(json& j, const PropertyCheck& c) {
    j = {{"name", c.name},
         {"passed", c.passed},
         {"evaluated", c.evaluated},
         {"violations", c.violations},
         {"degenerate", c.degenerate},
         {"worst_margin", detail::num(c.worst_margin)},
         {"worst_at", c.worst_at}};
}
inline void from_json(const json& j, PropertyCheck& c) {
    c.name = j.at("name").get<std::string>();
    c.passed = j.at("passed").get<bool>();
    c.evaluated = j.at("evaluated").get<std::size_t>();
    c.violations = j.at("violations").get<std::size_t>();
    c.degenerate = j.at("degenerate").get<std::size_t>();
    c.worst_margin = detail::num(j.at("worst_margin"));
    c.worst_at = j.at("worst_at").get<Point>();
}

inline void to_json(json& j, const ValidationReport& r) {
    j = {{"passed", r.passed()}, {"checks", r.checks}, {"error", r.error}};
}
inline void from_json(const json& j, ValidationReport& r) {
    r.checks = j.at("checks").get<std::vector<PropertyCheck>>();
    r.error = j.at("error").get<std::string>();
}

inline void to_json(json& j, const FoldPoint& f) {
    j = {{"y", f.y_fold}, {"r", f.r_fold}, {"kind", detail::enum_name(f.kind, detail::kFoldKind)}};
}
inline void from_json(const json& j, FoldPoint& f) {
    f.y_fold = j.at("y").get<double>();
    f.r_fold = j.at("r").get<double>();
    f.kind = detail::enum_from(j.at("kind").get<std::string>(), detail::kFoldKind, "fold kind");
}

inline void to_json(json& j, const BranchEnd& e) {
    j = {{"kind", detail::enum_name(e.kind, detail::kEndKind)}, {"fold", e.fold}};
}
inline void from_json(const json& j, BranchEnd& e) {
    e.kind = detail::enum_from(j.at("kind").get<std::string>(), detail::kEndKind, "branch end");
    e.fold = j.at("fold").get<int>();
}

inline void to_json(json& j, const Branch& b) {
    j = {{"id", b.id},
         {"label", branch_label(b.id)},
         {"stability", detail::enum_name(b.stability, detail::kStability)},
         {"y_range", b.y_range},
         {"r_range", b.r_range},
         {"low_y_end", b.low_y_end},
         {"high_y_end", b.high_y_end},
         {"samples", b.samples}};
}
inline void from_json(const json& j, Branch& b) {
    b.id = j.at("id").get<int>();
    b.stability = detail::enum_from(j.at("stability").get<std::string>(), detail::kStability, "stability");
    b.y_range = j.at("y_range").get<Interval>();
    b.r_range = j.at("r_range").get<Interval>();
    b.low_y_end = j.at("low_y_end").get<BranchEnd>();
    b.high_y_end = j.at("high_y_end").get<BranchEnd>();
    b.samples = j.at("samples").get<std::vector<Point>>();
}

inline void to_json(json& j, const LMIsocline& iso) {
    j = {{"branch_count", iso.branches.size()},
         {"fold_count", iso.folds.size()},
         {"max_branch_count", iso.max_branch_count()},
         {"y_range", iso.y_range},
         {"r_range", iso.r_range},
         {"folds", iso.folds},
         {"branches", iso.branches},
         {"warnings", iso.warnings}};
}
inline void from_json(const json& j, LMIsocline& iso) {
    iso.y_range = j.at("y_range").get<Interval>();
    iso.r_range = j.at("r_range").get<Interval>();
    iso.folds = j.at("folds").get<std::vector<FoldPoint>>();
    iso.branches = j.at("branches").get<std::vector<Branch>>();
    iso.warnings = j.at("warnings").get<std::vector<std::string>>();
}

inline void to_json(json& j, const Equilibrium& e) {
    json ev = json::array();
    for (const auto& z : e.eigenvalues) ev.push_back({z.real(), z.imag()});
    j = {{"y", e.y},
         {"r", e.r},
         {"classification", detail::enum_name(e.classification, detail::kClass)},
         {"eigenvalues", ev},
         {"branch", e.branch},
         {"tangency", e.tangency}};
}
inline void from_json(const json& j, Equilibrium& e) {
    e.y = j.at("y").get<double>();
    e.r = j.at("r").get<double>();
    e.classification = detail::enum_from(j.at("classification").get<std::string>(), detail::kClass, "class");
    for (std::size_t k = 0; k < 2; ++k)
        e.eigenvalues[k] = {j.at("eigenvalues").at(k).at(0).get<double>(), j.at("eigenvalues").at(k).at(1).get<double>()};
    e.branch = j.at("branch").get<int>();
    e.tangency = j.at("tangency").get<bool>();
}

inline void to_json(json& j, const JumpEvent& e) {
    j = {{"t_start", e.t_start}, {"t_end", e.t_end},
         {"y_at_jump", e.y_at_jump}, {"r_from", e.r_from},
         {"r_to", e.r_to}, {"direction", detail::enum_name(e.direction, detail::kDirection)},
         {"i_from", e.i_from}, {"i_to", e.i_to}};
}
inline void from_json(const json& j, JumpEvent& e) {
    e.t_start = j.at("t_start").get<double>();
    e.t_end = j.at("t_end").get<double>();
    e.y_at_jump = j.at("y_at_jump").get<double>();
    e.r_from = j.at("r_from").get<double>();
    e.r_to = j.at("r_to").get<double>();
    e.direction = detail::enum_from(j.at("direction").get<std::string>(), detail::kDirection, "direction");
    e.i_from = j.at("i_from").get<std::size_t>();
    e.i_to = j.at("i_to").get<std::size_t>();
}

inline void to_json(json& j, const CycleSummary& c) {
    j = {{"t_start", detail::num(c.t_start)},
         {"period", detail::num(c.period)},
         {"orientation", detail::enum_name(c.orientation, detail::kOrientation)},
         {"signed_area", detail::num(c.signed_area)},
         {"jumps", c.jumps},
         {"y_turning", detail::nums(c.y_turning)},
         {"r_extent", c.r_extent},
         {"y_extent", c.y_extent},
         {"returns", c.returns}};
}
inline void from_json(const json& j, CycleSummary& c) {
    c.t_start = detail::num(j.at("t_start"));
    c.period = detail::num(j.at("period"));
    c.orientation = detail::enum_from(j.at("orientation").get<std::string>(), detail::kOrientation, "orientation");
    c.signed_area = detail::num(j.at("signed_area"));
    c.jumps = j.at("jumps").get<std::vector<JumpEvent>>();
    c.y_turning = detail::nums(j.at("y_turning"));
    c.r_extent = j.at("r_extent").get<Interval>();
    c.y_extent = j.at("y_extent").get<Interval>();
    c.returns = j.at("returns").get<std::size_t>();
}

inline void to_json(json& j, const LadderEntry& e) {
    j = {{"epsilon", e.epsilon},
         {"cycle_found", e.cycle_found},
         {"period", detail::num(e.period)},
         {"orientation", detail::enum_name(e.orientation, detail::kOrientation)},
         {"jumps_per_period", e.jumps_per_period},
         {"jump_y", detail::nums(e.jump_y)},
         {"hausdorff", detail::num(e.hausdorff)}};
}
inline void from_json(const json& j, LadderEntry& e) {
    e.epsilon = j.at("epsilon").get<double>();
    e.cycle_found = j.at("cycle_found").get<bool>();
    e.period = detail::num(j.at("period"));
    e.orientation = detail::enum_from(j.at("orientation").get<std::string>(), detail::kOrientation, "orientation");
    e.jumps_per_period = j.at("jumps_per_period").get<std::size_t>();
    e.jump_y = detail::nums(j.at("jump_y"));
    e.hausdorff = detail::num(j.at("hausdorff"));
}

inline void to_json(json& j, const ScenarioEvent& e) {
    j = {{"t", e.t}, {"kind", e.kind}, {"step", e.step}, {"detail", e.detail}};
}
inline void from_json(const json& j, ScenarioEvent& e) {
    e.t = j.at("t").get<double>();
    e.kind = j.at("kind").get<std::string>();
    e.step = j.at("step").get<int>();
    e.detail = j.at("detail").get<std::string>();
}

inline void to_json(json& j, const RateCrossing& c) {
    j = {{"t", c.t},
         {"r_from", c.r_from},
         {"r_to", c.r_to},
         {"jump", c.jump},
         {"direction", detail::enum_name(c.direction, detail::kDirection)}};
}
inline void from_json(const json& j, RateCrossing& c) {
    c.t = j.at("t").get<double>();
    c.r_from = j.at("r_from").get<double>();
    c.r_to = j.at("r_to").get<double>();
    c.jump = j.at("jump").get<bool>();
    c.direction = detail::enum_from(j.at("direction").get<std::string>(), detail::kDirection, "direction");
}

inline void to_json(json& j, const NegativeRateReport& r) {
    j = {{"crossings", r.crossings},
         {"jump_crossing", r.jump_crossing()},
         {"r_min", detail::num(r.r_min)},
         {"cycle_found", r.cycle_found},
         {"touching", r.touching}};
}
inline void from_json(const json& j, NegativeRateReport& r) {
    r.crossings = j.at("crossings").get<std::vector<RateCrossing>>();
    r.r_min = detail::num(j.at("r_min"));
    r.cycle_found = j.at("cycle_found").get<bool>();
    r.touching = j.at("touching").get<bool>();
}

inline void to_json(json& j, const FiredEvent& e) {
    j = {{"t", e.t}, {"y", e.y}, {"d_pi", e.d_pi}, {"d_ms", e.d_ms}};
}
inline void from_json(const json& j, FiredEvent& e) {
    e = {j.at("t").get<double>(), j.at("y").get<double>(), j.at("d_pi").get<double>(), j.at("d_ms").get<double>()};
}

inline void to_json(json& j, const StabilizationPlan& p) {
    j = {{"fold", p.fold},
         {"margin", detail::num(p.margin)},
         {"instrument", detail::enum_name(p.instrument, detail::kInstrument)},
         {"target_branch", p.target_branch},
         {"target_rate", detail::num(p.target_rate)},
         {"delta", detail::num(p.delta)},
         {"residual", detail::num(p.residual)},
         {"solvable", p.solvable},
         {"diagnosis", p.diagnosis},
         {"fired", p.fired}};
}
inline void from_json(const json& j, StabilizationPlan& p) {
    p.fold = j.at("fold").get<FoldPoint>();
    p.margin = detail::num(j.at("margin"));
    p.instrument = detail::enum_from(j.at("instrument").get<std::string>(), detail::kInstrument, "instrument");
    p.target_branch = j.at("target_branch").get<int>();
    p.target_rate = detail::num(j.at("target_rate"));
    p.delta = detail::num(j.at("delta"));
    p.residual = detail::num(j.at("residual"));
    p.solvable = j.at("solvable").get<bool>();
    p.diagnosis = j.at("diagnosis").get<std::string>();
    p.fired = j.at("fired").get<std::vector<FiredEvent>>();
}

inline void to_json(json& j, const RunDigest& d) {
    j = {{"jumps", d.jumps},
         {"jump_count", d.jumps.size()},
         {"watched_jumps", d.watched_jumps},
         {"max_rate", detail::num(d.max_rate)},
         {"samples", d.samples}};
}
inline void from_json(const json& j, RunDigest& d) {
    d.jumps = j.at("jumps").get<std::vector<JumpEvent>>();
    d.watched_jumps = j.at("watched_jumps").get<std::size_t>();
    d.max_rate = detail::num(j.at("max_rate"));
    d.samples = j.at("samples").get<std::size_t>();
}

inline void to_json(json& j, const ControllerDigest& c) {
    j = {{"uncontrolled", c.uncontrolled}, {"controlled", c.controlled},   {"fired", c.fired},
         {"t_fire", detail::num(c.t_fire)},             {"y_trigger", detail::num(c.y_trigger)},     {"late", c.late},
         {"late_reason", c.late_reason},   {"pre_trigger_r", detail::num(c.pre_trigger_r)}, {"band", detail::num(c.band)},
         {"max_deviation", detail::num(c.max_deviation)}, {"within_band", c.within_band}};
}
inline void from_json(const json& j, ControllerDigest& c) {
    c.uncontrolled = j.at("uncontrolled").get<RunDigest>();
    c.controlled = j.at("controlled").get<RunDigest>();
    c.fired = j.at("fired").get<bool>();
    c.t_fire = detail::num(j.at("t_fire"));
    c.y_trigger = detail::num(j.at("y_trigger"));
    c.late = j.at("late").get<bool>();
    c.late_reason = j.at("late_reason").get<std::string>();
    c.pre_trigger_r = detail::num(j.at("pre_trigger_r"));
    c.band = detail::num(j.at("band"));
    c.max_deviation = detail::num(j.at("max_deviation"));
    c.within_band = j.at("within_band").get<bool>();
}

inline void to_json(json& j, const ResultDocument& d) {
    j = {{"schema_version", kSchemaVersion}, {"command", d.command}, {"spec_id", d.spec_id}, {"mode", d.mode}};
    if (d.validation) j["validation"] = *d.validation;
    if (d.isocline) j["isocline"] = *d.isocline;
    if (d.equilibria) j["equilibria"] = *d.equilibria;
    if (d.jumps) j["jumps"] = *d.jumps;
    if (d.cycle) j["cycle"] = *d.cycle;
    if (!d.ladder.empty()) j["ladder"] = d.ladder;
    if (d.events) j["events"] = *d.events;
    if (d.negative_rate) j["negative_rate"] = *d.negative_rate;
    if (d.plan) j["plan"] = *d.plan;
    if (d.controller) j["controller"] = *d.controller;
}

inline void from_json(const json& j, ResultDocument& d) {
    const int v = j.at("schema_version").get<int>();
    if (v != kSchemaVersion) throw std::invalid_argument("unsupported schema_version " + std::to_string(v));
    d = ResultDocument{};
    d.command = j.at("command").get<std::string>();
    d.spec_id = j.at("spec_id").get<std::string>();
    d.mode = j.at("mode").get<std::string>();
    const auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
    };
    opt("validation", d.validation);
    opt("isocline", d.isocline);
    opt("equilibria", d.equilibria);
    opt("jumps", d.jumps);
    opt("cycle", d.cycle);
    if (j.contains("ladder")) d.ladder = j.at("ladder").get<std::vector<LadderEntry>>();
    opt("events", d.events);
    opt("negative_rate", d.negative_rate);
    opt("plan", d.plan);
    opt("controller", d.controller);
}

// ---------------------------------------------------------------------------
// Text formats

[[nodiscard]] inline std::string to_json_text(const ResultDocument& d) { return json(d).dump(2) + "\n"; }

[[nodiscard]] inline ResultDocument parse_result(const std::string& text) {
    return json::parse(text).get<ResultDocument>();
}

/// Header t,Y,R,regime, one row per sample, shortest round-trip doubles.
[[nodiscard]] inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t,Y,R,regime\n";
    for (const auto& s : tr.samples) out += fmt::format("{},{},{},{}\n", s.t, s.y, s.r, to_string(s.regime));
    return out;
}

namespace detail {

// Exact inverse of the shortest round-trip formatting, subnormals included.
inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

}  // namespace detail

[[nodiscard]] inline Trajectory parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,Y,R,regime") throw std::invalid_argument("bad trajectory header");
    Trajectory tr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Sample s;
        std::istringstream ls(line);
        std::string f[4];
        for (auto& x : f)
            if (!std::getline(ls, x, ',')) throw std::invalid_argument("short trajectory row: " + line);
        s.t = detail::parse_double(f[0]);
        s.y = detail::parse_double(f[1]);
        s.r = detail::parse_double(f[2]);
        if (f[3] == "slow")
            s.regime = Regime::slow;
        else if (f[3] == "jump")
            s.regime = Regime::jump;
        else
            throw std::invalid_argument("bad regime '" + f[3] + "'");
        tr.samples.push_back(s);
    }
    return tr;
}

/// Branch samples as rows branch,stability,Y,R.
[[nodiscard]] inline std::string isocline_csv(const LMIsocline& iso) {
    std::string out = "branch,stability,Y,R\n";
    for (const auto& b : iso.branches)
        for (const auto& p : b.samples)
            out += fmt::format("{},{},{},{}\n", branch_label(b.id), b.stable() ? "stable" : "unstable", p.y, p.r);
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace islm
