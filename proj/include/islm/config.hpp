#pragma once

// Strict YAML run configuration. Unknown keys are rejected; every error
// carries file, line and column. All times are slow time (tau = eps * t).

#include <islm/errors.hpp>
#include <islm/geometry.hpp>
#include <islm/model.hpp>
#include <islm/policy.hpp>
#include <islm/simulate.hpp>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace islm::config {

class ConfigError : public ModelError {
public:
    ConfigError(const std::string& file, int line, int column, const std::string& path, const std::string& what)
        : ModelError(Formatted{}, path, what, format(file, line, column, path, what)), line_(line), column_(column) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& file, int line, int column, const std::string& path,
                              const std::string& what) {
        std::string s = file.empty() ? "<config>" : file;
        if (line > 0) s += ":" + std::to_string(line) + ":" + std::to_string(column);
        s += ": ";
        if (!path.empty()) s += path + ": ";
        return s + what;
    }
    int line_, column_;
};

struct SimulateSettings {
    Mode mode = Mode::singular_limit;
    double t_end = 40.0;
    double y0 = 5.5;
    double r0 = 0.0;
    std::optional<int> branch;
    double stride = 0.01;
    double step = 1e-3;
    double rtol = 1e-8;
    double atol = 1e-10;
    double fiscal_shift = 0.0;
    std::vector<double> epsilon_ladder;

    friend bool operator==(const SimulateSettings&, const SimulateSettings&) = default;
};

struct ScenarioSettings {
    Scenario scenario;
    InitialState initial;
    double touch_tolerance = 1e-6;

    friend bool operator==(const ScenarioSettings& a, const ScenarioSettings& b) {
        return a.scenario == b.scenario && a.initial.y == b.initial.y && a.initial.r == b.initial.r &&
               a.initial.branch == b.initial.branch && a.touch_tolerance == b.touch_tolerance;
    }
};

struct StabilizeSettings {
    Direction catch_jump = Direction::up;  ///< which fold: the one producing this jump
    Instrument instrument = Instrument::inflation;
    double margin = 0.05;
    Ramp ramp;
    double tail = 0.0;
    std::optional<int> branch;
    double ms_range_factor = 10.0;

    friend bool operator==(const StabilizeSettings& a, const StabilizeSettings& b) {
        return a.catch_jump == b.catch_jump && a.instrument == b.instrument && a.margin == b.margin &&
               a.ramp.knots == b.ramp.knots && a.tail == b.tail && a.branch == b.branch &&
               a.ms_range_factor == b.ms_range_factor;
    }
};

struct OutputSettings {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
    bool svg = false;

    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct RunConfig {
    std::string source;  ///< where the model came from; not part of equality
    ModelSpec model;
    Interval y_range{0.0, 20.0};
    Interval r_range{-0.2, 0.4};
    std::size_t validate_grid = 200;
    std::size_t trace_y_steps = 1000;
    std::size_t trace_scan_n = 2000;
    double fold_width = 1e-8;
    double jump_min = 0.01;
    SimulateSettings simulate;
    std::optional<ScenarioSettings> scenario;
    std::optional<StabilizeSettings> stabilize;
    OutputSettings output;

    [[nodiscard]] TraceOptions trace_options() const {
        TraceOptions t;
        t.r_range = r_range;
        t.y_steps = trace_y_steps;
        t.scan_n = trace_scan_n;
        t.fold_width = fold_width;
        return t;
    }

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        return a.model == b.model && a.y_range == b.y_range && a.r_range == b.r_range &&
               a.validate_grid == b.validate_grid && a.trace_y_steps == b.trace_y_steps &&
               a.trace_scan_n == b.trace_scan_n && a.fold_width == b.fold_width && a.jump_min == b.jump_min &&
               a.simulate == b.simulate && a.scenario == b.scenario && a.stabilize == b.stabilize &&
               a.output == b.output;
    }
};

// ---------------------------------------------------------------------------

namespace detail {

class Reader {
public:
    explicit Reader(std::string file) : file_(std::move(file)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& path, const std::string& what) const {
        const auto m = n.Mark();
        if (m.is_null()) throw ConfigError(file_, 0, 0, path, what);
        throw ConfigError(file_, m.line + 1, m.column + 1, path, what);
    }

    void map(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!n.IsMap()) fail(n, path, "expected a mapping");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) {
                std::string list;
                for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
                fail(kv.first, join(path, key), "unknown key (allowed: " + list + ")");
            }
        }
    }

    [[nodiscard]] static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    double num(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a number");
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n, path, "must be finite");
            return v;
        } catch (const YAML::Exception&) {
            fail(n, path, "expected a number, got '" + n.Scalar() + "'");
        }
    }

    double num(const YAML::Node& parent, const char* key, const std::string& path, double def) const {
        const auto n = parent[key];
        return n ? num(n, join(path, key)) : def;
    }

    std::size_t count(const YAML::Node& parent, const char* key, const std::string& path, std::size_t def) const {
        const auto n = parent[key];
        if (!n) return def;
        const double v = num(n, join(path, key));
        if (v < 1.0 || v != std::floor(v)) fail(n, join(path, key), "must be a positive integer");
        return static_cast<std::size_t>(v);
    }

    double positive(const YAML::Node& parent, const char* key, const std::string& path, double def) const {
        const double v = num(parent, key, path, def);
        if (!(v > 0.0)) fail(parent[key] ? parent[key] : parent, join(path, key), "must be > 0");
        return v;
    }

    std::string str(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a string");
        return n.Scalar();
    }

    Interval interval(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence() || n.size() != 2) fail(n, path, "expected [lo, hi]");
        Interval iv{num(n[0], path + "[0]"), num(n[1], path + "[1]")};
        if (!(iv.hi > iv.lo)) fail(n, path, "range must be non-degenerate (lo < hi)");
        return iv;
    }

    int branch(const YAML::Node& n, const std::string& path) const {
        const auto s = str(n, path);
        if (s.size() >= 2 && s[0] == 'A') {
            try {
                std::size_t used = 0;
                const int k = std::stoi(s.substr(1), &used);
                if (used == s.size() - 1 && k >= 1) return k - 1;
            } catch (const std::exception&) {
            }
        }
        fail(n, path, "expected a branch label A1, A2, ...");
    }

    Ramp ramp(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence() || n.size() == 0) fail(n, path, "expected a list of [t, Y] knots");
        Ramp r;
        for (std::size_t k = 0; k < n.size(); ++k) {
            const auto p = path + "[" + std::to_string(k) + "]";
            const auto& kn = n[k];
            if (!kn.IsSequence() || kn.size() != 2) fail(kn, p, "expected [t, Y]");
            r.knots.emplace_back(num(kn[0], p + "[0]"), num(kn[1], p + "[1]"));
        }
        try {
            r.validate();
        } catch (const ModelError& e) {
            fail(n, join(path, e.field()), e.reason());
        }
        return r;
    }

    template <class F>
    void guard(const YAML::Node& n, const std::string& path, F&& f) const {
        try {
            f();
        } catch (const ConfigError&) {
            throw;
        } catch (const ModelError& e) {
            const auto leaf = n[e.field()];
            fail(leaf ? leaf : n, join(path, e.field()), e.reason());
        }
    }

    const std::string& file() const { return file_; }

private:
    std::string file_;
};

inline YAML::Node load(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError(p.string(), 0, 0, "", "cannot open file");
    try {
        return YAML::Load(in);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(p.string(), e.mark.line + 1, e.mark.column + 1, "", e.msg);
    }
}

inline ModelSpec parse_model(const Reader& rd, const YAML::Node& n, const std::string& path) {
    rd.map(n, path, {"params", "is", "money"});
    ModelSpec spec;
    for (const char* k : {"params", "is", "money"})
        if (!n[k]) rd.fail(n, path, std::string("missing '") + k + "'");

    const auto pp = Reader::join(path, "params");
    const auto pn = n["params"];
    rd.map(pn, pp, {"alpha", "beta", "epsilon", "m_stock", "maturity_premium", "expected_inflation"});
    auto& p = spec.params;
    p.alpha = rd.num(pn, "alpha", pp, p.alpha);
    p.beta = rd.num(pn, "beta", pp, p.beta);
    p.epsilon = rd.num(pn, "epsilon", pp, p.epsilon);
    p.m_stock = rd.num(pn, "m_stock", pp, p.m_stock);
    p.maturity_premium = rd.num(pn, "maturity_premium", pp, p.maturity_premium);
    p.expected_inflation = rd.num(pn, "expected_inflation", pp, p.expected_inflation);
    rd.guard(pn, pp, [&] { p.validate(); });

    const auto ip = Reader::join(path, "is");
    const auto in = n["is"];
    rd.map(in, ip, {"i0", "i_y", "i_r", "s0", "s_y", "s_r"});
    for (const char* k : {"i0", "i_y", "i_r", "s0", "s_y", "s_r"})
        if (!in[k]) rd.fail(in, ip, std::string("missing '") + k + "'");
    auto& b = spec.is_block;
    b.i0 = rd.num(in["i0"], ip + ".i0");
    b.i_y = rd.num(in["i_y"], ip + ".i_y");
    b.i_r = rd.num(in["i_r"], ip + ".i_r");
    b.s0 = rd.num(in["s0"], ip + ".s0");
    b.s_y = rd.num(in["s_y"], ip + ".s_y");
    b.s_r = rd.num(in["s_r"], ip + ".s_r");
    rd.guard(in, ip, [&] { b.validate(); });

    const auto mp = Reader::join(path, "money");
    const auto mn = n["money"];
    rd.map(mn, mp, {"l_y", "m_y", "l_slope", "m_slope", "l0", "m0", "skirt_fraction", "windows"});
    for (const char* k : {"l_y", "m_y", "l_slope", "m_slope"})
        if (!mn[k]) rd.fail(mn, mp, std::string("missing '") + k + "'");
    std::vector<TrapWindow> windows;
    if (const auto wn = mn["windows"]) {
        if (!wn.IsSequence()) rd.fail(wn, mp + ".windows", "expected a list");
        for (std::size_t k = 0; k < wn.size(); ++k) {
            const auto wp = mp + ".windows[" + std::to_string(k) + "]";
            rd.map(wn[k], wp, {"p", "q", "amp_l", "amp_m"});
            for (const char* f : {"p", "q", "amp_l", "amp_m"})
                if (!wn[k][f]) rd.fail(wn[k], wp, std::string("missing '") + f + "'");
            windows.push_back(TrapWindow{rd.num(wn[k]["p"], wp + ".p"), rd.num(wn[k]["q"], wp + ".q"),
                                         rd.num(wn[k]["amp_l"], wp + ".amp_l"), rd.num(wn[k]["amp_m"], wp + ".amp_m")});
        }
    }
    rd.guard(mn, mp, [&] {
        spec.money = build_three_phase_money(rd.num(mn["l_y"], mp + ".l_y"), rd.num(mn["m_y"], mp + ".m_y"),
                                             rd.num(mn["l_slope"], mp + ".l_slope"),
                                             rd.num(mn["m_slope"], mp + ".m_slope"), rd.num(mn, "l0", mp, 0.0),
                                             rd.num(mn, "m0", mp, 0.0), windows, rd.num(mn, "skirt_fraction", mp, 0.25));
        spec.money.validate();
    });
    return spec;
}

inline Mode parse_mode(const Reader& rd, const YAML::Node& n, const std::string& path) {
    const auto s = rd.str(n, path);
    if (s == "full") return Mode::full_epsilon;
    if (s == "reduced") return Mode::singular_limit;
    rd.fail(n, path, "expected 'full' or 'reduced'");
}

inline ScenarioSettings parse_scenario(const Reader& rd, const YAML::Node& n, const std::string& path) {
    rd.map(n, path, {"horizon", "initial", "steps", "touch_tolerance"});
    ScenarioSettings s;
    if (!n["horizon"]) rd.fail(n, path, "missing 'horizon'");
    s.scenario.horizon = rd.num(n["horizon"], path + ".horizon");
    s.touch_tolerance = rd.positive(n, "touch_tolerance", path, s.touch_tolerance);
    if (const auto in = n["initial"]) {
        const auto ip = path + ".initial";
        rd.map(in, ip, {"y", "r", "branch"});
        s.initial.y = rd.num(in, "y", ip, 0.0);
        s.initial.r = rd.num(in, "r", ip, 0.0);
        if (in["branch"]) s.initial.branch = rd.branch(in["branch"], ip + ".branch");
    } else {
        rd.fail(n, path, "missing 'initial'");
    }
    if (const auto st = n["steps"]) {
        if (!st.IsSequence()) rd.fail(st, path + ".steps", "expected a list");
        for (std::size_t k = 0; k < st.size(); ++k) {
            const auto sp = path + ".steps[" + std::to_string(k) + "]";
            const auto& e = st[k];
            if (!e.IsMap() || !e["kind"]) rd.fail(e, sp, "each step needs a 'kind'");
            const auto kind = rd.str(e["kind"], sp + ".kind");
            if (!e["time"]) rd.fail(e, sp, "missing 'time'");
            const double t = rd.num(e["time"], sp + ".time");
            if (kind == "fiscal-drive") {
                rd.map(e, sp, {"kind", "time", "knots"});
                if (!e["knots"]) rd.fail(e, sp, "missing 'knots'");
                s.scenario.steps.push_back(FiscalDrive{t, rd.ramp(e["knots"], sp + ".knots")});
            } else if (kind == "fiscal-shift") {
                rd.map(e, sp, {"kind", "time", "g"});
                s.scenario.steps.push_back(FiscalShift{t, rd.num(e, "g", sp, 0.0)});
            } else if (kind == "monetary-step") {
                rd.map(e, sp, {"kind", "time", "d_pi", "d_ms"});
                s.scenario.steps.push_back(MonetaryStep{t, rd.num(e, "d_pi", sp, 0.0), rd.num(e, "d_ms", sp, 0.0)});
            } else {
                rd.fail(e["kind"], sp + ".kind", "expected fiscal-drive, fiscal-shift or monetary-step");
            }
        }
    }
    try {
        s.scenario.validate();
    } catch (const ScenarioError& e) {
        const int k = e.step();
        const auto node = k >= 0 ? n["steps"][static_cast<std::size_t>(k)] : n;
        rd.fail(node, Reader::join(path, e.field()), e.reason());
    } catch (const ModelError& e) {
        rd.fail(n[e.field()] ? n[e.field()] : n, Reader::join(path, e.field()), e.reason());
    }
    return s;
}

inline StabilizeSettings parse_stabilize(const Reader& rd, const YAML::Node& n, const std::string& path) {
    rd.map(n, path, {"fold", "instrument", "margin", "ramp", "tail", "branch", "ms_range_factor"});
    StabilizeSettings s;
    if (const auto f = n["fold"]) {
        const auto v = rd.str(f, path + ".fold");
        if (v == "up")
            s.catch_jump = Direction::up;
        else if (v == "down")
            s.catch_jump = Direction::down;
        else
            rd.fail(f, path + ".fold", "expected 'up' (fold with an upward jump) or 'down'");
    }
    if (const auto i = n["instrument"]) {
        const auto v = rd.str(i, path + ".instrument");
        if (v == "inflation")
            s.instrument = Instrument::inflation;
        else if (v == "money-stock")
            s.instrument = Instrument::money_stock;
        else
            rd.fail(i, path + ".instrument", "expected 'inflation' or 'money-stock'");
    }
    s.margin = rd.num(n, "margin", path, s.margin);
    if (!(s.margin >= 0.0 && s.margin < 1.0)) rd.fail(n["margin"], path + ".margin", "must lie in [0, 1)");
    if (!n["ramp"]) rd.fail(n, path, "missing 'ramp'");
    s.ramp = rd.ramp(n["ramp"], path + ".ramp");
    s.tail = rd.num(n, "tail", path, s.tail);
    if (s.tail < 0.0) rd.fail(n["tail"], path + ".tail", "must be >= 0");
    if (n["branch"]) s.branch = rd.branch(n["branch"], path + ".branch");
    s.ms_range_factor = rd.positive(n, "ms_range_factor", path, s.ms_range_factor);
    return s;
}

// A string value names a file relative to the including document.
inline std::pair<YAML::Node, Reader> resolve(const Reader& rd, const YAML::Node& n, const std::filesystem::path& base,
                                             std::string* source = nullptr) {
    if (n.IsScalar()) {
        const auto p = base / n.Scalar();
        if (source) *source = p.lexically_normal().string();
        try {
            return {load(p), Reader(p.string())};
        } catch (const ConfigError&) {
            rd.fail(n, "", "cannot load '" + p.string() + "'");
        }
    }
    return {n, rd};
}

}  // namespace detail

/// Parses an in-memory document; `file` and `base` serve diagnostics and relative paths.
[[nodiscard]] inline RunConfig parse_config_node(const YAML::Node& root, const std::string& file = {},
                                                 const std::filesystem::path& base = ".") {
    const detail::Reader rd(file);
    if (!root || root.IsNull()) throw ConfigError(file, 0, 0, "", "empty configuration");
    rd.map(root, "",
           {"model", "domain", "validate", "isocline", "simulate", "scenario", "stabilize", "output", "jump_min"});
    RunConfig c;
    c.source = file;
    if (!root["model"]) rd.fail(root, "", "missing 'model'");
    {
        auto [mn, mrd] = detail::resolve(rd, root["model"], base, &c.source);
        c.model = detail::parse_model(mrd, mn, mrd.file() == file ? "model" : "");
    }
    if (const auto d = root["domain"]) {
        rd.map(d, "domain", {"y", "r"});
        if (d["y"]) c.y_range = rd.interval(d["y"], "domain.y");
        if (d["r"]) c.r_range = rd.interval(d["r"], "domain.r");
        if (c.y_range.lo < 0.0) rd.fail(d["y"], "domain.y", "income range must lie in Y >= 0");
    }
    if (const auto v = root["validate"]) {
        rd.map(v, "validate", {"grid"});
        c.validate_grid = rd.count(v, "grid", "validate", c.validate_grid);
        if (c.validate_grid < 100) rd.fail(v["grid"], "validate.grid", "must be >= 100");
    }
    if (const auto v = root["isocline"]) {
        rd.map(v, "isocline", {"y_steps", "scan_n", "fold_width"});
        c.trace_y_steps = rd.count(v, "y_steps", "isocline", c.trace_y_steps);
        c.trace_scan_n = rd.count(v, "scan_n", "isocline", c.trace_scan_n);
        c.fold_width = rd.positive(v, "fold_width", "isocline", c.fold_width);
    }
    c.jump_min = rd.positive(root, "jump_min", "", c.jump_min);
    if (const auto s = root["simulate"]) {
        rd.map(s, "simulate",
               {"mode", "t_end", "y0", "r0", "branch", "stride", "step", "rtol", "atol", "fiscal_shift",
                "epsilon_ladder"});
        auto& m = c.simulate;
        if (s["mode"]) m.mode = detail::parse_mode(rd, s["mode"], "simulate.mode");
        m.t_end = rd.num(s, "t_end", "simulate", m.t_end);
        if (m.t_end < 0.0) rd.fail(s["t_end"], "simulate.t_end", "must be >= 0");
        m.y0 = rd.num(s, "y0", "simulate", m.y0);
        if (m.y0 < 0.0) rd.fail(s["y0"], "simulate.y0", "income must be >= 0");
        m.r0 = rd.num(s, "r0", "simulate", m.r0);
        if (s["branch"]) m.branch = rd.branch(s["branch"], "simulate.branch");
        m.stride = rd.positive(s, "stride", "simulate", m.stride);
        m.step = rd.positive(s, "step", "simulate", m.step);
        m.rtol = rd.positive(s, "rtol", "simulate", m.rtol);
        m.atol = rd.positive(s, "atol", "simulate", m.atol);
        m.fiscal_shift = rd.num(s, "fiscal_shift", "simulate", m.fiscal_shift);
        if (const auto l = s["epsilon_ladder"]) {
            if (!l.IsSequence()) rd.fail(l, "simulate.epsilon_ladder", "expected a list");
            for (std::size_t k = 0; k < l.size(); ++k) {
                const auto p = "simulate.epsilon_ladder[" + std::to_string(k) + "]";
                const double e = rd.num(l[k], p);
                if (!(e > 0.0 && e <= 1.0)) rd.fail(l[k], p, "must lie in (0, 1]");
                m.epsilon_ladder.push_back(e);
            }
        }
    }
    if (const auto s = root["scenario"]) {
        auto [sn, srd] = detail::resolve(rd, s, base);
        c.scenario = detail::parse_scenario(srd, sn, srd.file() == file ? "scenario" : "");
    }
    if (const auto s = root["stabilize"]) c.stabilize = detail::parse_stabilize(rd, s, "stabilize");
    if (const auto o = root["output"]) {
        rd.map(o, "output", {"dir", "formats"});
        if (o["dir"]) c.output.dir = rd.str(o["dir"], "output.dir");
        if (const auto f = o["formats"]) {
            if (!f.IsSequence()) rd.fail(f, "output.formats", "expected a list");
            c.output.csv = c.output.json = c.output.svg = false;
            for (std::size_t k = 0; k < f.size(); ++k) {
                const auto v = rd.str(f[k], "output.formats");
                if (v == "csv")
                    c.output.csv = true;
                else if (v == "json")
                    c.output.json = true;
                else if (v == "svg")
                    c.output.svg = true;
                else
                    rd.fail(f[k], "output.formats", "expected csv, json or svg");
            }
        }
    }
    return c;
}

[[nodiscard]] inline RunConfig parse_config(const std::filesystem::path& path) {
    const auto root = detail::load(path);
    return parse_config_node(root, path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

[[nodiscard]] inline RunConfig parse_config_string(const std::string& text, const std::string& name = "<string>") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(name, e.mark.line + 1, e.mark.column + 1, "", e.msg);
    }
    return parse_config_node(root, name);
}

// ---------------------------------------------------------------------------
// Serialization. Doubles use the shortest representation that round-trips.

namespace detail {

inline std::string num_text(double v) { return fmt::format("{}", v); }

inline void emit_num(YAML::Emitter& e, const char* key, double v) { e << YAML::Key << key << YAML::Value << num_text(v); }

inline void emit_pair(YAML::Emitter& e, double a, double b) {
    e << YAML::Flow << YAML::BeginSeq << num_text(a) << num_text(b) << YAML::EndSeq;
}

}  // namespace detail

inline void emit_model(YAML::Emitter& e, const ModelSpec& s) {
    using detail::emit_num;
    e << YAML::BeginMap;
    e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    emit_num(e, "alpha", s.params.alpha);
    emit_num(e, "beta", s.params.beta);
    emit_num(e, "epsilon", s.params.epsilon);
    emit_num(e, "m_stock", s.params.m_stock);
    emit_num(e, "maturity_premium", s.params.maturity_premium);
    emit_num(e, "expected_inflation", s.params.expected_inflation);
    e << YAML::EndMap;
    e << YAML::Key << "is" << YAML::Value << YAML::BeginMap;
    emit_num(e, "i0", s.is_block.i0);
    emit_num(e, "i_y", s.is_block.i_y);
    emit_num(e, "i_r", s.is_block.i_r);
    emit_num(e, "s0", s.is_block.s0);
    emit_num(e, "s_y", s.is_block.s_y);
    emit_num(e, "s_r", s.is_block.s_r);
    e << YAML::EndMap;
    const auto& m = s.money;
    e << YAML::Key << "money" << YAML::Value << YAML::BeginMap;
    emit_num(e, "l_y", m.l_y());
    emit_num(e, "m_y", m.m_y());
    emit_num(e, "l_slope", m.l_slope());
    emit_num(e, "m_slope", m.m_slope());
    emit_num(e, "l0", m.l0());
    emit_num(e, "m0", m.m0());
    emit_num(e, "skirt_fraction", m.skirt_fraction());
    e << YAML::Key << "windows" << YAML::Value << YAML::BeginSeq;
    for (const auto& w : m.windows()) {
        e << YAML::Flow << YAML::BeginMap;
        emit_num(e, "p", w.p);
        emit_num(e, "q", w.q);
        emit_num(e, "amp_l", w.amp_l);
        emit_num(e, "amp_m", w.amp_m);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
    e << YAML::EndMap;
}

/// Inverse of parse_config: the model and scenario are always written inline.
[[nodiscard]] inline std::string serialize_config(const RunConfig& c) {
    using detail::emit_num;
    using detail::emit_pair;
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value;
    emit_model(e, c.model);
    e << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "y" << YAML::Value;
    emit_pair(e, c.y_range.lo, c.y_range.hi);
    e << YAML::Key << "r" << YAML::Value;
    emit_pair(e, c.r_range.lo, c.r_range.hi);
    e << YAML::EndMap;
    e << YAML::Key << "validate" << YAML::Value << YAML::BeginMap << YAML::Key << "grid" << YAML::Value
      << c.validate_grid << YAML::EndMap;
    e << YAML::Key << "isocline" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "y_steps" << YAML::Value << c.trace_y_steps;
    e << YAML::Key << "scan_n" << YAML::Value << c.trace_scan_n;
    emit_num(e, "fold_width", c.fold_width);
    e << YAML::EndMap;
    emit_num(e, "jump_min", c.jump_min);

    const auto& s = c.simulate;
    e << YAML::Key << "simulate" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "mode" << YAML::Value << (s.mode == Mode::full_epsilon ? "full" : "reduced");
    emit_num(e, "t_end", s.t_end);
    emit_num(e, "y0", s.y0);
    emit_num(e, "r0", s.r0);
    if (s.branch) e << YAML::Key << "branch" << YAML::Value << branch_label(*s.branch);
    emit_num(e, "stride", s.stride);
    emit_num(e, "step", s.step);
    emit_num(e, "rtol", s.rtol);
    emit_num(e, "atol", s.atol);
    emit_num(e, "fiscal_shift", s.fiscal_shift);
    if (!s.epsilon_ladder.empty()) {
        e << YAML::Key << "epsilon_ladder" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : s.epsilon_ladder) e << detail::num_text(v);
        e << YAML::EndSeq;
    }
    e << YAML::EndMap;

    const auto ramp = [&](const Ramp& r) {
        e << YAML::BeginSeq;
        for (const auto& [t, y] : r.knots) emit_pair(e, t, y);
        e << YAML::EndSeq;
    };
    if (c.scenario) {
        const auto& sc = *c.scenario;
        e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
        emit_num(e, "horizon", sc.scenario.horizon);
        emit_num(e, "touch_tolerance", sc.touch_tolerance);
        e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
        emit_num(e, "y", sc.initial.y);
        emit_num(e, "r", sc.initial.r);
        if (sc.initial.branch) e << YAML::Key << "branch" << YAML::Value << branch_label(*sc.initial.branch);
        e << YAML::EndMap;
        e << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
        for (const auto& st : sc.scenario.steps) {
            e << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << step_kind(st);
            emit_num(e, "time", step_time(st));
            if (const auto* d = std::get_if<FiscalDrive>(&st)) {
                e << YAML::Key << "knots" << YAML::Value;
                ramp(d->ramp);
            } else if (const auto* f = std::get_if<FiscalShift>(&st)) {
                emit_num(e, "g", f->g);
            } else {
                const auto& m = std::get<MonetaryStep>(st);
                emit_num(e, "d_pi", m.d_pi);
                emit_num(e, "d_ms", m.d_ms);
            }
            e << YAML::EndMap;
        }
        e << YAML::EndSeq << YAML::EndMap;
    }
    if (c.stabilize) {
        const auto& st = *c.stabilize;
        e << YAML::Key << "stabilize" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "fold" << YAML::Value << to_string(st.catch_jump);
        e << YAML::Key << "instrument" << YAML::Value << to_string(st.instrument);
        emit_num(e, "margin", st.margin);
        e << YAML::Key << "ramp" << YAML::Value;
        ramp(st.ramp);
        emit_num(e, "tail", st.tail);
        if (st.branch) e << YAML::Key << "branch" << YAML::Value << branch_label(*st.branch);
        emit_num(e, "ms_range_factor", st.ms_range_factor);
        e << YAML::EndMap;
    }
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dir" << YAML::Value << c.output.dir;
    e << YAML::Key << "formats" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    if (c.output.csv) e << "csv";
    if (c.output.json) e << "json";
    if (c.output.svg) e << "svg";
    e << YAML::EndSeq << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace islm::config
