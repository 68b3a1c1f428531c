#include "iavns/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace iavns {

namespace {

std::string where(const std::string& source, const toml::source_region& r) {
    if (r.begin.line == 0) return source;
    return source + ":" + std::to_string(r.begin.line) + ":" + std::to_string(r.begin.column);
}

// One TOML table being read; remembers which keys were consumed so leftovers
// can be reported as unknown.
class Section {
public:
    Section(const toml::table* tbl, std::string name, const std::string& source)
        : tbl_(tbl), name_(std::move(name)), source_(source) {}

    [[noreturn]] void fail(const toml::node& n, const std::string& key, const std::string& why) const {
        throw ConfigError(where(source_, n.source()) + ": " + name_ + "." + key + ": " + why);
    }

    const toml::node* get(const char* key) {
        used_.insert(key);
        return tbl_ ? tbl_->get(key) : nullptr;
    }

    void number(const char* key, double& out) {
        if (const auto* n = get(key)) {
            if (auto v = n->value<double>()) out = *v;
            else fail(*n, key, "expected a number");
        }
    }

    void integer(const char* key, int& out) {
        if (const auto* n = get(key)) {
            const auto v = n->value<std::int64_t>();
            if (!v || !n->is_integer() || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
                fail(*n, key, "expected an integer");
            }
            out = static_cast<int>(*v);
        }
    }

    // Seeds above the signed 64-bit range are written as decimal strings.
    void seed(const char* key, std::uint64_t& out) {
        if (const auto* n = get(key)) {
            if (n->is_integer()) {
                const auto v = *n->value<std::int64_t>();
                if (v < 0) fail(*n, key, "expected a non-negative integer");
                out = static_cast<std::uint64_t>(v);
            } else if (auto s = n->value<std::string>()) {
                std::size_t pos = 0;
                try {
                    out = std::stoull(*s, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos == 0 || pos != s->size()) fail(*n, key, "expected a non-negative integer");
            } else {
                fail(*n, key, "expected a non-negative integer");
            }
        }
    }

    void boolean(const char* key, bool& out) {
        if (const auto* n = get(key)) {
            if (auto v = n->value<bool>()) out = *v;
            else fail(*n, key, "expected true or false");
        }
    }

    void string(const char* key, std::string& out) {
        if (const auto* n = get(key)) {
            if (auto v = n->value<std::string>()) out = *v;
            else fail(*n, key, "expected a string");
        }
    }

    // A number, or a two-element [lo, hi] array.
    void range(const char* key, Range& out) {
        if (const auto* n = get(key)) {
            if (auto v = n->value<double>()) {
                out = Range::fixed(*v);
                return;
            }
            const auto* arr = n->as_array();
            if (!arr || arr->size() != 2) fail(*n, key, "expected a number or [lo, hi]");
            const auto lo = (*arr)[0].value<double>();
            const auto hi = (*arr)[1].value<double>();
            if (!lo || !hi) fail(*n, key, "expected a number or [lo, hi]");
            out = {*lo, *hi};
        }
    }

    void vec2(const char* key, Vec2& out) {
        if (const auto* n = get(key)) {
            const auto* arr = n->as_array();
            if (!arr || arr->size() != 2) fail(*n, key, "expected [x, y]");
            const auto x = (*arr)[0].value<double>();
            const auto y = (*arr)[1].value<double>();
            if (!x || !y) fail(*n, key, "expected [x, y]");
            out = Vec2(*x, *y);
        }
    }

    void finish() const {
        if (!tbl_) return;
        for (const auto& [k, v] : *tbl_) {
            if (!used_.contains(std::string(k.str()))) fail(v, std::string(k.str()), "unknown key");
        }
    }

private:
    const toml::table* tbl_;
    std::string name_;
    const std::string& source_;
    std::set<std::string, std::less<>> used_;
};

const toml::table* subtable(const toml::table& root, const char* name, const std::string& source) {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(where(source, n->source()) + ": " + name + ": expected a table");
    return n->as_table();
}

ScenarioKind parse_kind(const std::string& s, const toml::node& n, const std::string& source) {
    if (s == "scenario1") return ScenarioKind::scenario1;
    if (s == "scenario2") return ScenarioKind::scenario2;
    throw ConfigError(where(source, n.source()) + ": scenario.kind: expected scenario1 or scenario2");
}

ManeuverKind parse_maneuver_kind(const std::string& s, Section& sec, const toml::node& n) {
    if (s == "turn") return ManeuverKind::turn;
    if (s == "climb") return ManeuverKind::climb;
    if (s == "speed") return ManeuverKind::speed;
    sec.fail(n, "kind", "expected turn, climb or speed");
}

// Best-effort source location of a "section.field" named in a validation message.
std::string locate(const toml::table& root, const std::string& msg, const std::string& source) {
    const auto end = msg.find_first_of(" :");
    const std::string path = msg.substr(0, end);
    const auto dot = path.find('.');
    if (dot == std::string::npos) return source;
    const toml::node_view<const toml::node> node = root.at_path(path);
    if (!node) return source;
    return where(source, node.node()->source());
}

void read_config(const toml::table& root, const std::string& source, AppConfig& cfg) {
    for (const auto& [k, v] : root) {
        static const std::set<std::string, std::less<>> known = {
            "scenario", "flight", "maneuver", "terrain", "noise", "frontend", "ins_model",
            "camera", "adjustment", "pose_opt", "campaign", "output"};
        if (!known.contains(k.str())) {
            throw ConfigError(where(source, v.source()) + ": " + std::string(k.str()) + ": unknown section");
        }
    }

    Section scen(subtable(root, "scenario", source), "scenario", source);
    ScenarioKind kind = ScenarioKind::scenario1;
    if (const auto* n = scen.get("kind")) {
        const auto s = n->value<std::string>();
        if (!s) scen.fail(*n, "kind", "expected a string");
        kind = parse_kind(*s, *n, source);
    }
    cfg = default_app_config(kind);
    ScenarioConfig& sc = cfg.scenario;
    scen.string("name", sc.name);
    scen.number("t_end", sc.t_end);
    scen.number("t_gnss", sc.t_gnss);
    scen.number("frame_dt", sc.frame_dt);
    scen.seed("seed", sc.seed);
    scen.finish();

    Section fl(subtable(root, "flight", source), "flight", source);
    fl.number("latitude_deg", sc.flight.latitude_deg);
    fl.number("longitude_deg", sc.flight.longitude_deg);
    fl.range("altitude_m", sc.flight.altitude_m);
    fl.range("airspeed_mps", sc.flight.airspeed_mps);
    fl.range("bearing_deg", sc.flight.bearing_deg);
    fl.number("bank_deg", sc.flight.bank_deg);
    fl.number("path_angle_deg", sc.flight.path_angle_deg);
    fl.number("roll_rate_dps", sc.flight.roll_rate_dps);
    fl.number("path_rate_dps", sc.flight.path_rate_dps);
    fl.number("accel_mps2", sc.flight.accel_mps2);
    fl.number("turbulence_sigma_deg", sc.flight.turbulence_sigma_deg);
    fl.number("turbulence_tau_s", sc.flight.turbulence_tau_s);
    fl.finish();

    if (const toml::node* m = root.get("maneuver")) {
        const auto* arr = m->as_array();
        // `maneuver = []` at the top of the file asks for straight flight.
        if (!arr || (!arr->empty() && !arr->is_array_of_tables())) {
            throw ConfigError(where(source, m->source()) + ": maneuver: expected [[maneuver]] tables");
        }
        sc.maneuvers.clear();
        for (std::size_t i = 0; i < arr->size(); ++i) {
            Section ms((*arr)[i].as_table(), "maneuver[" + std::to_string(i) + "]", source);
            ManeuverSpec spec;
            if (const auto* n = ms.get("kind")) {
                const auto s = n->value<std::string>();
                if (!s) ms.fail(*n, "kind", "expected a string");
                spec.kind = parse_maneuver_kind(*s, ms, *n);
            } else {
                ms.fail((*arr)[i], "kind", "missing");
            }
            ms.range("start_s", spec.start_s);
            ms.range("change", spec.change);
            ms.boolean("random_sign", spec.random_sign);
            ms.finish();
            sc.maneuvers.push_back(spec);
        }
    }

    Section ter(subtable(root, "terrain", source), "terrain", source);
    if (const auto* n = ter.get("preset")) {
        const auto s = n->value<std::string>();
        if (!s) ter.fail(*n, "preset", "expected a string");
        try {
            apply_terrain_preset(sc, *s);
        } catch (const std::invalid_argument&) {
            ter.fail(*n, "preset", "unknown preset '" + *s + "' (expected DS, FM, FR, MX, PR or UR)");
        }
    }
    ter.number("ground_elevation_m", sc.terrain.ground_elevation_m);
    ter.number("relief_sigma_m", sc.terrain.relief_sigma_m);
    ter.number("density", sc.terrain.density);
    ter.number("cell_m", sc.terrain.cell_m);
    ter.finish();

    Section noise(subtable(root, "noise", source), "noise", source);
    noise.number("obs_noise_px", sc.obs_noise_px);
    noise.number("outlier_rate", sc.outlier_rate);
    noise.number("outlier_px", sc.outlier_px);
    noise.range("scale_error", sc.scale_error);
    noise.finish();

    Section fe(subtable(root, "frontend", source), "frontend", source);
    fe.number("guess_rot_sigma_deg", sc.frontend.guess_rot_sigma_deg);
    fe.number("guess_trans_sigma_m", sc.frontend.guess_trans_sigma_m);
    fe.number("depth_noise_frac", sc.frontend.depth_noise_frac);
    fe.integer("min_track_frames", sc.frontend.min_track_frames);
    fe.number("map_refine_gain", sc.frontend.map_refine_gain);
    fe.number("inertial_init_residual", sc.frontend.inertial_init_residual);
    fe.finish();

    Section ins(subtable(root, "ins_model", source), "ins_model", source);
    ins.number("sigma_psi", sc.ins.sigma_psi);
    ins.number("sigma_theta", sc.ins.sigma_theta);
    ins.number("sigma_xi", sc.ins.sigma_xi);
    ins.number("sigma_h", sc.ins.sigma_h);
    ins.number("tau_corr", sc.ins.tau_corr);
    ins.number("hor_drift_rate", sc.ins.hor_drift_rate);
    ins.number("hor_drift_turn_sigma_deg", sc.ins.hor_drift_turn_sigma_deg);
    ins.finish();

    Section cam(subtable(root, "camera", source), "camera", source);
    cam.number("focal_m", sc.camera.focal_m);
    cam.number("pixel_pitch_m", sc.camera.pixel_pitch_m);
    cam.vec2("principal_px", sc.camera.principal_px);
    cam.vec2("sensor_px", sc.camera.sensor_px);
    cam.finish();

    Section adj(subtable(root, "adjustment", source), "adjustment", source);
    adj.number("dh_low", sc.adjustment.dh_low);
    adj.number("dtheta_low", sc.adjustment.dtheta_low);
    adj.number("droc_low", sc.adjustment.droc_low);
    adj.number("dxi_low", sc.adjustment.dxi_low);
    adj.number("dtheta1_max", sc.adjustment.dtheta1_max);
    adj.number("dtheta2_max", sc.adjustment.dtheta2_max);
    adj.number("dxi1_max", sc.adjustment.dxi1_max);
    adj.integer("roc_window", sc.adjustment.roc_window);
    if (const auto* n = adj.get("mode")) {
        const auto s = n->value<std::string>();
        if (s && *s == "pitch_bank") sc.adjustment.mode = AdjustmentMode::pitch_bank;
        else if (s && *s == "attitude_slerp") sc.adjustment.mode = AdjustmentMode::attitude_slerp;
        else adj.fail(*n, "mode", "expected pitch_bank or attitude_slerp");
    }
    adj.finish();

    Section gn(subtable(root, "pose_opt", source), "pose_opt", source);
    gn.number("delta_rp", sc.gn.delta_rp);
    gn.number("delta_q", sc.gn.delta_q);
    gn.integer("max_iters", sc.gn.max_iters);
    if (const auto* n = gn.get("robust")) {
        const auto s = n->value<std::string>();
        if (s && *s == "tukey") sc.gn.robust = RobustKind::tukey;
        else if (s && *s == "none") sc.gn.robust = RobustKind::none;
        else gn.fail(*n, "robust", "expected tukey or none");
    }
    // Absent means the adaptive cutoff.
    if (gn.get("tukey_cutoff")) {
        double c = 0.0;
        gn.number("tukey_cutoff", c);
        sc.gn.tukey = TukeyConfig{c};
    }
    gn.number("scale_tuning", sc.gn.scale.tuning);
    gn.number("scale_floor_px", sc.gn.scale.floor_px);
    gn.number("max_condition", sc.gn.max_condition);
    gn.finish();

    Section camp(subtable(root, "campaign", source), "campaign", source);
    camp.integer("runs", cfg.campaign.runs);
    camp.seed("master_seed", cfg.campaign.master_seed);
    camp.integer("threads", cfg.campaign.threads);
    camp.integer("record_stride", cfg.campaign.run.record_stride);
    if (const auto* n = camp.get("estimators")) {
        const auto s = n->value<std::string>();
        if (!s) camp.fail(*n, "estimators", "expected a string such as \"vns,iavns\"");
        try {
            cfg.campaign.estimators = parse_estimators(*s);
        } catch (const ConfigError& e) {
            camp.fail(*n, "estimators", e.what());
        }
    }
    camp.finish();
    if (cfg.campaign.runs < 1) {
        throw ConfigError(locate(root, "campaign.runs", source) + ": campaign.runs must be >= 1");
    }
    if (cfg.campaign.threads < 0) {
        throw ConfigError(locate(root, "campaign.threads", source) + ": campaign.threads must be >= 0");
    }
    if (cfg.campaign.run.record_stride < 1) {
        throw ConfigError(locate(root, "campaign.record_stride", source) + ": campaign.record_stride must be >= 1");
    }

    Section out(subtable(root, "output", source), "output", source);
    out.string("dir", cfg.out_dir);
    out.finish();

    cfg.campaign.name = sc.name;
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(locate(root, e.what(), source) + ": " + e.what());
    }
}

// Minimal emitter: fixed section order and shortest round-trip floats.
class TomlWriter {
public:
    void section(const char* name) {
        if (!out_.empty()) out_ += "\n";
        out_ += "[" + std::string(name) + "]\n";
    }
    void array_section(const char* name) {
        if (!out_.empty()) out_ += "\n";
        out_ += "[[" + std::string(name) + "]]\n";
    }
    void number(const char* key, double v) { line(key, fmt(v)); }
    void integer(const char* key, long long v) { line(key, std::to_string(v)); }
    void boolean(const char* key, bool v) { line(key, v ? "true" : "false"); }
    void string(const char* key, const std::string& v) { line(key, quote(v)); }
    void pair(const char* key, double a, double b) { line(key, "[" + fmt(a) + ", " + fmt(b) + "]"); }
    void range(const char* key, const Range& r) {
        if (r.lo == r.hi) number(key, r.lo);
        else pair(key, r.lo, r.hi);
    }
    void seed(const char* key, std::uint64_t s) {
        if (s <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) line(key, std::to_string(s));
        else string(key, std::to_string(s));
    }
    // Root-level key; only valid before the first section.
    void root_line(const char* key, const std::string& value) { line(key, value); }
    const std::string& str() const { return out_; }

private:
    void line(const char* key, const std::string& value) { out_ += std::string(key) + " = " + value + "\n"; }

    static std::string fmt(double v) {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        std::string s(buf, res.ptr);
        if (s.find_first_of(".e") == std::string::npos) s += ".0";
        return s;
    }

    static std::string quote(const std::string& v) {
        std::string q = "\"";
        for (char c : v) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        return q + "\"";
    }

    std::string out_;
};

const char* to_string(AdjustmentMode m) { return m == AdjustmentMode::pitch_bank ? "pitch_bank" : "attitude_slerp"; }

}  // namespace

AppConfig default_app_config(ScenarioKind kind) {
    AppConfig cfg;
    cfg.scenario = default_scenario(kind);
    cfg.campaign.name = cfg.scenario.name;
    return cfg;
}

AppConfig parse_config(std::string_view text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError(where(source, e.source()) + ": " + std::string(e.description()));
    }
    AppConfig cfg;
    read_config(root, source, cfg);
    return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_toml(const AppConfig& cfg) {
    const ScenarioConfig& sc = cfg.scenario;
    TomlWriter w;

    if (sc.maneuvers.empty()) w.root_line("maneuver", "[]");
    w.section("scenario");
    w.string("name", sc.name);
    w.string("kind", to_string(sc.kind));
    w.number("t_end", sc.t_end);
    w.number("t_gnss", sc.t_gnss);
    w.number("frame_dt", sc.frame_dt);
    w.seed("seed", sc.seed);

    w.section("campaign");
    w.integer("runs", cfg.campaign.runs);
    w.seed("master_seed", cfg.campaign.master_seed);
    w.string("estimators", to_string(cfg.campaign.estimators));
    w.integer("threads", cfg.campaign.threads);
    w.integer("record_stride", cfg.campaign.run.record_stride);

    w.section("output");
    w.string("dir", cfg.out_dir);

    w.section("flight");
    w.number("latitude_deg", sc.flight.latitude_deg);
    w.number("longitude_deg", sc.flight.longitude_deg);
    w.range("altitude_m", sc.flight.altitude_m);
    w.range("airspeed_mps", sc.flight.airspeed_mps);
    w.range("bearing_deg", sc.flight.bearing_deg);
    w.number("bank_deg", sc.flight.bank_deg);
    w.number("path_angle_deg", sc.flight.path_angle_deg);
    w.number("roll_rate_dps", sc.flight.roll_rate_dps);
    w.number("path_rate_dps", sc.flight.path_rate_dps);
    w.number("accel_mps2", sc.flight.accel_mps2);
    w.number("turbulence_sigma_deg", sc.flight.turbulence_sigma_deg);
    w.number("turbulence_tau_s", sc.flight.turbulence_tau_s);

    for (const auto& m : sc.maneuvers) {
        w.array_section("maneuver");
        w.string("kind", to_string(m.kind));
        w.range("start_s", m.start_s);
        w.range("change", m.change);
        w.boolean("random_sign", m.random_sign);
    }

    w.section("terrain");
    w.string("preset", sc.terrain.preset);
    w.number("ground_elevation_m", sc.terrain.ground_elevation_m);
    w.number("relief_sigma_m", sc.terrain.relief_sigma_m);
    w.number("density", sc.terrain.density);
    w.number("cell_m", sc.terrain.cell_m);

    w.section("noise");
    w.number("obs_noise_px", sc.obs_noise_px);
    w.number("outlier_rate", sc.outlier_rate);
    w.number("outlier_px", sc.outlier_px);
    w.range("scale_error", sc.scale_error);

    w.section("frontend");
    w.number("guess_rot_sigma_deg", sc.frontend.guess_rot_sigma_deg);
    w.number("guess_trans_sigma_m", sc.frontend.guess_trans_sigma_m);
    w.number("depth_noise_frac", sc.frontend.depth_noise_frac);
    w.integer("min_track_frames", sc.frontend.min_track_frames);
    w.number("map_refine_gain", sc.frontend.map_refine_gain);
    w.number("inertial_init_residual", sc.frontend.inertial_init_residual);

    w.section("ins_model");
    w.number("sigma_psi", sc.ins.sigma_psi);
    w.number("sigma_theta", sc.ins.sigma_theta);
    w.number("sigma_xi", sc.ins.sigma_xi);
    w.number("sigma_h", sc.ins.sigma_h);
    w.number("tau_corr", sc.ins.tau_corr);
    w.number("hor_drift_rate", sc.ins.hor_drift_rate);
    w.number("hor_drift_turn_sigma_deg", sc.ins.hor_drift_turn_sigma_deg);

    w.section("camera");
    w.number("focal_m", sc.camera.focal_m);
    w.number("pixel_pitch_m", sc.camera.pixel_pitch_m);
    w.pair("principal_px", sc.camera.principal_px.x(), sc.camera.principal_px.y());
    w.pair("sensor_px", sc.camera.sensor_px.x(), sc.camera.sensor_px.y());

    w.section("adjustment");
    w.number("dh_low", sc.adjustment.dh_low);
    w.number("dtheta_low", sc.adjustment.dtheta_low);
    w.number("droc_low", sc.adjustment.droc_low);
    w.number("dxi_low", sc.adjustment.dxi_low);
    w.number("dtheta1_max", sc.adjustment.dtheta1_max);
    w.number("dtheta2_max", sc.adjustment.dtheta2_max);
    w.number("dxi1_max", sc.adjustment.dxi1_max);
    w.integer("roc_window", sc.adjustment.roc_window);
    w.string("mode", to_string(sc.adjustment.mode));

    w.section("pose_opt");
    w.number("delta_rp", sc.gn.delta_rp);
    w.number("delta_q", sc.gn.delta_q);
    w.integer("max_iters", sc.gn.max_iters);
    w.string("robust", sc.gn.robust == RobustKind::tukey ? "tukey" : "none");
    if (sc.gn.tukey) w.number("tukey_cutoff", sc.gn.tukey->c);
    w.number("scale_tuning", sc.gn.scale.tuning);
    w.number("scale_floor_px", sc.gn.scale.floor_px);
    w.number("max_condition", sc.gn.max_condition);
    return w.str();
}

EstimatorSet parse_estimators(std::string_view list) {
    EstimatorSet set{false, false, false};
    std::size_t start = 0;
    bool any = false;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto end = comma == std::string_view::npos ? list.size() : comma;
        std::string name(list.substr(start, end - start));
        std::erase_if(name, [](char c) { return c == ' ' || c == '\t'; });
        const auto kind = estimator_from_string(name);
        if (!kind) throw ConfigError("unknown estimator '" + name + "' (expected ins, vns or iavns)");
        switch (*kind) {
            case EstimatorKind::ins: set.ins = true; break;
            case EstimatorKind::vns: set.vns = true; break;
            case EstimatorKind::iavns: set.iavns = true; break;
        }
        any = true;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (!any) throw ConfigError("empty estimator list");
    return set;
}

std::string to_string(const EstimatorSet& set) {
    std::string out;
    for (auto k : set.kinds()) {
        if (!out.empty()) out += ",";
        out += to_string(k);
    }
    return out;
}

std::filesystem::path resolve_out_dir(const AppConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "out";
}

}  // namespace iavns
