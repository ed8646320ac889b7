#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "koenigs/conditions.hpp"

namespace koenigs {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

struct OpConfig {
    std::string op;
    json params = json::object();
};

struct ExperimentConfig {
    std::string map;
    std::optional<std::string> weight;
    std::vector<OpConfig> ops;
    std::string output_dir = "koenigs_out";
    bool fail_on_violation = false;
    /// Runs never draw random numbers; kept in the schema for explicitness.
    bool deterministic = true;
    std::optional<json> grid;
    std::optional<json> refinement;
};

namespace detail {

enum class Kind { Number, Integer, String, Bool, NumberList, Object };

inline bool has_kind(const json& v, Kind k) {
    switch (k) {
        case Kind::Number: return v.is_number();
        case Kind::Integer: return v.is_number_integer();
        case Kind::String: return v.is_string();
        case Kind::Bool: return v.is_boolean();
        case Kind::Object: return v.is_object();
        case Kind::NumberList:
            if (!v.is_array()) return false;
            for (const auto& x : v) {
                if (!x.is_number()) return false;
            }
            return true;
    }
    return false;
}

using Schema = std::map<std::string, Kind>;

inline const std::map<std::string, Schema>& op_schemas() {
    static const std::map<std::string, Schema> schemas = [] {
        const Schema iter = {{"tol", Kind::Number}, {"k_max", Kind::Integer}, {"control_radius", Kind::Number}};
        auto with = [](Schema s, std::initializer_list<std::pair<const std::string, Kind>> extra) {
            s.insert(extra);
            return s;
        };
        std::map<std::string, Schema> m;
        m["validate"] = {};
        m["koenigs"] = iter;
        m["weighted"] = iter;
        m["schroder_residual"] = with(iter, {{"radius", Kind::Number}});
        m["weighted_residual"] = with(iter, {{"radius", Kind::Number}});
        m["compare_known_koenigs"] = with(iter, {{"radius", Kind::Number}});
        m["seminorm"] = {{"target", Kind::String}, {"alpha", Kind::Number}};
        m["lipnorm"] = {{"target", Kind::String}, {"alpha", Kind::Number}};
        m["supnorm"] = {{"target", Kind::String}};
        m["power_seminorms"] = with(iter, {{"alpha", Kind::Number},
                                           {"n_max", Kind::Integer},
                                           {"norm", Kind::String},
                                           {"weighted", Kind::Bool}});
        m["bloch_number"] = {{"target", Kind::String}, {"alphas", Kind::NumberList}};
        m["condition_A"] = {{"alpha", Kind::Number}, {"m", Kind::Integer}};
        m["eq12"] = {};
        m["zh21"] = {{"alpha", Kind::Number}};
        m["compactness"] = {{"alpha", Kind::Number}, {"delta_levels", Kind::NumberList}};
        m["th23"] = {{"epsilon", Kind::Number}, {"r_samples", Kind::NumberList}};
        m["iterate_supnorm"] = {{"k_max", Kind::Integer}, {"r_probe", Kind::Number}};
        m["weighted_beta"] = {{"beta", Kind::Number}, {"variant", Kind::String}};
        for (auto& [name, s] : m) {
            s["grid"] = Kind::Object;
            s["refinement"] = Kind::Object;
        }
        return m;
    }();
    return schemas;
}

inline const std::set<std::string>& required_params(const std::string& op) {
    static const std::map<std::string, std::set<std::string>> req = {
        {"seminorm", {"alpha"}},    {"lipnorm", {"alpha"}},       {"power_seminorms", {"alpha", "n_max"}},
        {"condition_A", {"alpha"}}, {"zh21", {"alpha"}},          {"compactness", {"alpha"}},
        {"th23", {"epsilon"}},      {"weighted_beta", {"beta"}},
    };
    static const std::set<std::string> none;
    const auto it = req.find(op);
    return it == req.end() ? none : it->second;
}

inline void check_object(const json& obj, const Schema& schema, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        const auto it = schema.find(key);
        if (it == schema.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
        if (!has_kind(value, it->second)) {
            throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
        }
    }
}

inline const Schema& grid_schema() {
    static const Schema s = {{"depth", Kind::Integer}, {"r_max", Kind::Number}};
    return s;
}

inline const Schema& refinement_schema() {
    static const Schema s = {{"max_level", Kind::Integer},      {"angular_base", Kind::Integer},
                             {"angular_cap", Kind::Integer},    {"radial_substeps", Kind::Integer},
                             {"rel_tol", Kind::Number},         {"growth_factor", Kind::Number},
                             {"min_coverage", Kind::Number}};
    return s;
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json j;
    if (!c.map.empty()) {
        j["map"] = c.map;
    }
    if (c.weight) {
        j["weight"] = *c.weight;
    }
    j["output_dir"] = c.output_dir;
    j["fail_on_violation"] = c.fail_on_violation;
    j["deterministic"] = c.deterministic;
    if (c.grid) {
        j["grid"] = *c.grid;
    }
    if (c.refinement) {
        j["refinement"] = *c.refinement;
    }
    j["ops"] = json::array();
    for (const auto& op : c.ops) {
        json o = op.params;
        o["op"] = op.op;
        j["ops"].push_back(std::move(o));
    }
    return j;
}

/// Strict parse: unknown keys, wrong types and missing required keys raise ConfigError.
inline ExperimentConfig config_from_json(const json& j) {
    using detail::Kind;
    const detail::Schema top = {{"map", Kind::String},        {"weight", Kind::String},
                                {"output_dir", Kind::String}, {"fail_on_violation", Kind::Bool},
                                {"deterministic", Kind::Bool}, {"grid", Kind::Object},
                                {"refinement", Kind::Object}, {"ops", Kind::Object}};
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        const auto it = top.find(key);
        if (it == top.end()) {
            throw ConfigError("unknown key '" + key + "' in config");
        }
        if (key == "ops" ? !value.is_array() : !detail::has_kind(value, it->second)) {
            throw ConfigError("key '" + key + "' in config has the wrong type");
        }
    }
    ExperimentConfig c;
    if (j.contains("map")) c.map = j["map"].get<std::string>();
    if (j.contains("weight")) c.weight = j["weight"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("fail_on_violation")) c.fail_on_violation = j["fail_on_violation"].get<bool>();
    if (j.contains("deterministic")) {
        c.deterministic = j["deterministic"].get<bool>();
        if (!c.deterministic) {
            throw ConfigError("non-deterministic runs are not supported");
        }
    }
    if (j.contains("grid")) {
        detail::check_object(j["grid"], detail::grid_schema(), "grid");
        c.grid = j["grid"];
    }
    if (j.contains("refinement")) {
        detail::check_object(j["refinement"], detail::refinement_schema(), "refinement");
        c.refinement = j["refinement"];
    }
    if (j.contains("ops")) {
        for (const auto& o : j["ops"]) {
            if (!o.is_object() || !o.contains("op") || !o["op"].is_string()) {
                throw ConfigError("each op needs a string 'op'");
            }
            OpConfig op{o["op"].get<std::string>(), o};
            op.params.erase("op");
            const auto it = detail::op_schemas().find(op.op);
            if (it == detail::op_schemas().end()) {
                throw ConfigError("unknown op '" + op.op + "'");
            }
            detail::check_object(op.params, it->second, "op " + op.op);
            for (const auto& key : detail::required_params(op.op)) {
                if (!op.params.contains(key)) {
                    throw ConfigError("op " + op.op + " needs '" + key + "'");
                }
            }
            if (op.params.contains("grid")) detail::check_object(op.params["grid"], detail::grid_schema(), "grid");
            if (op.params.contains("refinement")) {
                detail::check_object(op.params["refinement"], detail::refinement_schema(), "refinement");
            }
            c.ops.push_back(std::move(op));
        }
    }
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// The config without its output location, which does not affect results.
inline json experiment_json(const ExperimentConfig& c) {
    json j = to_json(c);
    j.erase("output_dir");
    return j;
}

inline std::string config_hash(const ExperimentConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(experiment_json(c).dump())));
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

/// Full-precision, locale-independent cell.
inline std::string csv_number(double x) {
    if (!std::isfinite(x)) {
        return "domain-error";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<std::optional<double>>& cells) {
        std::vector<std::string> r;
        for (const auto& c : cells) {
            r.push_back(c ? csv_number(*c) : "domain-error");
        }
        rows_.push_back(std::move(r));
    }
    void raw_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string str() const {
        std::ostringstream out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << (i ? "," : "") << cells[i];
            }
            out << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Function targets

/// Resolves "koenigs:<map>", "eigen:<map>:<n>", "weighted:<map>:<weight>:<n>"
/// or a raw expression to an evaluator.
inline JetFn resolve_target(const std::string& target) {
    auto parse_n = [](const std::string& s) {
        int n = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc{} || ptr != s.data() + s.size() || n < 0) {
            throw ConfigError("bad eigenfunction power '" + s + "'");
        }
        return n;
    };
    const auto colon = target.find(':');
    if (colon == std::string::npos) {
        return as_function(map_from_spec(target));
    }
    const std::string kind = target.substr(0, colon);
    const std::string rest = target.substr(colon + 1);
    if (kind == "koenigs") {
        return as_function(koenigs_approx(map_from_spec(rest)));
    }
    if (kind == "eigen") {
        const auto c = rest.rfind(':');
        if (c == std::string::npos) throw ConfigError("eigen target needs <map>:<n>");
        return power_of(as_function(koenigs_approx(map_from_spec(rest.substr(0, c)))), parse_n(rest.substr(c + 1)));
    }
    if (kind == "weighted") {
        const auto c2 = rest.rfind(':');
        const auto c1 = c2 == std::string::npos ? c2 : rest.rfind(':', c2 - 1);
        if (c1 == std::string::npos) throw ConfigError("weighted target needs <map>:<weight>:<n>");
        const MapExpr map = map_from_spec(rest.substr(0, c1));
        const MapExpr weight = map_from_spec(rest.substr(c1 + 1, c2 - c1 - 1));
        const int n = parse_n(rest.substr(c2 + 1));
        const KoenigsApproximation a = koenigs_approx(map);
        const WeightedKoenigs wk = weighted_principal(map, weight);
        return [a, wk, n](cplx z) { return eigenfunction_eval(a, &wk, n, z).jet; };
    }
    throw ConfigError("unknown target kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Run

struct ReportBundle {
    json report;
    /// File name -> CSV content, ordered by name.
    std::map<std::string, std::string> tables;
    int exit_code = 0;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violation = 2;
inline constexpr int nonconvergence = 3;
inline constexpr int usage = 4;
}  // namespace exit_code

namespace detail {

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json estimate_json(const SeminormEstimate& e) {
    return {{"alpha", e.alpha},
            {"value", e.value},
            {"witness", cplx_json(e.witness)},
            {"level_sups", e.level_sups},
            {"state", to_string(e.state)},
            {"coverage", e.coverage}};
}

inline json report_json(const ConditionReport& r) {
    json j = {{"id", r.id},
              {"verdict", to_string(r.verdict)},
              {"label", r.label},
              {"worst_margin", r.worst_margin ? json(*r.worst_margin) : json(nullptr)},
              {"witness", cplx_json(r.witness)},
              {"coverage", r.coverage},
              {"parameters", r.parameters},
              {"notes", r.notes},
              {"tolerance", kPointTolerance}};
    if (!r.quantities.empty()) {
        j["quantities"] = json::object();
        for (const auto& q : r.quantities) j["quantities"][q.id] = estimate_json(q.estimate);
    }
    return j;
}

inline CsvTable margin_table(const ConditionReport& r) {
    CsvTable t({"re", "im", "lhs", "rhs", "margin"});
    for (const auto& s : r.samples) {
        if (s.check) {
            t.row({s.z.real(), s.z.imag(), s.check->lhs, s.check->rhs, s.check->margin()});
        } else {
            t.row({s.z.real(), s.z.imag(), std::nullopt, std::nullopt, std::nullopt});
        }
    }
    return t;
}

inline CsvTable residual_table(const ResidualReport& r, const char* column = "residual") {
    CsvTable t({"re", "im", column});
    for (const auto& s : r.samples) {
        t.row({s.z.real(), s.z.imag(), s.residual});
    }
    return t;
}

template <class T>
T param(const json& p, const char* key, T fallback) {
    return p.contains(key) ? p[key].get<T>() : fallback;
}

inline DiskGrid make_grid(const std::optional<json>& top, const json& op, bool interior = false) {
    json g = top.value_or(json::object());
    if (op.contains("grid")) {
        for (const auto& [k, v] : op["grid"].items()) g[k] = v;
    }
    const int depth = param(g, "depth", 10);
    const double r_max = param(g, "r_max", 1.0);
    return interior ? DiskGrid::standard_with_interior(depth, r_max) : DiskGrid::standard(depth, r_max);
}

inline RefinementPolicy make_policy(const std::optional<json>& top, const json& op) {
    json g = top.value_or(json::object());
    if (op.contains("refinement")) {
        for (const auto& [k, v] : op["refinement"].items()) g[k] = v;
    }
    RefinementPolicy p;
    p.max_level = param(g, "max_level", p.max_level);
    p.angular_base = param(g, "angular_base", p.angular_base);
    p.angular_cap = param(g, "angular_cap", p.angular_cap);
    p.radial_substeps = param(g, "radial_substeps", p.radial_substeps);
    p.rel_tol = param(g, "rel_tol", p.rel_tol);
    p.growth_factor = param(g, "growth_factor", p.growth_factor);
    p.min_coverage = param(g, "min_coverage", p.min_coverage);
    return p;
}

inline IterationOptions make_iteration(const json& p) {
    IterationOptions o;
    o.tol = param(p, "tol", o.tol);
    o.k_max = param(p, "k_max", o.k_max);
    o.control_radius = param(p, "control_radius", o.control_radius);
    return o;
}

/// Integrand of a seminorm on the standard grid, one CSV row per point.
template <class Integrand>
CsvTable integrand_table(const DiskGrid& grid, Integrand&& q) {
    CsvTable t({"re", "im", "integrand"});
    for (cplx z : grid.points()) {
        std::optional<double> v;
        try {
            const double x = q(z);
            if (std::isfinite(x)) v = x;
        } catch (const Error&) {
        }
        t.row({z.real(), z.imag(), v});
    }
    return t;
}

inline bool needs_admissible_map(const std::string& op) {
    static const std::set<std::string> ops = {"koenigs",         "weighted",        "schroder_residual",
                                              "weighted_residual", "compare_known_koenigs", "power_seminorms",
                                              "condition_A",     "eq12",            "th23",
                                              "iterate_supnorm", "weighted_beta"};
    return ops.count(op) > 0;
}

class Runner {
public:
    explicit Runner(const ExperimentConfig& c) : cfg_(c), weight_(load_weight(c)) {
        if (!c.map.empty()) {
            map_ = load(c.map, "map");
        }
    }

    ReportBundle run() {
        for (const auto& op : cfg_.ops) {
            if (needs_admissible_map(op.op)) {
                const ValidationReport v = validate_self_map(map(), DiskGrid::standard());
                if (!v.is_schroder_admissible) {
                    std::string why = v.failures.empty() ? "" : describe(v.failures.front());
                    throw ConfigError("map " + map().name() + " is not admissible for op " + op.op + ": " + why);
                }
                break;
            }
        }
        ReportBundle b;
        b.report["tool_version"] = kToolVersion;
        b.report["config_hash"] = config_hash(cfg_);
        b.report["config"] = experiment_json(cfg_);
        b.report["map"] = map_ ? json(map_->name()) : json(nullptr);
        b.report["weight"] = weight_.name();
        b.report["results"] = json::array();
        bool violated = false, nonconverged = false, failed = false;
        for (std::size_t i = 0; i < cfg_.ops.size(); ++i) {
            const OpConfig& op = cfg_.ops[i];
            char prefix[16];
            std::snprintf(prefix, sizeof prefix, "op%02zu_", i);
            const std::string table_name = prefix + op.op + ".csv";
            json r = {{"index", i}, {"op", op.op}};
            try {
                std::optional<CsvTable> table;
                json res = execute(op, table);
                r["status"] = "ok";
                r["result"] = res;
                if (res.contains("verdict") && res["verdict"] == "violated") violated = true;
                if (table) {
                    b.tables[table_name] = table->str();
                    r["table"] = table_name;
                }
            } catch (const ConvergenceError& e) {
                nonconverged = true;
                r["status"] = "nonconvergence";
                r["error"] = {{"message", e.what()}, {"depth", e.depth()}, {"final_gap", e.final_gap()}};
            } catch (const Error& e) {
                failed = true;
                r["status"] = "error";
                r["error"] = {{"message", e.what()}};
            }
            b.report["results"].push_back(std::move(r));
        }
        b.report["summary"] = {{"violated", violated}, {"nonconverged", nonconverged}, {"errors", failed}};
        if (failed) {
            b.exit_code = exit_code::usage;
        } else if (nonconverged) {
            b.exit_code = exit_code::nonconvergence;
        } else if (violated && cfg_.fail_on_violation) {
            b.exit_code = exit_code::violation;
        }
        b.report["exit_code"] = b.exit_code;
        return b;
    }

private:
    static MapExpr load(const std::string& spec, const char* what) {
        try {
            return map_from_spec(spec);
        } catch (const Error& e) {
            throw ConfigError(std::string("cannot read ") + what + " '" + spec + "': " + e.what());
        }
    }
    static MapExpr load_weight(const ExperimentConfig& c) {
        return c.weight ? load(*c.weight, "weight") : parse_map("1").with_name("1");
    }

    const MapExpr& map() const {
        if (!map_) {
            throw ConfigError("this op needs a map");
        }
        return *map_;
    }

    const KoenigsApproximation& koenigs(const json& p) {
        if (!sigma_ || p.contains("tol") || p.contains("k_max") || p.contains("control_radius")) {
            sigma_ = koenigs_approx(map(), make_iteration(p));
        }
        return *sigma_;
    }
    const WeightedKoenigs& weighted(const json& p) {
        if (!v_ || p.contains("tol") || p.contains("k_max") || p.contains("control_radius")) {
            v_ = weighted_principal(map(), weight_, make_iteration(p));
        }
        return *v_;
    }

    std::string default_target() const {
        if (cfg_.map.empty()) {
            throw ConfigError("norm ops need a target or a map");
        }
        return "koenigs:" + cfg_.map;
    }

    json execute(const OpConfig& op, std::optional<CsvTable>& table) {
        const json& p = op.params;
        const std::string& name = op.op;
        if (name == "validate") {
            const ValidationReport v = validate_self_map(map(), make_grid(cfg_.grid, p));
            json reasons = json::array();
            for (auto f : v.failures) reasons.push_back(describe(f));
            return {{"phi_at_zero", cplx_json(v.phi_at_zero)},
                    {"phi_prime_at_zero", cplx_json(v.phi_prime_at_zero)},
                    {"sup_abs_on_grid", v.sup_abs_on_grid},
                    {"is_schroder_admissible", v.is_schroder_admissible},
                    {"failures", reasons},
                    {"failed_points", v.failed_points},
                    {"grid_evidence_only", v.grid_evidence_only},
                    {"reduction_order", v.reduction_order},
                    {"verdict", v.is_schroder_admissible ? "holds-on-grid" : "violated"}};
        }
        if (name == "koenigs") {
            const auto& a = koenigs(p);
            table = CsvTable({"k", "gap"});
            for (std::size_t k = 0; k < a.gap_history.size(); ++k) table->row({double(k), a.gap_history[k]});
            return {{"lambda", cplx_json(a.lambda)},
                    {"depth", a.depth},
                    {"cauchy_gap", a.cauchy_gap},
                    {"control_radius", a.control_radius}};
        }
        if (name == "weighted") {
            const auto& wk = weighted(p);
            table = CsvTable({"k", "gap"});
            for (std::size_t k = 0; k < wk.gap_history.size(); ++k) table->row({double(k), wk.gap_history[k]});
            return {{"eigenvalue", cplx_json(wk.eigenvalue)},
                    {"depth", wk.depth},
                    {"cauchy_gap", wk.cauchy_gap},
                    {"v_at_zero", cplx_json(weighted_eval(wk, cplx{0.0, 0.0}).value)}};
        }
        if (name == "schroder_residual" || name == "weighted_residual" || name == "compare_known_koenigs") {
            const double radius = param(p, "radius", name == "compare_known_koenigs" ? 0.8 : 0.7);
            const DiskGrid grid = DiskGrid::filled(radius);
            ResidualReport r;
            if (name == "schroder_residual") {
                r = schroder_residual(koenigs(p), grid);
            } else if (name == "weighted_residual") {
                r = weighted_residual(weighted(p), grid);
            } else {
                const auto& a = koenigs(p);
                r = residual_sweep(grid, [&](cplx z) {
                    return std::abs(koenigs_eval(a, z).value - MoebiusModel::known_koenigs(z).value);
                });
            }
            table = residual_table(r, name == "compare_known_koenigs" ? "deviation" : "residual");
            return {{"radius", radius}, {"sup", r.sup}, {"witness", cplx_json(r.witness)}, {"coverage", r.coverage}};
        }
        const RefinementPolicy policy = make_policy(cfg_.refinement, p);
        if (name == "seminorm" || name == "lipnorm" || name == "supnorm") {
            const std::string target = (p.contains("target") ? p.at("target").get<std::string>() : default_target());
            const JetFn f = resolve_target(target);
            const double alpha = param(p, "alpha", 0.0);
            SeminormEstimate e;
            std::function<double(cplx)> q;
            if (name == "seminorm") {
                e = bloch_seminorm(f, alpha, policy);
                q = [&](cplx z) { return std::pow(one_minus_abs2(z), alpha) * std::abs(f(z).derivative); };
            } else if (name == "lipnorm") {
                e = lipschitz_type_norm(f, alpha, policy);
                q = [&](cplx z) { return std::pow(one_minus_abs2(z), alpha - 1.0) * std::abs(f(z).value); };
            } else {
                e = sup_norm(f, policy);
                q = [&](cplx z) { return std::abs(f(z).value); };
            }
            table = integrand_table(make_grid(cfg_.grid, p), q);
            json j = estimate_json(e);
            j["target"] = target;
            if (name == "seminorm") j["norm"] = std::abs(f(cplx{0.0, 0.0}).value) + e.value;
            return j;
        }
        if (name == "power_seminorms") {
            const double alpha = p["alpha"].get<double>();
            const int n_max = p["n_max"].get<int>();
            const std::string norm = param<std::string>(p, "norm", "bloch");
            if (norm != "bloch" && norm != "lipschitz") throw ConfigError("norm must be 'bloch' or 'lipschitz'");
            const bool use_weight = param(p, "weighted", false);
            const auto& a = koenigs(p);
            const WeightedKoenigs* wk = use_weight ? &weighted(p) : nullptr;
            table = CsvTable({"n", "value", "converged"});
            json rows = json::array();
            for (int n = 1; n <= n_max; ++n) {
                const JetFn f = [&a, wk, n](cplx z) { return eigenfunction_eval(a, wk, n, z).jet; };
                const SeminormEstimate e =
                    norm == "bloch" ? bloch_seminorm(f, alpha, policy) : lipschitz_type_norm(f, alpha, policy);
                table->row({double(n), e.value, e.converged() ? 1.0 : 0.0});
                json j = estimate_json(e);
                j["n"] = n;
                rows.push_back(std::move(j));
            }
            return {{"alpha", alpha}, {"norm", norm}, {"weighted", use_weight}, {"estimates", rows}};
        }
        if (name == "bloch_number") {
            const std::string target = (p.contains("target") ? p.at("target").get<std::string>() : default_target());
            std::vector<double> alphas;
            if (p.contains("alphas")) {
                alphas = p["alphas"].get<std::vector<double>>();
            } else {
                for (int i = 1; i <= 40; ++i) alphas.push_back(0.1 * i);
            }
            const BlochNumberEstimate b = bloch_number(resolve_target(target), alphas, policy);
            table = CsvTable({"alpha", "verdict"});
            json ev = json::array();
            for (const auto& [alpha, v] : b.evidence) {
                table->raw_row({csv_number(alpha), to_string(v)});
                ev.push_back({{"alpha", alpha}, {"state", to_string(v)}});
            }
            return {{"target", target},
                    {"lower", b.lower},
                    {"upper", std::isfinite(b.upper) ? json(b.upper) : json("inf")},
                    {"consistent", b.consistent},
                    {"evidence", ev}};
        }
        if (name == "condition_A" || name == "eq12" || name == "weighted_beta") {
            const DiskGrid grid = make_grid(cfg_.grid, p, name == "weighted_beta");
            ConditionReport r;
            if (name == "condition_A") {
                r = check_condition_A(map(), p["alpha"].get<double>(), param(p, "m", 0), grid);
            } else if (name == "eq12") {
                r = check_eq12(map(), grid);
            } else {
                const std::string variant = param<std::string>(p, "variant", "plain");
                if (variant != "plain" && variant != "log-weighted") {
                    throw ConfigError("variant must be 'plain' or 'log-weighted'");
                }
                r = check_weighted_beta(map(), weight_, p["beta"].get<double>(),
                                        variant == "plain" ? BetaVariant::Plain : BetaVariant::LogWeighted, grid);
            }
            table = margin_table(r);
            return report_json(r);
        }
        if (name == "zh21") {
            const ConditionReport r = check_zh21(map(), weight_, p["alpha"].get<double>(), policy);
            return report_json(r);
        }
        if (name == "compactness") {
            std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
            if (p.contains("delta_levels")) deltas = p["delta_levels"].get<std::vector<double>>();
            const auto reps = check_compactness(map(), weight_, p["alpha"].get<double>(), deltas);
            table = CsvTable({"quantity", "abs_phi", "value"});
            json out = json::array();
            for (const auto& c : reps) {
                for (const auto& [a, q] : c.samples) table->raw_row({c.quantity, csv_number(a), csv_number(q)});
                json tails = json::array();
                for (const auto& t : c.tail_max) tails.push_back(t ? json(*t) : json(nullptr));
                out.push_back({{"quantity", c.quantity},
                               {"trend", to_string(c.trend)},
                               {"plateau", c.plateau},
                               {"delta_levels", c.delta_levels},
                               {"tail_max", tails},
                               {"samples", c.samples.size()}});
            }
            return {{"alpha", p["alpha"]}, {"reports", out}};
        }
        if (name == "th23") {
            std::vector<double> rs = {0.9, 0.99, 0.999, 0.9999};
            if (p.contains("r_samples")) rs = p["r_samples"].get<std::vector<double>>();
            const Th23Report t = check_th23(map(), weight_, p["epsilon"].get<double>(), rs, 512, policy);
            table = CsvTable({"r", "M_r", "a_r", "growth", "margin"});
            for (const auto& s : t.samples) table->row({s.r, s.m_r, s.a_r, s.growth, s.margin});
            json j = report_json(t.report);
            j["condition_i"] = t.condition_i_diverges ? "diverges" : "not-diverging";
            return j;
        }
        if (name == "iterate_supnorm") {
            const IterateSupReport it = check_iterate_supnorm(map(), param(p, "k_max", 20), param(p, "r_probe", 0.999));
            table = CsvTable({"k", "sup"});
            for (std::size_t k = 0; k < it.sups.size(); ++k) table->row({double(k + 1), it.sups[k]});
            json j = report_json(it.report);
            j["first_k"] = it.first_k ? json(*it.first_k) : json("not found");
            return j;
        }
        throw ConfigError("unhandled op '" + name + "'");
    }

    const ExperimentConfig& cfg_;
    std::optional<MapExpr> map_;
    MapExpr weight_;
    std::optional<KoenigsApproximation> sigma_;
    std::optional<WeightedKoenigs> v_;
};

}  // namespace detail

/// Executes every op. Config and map errors throw ConfigError; op failures are
/// recorded per op and reflected in exit_code.
inline ReportBundle run(const ExperimentConfig& config) { return detail::Runner(config).run(); }

inline std::string report_text(const ReportBundle& b) { return b.report.dump(2) + "\n"; }

/// Writes report.json and the CSV tables into `dir`.
inline void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir / name).string());
        out << text;
    };
    put("report.json", report_text(b));
    for (const auto& [name, text] : b.tables) put(name, text);
}

}  // namespace koenigs
