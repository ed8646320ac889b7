// Command-line front end. Every subcommand builds a one-op experiment config,
// so flags and config keys share one code path; `report` runs a config file.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "koenigs/experiment.hpp"

namespace {

using koenigs::json;

struct Flags {
    std::string map;
    std::string expr;
    std::string weight;
    std::string out;
    std::string config;
    bool fail_on_violation = false;

    std::string target;
    std::string variant;
    std::optional<double> alpha, beta, epsilon, tol, control_radius, radius, r_probe, r_max;
    std::optional<int> m, k_max, n_max, grid_depth, max_level;
    std::vector<double> r_samples, delta_levels, alphas;
    bool residual = false;
    bool compare_known = false;
    bool weighted = false;
    bool lipschitz = false;
};

struct Command {
    CLI::App* app;
    std::string op;
};

void add_common(CLI::App* sub, Flags& f, bool with_map = true) {
    if (with_map) {
        sub->add_option("--map", f.map, "catalog map such as lens(0.5), or an expression in z");
        sub->add_option("--expr", f.expr, "map given as an expression in z");
    }
    sub->add_option("--out", f.out, "directory for report.json and CSV tables");
    sub->add_flag("--fail-on-violation", f.fail_on_violation, "exit 2 on a violated verdict");
}

void add_grid(CLI::App* sub, Flags& f) {
    sub->add_option("--grid-depth", f.grid_depth, "depth of the standard disk grid");
    sub->add_option("--r-max", f.r_max, "clip grid radii to this value");
}

void add_policy(CLI::App* sub, Flags& f) { sub->add_option("--max-level", f.max_level, "refinement levels"); }

void add_iteration(CLI::App* sub, Flags& f) {
    sub->add_option("--tol", f.tol, "Cauchy tolerance");
    sub->add_option("--k-max", f.k_max, "maximum iteration depth");
    sub->add_option("--control-radius", f.control_radius, "radius of the control circle");
}

/// Op parameters from the flags that were given.
json op_params(const Flags& f) {
    json p = json::object();
    auto put = [&](const char* key, const auto& v) {
        if (v) p[key] = *v;
    };
    put("alpha", f.alpha);
    put("beta", f.beta);
    put("epsilon", f.epsilon);
    put("tol", f.tol);
    put("control_radius", f.control_radius);
    put("radius", f.radius);
    put("r_probe", f.r_probe);
    put("m", f.m);
    put("k_max", f.k_max);
    put("n_max", f.n_max);
    if (!f.target.empty()) p["target"] = f.target;
    if (!f.variant.empty()) p["variant"] = f.variant;
    if (!f.r_samples.empty()) p["r_samples"] = f.r_samples;
    if (!f.delta_levels.empty()) p["delta_levels"] = f.delta_levels;
    if (!f.alphas.empty()) p["alphas"] = f.alphas;
    if (f.grid_depth || f.r_max) {
        json g = json::object();
        if (f.grid_depth) g["depth"] = *f.grid_depth;
        if (f.r_max) g["r_max"] = *f.r_max;
        p["grid"] = g;
    }
    if (f.max_level) p["refinement"] = {{"max_level", *f.max_level}};
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw koenigs::ConfigError("cannot read config file " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Keeps only the keys an op accepts, so shared flags cannot trip the strict schema.
json filter_params(const std::string& op, const json& p) {
    const auto& schema = koenigs::detail::op_schemas().at(op);
    json out = json::object();
    for (const auto& [k, v] : p.items()) {
        if (schema.count(k)) out[k] = v;
    }
    return out;
}

koenigs::ExperimentConfig build_config(const Command& cmd, const Flags& f) {
    koenigs::ExperimentConfig c;
    if (cmd.op == "report") {
        if (f.config.empty()) {
            throw koenigs::ConfigError("report needs --config");
        }
        c = koenigs::parse_config(read_file(f.config));
    }
    if (!f.map.empty() && !f.expr.empty()) {
        throw koenigs::ConfigError("give --map or --expr, not both");
    }
    if (!f.map.empty()) c.map = f.map;
    if (!f.expr.empty()) c.map = f.expr;
    if (!f.weight.empty()) c.weight = f.weight;
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.fail_on_violation) c.fail_on_violation = true;
    if (cmd.op == "report") {
        return koenigs::config_from_json(koenigs::to_json(c));
    }

    const json p = op_params(f);
    auto add = [&](const std::string& op, json extra = json::object()) {
        json params = filter_params(op, p);
        for (const auto& [k, v] : extra.items()) params[k] = v;
        c.ops.push_back({op, params});
    };
    if (cmd.op == "validate") {
        c.fail_on_violation = true;
        add("validate");
    } else if (cmd.op == "koenigs") {
        add("koenigs");
        if (f.residual) add("schroder_residual");
        if (f.compare_known) add("compare_known_koenigs");
    } else if (cmd.op == "weighted") {
        add("weighted");
        if (f.residual) add("weighted_residual");
    } else if (cmd.op == "power_seminorms") {
        add("power_seminorms", {{"weighted", f.weighted}, {"norm", f.lipschitz ? "lipschitz" : "bloch"}});
    } else {
        add(cmd.op);
    }
    // Round trip through the strict parser so flag input obeys the same schema.
    return koenigs::config_from_json(koenigs::to_json(c));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koenigs eigenfunctions, Bloch-type norms and operator condition checks on the unit disk"};
    app.require_subcommand(1);
    Flags f;
    std::vector<Command> commands;
    auto sub = [&](const char* name, const char* op, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        commands.push_back({s, op});
        return s;
    };

    {
        auto* s = sub("validate", "validate", "check the Koenigs hypotheses for a map");
        add_common(s, f);
        add_grid(s, f);
    }
    {
        auto* s = sub("koenigs", "koenigs", "converge the Koenigs function");
        add_common(s, f);
        add_iteration(s, f);
        s->add_flag("--residual", f.residual, "also report the Schroder residual");
        s->add_option("--radius", f.radius, "residual or comparison radius");
        s->add_flag("--compare-known", f.compare_known, "compare with z/(1-z) (Moebius model)");
    }
    {
        auto* s = sub("weighted", "weighted", "converge the principal weighted eigenfunction");
        add_common(s, f);
        add_iteration(s, f);
        s->add_option("--weight", f.weight, "weight u as a map spec or expression")->required();
        s->add_flag("--residual", f.residual, "also report the weighted residual");
        s->add_option("--radius", f.radius, "residual radius");
    }
    for (auto [name, op] : {std::pair{"seminorm", "seminorm"}, {"lipnorm", "lipnorm"}, {"supnorm", "supnorm"}}) {
        auto* s = sub(name, op, "estimate a norm of a function target");
        add_common(s, f);
        add_grid(s, f);
        add_policy(s, f);
        s->add_option("--map-fn", f.target, "koenigs:<map>, eigen:<map>:<n>, weighted:<map>:<weight>:<n> or an expression");
        if (std::string(op) != "supnorm") s->add_option("--alpha", f.alpha, "exponent")->required();
    }
    {
        auto* s = sub("power-seminorms", "power_seminorms", "seminorms of sigma^n (or v sigma^n) for n = 1..n_max");
        add_common(s, f);
        add_policy(s, f);
        add_iteration(s, f);
        s->add_option("--alpha", f.alpha, "exponent")->required();
        s->add_option("--n-max", f.n_max, "largest power")->required();
        s->add_option("--weight", f.weight, "weight u");
        s->add_flag("--weighted", f.weighted, "multiply by the weighted eigenfunction");
        s->add_flag("--lipschitz", f.lipschitz, "use the Lipschitz-type norm");
    }
    {
        auto* s = sub("bloch-number", "bloch_number", "bracket the Bloch number of a function target");
        add_common(s, f);
        add_policy(s, f);
        s->add_option("--map-fn", f.target, "function target");
        s->add_option("--alphas", f.alphas, "ascending exponent grid");
    }
    {
        auto* s = sub("check-a", "condition_A", "condition (A) on the disk grid");
        add_common(s, f);
        add_grid(s, f);
        s->add_option("--alpha", f.alpha, "exponent")->required();
        s->add_option("--m", f.m, "iterate shift");
    }
    {
        auto* s = sub("check-eq12", "eq12", "logarithmically weighted hyperbolic-derivative bound");
        add_common(s, f);
        add_grid(s, f);
    }
    {
        auto* s = sub("check-zh21", "zh21", "boundedness quantities of u C_phi on B_alpha");
        add_common(s, f);
        add_policy(s, f);
        s->add_option("--weight", f.weight, "weight u (default 1)");
        s->add_option("--alpha", f.alpha, "exponent")->required();
    }
    {
        auto* s = sub("check-compact", "compactness", "compactness limits as |phi| -> 1");
        add_common(s, f);
        s->add_option("--weight", f.weight, "weight u (default 1)");
        s->add_option("--alpha", f.alpha, "exponent")->required();
        s->add_option("--delta-levels", f.delta_levels, "descending boundary distances");
    }
    {
        auto* s = sub("check-th23", "th23", "growth conditions on circles");
        add_common(s, f);
        add_policy(s, f);
        s->add_option("--weight", f.weight, "weight u (default 1)");
        s->add_option("--epsilon", f.epsilon, "epsilon")->required();
        s->add_option("--r-samples", f.r_samples, "ascending radii");
    }
    {
        auto* s = sub("check-itsup", "iterate_supnorm", "least k with sup |phi_k| < 1 on a probe circle");
        add_common(s, f);
        s->add_option("--k-max", f.k_max, "largest iterate");
        s->add_option("--r-probe", f.r_probe, "probe radius");
    }
    {
        auto* s = sub("check-wbeta", "weighted_beta", "weighted-beta hypotheses");
        add_common(s, f);
        add_grid(s, f);
        s->add_option("--weight", f.weight, "weight u")->required();
        s->add_option("--beta", f.beta, "beta")->required();
        s->add_option("--variant", f.variant, "plain or log-weighted")->check(CLI::IsMember({"plain", "log-weighted"}));
    }
    {
        auto* s = sub("report", "report", "run a JSON experiment config");
        add_common(s, f);
        s->add_option("--config", f.config, "config.json")->required();
        s->add_option("--weight", f.weight, "override the weight");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : koenigs::exit_code::usage;
    }

    const Command* cmd = nullptr;
    for (const auto& c : commands) {
        if (c.app->parsed()) cmd = &c;
    }
    try {
        const koenigs::ExperimentConfig config = build_config(*cmd, f);
        const koenigs::ReportBundle bundle = koenigs::run(config);
        std::cout << koenigs::report_text(bundle);
        if (cmd->op == "report" || !f.out.empty()) {
            koenigs::write_bundle(bundle, config.output_dir);
        }
        if (cmd->op == "validate" && bundle.exit_code != 0) {
            for (const auto& reason : bundle.report["results"][0]["result"]["failures"]) {
                std::cerr << "not admissible: " << reason.get<std::string>() << '\n';
            }
        }
        return bundle.exit_code;
    } catch (const koenigs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return koenigs::exit_code::usage;
    }
}
