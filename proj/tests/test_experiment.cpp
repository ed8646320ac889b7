#include <gtest/gtest.h>

#include <random>

#include "koenigs/experiment.hpp"

using namespace koenigs;

namespace {

ExperimentConfig config(const std::string& map, std::vector<OpConfig> ops) {
    ExperimentConfig c;
    c.map = map;
    c.ops = std::move(ops);
    return c;
}

const json& result(const ReportBundle& b, std::size_t i) { return b.report["results"][i]; }

}  // namespace

TEST(Config, StrictSchema) {
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "colour": 1})j"), ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": 3})j"), ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "ops": [{"op": "condition_A"}]})j"), ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "ops": [{"op": "condition_A", "alpha": 1, "n": 2}]})j"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "ops": [{"op": "teleport"}]})j"), ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "ops": [{"op": "condition_A", "alpha": 1, "m": 0.5}]})j"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "grid": {"levels": 3}})j"), ConfigError);
    EXPECT_THROW(parse_config(R"j({"map": "lens(0.5)", "deterministic": false})j"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, RoundTripsBitIdentically) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ExperimentConfig c = config("lens(" + detail::format_number(u(rng)) + ")", {});
        if (trial % 2) c.weight = "1 + z/2";
        c.fail_on_violation = trial % 3 == 0;
        c.grid = json{{"depth", 1 + trial % 12}, {"r_max", u(rng)}};
        c.ops.push_back({"condition_A", {{"alpha", u(rng) * 3}, {"m", trial % 4}}});
        c.ops.push_back({"th23", {{"epsilon", u(rng)}, {"r_samples", {u(rng), u(rng)}}}});
        const std::string text = to_json(c).dump();
        const ExperimentConfig back = parse_config(text);
        EXPECT_EQ(back, c);
        EXPECT_EQ(to_json(back).dump(), text);
        EXPECT_EQ(config_hash(back), config_hash(c));
    }
}

TEST(Run, LensConditionAHolds) {
    const ReportBundle b = run(config("lens(0.5)", {{"condition_A", {{"alpha", 1}, {"m", 0}}}}));
    EXPECT_EQ(b.exit_code, 0);
    EXPECT_EQ(result(b, 0)["status"], "ok");
    EXPECT_EQ(result(b, 0)["result"]["verdict"], "holds-on-grid");
    EXPECT_EQ(b.report["tool_version"], kToolVersion);
    EXPECT_EQ(b.tables.count("op00_condition_A.csv"), 1u);
}

TEST(Run, LinearResidualIsTiny) {
    const ReportBundle b = run(config("linear(0.5)", {{"koenigs", {{"tol", 1e-10}}}, {"schroder_residual", {}}}));
    EXPECT_LE(result(b, 1)["result"]["sup"].get<double>(), 1e-12);
}

TEST(Run, MoebiusMatchesKnownKoenigs) {
    const ReportBundle b = run(config("moebius(0.5)", {{"koenigs", {}}, {"compare_known_koenigs", {{"radius", 0.8}}}}));
    EXPECT_LE(result(b, 1)["result"]["sup"].get<double>(), 1e-8);
}

TEST(Run, NormTargets) {
    ExperimentConfig c;
    c.ops = {{"seminorm", {{"target", "koenigs:moebius(0.5)"}, {"alpha", 2}}},
             {"lipnorm", {{"target", "eigen:lens(0.5):2"}, {"alpha", 2}}},
             {"supnorm", {{"target", "weighted:linear(0.5):1 + z/2:1"}}},
             {"seminorm", {{"target", "z^2"}, {"alpha", 1}}}};
    const ReportBundle b = run(c);
    EXPECT_EQ(b.exit_code, 0);
    EXPECT_NEAR(result(b, 0)["result"]["value"].get<double>(), 4.0, 4e-3);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(result(b, i)["status"], "ok") << i;
}

TEST(Run, ViolationExitOnlyWhenRequested) {
    ExperimentConfig c = config("linear(0.5)", {{"eq12", {}}});
    EXPECT_EQ(run(c).exit_code, exit_code::ok);
    c.fail_on_violation = true;
    EXPECT_EQ(run(c).exit_code, exit_code::violation);
}

TEST(Run, NonConvergenceIsReportedAndRunContinues) {
    const ReportBundle b = run(config("moebius(0.9)", {{"koenigs", {{"k_max", 3}}}, {"eq12", {}}}));
    EXPECT_EQ(b.exit_code, exit_code::nonconvergence);
    EXPECT_EQ(result(b, 0)["status"], "nonconvergence");
    EXPECT_EQ(result(b, 1)["status"], "ok");
}

TEST(Run, AdmissibilityAndParseFailures) {
    EXPECT_THROW(run(config("z^2", {{"koenigs", {}}})), ConfigError);
    EXPECT_THROW(run(config("z/(2 -", {})), ConfigError);
    const ReportBundle v = run(config("z^2", {{"validate", {}}}));
    EXPECT_EQ(result(v, 0)["result"]["failures"][0], "derivative at origin is zero");
    const ReportBundle e = run(config("linear(0.5)", {{"th23", {{"epsilon", 5.0}}}}));
    EXPECT_EQ(e.exit_code, exit_code::usage);
}

TEST(Run, DomainErrorCellsAreTagged) {
    // The lens map is clipped at |z| = 0.9999; the outermost standard level lies beyond.
    ExperimentConfig c = config("lens(0.5)", {{"eq12", {{"grid", {{"depth", 16}}}}}});
    const ReportBundle b = run(c);
    const std::string& csv = b.tables.at("op00_eq12.csv");
    EXPECT_NE(csv.find("domain-error"), std::string::npos);
    EXPECT_EQ(csv.find("nan"), std::string::npos);
    EXPECT_EQ(csv.find("inf"), std::string::npos);
}

TEST(Run, ByteIdenticalReruns) {
    ExperimentConfig c = config("lens(0.5)", {{"koenigs", {}},
                                              {"condition_A", {{"alpha", 1}}},
                                              {"compactness", {{"alpha", 1}}},
                                              {"iterate_supnorm", {{"k_max", 4}}}});
    c.weight = "1 + z/2";
    const ReportBundle a = run(c);
    const ReportBundle b = run(c);
    EXPECT_EQ(report_text(a), report_text(b));
    EXPECT_EQ(a.tables, b.tables);
}

TEST(Csv, FullPrecisionCells) {
    EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
    EXPECT_EQ(csv_number(std::numeric_limits<double>::infinity()), "domain-error");
    EXPECT_EQ(csv_number(std::nan("")), "domain-error");
}
