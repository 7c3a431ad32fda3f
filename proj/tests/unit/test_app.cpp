#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include <rlms_app/catalog.hpp>
#include <rlms_app/checks.hpp>
#include <rlms_app/config.hpp>
#include <rlms_app/report.hpp>

#include "generators.hpp"

namespace rlms::app {
namespace {

namespace fs = std::filesystem;

const char* const kMinimal = R"({
  "name": "tiny",
  "N": 8,
  "horizon": 40,
  "trials": 3,
  "master_seed": 5,
  "system": {"kind": "general_sparse", "k": 2},
  "input": {"kind": "white"},
  "noise_variance": 0.1,
  "filters": [
    {"name": "NLMS", "step": {"kind": "nlms", "alpha": 1.0}},
    {"name": "ZA NLMS", "step": {"kind": "nlms", "alpha": 1.0},
     "penalty": {"kind": "l1", "delta": 0.01},
     "rho": {"rule": "white_nlms"},
     "eta": {"mode": "true"}}
  ]
})";

std::string error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("rlms_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        auto& row = rows.emplace_back();
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) {
            row.push_back(cell);
        }
    }
    return rows;
}

TEST(Catalog, ListsAllSevenBuiltins)
{
    std::vector<std::string> names;
    for (const auto& b : builtin_scenarios()) {
        names.emplace_back(b.name);
    }
    const std::vector<std::string> expected{"fig4-white-sparse",      "fig5-eta-sensitivity", "fig7-correlated-sparse",
                                            "fig9-tracking",          "fig11-group-white",    "fig12-group-correlated",
                                            "fig13-group-tracking"};
    EXPECT_EQ(names, expected);
    EXPECT_EQ(find_builtin("nope"), nullptr);
}

TEST(Catalog, EveryBuiltinParsesAndHasChecks)
{
    for (const auto& b : builtin_scenarios()) {
        ScenarioConfig c;
        ASSERT_NO_THROW(c = parse_config(b.document)) << b.name;
        EXPECT_EQ(c.scenario.name, b.name);
        EXPECT_TRUE(has_checks(b.name));
        EXPECT_FALSE(c.description.empty());
    }
}

TEST(Catalog, WhiteSparseMatchesExperimentDescription)
{
    const auto c = parse_config(find_builtin("fig4-white-sparse")->document).scenario;
    EXPECT_EQ(c.n, 100u);
    EXPECT_EQ(c.trials, 100u);
    EXPECT_EQ(std::get<GeneralSparseSpec>(c.system.kind).k, 5u);
    EXPECT_EQ(c.noise.variance, 0.1);
    EXPECT_EQ(std::get<WhiteGaussian>(c.input).variance, 1.0);
    ASSERT_EQ(c.filters.size(), 3u);
    EXPECT_EQ(c.filters[1].eta.mode, EtaSpec::Mode::TrueValue);
    EXPECT_EQ(c.filters[1].penalty->kind(), PenaltyKind::L1);
    EXPECT_EQ(c.filters[2].eta.value, 5.0);
    EXPECT_EQ(c.filters[2].penalty->kind(), PenaltyKind::WeightedL1);
    for (const auto& f : c.filters) {
        EXPECT_EQ(std::get<Normalized>(f.step).alpha, 1.0);
    }
}

TEST(Catalog, GroupWhiteHasTwentyGroupsOfTen)
{
    const auto c = parse_config(find_builtin("fig11-group-white")->document).scenario;
    EXPECT_EQ(c.n, 200u);
    EXPECT_EQ(c.trials, 200u);
    const auto& blocks = std::get<GroupSparseSpec>(c.system.kind).blocks;
    ASSERT_EQ(blocks.size(), 2u);
    EXPECT_EQ(blocks[0].start, 35u);
    EXPECT_EQ(blocks[1].start, 106u);
    EXPECT_EQ(blocks[0].length, 15u);
    const auto& grza = c.filters[2];
    ASSERT_TRUE(grza.penalty);
    EXPECT_EQ(grza.penalty->kind(), PenaltyKind::WeightedGroupL12);
    ASSERT_EQ(grza.penalty->partition().group_count(), 20u);
    for (std::size_t j = 0; j < 20; ++j) {
        EXPECT_EQ(grza.penalty->partition().group(j).size(), 10u);
    }
    EXPECT_EQ(grza.eta.value, 2.0);
    EXPECT_EQ(c.filters[1].eta.value, 30.0);
}

TEST(Catalog, CorrelatedAndTrackingScenarios)
{
    const auto fig7 = parse_config(find_builtin("fig7-correlated-sparse")->document).scenario;
    const auto ar = std::get<Ar1>(fig7.input);
    EXPECT_EQ(ar.a, 0.8);
    EXPECT_TRUE(ar.normalize);
    EXPECT_TRUE(std::holds_alternative<WhiteInputNlmsRho>(fig7.filters[1].rho.rule));
    EXPECT_TRUE(std::holds_alternative<CorrelatedInputRho>(fig7.filters[2].rho.rule));

    const auto fig9 = parse_config(find_builtin("fig9-tracking")->document).scenario;
    ASSERT_EQ(fig9.system.events.size(), 1u);
    EXPECT_EQ(fig9.system.events[0].iteration, 750u);
    EXPECT_EQ(std::get<ShiftLeft>(fig9.system.events[0].event).taps, 10u);

    const auto fig12 = parse_config(find_builtin("fig12-group-correlated")->document).scenario;
    EXPECT_EQ(std::get<Ar1>(fig12.input).a, 0.8);

    const auto fig13 = parse_config(find_builtin("fig13-group-tracking")->document).scenario;
    ASSERT_EQ(fig13.system.events.size(), 2u);
    EXPECT_EQ(fig13.system.events[0].iteration, 2000u);
    EXPECT_EQ(std::get<ShiftRight>(fig13.system.events[0].event).taps, 50u);
    EXPECT_EQ(fig13.system.events[1].iteration, 4000u);
    EXPECT_TRUE(std::holds_alternative<ResetActiveValues>(fig13.system.events[1].event));

    const auto fig5 = parse_config(find_builtin("fig5-eta-sensitivity")->document);
    ASSERT_TRUE(fig5.sweep);
    EXPECT_EQ(fig5.sweep->probe_iteration, 750u);
    EXPECT_EQ(fig5.sweep->points, 21u);
}

TEST(Config, BuiltinsRoundTrip)
{
    for (const auto& b : builtin_scenarios()) {
        const auto first = serialize_config(parse_config(b.document));
        const auto again = serialize_config(parse_config(first));
        EXPECT_EQ(first, again) << b.name;
    }
}

TEST(Config, DefaultsAreWrittenOut)
{
    const auto text = serialize_config(parse_config(kMinimal));
    const auto c = parse_config(text);
    EXPECT_EQ(std::get<WhiteGaussian>(c.scenario.input).variance, 1.0);
    EXPECT_EQ(c.scenario.filters[1].rho.scale, 1.0);
    EXPECT_EQ(c.scenario.filters[1].eta.factor, 1.0);
    EXPECT_NE(text.find("\"scale\""), std::string::npos);
    EXPECT_NE(text.find("\"events\""), std::string::npos);
}

ScenarioConfig random_config(RandomStream& rng)
{
    ScenarioConfig c;
    auto& s = c.scenario;
    s.name = "random-" + std::to_string(rng() % 1000);
    c.description = rng.uniform() < 0.5 ? "" : "described \"scenario\"";
    s.n = testing::uniform_index(rng, 2, 30);
    s.horizon = testing::uniform_index(rng, 0, 500);
    s.trials = testing::uniform_index(rng, 1, 50);
    s.master_seed = rng();
    if (rng.uniform() < 0.5) {
        s.system.kind = GeneralSparseSpec{testing::uniform_index(rng, 0, s.n)};
    } else {
        s.system.kind = GroupSparseSpec{{{0, 1}, {s.n / 2, s.n - s.n / 2}}};
    }
    std::size_t at = 0;
    for (std::size_t e = testing::uniform_index(rng, 0, 3); e > 0; --e) {
        at += testing::uniform_index(rng, 0, 100);
        const auto pick = rng() % 3;
        s.system.events.push_back({at, pick == 0   ? TrackingEvent{ShiftLeft{rng() % 5}}
                                       : pick == 1 ? TrackingEvent{ShiftRight{rng() % 5}}
                                                   : TrackingEvent{ResetActiveValues{}}});
    }
    s.input = rng.uniform() < 0.5 ? InputProcess{WhiteGaussian{testing::uniform_real(rng, 0.1, 3.0)}}
                                  : InputProcess{Ar1{testing::uniform_real(rng, -0.99, 0.99), rng.uniform() < 0.5}};
    s.noise.variance = rng.uniform() < 0.2 ? 0.0 : testing::uniform_real(rng, 0.0, 1.0);
    const std::size_t nf = testing::uniform_index(rng, 1, 4);
    for (std::size_t f = 0; f < nf; ++f) {
        FilterSpec spec;
        spec.name = "f" + std::to_string(f);
        const bool normalized = rng.uniform() < 0.5;
        spec.step = normalized ? StepSizePolicy{Normalized{testing::uniform_real(rng, 0.1, 1.9)}}
                               : StepSizePolicy{ConstantMu{testing::uniform_real(rng, 1e-4, 0.1)}};
        if (rng.uniform() < 0.75) {
            const auto kind = testing::kAllKinds[rng() % 4];
            const auto part = rng.uniform() < 0.5 ? testing::random_partition(rng, s.n)
                                                  : GroupPartition::contiguous(s.n, testing::uniform_index(rng, 1, s.n));
            spec.penalty = testing::make_penalty(kind, part, std::pow(10.0, testing::uniform_real(rng, -5.0, -1.0)));
            const auto pick = rng() % 3;
            if (pick == 0) {
                spec.rho.rule = FixedRho{testing::uniform_real(rng, 0.0, 0.1)};
            } else if (pick == 1) {
                spec.rho.rule = CorrelatedInputRho{};
            } else if (normalized) {
                spec.rho.rule = WhiteInputNlmsRho{};
            } else {
                spec.rho.rule = WhiteInputLmsRho{testing::uniform_real(rng, 0.1, 3.0)};
            }
            spec.rho.scale = testing::uniform_real(rng, 0.01, 2.0);
            spec.eta = rng.uniform() < 0.5 ? EtaSpec{EtaSpec::Mode::Fixed, testing::uniform_real(rng, 0.0, 10.0),
                                                     testing::uniform_real(rng, 0.1, 10.0)}
                                           : EtaSpec{EtaSpec::Mode::TrueValue, 0.0, testing::uniform_real(rng, 0.1, 10.0)};
        }
        s.filters.push_back(std::move(spec));
    }
    return c;
}

TEST(Config, RandomConfigsRoundTripLosslessly)
{
    for (std::uint64_t c = 0; c < 300; ++c) {
        auto rng = testing::case_stream(40, c);
        const auto config = random_config(rng);
        ASSERT_NO_THROW(validate(config.scenario)) << c;
        const auto text = serialize_config(config);
        const auto parsed = parse_config(text);
        ASSERT_EQ(serialize_config(parsed), text);
        const auto& a = config.scenario;
        const auto& b = parsed.scenario;
        ASSERT_EQ(a.master_seed, b.master_seed);
        ASSERT_EQ(a.noise.variance, b.noise.variance);
        ASSERT_EQ(a.filters.size(), b.filters.size());
        for (std::size_t f = 0; f < a.filters.size(); ++f) {
            ASSERT_EQ(a.filters[f].penalty, b.filters[f].penalty);
            ASSERT_EQ(a.filters[f].eta, b.filters[f].eta);
            ASSERT_EQ(a.filters[f].rho.scale, b.filters[f].rho.scale);
            ASSERT_EQ(a.filters[f].rho.rule.index(), b.filters[f].rho.rule.index());
        }
    }
}

TEST(Config, UnknownKeysAreNamed)
{
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"colour=1"})); }).find("'colour'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"filters.1.penalty.foo=3"})); })
                  .find("'filters[1].penalty.foo'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"system.blocks=[]"})); }).find("'system.blocks'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"filters.1.penalty.group_size=2"})); })
                  .find("'filters[1].penalty.group_size'"),
              std::string::npos);
}

TEST(Config, TypeAndPresenceErrors)
{
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"N=-3"})); }).find("'N'"), std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"trials=2.5"})); }).find("'trials'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"noise_variance=loud"})); }).find("'noise_variance'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"filters.0.rho={\"rule\":\"white_nlms\"}"})); })
                  .find("'filters[0].rho'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"filters.1.penalty.kind=l0"})); })
                  .find("'filters[1].penalty.kind'"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config(R"({"name": "x"})"); }).find("missing key 'N'"), std::string::npos);
    EXPECT_NE(error_of([] { parse_config("{ not json"); }).find("malformed JSON"), std::string::npos);
    EXPECT_NE(error_of([] { parse_config(apply_overrides(kMinimal, {"system.k=9"})); }).find("invalid scenario"),
              std::string::npos);
}

TEST(Config, OverridesAddressNestedValues)
{
    const auto c = parse_config(apply_overrides(
        kMinimal, {"trials=1", "filters.1.eta={\"mode\":\"fixed\",\"value\":4}", "input.kind=ar1", "input.a=0.5"}));
    EXPECT_EQ(c.scenario.trials, 1u);
    EXPECT_EQ(c.scenario.filters[1].eta.mode, EtaSpec::Mode::Fixed);
    EXPECT_EQ(c.scenario.filters[1].eta.value, 4.0);
    EXPECT_EQ(std::get<Ar1>(c.scenario.input).a, 0.5);
    const auto renamed = parse_config(apply_overrides(kMinimal, {"name=a=b"}));
    EXPECT_EQ(renamed.scenario.name, "a=b");
}

TEST(Config, MalformedOverrides)
{
    EXPECT_THROW(apply_overrides(kMinimal, {"trials"}), ConfigError);
    EXPECT_THROW(apply_overrides(kMinimal, {"=3"}), ConfigError);
    EXPECT_THROW(apply_overrides(kMinimal, {"filters.7.name=x"}), ConfigError);
    EXPECT_THROW(apply_overrides(kMinimal, {"trials.x=3"}), ConfigError);
    EXPECT_THROW(apply_overrides(kMinimal, {"filters..name=x"}), ConfigError);
}

TEST(Config, LoadResolvesBuiltinsFilesAndSeed)
{
    const auto c = load_config("fig4-white-sparse", {"trials=2"}, 123);
    EXPECT_EQ(c.scenario.trials, 2u);
    EXPECT_EQ(c.scenario.master_seed, 123u);
    EXPECT_THROW(load_source("/nonexistent/scenario.json"), ConfigError);

    TempDir dir;
    fs::create_directories(dir.path());
    const auto path = dir.path() / "tiny.json";
    std::ofstream(path) << kMinimal;
    EXPECT_EQ(load_config(path.string(), {}).scenario.name, "tiny");
}

TEST(Config, SweepValidation)
{
    const std::string base(find_builtin("fig5-eta-sensitivity")->document);
    EXPECT_THROW(parse_config(apply_overrides(base, {"sweep.filters=[\"nope\"]"})), ConfigError);
    EXPECT_THROW(parse_config(apply_overrides(base, {"sweep.probe_iteration=751"})), ConfigError);
    EXPECT_THROW(parse_config(apply_overrides(base, {"sweep.factor_min=0"})), ConfigError);
    EXPECT_THROW(parse_config(apply_overrides(base, {"sweep.points=1"})), ConfigError);
}

TEST(Report, NumberFormattingRoundTrips)
{
    for (std::uint64_t c = 0; c < 2000; ++c) {
        auto rng = testing::case_stream(41, c);
        const double v = std::ldexp(rng.uniform(), static_cast<int>(rng() % 200) - 100);
        const auto text = format_number(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        ASSERT_EQ(back, v) << text;
    }
}

TEST(Report, MsdCsvSchemaAndDbColumn)
{
    auto config = parse_config(kMinimal);
    const auto artifacts = execute(config, {1});
    const auto rows = read_csv(msd_csv(artifacts.traces[1]));
    ASSERT_EQ(rows.size(), config.scenario.horizon + 2);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"iteration", "msd_linear", "msd_db", "stderr"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 4u);
        EXPECT_EQ(rows[i][0], std::to_string(i - 1));
        const double lin = std::stod(rows[i][1]);
        const double db = std::stod(rows[i][2]);
        EXPECT_NEAR(db, 10.0 * std::log10(lin), 1e-9 * std::abs(db));
    }
}

TEST(Report, SingleTrialHasZeroStderr)
{
    const auto config = parse_config(apply_overrides(kMinimal, {"trials=1"}));
    const auto artifacts = execute(config, {1});
    const auto rows = read_csv(msd_csv(artifacts.traces[0]));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][3], "0");
    }
}

TEST(Report, FileNamesAreSanitised)
{
    EXPECT_EQ(msd_file_name("ZA NLMS"), "msd_ZA_NLMS.csv");
    EXPECT_EQ(msd_file_name("RZA-NLMS.v2"), "msd_RZA-NLMS.v2.csv");
    EXPECT_EQ(msd_file_name("a/b"), "msd_a_b.csv");
}

TEST(Report, WritesAllArtifactsAndResolvedConfigReproduces)
{
    TempDir a;
    TempDir b;
    const auto config = parse_config(kMinimal);
    const auto written = write_outputs(a.path(), config, execute(config, {1}));
    EXPECT_EQ(written.size(), 4u);
    for (const char* name : {"msd_NLMS.csv", "msd_ZA_NLMS.csv", "summary.csv", "resolved_config.json"}) {
        EXPECT_TRUE(fs::exists(a.path() / name)) << name;
    }
    const auto summary = read_csv(read_file(a.path() / "summary.csv"));
    ASSERT_EQ(summary.size(), 3u);
    EXPECT_EQ(summary[0], (std::vector<std::string>{"filter", "steady_state_msd_linear", "steady_state_msd_db"}));

    const auto resolved = parse_config(read_file(a.path() / "resolved_config.json"));
    write_outputs(b.path(), resolved, execute(resolved, {2}));
    for (const char* name : {"msd_NLMS.csv", "msd_ZA_NLMS.csv", "summary.csv", "resolved_config.json"}) {
        EXPECT_EQ(read_file(a.path() / name), read_file(b.path() / name)) << name;
    }
}

TEST(Report, SeedChangesNumbersNotStructure)
{
    const auto c1 = parse_config(kMinimal);
    const auto c2 = parse_config(apply_overrides(kMinimal, {"master_seed=6"}));
    const auto r1 = read_csv(msd_csv(execute(c1, {1}).traces[0]));
    const auto r2 = read_csv(msd_csv(execute(c2, {1}).traces[0]));
    ASSERT_EQ(r1.size(), r2.size());
    EXPECT_EQ(r1[0], r2[0]);
    EXPECT_NE(r1[5][1], r2[5][1]);
}

TEST(Report, SweepArtifact)
{
    TempDir dir;
    const auto config = parse_config(apply_overrides(find_builtin("fig5-eta-sensitivity")->document,
                                                     {"trials=2", "horizon=60", "sweep.probe_iteration=50",
                                                      "sweep.points=3"}));
    write_outputs(dir.path(), config, execute(config, {1}));
    const auto rows = read_csv(read_file(dir.path() / "sweep.csv"));
    ASSERT_EQ(rows.size(), 1u + 3u * 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"eta_factor", "filter", "probe_iteration", "msd_linear", "msd_db"}));
    EXPECT_EQ(rows[1][2], "50");
}

TEST(Report, UnwritableDirectoryFails)
{
    TempDir dir;
    fs::create_directories(dir.path());
    const auto blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    const auto config = parse_config(kMinimal);
    EXPECT_THROW(write_outputs(blocker / "sub", config, execute(config, {1})), OutputError);
}

TEST(Checks, RegistryAndFormatting)
{
    EXPECT_FALSE(has_checks("tiny"));
    const auto config = parse_config(kMinimal);
    EXPECT_THROW(evaluate_checks("tiny", config, RunArtifacts{}), std::invalid_argument);
    const Assertion a{"gain", 1.5, ">= 1", true};
    EXPECT_EQ(format_assertion(a), "[PASS] gain: measured=1.5, threshold >= 1");
}

TEST(Checks, MissingFilterIsReported)
{
    const auto config = load_config("fig4-white-sparse", {"trials=2", "horizon=50"});
    auto artifacts = execute(config, {1});
    artifacts.traces.pop_back();
    EXPECT_THROW(evaluate_checks("fig4-white-sparse", config, artifacts), std::invalid_argument);
}

} // namespace
} // namespace rlms::app
