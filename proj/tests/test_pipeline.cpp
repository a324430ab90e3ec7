#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pvl/error.hpp"
#include "pvl/field_io.hpp"
#include "pvl/pipeline.hpp"
#include "pvl/pressure.hpp"
#include "pvl/synth.hpp"

using namespace pvl;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PVL_TEST_DATA;

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pvl-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::Parameter;
}

} // namespace

TEST(RunConfig, RoundTripsThroughJson)
{
    RunConfig c;
    c.grid = {3, 32, 2.5};
    c.generator = {"generic", {{"bumps", 3}, {"support_fraction", 0.3}}, true, 1234567890123ULL};
    c.pressure.solver = "cell_average";
    c.checks.push_back({"hyperplane", {{"count", {7}}, {"seed", {3}}}, 1e-4});
    c.checks.push_back({"sphere_formula", {{"radius", {0.0, 0.25, 0.5}}}, std::nullopt});
    c.output = {"somewhere", "csv", false};
    const auto text = c.to_json();
    const auto back = RunConfig::parse(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.to_json(), text);

    RunConfig m;
    m.generator.name = "axisymmetric";
    m.meridional = MeridionalBlock{};
    m.meridional->bumps.push_back({2.0, 0.5, 0.5, -1.0});
    m.checks.push_back({"axisymmetric_decay", {{"rho1", {0.5}}, {"rho2", {3.0}}}, std::nullopt});
    EXPECT_EQ(RunConfig::parse(m.to_json()), m);

    RunConfig e;
    e.generator.name = "blobs";
    e.evolve = EvolveBlock{0.02, 0.4, 1e-3, 2.0, 4, true};
    EXPECT_EQ(RunConfig::parse(e.to_json()), e);
}

TEST(RunConfig, ParseErrorsCarryLineAndColumn)
{
    try {
        RunConfig::load(kData / "malformed.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Config);
        EXPECT_NE(std::string(e.what()).find("line 3, column"), std::string::npos) << e.what();
    }
}

TEST(RunConfig, RejectsUnknownNamesAndRanges)
{
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"grid": {"dims": 2}})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"generator": {"name": "nope"}})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"checks": [{"identity": "nope"}]})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"checks": [{"identity": "global", "params": {"x": 1}}]})"); }),
              ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"grid": {"points": 100}})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"grid": {"dim": 3}, "generator": {"name": "radial_vortex"}})"); }),
              ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"checks": [{"identity": "axisymmetric_decay"}]})"); }),
              ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"evolve": {"window": 3}})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"generator": {"seed": -1}})"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { RunConfig::parse(R"({"output": {"format": "xml"}})"); }), ErrorCode::Config);
}

TEST(Run, ZeroFieldAllChecksPass)
{
    const auto dir = scratch("zero");
    const auto result = run(RunConfig::load(kData / "zero.json"), dir);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.summary.fail, 0);
    EXPECT_EQ(result.summary.hypothesis_violated, 0);
    EXPECT_GT(result.summary.pass, 40);
    for (const char* f : {"reports.json", "reports.csv", "summary.json", "velocity.pvlf", "pressure.pvlf", "config.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_FALSE(fs::exists(dir / "FAILED"));
}

TEST(Run, RadialVortexTwentyPlanes)
{
    const auto dir = scratch("vortex");
    const auto result = run(RunConfig::load(kData / "vortex_planes.json"), dir);
    ASSERT_EQ(result.reports.size(), 20u);
    EXPECT_EQ(result.summary.pass, 20);
    EXPECT_EQ(result.exit_code, 0);
    for (const auto& r : result.reports)
        EXPECT_EQ(r.notes.at("seed"), "1");
}

TEST(Run, NegativeControlIsNotAFailure)
{
    const auto dir = scratch("aniso");
    const auto result = run(RunConfig::load(kData / "anisotropic_sweep.json"), dir);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.summary.fail, 0);
    EXPECT_EQ(result.summary.hypothesis_violated, result.summary.total());
}

TEST(Run, EvolveWritesSnapshotsAndSeries)
{
    const auto dir = scratch("blobs");
    const auto result = run(RunConfig::load(kData / "blobs_evolve.json"), dir);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "snapshot_000.pvlf"));
    EXPECT_TRUE(fs::exists(dir / "snapshot_002.pvlf"));
    const auto series = slurp(dir / "evolve_series.csv");
    EXPECT_EQ(series.substr(0, series.find('\n')), "t,identity,residual_rel,status");
    EXPECT_EQ(result.reports.size(), 3u * 6u);
}

TEST(Run, MeridionalPipeline)
{
    const auto dir = scratch("merid");
    const auto result = run(RunConfig::load(kData / "meridional_n4.json"), dir);
    ASSERT_EQ(result.reports.size(), 1u);
    EXPECT_EQ(result.reports[0].identity, "axisymmetric_decay");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "meridional.pvlf"));
}

TEST(Run, FailureLeavesMarker)
{
    auto config = RunConfig::load(kData / "blobs_evolve.json");
    config.evolve->window = 0.5;
    const auto dir = scratch("overflow");
    EXPECT_THROW(run(config, dir), Error);
    EXPECT_TRUE(fs::exists(dir / "FAILED"));
    EXPECT_TRUE(fs::exists(dir / "config.json"));
}

TEST(Run, DeterministicOutputs)
{
    auto config = RunConfig::parse(R"({
      "grid": {"dim": 2, "points": 128, "half_width": 4},
      "generator": {"name": "generic", "symmetrize": true, "seed": 99},
      "checks": [{"identity": "hyperplane", "params": {"count": 4}}, {"identity": "weak_form", "params": {"count": 4}},
                 {"identity": "global"}]})");
    const auto a = scratch("det-a"), b = scratch("det-b");
    run(config, a);
    run(config, b);
    EXPECT_EQ(slurp(a / "reports.json"), slurp(b / "reports.json"));
    EXPECT_EQ(slurp(a / "reports.csv"), slurp(b / "reports.csv"));
}

TEST(Verify, ReproducesIntegratedReports)
{
    const auto config = RunConfig::load(kData / "vortex_planes.json");
    const auto dir = scratch("verify");
    const auto integrated = run(config, dir);
    const auto external = verify_external(dir / "velocity.pvlf", std::nullopt, config);
    const auto with_p = verify_external(dir / "velocity.pvlf", dir / "pressure.pvlf", config);
    EXPECT_EQ(reports_to_json(external.reports), reports_to_json(integrated.reports));
    EXPECT_EQ(reports_to_json(with_p.reports), reports_to_json(integrated.reports));
}

TEST(Verify, RejectsDivergentVelocity)
{
    const GridSpec g(2, 256, 4.0);
    auto v = radial_vortex_2d(default_vortex_profile(1.0), g).velocity;
    const auto phi = bump(BumpSpec{{0.0, 0.0, 0.0}, 1.0, 1.0}, g);
    const double s = 1e-2 * v.max_abs() / laplacian(phi).max_abs();
    for (int k = 0; k < 2; ++k)
        v[k] += s * partial_derivative(phi, k, 1);
    const auto dir = scratch("divergent");
    fs::create_directories(dir);
    save_field(dir / "v.pvlf", v);
    EXPECT_EQ(code_of([&] { verify_external(dir / "v.pvlf", std::nullopt, RunConfig{}); }), ErrorCode::Divergence);
}

TEST(Verify, CorruptedPressureFailsWeakForm)
{
    auto config = RunConfig::load(kData / "vortex_planes.json");
    config.checks = {{"weak_form", {{"count", {12}}}, std::nullopt}};
    const auto dir = scratch("corrupt");
    run(config, dir);
    auto p = load_scalar(dir / "pressure.pvlf");
    p += bump(BumpSpec{{0.3, -0.2, 0.0}, 0.5, 0.05 * p.max_abs()}, p.grid());
    save_field(dir / "corrupted.pvlf", p);
    const auto clean = verify_external(dir / "velocity.pvlf", dir / "pressure.pvlf", config);
    const auto bad = verify_external(dir / "velocity.pvlf", dir / "corrupted.pvlf", config);
    EXPECT_EQ(clean.exit_code, 0);
    EXPECT_NE(bad.exit_code, 0);
    EXPECT_GT(bad.summary.fail, 0);
}

TEST(Verify, MalformedFileNamesHeaderField)
{
    const auto dir = scratch("malformed");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.pvlf", std::ios::binary) << "NOPE";
    try {
        verify_external(dir / "bad.pvlf", std::nullopt, RunConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Format);
        EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
    }
}
