// pvl: batch driver for synthesis, pressure solves, identity checks and evolution runs.
//
// Exit status: 0 when every check that is not hypothesis-violated passes,
// 1 when some check fails, 2 on configuration or runtime errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pvl/error.hpp"
#include "pvl/field_io.hpp"
#include "pvl/pipeline.hpp"
#include "pvl/pressure.hpp"
#include "pvl/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string format;
};

pvl::RunConfig load_config(const Globals& g)
{
    pvl::RunConfig c = g.config.empty() ? pvl::RunConfig{} : pvl::RunConfig::load(g.config);
    if (g.seed)
        c.generator.seed = *g.seed;
    if (!g.format.empty() && g.format != "summary")
        c.output.format = g.format;
    if (!g.out.empty())
        c.output.directory = g.out;
    c.validate();
    return c;
}

int threads_from_env()
{
    const char* env = std::getenv("PVL_THREADS");
    if (env == nullptr || *env == '\0')
        return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    pvl::require(*end == '\0' && n >= 1, pvl::ErrorCode::Config, "PVL_THREADS must be a positive integer");
    return static_cast<int>(n);
}

void print_summary(const pvl::RunResult& r)
{
    std::cout << "pass " << r.summary.pass << ", fail " << r.summary.fail << ", hypothesis-violated "
              << r.summary.hypothesis_violated << '\n';
}

int finish_run(const pvl::RunResult& r, const fs::path& dir)
{
    print_summary(r);
    std::cout << "artifacts: " << dir.string() << '\n';
    return r.exit_code;
}

int cmd_synth(const Globals& g)
{
    const auto config = load_config(g);
    const fs::path dir = config.output.directory;
    fs::create_directories(dir);
    const auto field = pvl::synthesize(config);
    if (field.meridional) {
        pvl::save_field(dir / "meridional.pvlf", *field.meridional);
        std::cout << (dir / "meridional.pvlf").string() << '\n';
    } else {
        pvl::save_field(dir / "velocity.pvlf", *field.velocity);
        std::cout << (dir / "velocity.pvlf").string() << '\n';
    }
    return 0;
}

int cmd_pressure(const Globals& g, const std::string& input, const std::string& output)
{
    const auto config = load_config(g);
    auto field = pvl::load_field(input);
    if (auto* mf = std::get_if<pvl::MeridionalField>(&field)) {
        pvl::save_field(output, pvl::pressure_meridional(std::move(*mf), config.pressure.meridional_tolerance));
    } else if (auto* v = std::get_if<pvl::VectorField>(&field)) {
        pvl::PressureOptions options;
        if (config.pressure.solver == "cell_average")
            options.kernel = pvl::GreenKernel::SampledCellAverage;
        pvl::save_field(output, pvl::pressure_freespace(*v, options));
    } else {
        pvl::fail(pvl::ErrorCode::UnsupportedInput, input + ": expected a velocity or meridional field");
    }
    std::cout << output << '\n';
    return 0;
}

int cmd_run(const Globals& g, bool checks, bool evolve)
{
    auto config = load_config(g);
    if (!checks)
        config.checks.clear();
    if (!evolve)
        config.evolve.reset();
    pvl::require(!evolve || checks || config.evolve.has_value(), pvl::ErrorCode::Config,
                 "the configuration has no evolve block");
    const fs::path dir = config.output.directory;
    return finish_run(pvl::run(config, dir), dir);
}

int cmd_verify(const Globals& g, const std::string& velocity, const std::string& pressure)
{
    const auto config = load_config(g);
    std::optional<fs::path> p;
    if (!pressure.empty())
        p = pressure;
    const auto result = pvl::verify_external(velocity, p, config);
    const fs::path dir = config.output.directory;
    pvl::write_reports(dir, result, config.output.format);
    return finish_run(result, dir);
}

int cmd_report(const Globals& g, const std::string& input)
{
    std::ifstream in(input, std::ios::binary);
    pvl::require(static_cast<bool>(in), pvl::ErrorCode::Format, "cannot open " + input);
    std::stringstream buf;
    buf << in.rdbuf();
    std::map<std::string, std::string> metadata;
    const auto reports = pvl::reports_from_json(buf.str(), &metadata);
    const auto format = g.format.empty() ? std::string("summary") : g.format;
    if (format == "csv") {
        std::cout << pvl::reports_to_csv(reports);
    } else if (format == "json") {
        std::cout << pvl::reports_to_json(reports, metadata);
    } else {
        for (const auto& r : reports)
            if (r.status != pvl::Status::Pass)
                std::cout << pvl::to_string(r.status) << "  " << r.identity << "  residual_rel " << r.residual_rel
                          << '\n';
        const auto s = pvl::summarize(reports);
        std::cout << "pass " << s.pass << ", fail " << s.fail << ", hypothesis-violated " << s.hypothesis_violated
                  << '\n';
        return s.fail == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pressure-velocity identity checks for incompressible flows"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "artifact directory (overrides output.directory)");
    app.add_option("--seed", g.seed, "generator seed (overrides generator.seed)");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv", "both", "summary"}));

    auto* synth = app.add_subcommand("synth", "write the configured field as PVLF");
    std::string p_in, p_out = "pressure.pvlf";
    auto* pressure = app.add_subcommand("pressure", "solve for the pressure of a PVLF velocity field");
    pressure->add_option("input", p_in, "velocity or meridional PVLF file")->required()->check(CLI::ExistingFile);
    pressure->add_option("-o,--output", p_out, "output PVLF file");
    auto* check = app.add_subcommand("check", "synthesize, solve and run the configured checks");
    auto* evolve = app.add_subcommand("evolve", "run the evolve block with windowed identity tracking");
    auto* run = app.add_subcommand("run", "full pipeline: checks followed by the evolve block");
    std::string v_file, p_file;
    auto* verify = app.add_subcommand("verify", "run the configured checks on external PVLF fields");
    verify->add_option("velocity", v_file, "velocity PVLF file")->required()->check(CLI::ExistingFile);
    verify->add_option("--pressure", p_file, "pressure PVLF file; solved for when absent")->check(CLI::ExistingFile);
    std::string r_file;
    auto* report = app.add_subcommand("report", "summarize or convert a reports.json file");
    report->add_option("input", r_file, "reports.json")->required()->check(CLI::ExistingFile);

    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        threads_from_env();
        if (synth->parsed())
            return cmd_synth(g);
        if (pressure->parsed())
            return cmd_pressure(g, p_in, p_out);
        if (check->parsed())
            return cmd_run(g, true, false);
        if (evolve->parsed())
            return cmd_run(g, false, true);
        if (run->parsed())
            return cmd_run(g, true, true);
        if (verify->parsed())
            return cmd_verify(g, v_file, p_file);
        if (report->parsed())
            return cmd_report(g, r_file);
    } catch (const pvl::Error& e) {
        std::cerr << "pvl: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pvl: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
