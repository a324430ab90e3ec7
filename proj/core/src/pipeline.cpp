#include "pvl/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pvl/error.hpp"
#include "pvl/field_io.hpp"
#include "pvl/pressure.hpp"
#include "pvl/synth.hpp"

namespace pvl {

bool operator==(const MeridionalBlock& a, const MeridionalBlock& b)
{
    auto same = [](const MeridionalBump& x, const MeridionalBump& y) {
        return x.rho_center == y.rho_center && x.z_center == y.z_center && x.radius == y.radius &&
               x.amplitude == y.amplitude;
    };
    return a.ambient_dim == b.ambient_dim && a.n_rho == b.n_rho && a.n_z == b.n_z && a.rho_max == b.rho_max &&
           a.z_half == b.z_half && a.periodic_z == b.periodic_z &&
           std::ranges::equal(a.bumps, b.bumps, same);
}

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::set<std::string> kGenerators{"zero",  "radial_vortex", "generic",      "anisotropic",
                                        "blobs", "taylor_green",  "axisymmetric", "axisymmetric_3d"};

const std::map<std::string, std::set<std::string>> kCheckParams{
    {"hyperplane", {"count", "seed", "offset_fraction"}},
    {"global", {}},
    {"sphere_formula", {"radius"}},
    {"sign_sweep", {"radii", "count"}},
    {"weak_form", {"count", "seed"}},
    {"axisymmetric_decay", {"rho1", "rho2", "sweep_points"}},
};

bool periodic_generator(const std::string& name) { return name == "blobs" || name == "taylor_green"; }

// ---------------------------------------------------------------------------
// config reading

void keys_known(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys)
{
    require(obj.is_object(), ErrorCode::Config, where + ": expected an object");
    for (const auto& [k, _] : obj.items())
        require(std::ranges::find(keys, std::string_view(k)) != keys.end(), ErrorCode::Config,
                where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        return;
    if constexpr (std::is_same_v<T, std::uint64_t>)
        require(it->is_number_unsigned(), ErrorCode::Config, where + "." + key + ": expected an unsigned integer");
    else if constexpr (std::is_same_v<T, int>)
        require(it->is_number_integer(), ErrorCode::Config, where + "." + key + ": expected an integer");
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, where + "." + key + ": " + e.what());
    }
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte)
{
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::vector<double> number_list(const json& value, const std::string& where)
{
    if (value.is_number())
        return {value.get<double>()};
    require(value.is_array(), ErrorCode::Config, where + ": expected a number or a list of numbers");
    std::vector<double> out;
    for (const auto& x : value) {
        require(x.is_number(), ErrorCode::Config, where + ": expected a number or a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ojson number_list_json(const std::vector<double>& xs)
{
    if (xs.size() == 1)
        return xs.front();
    ojson a = ojson::array();
    for (double x : xs)
        a.push_back(x);
    return a;
}

GridSpec grid_of(const GridBlock& g) { return GridSpec(g.dim, g.points, g.half_width); }

MeridionalGrid meridional_grid(const MeridionalBlock& m)
{
    return {m.n_rho, m.n_z, m.rho_max, m.z_half, m.periodic_z};
}

double param(const std::map<std::string, double>& params, const std::string& key, double fallback)
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::vector<double> param_list(const CheckBlock& c, const std::string& key)
{
    const auto it = c.params.find(key);
    return it == c.params.end() ? std::vector<double>{} : it->second;
}

double param_scalar(const CheckBlock& c, const std::string& key, double fallback)
{
    const auto xs = param_list(c, key);
    return xs.empty() ? fallback : xs.front();
}

std::uint64_t param_seed(const CheckBlock& c, std::uint64_t fallback)
{
    const auto xs = param_list(c, "seed");
    return xs.empty() ? fallback : static_cast<std::uint64_t>(xs.front());
}

CheckOptions options_for(const CheckBlock& c, double default_tolerance)
{
    CheckOptions o;
    o.tolerance = c.tolerance.value_or(default_tolerance);
    return o;
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// checks

std::vector<PlaneSpec> random_planes(const GridSpec& grid, int count, std::uint64_t seed, double reach)
{
    SplitMix64 rng(seed);
    std::vector<PlaneSpec> planes;
    for (int i = 0; i < count; ++i) {
        PlaneSpec plane;
        if (grid.dim() == 2) {
            const double theta = rng.uniform(0.0, std::numbers::pi);
            plane.xi = {std::cos(theta), std::sin(theta), 0.0};
        } else {
            const double c = rng.uniform(-1.0, 1.0);
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double s = std::sqrt(1.0 - c * c);
            plane.xi = {s * std::cos(phi), s * std::sin(phi), c};
        }
        const double offset = rng.uniform(-reach, reach);
        for (int k = 0; k < 3; ++k)
            plane.x0[k] = offset * plane.xi[k];
        planes.push_back(plane);
    }
    return planes;
}

void append(std::vector<IdentityReport>& out, std::vector<IdentityReport> more)
{
    for (auto& r : more)
        out.push_back(std::move(r));
}

void run_check(const CheckBlock& c, const RunConfig& config, const VectorField& v, const ScalarField& p,
               std::vector<IdentityReport>& out)
{
    const auto& g = v.grid();
    if (c.identity == "hyperplane") {
        const auto options = options_for(c, 1e-3);
        const int count = static_cast<int>(param_scalar(c, "count", 20));
        const auto seed = param_seed(c, config.generator.seed);
        double support = support_radius(v);
        if (support <= 0.0)
            support = 0.25 * g.half_width();
        const auto planes = random_planes(g, count, seed, param_scalar(c, "offset_fraction", 0.8) * support);
        if (g.dim() == 2) {
            const PressureMultipole far(v);
            for (const auto& plane : planes)
                out.push_back(check_hyperplane(v, p, plane, far, options));
        } else {
            for (const auto& plane : planes)
                out.push_back(check_hyperplane(v, p, plane, options));
        }
    } else if (c.identity == "global") {
        append(out, check_global(v, p, options_for(c, 1e-3)));
    } else if (c.identity == "sphere_formula") {
        auto radii = param_list(c, "radius");
        if (radii.empty())
            radii = {0.0};
        for (double r : radii)
            out.push_back(check_sphere_formula(v, p, r, options_for(c, 1e-3)));
    } else if (c.identity == "sign_sweep") {
        auto radii = param_list(c, "radii");
        if (radii.empty())
            radii = default_sweep_radii(g, static_cast<int>(param_scalar(c, "count", 31)));
        auto sweep = check_sign_sweep(v, p, radii, options_for(c, 1e-3));
        for (auto& r : sweep.reports) {
            r.notes["verdict"] = sweep.verdict;
            r.notes["scope"] = "single snapshot";
        }
        append(out, std::move(sweep.reports));
    } else if (c.identity == "weak_form") {
        const int count = static_cast<int>(param_scalar(c, "count", 50));
        const auto seed = param_seed(c, config.generator.seed);
        const auto tests = weak_form_test_functions(g, count, seed);
        for (std::size_t i = 0; i < tests.size(); ++i) {
            auto r = check_weak_form(v, p, tests[i], options_for(c, 1e-6));
            r.params["test_function"] = static_cast<double>(i);
            r.notes["test_kind"] = i % 3 == 2 ? "ramp" : "bumps";
            out.push_back(std::move(r));
        }
    } else {
        fail(ErrorCode::Config, "identity '" + c.identity + "' does not apply to a velocity field");
    }
}

std::map<std::string, std::string> base_metadata(const RunConfig& config)
{
    std::map<std::string, std::string> m;
    m["generator"] = config.generator.name;
    m["seed"] = std::to_string(config.generator.seed);
    m["symmetrize"] = config.generator.symmetrize ? "true" : "false";
    m["pressure_solver"] = config.pressure.solver;
    if (config.generator.name == "axisymmetric") {
        const auto mb = config.meridional.value_or(MeridionalBlock{});
        m["ambient_dim"] = std::to_string(mb.ambient_dim);
        m["grid"] = std::to_string(mb.n_rho) + "x" + std::to_string(mb.n_z);
    } else {
        m["dim"] = std::to_string(config.grid.dim);
        m["points"] = std::to_string(config.grid.points);
        m["half_width"] = format_double(config.grid.half_width);
    }
    for (const auto& c : config.checks)
        if (c.identity == "sign_sweep")
            m["sign_sweep_scope"] = "single snapshot; the time-global statement is not checked";
    return m;
}

void finish(RunResult& result)
{
    for (auto& r : result.reports)
        r.notes["seed"] = result.metadata["seed"];
    result.summary = summarize(result.reports);
    result.exit_code = result.summary.fail == 0 ? 0 : 1;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Format, "cannot write " + path.string());
    out << text;
}

} // namespace

// ---------------------------------------------------------------------------

RunConfig RunConfig::parse(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        fail(ErrorCode::Config, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    keys_known(doc, "config", {"grid", "generator", "pressure", "checks", "evolve", "meridional", "output"});

    RunConfig c;
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        keys_known(g, "grid", {"dim", "points", "half_width"});
        read(g, "dim", c.grid.dim, "grid");
        read(g, "points", c.grid.points, "grid");
        read(g, "half_width", c.grid.half_width, "grid");
    }
    if (doc.contains("generator")) {
        const auto& g = doc["generator"];
        keys_known(g, "generator", {"name", "params", "symmetrize", "seed"});
        read(g, "name", c.generator.name, "generator");
        read(g, "symmetrize", c.generator.symmetrize, "generator");
        read(g, "seed", c.generator.seed, "generator");
        if (g.contains("params")) {
            require(g["params"].is_object(), ErrorCode::Config, "generator.params: expected an object");
            for (const auto& [k, val] : g["params"].items()) {
                require(val.is_number(), ErrorCode::Config, "generator.params." + k + ": expected a number");
                c.generator.params[k] = val.get<double>();
            }
        }
    }
    if (doc.contains("pressure")) {
        const auto& p = doc["pressure"];
        keys_known(p, "pressure", {"solver", "meridional_tolerance"});
        read(p, "solver", c.pressure.solver, "pressure");
        read(p, "meridional_tolerance", c.pressure.meridional_tolerance, "pressure");
    }
    if (doc.contains("checks")) {
        require(doc["checks"].is_array(), ErrorCode::Config, "checks: expected a list");
        int i = 0;
        for (const auto& item : doc["checks"]) {
            const std::string where = "checks[" + std::to_string(i++) + "]";
            keys_known(item, where, {"identity", "params", "tolerance"});
            require(item.contains("identity"), ErrorCode::Config, where + ": missing 'identity'");
            CheckBlock b;
            read(item, "identity", b.identity, where);
            if (item.contains("tolerance")) {
                double t = 0.0;
                read(item, "tolerance", t, where);
                b.tolerance = t;
            }
            if (item.contains("params")) {
                require(item["params"].is_object(), ErrorCode::Config, where + ".params: expected an object");
                for (const auto& [k, val] : item["params"].items())
                    b.params[k] = number_list(val, where + ".params." + k);
            }
            c.checks.push_back(std::move(b));
        }
    }
    if (doc.contains("evolve")) {
        const auto& e = doc["evolve"];
        keys_known(e, "evolve", {"viscosity", "t_end", "dt", "window", "snapshots", "symmetrize"});
        EvolveBlock b;
        read(e, "viscosity", b.viscosity, "evolve");
        read(e, "t_end", b.t_end, "evolve");
        if (e.contains("dt")) {
            double dt = 0.0;
            read(e, "dt", dt, "evolve");
            b.dt = dt;
        }
        read(e, "window", b.window, "evolve");
        read(e, "snapshots", b.snapshots, "evolve");
        read(e, "symmetrize", b.symmetrize, "evolve");
        c.evolve = b;
    }
    if (doc.contains("meridional")) {
        const auto& m = doc["meridional"];
        keys_known(m, "meridional", {"ambient_dim", "n_rho", "n_z", "rho_max", "z_half", "periodic_z", "bumps"});
        MeridionalBlock b;
        read(m, "ambient_dim", b.ambient_dim, "meridional");
        read(m, "n_rho", b.n_rho, "meridional");
        read(m, "n_z", b.n_z, "meridional");
        read(m, "rho_max", b.rho_max, "meridional");
        read(m, "z_half", b.z_half, "meridional");
        read(m, "periodic_z", b.periodic_z, "meridional");
        if (m.contains("bumps")) {
            require(m["bumps"].is_array(), ErrorCode::Config, "meridional.bumps: expected a list");
            b.bumps.clear();
            int i = 0;
            for (const auto& item : m["bumps"]) {
                const std::string where = "meridional.bumps[" + std::to_string(i++) + "]";
                keys_known(item, where, {"rho_center", "z_center", "radius", "amplitude"});
                MeridionalBump bump;
                read(item, "rho_center", bump.rho_center, where);
                read(item, "z_center", bump.z_center, where);
                read(item, "radius", bump.radius, where);
                read(item, "amplitude", bump.amplitude, where);
                b.bumps.push_back(bump);
            }
        }
        c.meridional = b;
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        keys_known(o, "output", {"directory", "format", "write_fields"});
        read(o, "directory", c.output.directory, "output");
        read(o, "format", c.output.format, "output");
        read(o, "write_fields", c.output.write_fields, "output");
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Config, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
    }
}

std::string RunConfig::to_json() const
{
    ojson doc;
    doc["grid"] = {{"dim", grid.dim}, {"points", grid.points}, {"half_width", grid.half_width}};

    ojson gen;
    gen["name"] = generator.name;
    ojson params = ojson::object();
    for (const auto& [k, val] : generator.params)
        params[k] = val;
    gen["params"] = params;
    gen["symmetrize"] = generator.symmetrize;
    gen["seed"] = generator.seed;
    doc["generator"] = gen;

    doc["pressure"] = {{"solver", pressure.solver}, {"meridional_tolerance", pressure.meridional_tolerance}};

    ojson checks_json = ojson::array();
    for (const auto& c : checks) {
        ojson item;
        item["identity"] = c.identity;
        ojson ps = ojson::object();
        for (const auto& [k, xs] : c.params)
            ps[k] = number_list_json(xs);
        item["params"] = ps;
        if (c.tolerance)
            item["tolerance"] = *c.tolerance;
        checks_json.push_back(item);
    }
    doc["checks"] = checks_json;

    if (evolve) {
        ojson e;
        e["viscosity"] = evolve->viscosity;
        e["t_end"] = evolve->t_end;
        if (evolve->dt)
            e["dt"] = *evolve->dt;
        e["window"] = evolve->window;
        e["snapshots"] = evolve->snapshots;
        e["symmetrize"] = evolve->symmetrize;
        doc["evolve"] = e;
    }
    if (meridional) {
        ojson m;
        m["ambient_dim"] = meridional->ambient_dim;
        m["n_rho"] = meridional->n_rho;
        m["n_z"] = meridional->n_z;
        m["rho_max"] = meridional->rho_max;
        m["z_half"] = meridional->z_half;
        m["periodic_z"] = meridional->periodic_z;
        ojson bumps = ojson::array();
        for (const auto& b : meridional->bumps)
            bumps.push_back({{"rho_center", b.rho_center},
                             {"z_center", b.z_center},
                             {"radius", b.radius},
                             {"amplitude", b.amplitude}});
        m["bumps"] = bumps;
        doc["meridional"] = m;
    }
    doc["output"] = {{"directory", output.directory}, {"format", output.format}, {"write_fields", output.write_fields}};
    return doc.dump(2) + "\n";
}

void RunConfig::validate() const
{
    const auto& name = generator.name;
    require(kGenerators.contains(name), ErrorCode::Config, "generator: unknown name '" + name + "'");
    const bool merid = name == "axisymmetric";
    if (!merid) {
        try {
            (void)grid_of(grid);
        } catch (const Error& e) {
            fail(ErrorCode::Config, std::string("grid: ") + e.what());
        }
    }
    if (name == "radial_vortex" || periodic_generator(name))
        require(grid.dim == 2, ErrorCode::Config, "generator '" + name + "' needs dim = 2");
    if (name == "axisymmetric_3d")
        require(grid.dim == 3, ErrorCode::Config, "generator 'axisymmetric_3d' needs dim = 3");
    if (generator.symmetrize && !merid)
        require(grid.points % 4 == 0, ErrorCode::Config, "symmetrize needs points divisible by 4");
    for (const auto& [k, val] : generator.params)
        require(std::isfinite(val), ErrorCode::Config, "generator.params." + k + ": not finite");

    require(pressure.solver == "truncated" || pressure.solver == "cell_average", ErrorCode::Config,
            "pressure.solver: expected 'truncated' or 'cell_average'");
    require(pressure.meridional_tolerance > 0.0, ErrorCode::Config, "pressure.meridional_tolerance must be positive");

    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        const std::string where = "checks[" + std::to_string(i) + "]";
        const auto known = kCheckParams.find(c.identity);
        require(known != kCheckParams.end(), ErrorCode::Config, where + ": unknown identity '" + c.identity + "'");
        require((c.identity == "axisymmetric_decay") == merid, ErrorCode::Config,
                where + ": identity '" + c.identity + "' does not apply to generator '" + name + "'");
        require(!periodic_generator(name), ErrorCode::Config,
                where + ": periodic generators are checked through the evolve block");
        for (const auto& [k, xs] : c.params) {
            require(known->second.contains(k), ErrorCode::Config, where + ".params: unknown key '" + k + "'");
            for (double x : xs)
                require(std::isfinite(x), ErrorCode::Config, where + ".params." + k + ": not finite");
        }
        if (c.tolerance)
            require(*c.tolerance > 0.0, ErrorCode::Config, where + ".tolerance must be positive");
        for (const char* key : {"count", "sweep_points"})
            if (c.params.contains(key))
                require(c.params.at(key).size() == 1 && c.params.at(key)[0] >= 1.0, ErrorCode::Config,
                        where + ".params." + key + ": expected one positive count");
        if (c.params.contains("seed"))
            require(c.params.at("seed").size() == 1 && c.params.at("seed")[0] >= 0.0, ErrorCode::Config,
                    where + ".params.seed: expected one non-negative value");
    }

    if (evolve) {
        require(!merid && grid.dim == 2, ErrorCode::Config, "evolve: needs a two-dimensional velocity generator");
        require(evolve->viscosity >= 0.0, ErrorCode::Config, "evolve.viscosity must be non-negative");
        require(evolve->t_end >= 0.0, ErrorCode::Config, "evolve.t_end must be non-negative");
        require(!evolve->dt || *evolve->dt > 0.0, ErrorCode::Config, "evolve.dt must be positive");
        require(evolve->snapshots >= 0, ErrorCode::Config, "evolve.snapshots must be non-negative");
        const double l = name == "taylor_green" ? std::numbers::pi : grid.half_width;
        require(evolve->window > 0.0 && evolve->window <= 0.5 * l, ErrorCode::Config,
                "evolve.window must lie in (0, L/2]");
        if (evolve->symmetrize)
            require(grid.points % 4 == 0, ErrorCode::Config, "evolve.symmetrize needs points divisible by 4");
    }

    if (meridional) {
        const auto& m = *meridional;
        require(m.ambient_dim >= 3, ErrorCode::Config, "meridional.ambient_dim must be at least 3");
        try {
            meridional_grid(m).validate();
        } catch (const Error& e) {
            fail(ErrorCode::Config, std::string("meridional: ") + e.what());
        }
        for (const auto& b : m.bumps)
            require(b.radius > 0.0 && b.rho_center - b.radius > 0.0, ErrorCode::Config,
                    "meridional.bumps: support must have positive radius and stay off the axis");
    }

    require(output.format == "json" || output.format == "csv" || output.format == "both", ErrorCode::Config,
            "output.format: expected 'json', 'csv' or 'both'");
}

// ---------------------------------------------------------------------------

GeneratedField synthesize(const RunConfig& config)
{
    config.validate();
    const auto& gen = config.generator;
    const auto& ps = gen.params;
    GeneratedField out;
    if (gen.name == "axisymmetric") {
        const auto mb = config.meridional.value_or(MeridionalBlock{});
        out.meridional = meridional_from_bumps(mb.ambient_dim, meridional_grid(mb), mb.bumps);
        return out;
    }

    const auto grid = grid_of(config.grid);
    const double l = grid.half_width();
    VectorField v;
    if (gen.name == "zero") {
        v = VectorField(grid);
        v.set_solenoidal(true);
    } else if (gen.name == "radial_vortex") {
        const auto profile = default_vortex_profile(param(ps, "radius", 0.25 * l), param(ps, "amplitude", 1.0));
        v = radial_vortex_2d(profile, grid).velocity;
    } else if (gen.name == "generic") {
        GenericFieldSpec spec;
        spec.bumps = static_cast<int>(param(ps, "bumps", spec.bumps));
        spec.support_fraction = param(ps, "support_fraction", spec.support_fraction);
        spec.seed = gen.seed;
        v = generic_field(grid, spec);
    } else if (gen.name == "anisotropic") {
        v = anisotropic_control(grid, param(ps, "support_fraction", 0.2));
    } else if (gen.name == "blobs") {
        BlobSpec spec;
        spec.distance = param(ps, "distance", spec.distance);
        spec.sigma = param(ps, "sigma", spec.sigma);
        spec.amplitude = param(ps, "amplitude", spec.amplitude);
        v = velocity(blob_state(grid, 0.0, spec));
    } else if (gen.name == "taylor_green") {
        v = taylor_green_velocity(GridSpec(2, grid.points(), std::numbers::pi), 0.0, 0.0);
    } else if (gen.name == "axisymmetric_3d") {
        std::vector<MeridionalBump> bumps;
        if (config.meridional)
            bumps = config.meridional->bumps;
        else
            bumps = {{param(ps, "rho_center", 0.2 * l), param(ps, "z_center", 0.0), param(ps, "radius", 0.15 * l),
                      param(ps, "amplitude", 1.0)}};
        v = axisymmetric_field_3d(grid, bumps);
    }
    if (gen.symmetrize)
        v = symmetrize(v);
    out.velocity = std::move(v);
    return out;
}

RunResult check_fields(const RunConfig& config, const VectorField& v, std::optional<ScalarField> p)
{
    RunResult result;
    result.metadata = base_metadata(config);
    result.metadata["dim"] = std::to_string(v.dim());
    result.metadata["points"] = std::to_string(v.grid().points());
    result.metadata["half_width"] = format_double(v.grid().half_width());
    if (!p) {
        PressureOptions options;
        options.kernel =
            config.pressure.solver == "cell_average" ? GreenKernel::SampledCellAverage : GreenKernel::Truncated;
        p = pressure_freespace(v, options);
    }
    require(p->grid() == v.grid(), ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    for (const auto& c : config.checks)
        run_check(c, config, v, *p, result.reports);
    finish(result);
    return result;
}

RunResult check_fields(const RunConfig& config, MeridionalField mf)
{
    RunResult result;
    result.metadata = base_metadata(config);
    result.metadata["ambient_dim"] = std::to_string(mf.ambient_dim);
    result.metadata["grid"] = std::to_string(mf.grid.n_rho) + "x" + std::to_string(mf.grid.n_z);
    if (!mf.has_pressure())
        mf = pressure_meridional(std::move(mf), config.pressure.meridional_tolerance);
    for (const auto& c : config.checks) {
        require(c.identity == "axisymmetric_decay", ErrorCode::Config,
                "identity '" + c.identity + "' does not apply to a meridional field");
        const double rho1 = param_scalar(c, "rho1", 0.0);
        const double rho2 = param_scalar(c, "rho2", mf.grid.rho_max);
        const int points = static_cast<int>(param_scalar(c, "sweep_points", 64));
        result.reports.push_back(check_axisymmetric_decay(mf, rho1, rho2, options_for(c, 1e-2), points));
    }
    finish(result);
    return result;
}

double relative_divergence(const VectorField& v)
{
    const auto& g = v.grid();
    const int dim = g.dim();
    const int m = g.points();
    const double l = g.half_width();
    const double w = l / 8.0;
    constexpr int n = 8;
    int lattice = 1;
    for (int k = 0; k < dim; ++k)
        lattice *= n + 1;

    // Separable factors exp(-t^2 / w^2) and their derivatives, cut off at 6w.
    std::vector<double> value(static_cast<std::size_t>(n + 1) * m), slope(value.size());
    std::vector<int> lo(n + 1), hi(n + 1);
    for (int a = 0; a <= n; ++a) {
        const double c = -0.5 * l + l * a / n;
        lo[a] = m;
        hi[a] = -1;
        for (int i = 0; i < m; ++i) {
            const double t = g.coord(i) - c;
            if (std::abs(t) > 6.0 * w)
                continue;
            lo[a] = std::min(lo[a], i);
            hi[a] = std::max(hi[a], i);
            value[a * m + i] = std::exp(-t * t / (w * w));
            slope[a * m + i] = -2.0 * t / (w * w) * value[a * m + i];
        }
    }

    double num = 0.0, den = 0.0;
    for (int c = 0; c < lattice; ++c) {
        std::array<int, 3> a{0, 0, 0};
        for (int k = 0, rest = c; k < dim; ++k, rest /= n + 1)
            a[k] = rest % (n + 1);
        std::array<int, 3> first{0, 0, 0}, last{0, 0, 0};
        for (int k = 0; k < dim; ++k) {
            first[k] = lo[a[k]];
            last[k] = hi[a[k]];
        }
        double pairing = 0.0, mass = 0.0;
        std::array<int, 3> idx{0, 0, 0};
        for (idx[0] = first[0]; idx[0] <= last[0]; ++idx[0])
            for (idx[1] = first[1]; idx[1] <= last[1]; ++idx[1])
                for (idx[2] = first[2]; idx[2] <= last[2]; ++idx[2]) {
                    const std::size_t i = g.flatten(idx);
                    for (int k = 0; k < dim; ++k) {
                        double t = v[k][i] * slope[a[k] * m + idx[k]];
                        for (int j = 0; j < dim; ++j)
                            if (j != k)
                                t *= value[a[j] * m + idx[j]];
                        pairing += t;
                        mass += std::abs(t);
                    }
                }
        num = std::max(num, std::abs(pairing));
        den = std::max(den, mass);
    }
    return den > 0.0 ? num / den : 0.0;
}

void write_reports(const std::filesystem::path& dir, const RunResult& result, std::string_view format)
{
    std::filesystem::create_directories(dir);
    if (format == "json" || format == "both")
        write_text(dir / "reports.json", reports_to_json(result.reports, result.metadata));
    if (format == "csv" || format == "both")
        write_text(dir / "reports.csv", reports_to_csv(result.reports));
    ojson s;
    s["schema"] = kReportSchema;
    s["pass"] = result.summary.pass;
    s["fail"] = result.summary.fail;
    s["hypothesis_violated"] = result.summary.hypothesis_violated;
    s["total"] = result.summary.total();
    s["exit_code"] = result.exit_code;
    write_text(dir / "summary.json", s.dump(2) + "\n");
}

RunResult run(const RunConfig& config, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    const auto marker = out_dir / "FAILED";
    std::filesystem::remove(marker);
    try {
        config.validate();
        write_text(out_dir / "config.json", config.to_json());
        const auto field = synthesize(config);

        RunResult result;
        if (field.meridional) {
            auto mf = pressure_meridional(*field.meridional, config.pressure.meridional_tolerance);
            if (config.output.write_fields)
                save_field(out_dir / "meridional.pvlf", mf);
            result = check_fields(config, std::move(mf));
        } else {
            const auto& v = *field.velocity;
            if (config.output.write_fields)
                save_field(out_dir / "velocity.pvlf", v);
            if (!config.checks.empty()) {
                PressureOptions options;
                options.kernel = config.pressure.solver == "cell_average" ? GreenKernel::SampledCellAverage
                                                                          : GreenKernel::Truncated;
                const auto p = pressure_freespace(v, options);
                if (config.output.write_fields)
                    save_field(out_dir / "pressure.pvlf", p);
                result = check_fields(config, v, p);
            } else {
                result.metadata = base_metadata(config);
            }

            if (config.evolve) {
                const auto& e = *config.evolve;
                EvolveState state;
                if (config.generator.name == "blobs") {
                    BlobSpec spec;
                    spec.distance = param(config.generator.params, "distance", spec.distance);
                    spec.sigma = param(config.generator.params, "sigma", spec.sigma);
                    spec.amplitude = param(config.generator.params, "amplitude", spec.amplitude);
                    state = blob_state(v.grid(), e.viscosity, spec);
                } else {
                    state = make_state(v, e.viscosity);
                }
                TrackOptions options;
                options.t_end = e.t_end;
                options.snapshots = e.snapshots;
                options.symmetrize = e.symmetrize;
                if (e.dt)
                    options.max_dt = *e.dt;
                int index = 0;
                if (config.output.write_fields) {
                    options.on_snapshot = [&](const EvolveState&, const VectorField& vw, const ScalarField&) {
                        char name[32];
                        std::snprintf(name, sizeof name, "snapshot_%03d.pvlf", index++);
                        save_field(out_dir / name, vw);
                    };
                }
                const auto snaps = track_identities(std::move(state), e.window, options);
                std::ostringstream series;
                series << "t,identity,residual_rel,status\n";
                for (const auto& snap : snaps)
                    for (const auto& r : snap.reports) {
                        series << format_double(snap.time) << ',' << r.identity << ','
                               << format_double(r.residual_rel) << ',' << to_string(r.status) << '\n';
                        result.reports.push_back(r);
                    }
                write_text(out_dir / "evolve_series.csv", series.str());
                result.metadata["evolve_viscosity"] = format_double(e.viscosity);
                result.metadata["evolve_window"] = format_double(e.window);
                finish(result);
            }
        }
        if (config.checks.empty() && !config.evolve)
            finish(result);
        write_reports(out_dir, result, config.output.format);
        return result;
    } catch (const std::exception& e) {
        write_text(marker, std::string(e.what()) + "\n");
        throw;
    }
}

RunResult verify_external(const std::filesystem::path& velocity_file,
                          const std::optional<std::filesystem::path>& pressure_file, const RunConfig& config)
{
    auto field = load_field(velocity_file);
    if (auto* mf = std::get_if<MeridionalField>(&field)) {
        require(!pressure_file, ErrorCode::UnsupportedInput, "meridional files carry their own pressure");
        return check_fields(config, std::move(*mf));
    }
    const auto* v = std::get_if<VectorField>(&field);
    require(v != nullptr, ErrorCode::Format, velocity_file.string() + ": expected a vector field (kind 1)");
    const double div = relative_divergence(*v);
    require(div <= kDivergenceGate, ErrorCode::Divergence,
            velocity_file.string() + ": relative divergence " + format_double(div) + " exceeds " +
                format_double(kDivergenceGate));
    std::optional<ScalarField> p;
    if (pressure_file)
        p = load_scalar(*pressure_file);
    return check_fields(config, *v, std::move(p));
}

} // namespace pvl
