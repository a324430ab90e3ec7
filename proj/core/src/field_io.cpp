#include "pvl/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pvl/error.hpp"

namespace pvl {
namespace {

static_assert(std::endian::native == std::endian::little, "PVLF I/O assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'V', 'L', 'F'};
constexpr std::uint32_t kFlagAxisRegular = 1u;
constexpr std::uint32_t kFlagPeriodic = 2u;
constexpr std::uint32_t kFlagPressure = 4u;

template <class T>
void put(std::ostream& out, T value)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in, const char* field)
{
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    require(in.gcount() == static_cast<std::streamsize>(sizeof(T)), ErrorCode::Format,
            std::string("truncated PVLF header field '") + field + "'");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

void put_block(std::ostream& out, std::span<const double> data)
{
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::vector<double> get_block(std::istream& in, std::size_t count, const char* what)
{
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
    require(in.gcount() == static_cast<std::streamsize>(count * sizeof(double)), ErrorCode::Format,
            std::string("truncated PVLF payload '") + what + "'");
    return data;
}

void put_header(std::ostream& out, std::uint32_t dim, std::uint32_t m, double l, FieldKind kind)
{
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kPvlfVersion);
    put<std::uint32_t>(out, dim);
    put<std::uint32_t>(out, m);
    put<double>(out, l);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
}

} // namespace

void write_field(std::ostream& out, const ScalarField& f)
{
    const auto& g = f.grid();
    put_header(out, g.dim(), g.points(), g.half_width(), FieldKind::Scalar);
    put_block(out, f.values());
    require(out.good(), ErrorCode::Format, "failed writing PVLF scalar field");
}

void write_field(std::ostream& out, const VectorField& v)
{
    const auto& g = v.grid();
    put_header(out, g.dim(), g.points(), g.half_width(), FieldKind::Vector);
    for (int k = 0; k < g.dim(); ++k)
        put_block(out, v[k].values());
    require(out.good(), ErrorCode::Format, "failed writing PVLF vector field");
}

void write_field(std::ostream& out, const MeridionalField& mf)
{
    mf.validate();
    const auto& g = mf.grid;
    put_header(out, 2, g.n_rho, g.rho_max, FieldKind::Meridional);
    std::uint32_t flags = kFlagAxisRegular;
    if (g.periodic_z)
        flags |= kFlagPeriodic;
    if (mf.has_pressure())
        flags |= kFlagPressure;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(mf.ambient_dim));
    put<std::uint32_t>(out, flags);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_z));
    put<double>(out, g.z_half);
    put_block(out, mf.v_rho);
    put_block(out, mf.v_z);
    if (mf.has_pressure())
        put_block(out, mf.p);
    else
        put_block(out, std::vector<double>(g.size(), 0.0));
    require(out.good(), ErrorCode::Format, "failed writing PVLF meridional field");
}

AnyField read_field(std::istream& in)
{
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    require(in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::Format,
            "bad PVLF header field 'magic' (expected \"PVLF\")");
    const auto version = get<std::uint32_t>(in, "version");
    require(version == kPvlfVersion, ErrorCode::Format,
            "unsupported PVLF header field 'version' = " + std::to_string(version));
    const auto dim = get<std::uint32_t>(in, "dim");
    const auto m = get<std::uint32_t>(in, "M");
    const auto l = get<double>(in, "L");
    const auto kind = get<std::uint32_t>(in, "kind");
    require(std::isfinite(l) && l > 0.0, ErrorCode::Format, "invalid PVLF header field 'L'");

    if (kind == static_cast<std::uint32_t>(FieldKind::Meridional)) {
        require(dim == 2, ErrorCode::Format, "invalid PVLF header field 'dim' for a meridional field");
        MeridionalField mf;
        mf.ambient_dim = static_cast<int>(get<std::uint32_t>(in, "N"));
        const auto flags = get<std::uint32_t>(in, "flags");
        mf.grid.n_rho = static_cast<int>(m);
        mf.grid.rho_max = l;
        mf.grid.n_z = static_cast<int>(get<std::uint32_t>(in, "n_z"));
        mf.grid.z_half = get<double>(in, "Z");
        mf.grid.periodic_z = (flags & kFlagPeriodic) != 0;
        require(mf.ambient_dim >= 3, ErrorCode::Format, "invalid PVLF header field 'N'");
        require((flags & kFlagAxisRegular) != 0, ErrorCode::Format, "invalid PVLF header field 'flags'");
        require(m >= 8 && mf.grid.n_z >= 8 && m <= (1u << 16) && mf.grid.n_z <= (1 << 16), ErrorCode::Format,
                "invalid PVLF header field 'M'/'n_z'");
        const std::size_t n = mf.grid.size();
        mf.v_rho = get_block(in, n, "v_rho");
        mf.v_z = get_block(in, n, "v_z");
        auto p = get_block(in, n, "p");
        if (flags & kFlagPressure)
            mf.p = std::move(p);
        mf.validate();
        return mf;
    }

    require(dim == 2 || dim == 3, ErrorCode::Format, "invalid PVLF header field 'dim' = " + std::to_string(dim));
    require(m >= 16 && (m & (m - 1)) == 0 && m <= 4096, ErrorCode::Format,
            "invalid PVLF header field 'M' = " + std::to_string(m));
    const GridSpec grid(static_cast<int>(dim), static_cast<int>(m), l);
    if (kind == static_cast<std::uint32_t>(FieldKind::Scalar))
        return ScalarField(grid, get_block(in, grid.size(), "samples"));
    require(kind == static_cast<std::uint32_t>(FieldKind::Vector), ErrorCode::Format,
            "invalid PVLF header field 'kind' = " + std::to_string(kind));
    std::vector<ScalarField> comps;
    for (std::uint32_t k = 0; k < dim; ++k)
        comps.emplace_back(grid, get_block(in, grid.size(), "component"));
    return VectorField(grid, std::move(comps));
}

void save_field(const std::filesystem::path& path, const AnyField& field)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.is_open(), ErrorCode::Format, "cannot open " + path.string() + " for writing");
    std::visit([&](const auto& f) { write_field(out, f); }, field);
}

AnyField load_field(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(in.is_open(), ErrorCode::Format, "cannot open " + path.string());
    return read_field(in);
}

ScalarField load_scalar(const std::filesystem::path& path)
{
    auto f = load_field(path);
    require(std::holds_alternative<ScalarField>(f), ErrorCode::Format,
            path.string() + ": PVLF header field 'kind' is not scalar");
    return std::get<ScalarField>(std::move(f));
}

VectorField load_vector(const std::filesystem::path& path)
{
    auto f = load_field(path);
    require(std::holds_alternative<VectorField>(f), ErrorCode::Format,
            path.string() + ": PVLF header field 'kind' is not vector");
    return std::get<VectorField>(std::move(f));
}

MeridionalField load_meridional(const std::filesystem::path& path)
{
    auto f = load_field(path);
    require(std::holds_alternative<MeridionalField>(f), ErrorCode::Format,
            path.string() + ": PVLF header field 'kind' is not meridional");
    return std::get<MeridionalField>(std::move(f));
}

} // namespace pvl
