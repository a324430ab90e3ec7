#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "pvl/grid.hpp"
#include "pvl/meridional.hpp"

namespace pvl {

/// PVLF binary container, all numbers little-endian:
///   "PVLF" | version u32 | dim u32 | M u32 | L f64 | kind u32 | payload
/// kind 0: scalar, M^dim f64 samples (row-major).
/// kind 1: vector, dim blocks of M^dim f64, one per component.
/// kind 2: meridional, dim = 2, M = n_rho, L = rho extent, then
///         N u32 | flags u32 (bit0 axis-regular, bit1 periodic z) | n_z u32 | Z f64
///         followed by v_rho, v_z, p blocks of n_rho * n_z f64. Flag bit2 marks a
///         stored pressure; without it the p block is zeros and ignored.
inline constexpr std::uint32_t kPvlfVersion = 1;

enum class FieldKind : std::uint32_t { Scalar = 0, Vector = 1, Meridional = 2 };

using AnyField = std::variant<ScalarField, VectorField, MeridionalField>;

void write_field(std::ostream& out, const ScalarField& f);
void write_field(std::ostream& out, const VectorField& v);
void write_field(std::ostream& out, const MeridionalField& mf);

/// Throws Error(Format) naming the offending header field.
AnyField read_field(std::istream& in);

void save_field(const std::filesystem::path& path, const AnyField& field);
AnyField load_field(const std::filesystem::path& path);

ScalarField load_scalar(const std::filesystem::path& path);
VectorField load_vector(const std::filesystem::path& path);
MeridionalField load_meridional(const std::filesystem::path& path);

} // namespace pvl
