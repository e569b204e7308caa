#pragma once

#include <filesystem>
#include <variant>

#include "seqrecon/grid.hpp"

namespace seqrecon::sqr {

// Layout: "SQRA", u32 rows, u32 cols, u8 dtype, 3 zero bytes, then the
// row-major little-endian payload. Complex arrays are two f64 planes (all
// real parts, then all imaginary parts).
enum class DType : std::uint8_t { f64 = 1, c128 = 2, u8 = 3 };

inline constexpr std::size_t header_size = 16;

using Array = std::variant<RealImage, ComplexImage, Mask>;

void write(const std::filesystem::path& path, const RealImage& a);
void write(const std::filesystem::path& path, const ComplexImage& a);
void write(const std::filesystem::path& path, const Mask& a);

Array read(const std::filesystem::path& path);
RealImage read_real(const std::filesystem::path& path);
ComplexImage read_complex(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

}  // namespace seqrecon::sqr
