#include "seqrecon/sqr_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace seqrecon::sqr {
namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw Error("sqr: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols,
                       DType dtype) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("sqr: cannot open " + path.string() + " for writing");
  os.write("SQRA", 4);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(rows));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cols));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(dtype));
  const char pad[3] = {0, 0, 0};
  os.write(pad, 3);
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error("sqr: write failed for " + path.string());
}

}  // namespace

void write(const std::filesystem::path& path, const RealImage& a) {
  auto os = open_out(path, a.rows(), a.cols(), DType::f64);
  for (Eigen::Index i = 0; i < a.size(); ++i) put_le<double>(os, a.data()[i]);
  finish(os, path);
}

void write(const std::filesystem::path& path, const ComplexImage& a) {
  auto os = open_out(path, a.rows(), a.cols(), DType::c128);
  for (Eigen::Index i = 0; i < a.size(); ++i) put_le<double>(os, a.data()[i].real());
  for (Eigen::Index i = 0; i < a.size(); ++i) put_le<double>(os, a.data()[i].imag());
  finish(os, path);
}

void write(const std::filesystem::path& path, const Mask& a) {
  auto os = open_out(path, a.rows(), a.cols(), DType::u8);
  os.write(reinterpret_cast<const char*>(a.data()), a.size());
  finish(os, path);
}

Array read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("sqr: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SQRA", 4) != 0)
    throw Error("sqr: bad magic in " + path.string());
  const auto rows = get_le<std::uint32_t>(is);
  const auto cols = get_le<std::uint32_t>(is);
  const auto dtype = static_cast<DType>(get_le<std::uint8_t>(is));
  is.ignore(3);
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * cols;
  switch (dtype) {
    case DType::f64: {
      RealImage a(rows, cols);
      for (Eigen::Index i = 0; i < n; ++i) a.data()[i] = get_le<double>(is);
      return a;
    }
    case DType::c128: {
      ComplexImage a(rows, cols);
      for (Eigen::Index i = 0; i < n; ++i) a.data()[i].real(get_le<double>(is));
      for (Eigen::Index i = 0; i < n; ++i) a.data()[i].imag(get_le<double>(is));
      return a;
    }
    case DType::u8: {
      Mask a(rows, cols);
      if (!is.read(reinterpret_cast<char*>(a.data()), n)) throw Error("sqr: truncated file");
      return a;
    }
  }
  throw Error("sqr: unknown dtype in " + path.string());
}

namespace {
template <class T>
T read_as(const std::filesystem::path& path, const char* name) {
  auto a = read(path);
  if (auto* p = std::get_if<T>(&a)) return std::move(*p);
  throw Error("sqr: " + path.string() + " is not a " + name + " array");
}
}  // namespace

RealImage read_real(const std::filesystem::path& path) { return read_as<RealImage>(path, "f64"); }
ComplexImage read_complex(const std::filesystem::path& path) {
  return read_as<ComplexImage>(path, "c128");
}
Mask read_mask(const std::filesystem::path& path) { return read_as<Mask>(path, "u8"); }

}  // namespace seqrecon::sqr
