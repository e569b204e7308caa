#include <doctest.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "seqrecon/sqr_io.hpp"
#include "support.hpp"

using namespace seqrecon;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "seqrecon_sqr_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> bytes_of(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

double le_double(const std::vector<unsigned char>& b, size_t at) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[at + static_cast<size_t>(i)];
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

}  // namespace

TEST_CASE("header and payload layout") {
  RealImage a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const auto p = temp_file("layout.sqr");
  sqr::write(p, a);
  const auto b = bytes_of(p);
  REQUIRE(b.size() == sqr::header_size + 6 * 8);
  CHECK(std::memcmp(b.data(), "SQRA", 4) == 0);
  CHECK(b[4] == 2);
  CHECK(b[5] == 0);
  CHECK(b[8] == 3);
  CHECK(b[12] == 1);
  CHECK(b[13] == 0);
  CHECK(b[14] == 0);
  CHECK(b[15] == 0);
  // Row-major: the second stored value is a(0,1).
  CHECK(le_double(b, 16) == 1.0);
  CHECK(le_double(b, 24) == 2.0);
  CHECK(le_double(b, 16 + 3 * 8) == 4.0);
}

TEST_CASE("complex arrays are stored as two planes") {
  ComplexImage a(1, 2);
  a << std::complex<double>(1, -1), std::complex<double>(2, -2);
  const auto p = temp_file("planes.sqr");
  sqr::write(p, a);
  const auto b = bytes_of(p);
  REQUIRE(b.size() == sqr::header_size + 4 * 8);
  CHECK(b[12] == 2);
  CHECK(le_double(b, 16) == 1.0);
  CHECK(le_double(b, 24) == 2.0);
  CHECK(le_double(b, 32) == -1.0);
  CHECK(le_double(b, 40) == -2.0);
}

TEST_CASE("round trips for every dtype") {
  std::mt19937_64 rng(3);
  const RealImage r = seqrecon::testing::random_image(rng, 5, 9);
  const ComplexImage c = seqrecon::testing::random_complex(rng, 7, 4);
  const Mask m = seqrecon::testing::random_mask(rng, 6, 6, 0.5);
  sqr::write(temp_file("r.sqr"), r);
  sqr::write(temp_file("c.sqr"), c);
  sqr::write(temp_file("m.sqr"), m);
  CHECK((sqr::read_real(temp_file("r.sqr")) == r).all());
  CHECK((sqr::read_complex(temp_file("c.sqr")) == c).all());
  CHECK((sqr::read_mask(temp_file("m.sqr")) == m).all());
  CHECK(std::holds_alternative<Mask>(sqr::read(temp_file("m.sqr"))));
  CHECK_THROWS_AS(sqr::read_real(temp_file("m.sqr")), Error);
}

TEST_CASE("corrupt files are rejected") {
  const auto p = temp_file("bad.sqr");
  {
    std::ofstream os(p, std::ios::binary);
    os << "NOPE0000000000000000";
  }
  CHECK_THROWS_AS(sqr::read(p), Error);

  RealImage a = RealImage::Ones(4, 4);
  sqr::write(p, a);
  fs::resize_file(p, fs::file_size(p) - 5);
  CHECK_THROWS_AS(sqr::read(p), Error);
  CHECK_THROWS_AS(sqr::read(temp_file("missing.sqr")), Error);
}
