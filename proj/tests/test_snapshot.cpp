#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sdspec/error.hpp"
#include "sdspec/snapshot.hpp"

using namespace sdspec;
using oracle::error_of;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

}  // namespace

TEST_CASE("bit-exact round trip in every dimension") {
  const fs::path dir = oracle::scratch_dir("snap");
  for (int dim : {1, 2, 3}) {
    const Grid g = make_grid(dim, 8, 1.25 * dim);
    ComplexField u = oracle::random_complex(g, dim);
    u[0] = cplx(-0.0, std::numeric_limits<double>::denorm_min());
    const RealField v = oracle::random_real(g, 10 + dim);
    write_snapshot(u, 0.375, (dir / "u.snap").string());
    write_snapshot(v, 1.5, (dir / "v.snap").string());
    const Snapshot su = read_snapshot((dir / "u.snap").string());
    const Snapshot sv = read_snapshot((dir / "v.snap").string());
    REQUIRE(su.is_complex());
    REQUIRE_FALSE(sv.is_complex());
    CHECK(su.time == 0.375);
    CHECK(sv.time == 1.5);
    CHECK(su.grid() == g);
    const auto& ru = std::get<ComplexField>(su.field);
    const auto& rv = std::get<RealField>(sv.field);
    CHECK(std::memcmp(ru.values.data(), u.values.data(), u.values.size() * sizeof(cplx)) == 0);
    CHECK(std::memcmp(rv.values.data(), v.values.data(), v.values.size() * sizeof(double)) == 0);
  }
  CHECK_FALSE(fs::exists(dir / "u.snap.tmp"));
  fs::remove_all(dir);
}

TEST_CASE("header layout") {
  const fs::path dir = oracle::scratch_dir("snaphdr");
  const Grid g = make_grid(2, 8, 2.0);
  write_snapshot(RealField(g), 0.5, (dir / "v.snap").string());
  const std::string bytes = slurp(dir / "v.snap");
  const auto nl = bytes.find('\n');
  const std::string header = bytes.substr(0, nl);
  for (const char* key : {"\"format\":\"sdspec-snapshot\"", "\"dim\":2", "\"points\":8", "\"kind\":\"real\"",
                          "\"precision\":\"float64\"", "\"byte_order\":\"little\""}) {
    CHECK(header.find(key) != std::string::npos);
  }
  CHECK(bytes.size() - nl - 1 == 64u * sizeof(double));
  fs::remove_all(dir);
}

TEST_CASE("big-endian payloads are converted") {
  const fs::path dir = oracle::scratch_dir("snapbe");
  const Grid g = make_grid(1, 8, 1.0);
  const RealField v = oracle::random_real(g, 3);
  std::string body;
  for (double x : v.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::little) bits = __builtin_bswap64(bits);
    body.append(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  spit(dir / "be.snap",
       "{\"format\":\"sdspec-snapshot\",\"version\":1,\"dim\":1,\"points\":8,\"extent\":1.0,\"time\":2.0,"
       "\"kind\":\"real\",\"precision\":\"float64\",\"byte_order\":\"big\"}\n" +
           body);
  const Snapshot s = read_snapshot((dir / "be.snap").string());
  CHECK(std::get<RealField>(s.field).values == v.values);
  fs::remove_all(dir);
}

TEST_CASE("malformed files") {
  const fs::path dir = oracle::scratch_dir("snapbad");
  const Grid g = make_grid(1, 8, 1.0);
  const ComplexField u = oracle::random_complex(g, 4);
  const std::string good = (dir / "good.snap").string();
  write_snapshot(u, 0.0, good);
  const std::string bytes = slurp(good);
  const auto nl = bytes.find('\n');

  auto variant = [&](const std::string& name, const std::string& content) {
    spit(dir / name, content);
    return error_of([&] { read_snapshot((dir / name).string()); });
  };
  CHECK(variant("garbage.snap", "not json\n" + bytes.substr(nl + 1)) == Errc::header_mismatch);
  std::string wrong_tag = bytes;
  wrong_tag.replace(wrong_tag.find("sdspec-snapshot"), 15, "other-snapshot!");
  CHECK(variant("tag.snap", wrong_tag) == Errc::header_mismatch);
  std::string wrong_points = bytes;
  wrong_points.replace(wrong_points.find("\"points\":8"), 10, "\"points\":6");
  CHECK(variant("points.snap", wrong_points) == Errc::header_mismatch);
  CHECK(variant("short.snap", bytes.substr(0, bytes.size() - 3)) == Errc::truncated_payload);
  CHECK(variant("long.snap", bytes + "xx") == Errc::header_mismatch);
  CHECK(variant("empty.snap", "") == Errc::header_mismatch);
  CHECK(error_of([&] { read_snapshot((dir / "missing.snap").string()); }) == Errc::io_failure);
  fs::remove_all(dir);
}

TEST_CASE("atomic writes replace the target") {
  const fs::path dir = oracle::scratch_dir("atomic");
  const std::string p = (dir / "sub" / "f.txt").string();
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  CHECK(slurp(p) == "two");
  CHECK_FALSE(fs::exists(p + ".tmp"));
  spit(dir / "blocker", "x");
  CHECK(error_of([&] { write_file_atomic((dir / "blocker" / "f.txt").string(), "y"); }) == Errc::io_failure);
  fs::remove_all(dir);
}
