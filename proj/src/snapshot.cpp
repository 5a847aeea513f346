#include "sdspec/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <span>

#include "sdspec/error.hpp"

namespace sdspec {
namespace {

constexpr const char* kFormat = "sdspec-snapshot";

std::uint64_t swap_if(std::uint64_t x, bool swap) { return swap ? __builtin_bswap64(x) : x; }

std::string encode(std::span<const double> samples) {
  std::string out(samples.size() * sizeof(double), '\0');
  const bool swap = std::endian::native != std::endian::little;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::uint64_t bits = swap_if(std::bit_cast<std::uint64_t>(samples[i]), swap);
    std::memcpy(out.data() + i * sizeof(double), &bits, sizeof(bits));
  }
  return out;
}

std::string header(const Grid& g, double time, const char* kind) {
  nlohmann::ordered_json h;
  h["format"] = kFormat;
  h["version"] = 1;
  h["dim"] = g.dim();
  h["points"] = g.points();
  h["extent"] = g.extent();
  h["time"] = time;
  h["kind"] = kind;
  h["precision"] = "float64";
  h["byte_order"] = "little";
  return h.dump() + "\n";
}

}  // namespace

const Grid& Snapshot::grid() const {
  return std::visit([](const auto& f) -> const Grid& { return f.grid; }, field);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io_failure, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(Errc::io_failure, "cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void write_snapshot(const ComplexField& f, double time, const std::string& path) {
  std::span<const double> samples(reinterpret_cast<const double*>(f.values.data()), 2 * f.values.size());
  write_file_atomic(path, header(f.grid, time, "complex") + encode(samples));
}

void write_snapshot(const RealField& f, double time, const std::string& path) {
  write_file_atomic(path, header(f.grid, time, "real") + encode(f.values));
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open snapshot '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::header_mismatch, "snapshot '" + path + "' has no header line");

  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::header_mismatch, "snapshot '" + path + "' header is not valid JSON");
  }

  Snapshot snap;
  bool swap = false;
  std::size_t doubles = 0;
  try {
    if (h.at("format").get<std::string>() != kFormat || h.at("version").get<int>() != 1) {
      throw Error(Errc::header_mismatch, "snapshot '" + path + "' has an unknown format tag or version");
    }
    if (h.at("precision").get<std::string>() != "float64") {
      throw Error(Errc::header_mismatch, "snapshot '" + path + "' precision must be float64");
    }
    const std::string order = h.at("byte_order").get<std::string>();
    if (order != "little" && order != "big") {
      throw Error(Errc::header_mismatch, "snapshot '" + path + "' declares unknown byte order '" + order + "'");
    }
    const auto declared = order == "little" ? std::endian::little : std::endian::big;
    swap = declared != std::endian::native;

    const Grid g = make_grid(h.at("dim").get<int>(), h.at("points").get<int>(), h.at("extent").get<double>());
    snap.time = h.at("time").get<double>();
    const std::string kind = h.at("kind").get<std::string>();
    if (kind == "complex") {
      snap.field = ComplexField(g);
      doubles = 2 * g.size();
    } else if (kind == "real") {
      snap.field = RealField(g);
      doubles = g.size();
    } else {
      throw Error(Errc::header_mismatch, "snapshot '" + path + "' has unknown field kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::header_mismatch, "snapshot '" + path + "' header is missing fields: " + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::header_mismatch) throw;
    throw Error(Errc::header_mismatch, "snapshot '" + path + "' header describes an invalid grid: " + e.what());
  }

  std::string payload(doubles * sizeof(double), '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw Error(Errc::truncated_payload, "snapshot '" + path + "' payload is truncated");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(Errc::header_mismatch, "snapshot '" + path + "' has trailing bytes beyond the declared payload");
  }

  double* dst = std::visit([](auto& f) { return reinterpret_cast<double*>(f.values.data()); }, snap.field);
  for (std::size_t i = 0; i < doubles; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, payload.data() + i * sizeof(double), sizeof(bits));
    dst[i] = std::bit_cast<double>(swap_if(bits, swap));
  }
  return snap;
}

}  // namespace sdspec
