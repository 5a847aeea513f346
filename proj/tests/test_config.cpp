#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "sdspec/config.hpp"
#include "sdspec/error.hpp"

using namespace sdspec;
using oracle::error_of;

TEST_CASE("every schema key has a well-typed default") {
  const ConfigMap d = default_config();
  CHECK(d.size() == config_schema().size());
  for (const auto& k : config_schema()) {
    CHECK(d.count(k.key) == 1u);
    CHECK(find_key(k.key) != nullptr);
  }
  CHECK(find_key("grid.nope") == nullptr);
  CHECK(get_int(d, "grid.points") == 128);
  CHECK(get_real(d, "params.mu") == 1.0);
  CHECK(get_bool(d, "time.dealias") == false);
  CHECK(get_real_list(d, "nls_limit.mu") == std::vector<double>{0.1, 0.05, 0.025});
  CHECK(get_real_list(d, "output.snapshot_times").empty());
}

TEST_CASE("parsing") {
  const ConfigMap c = parse_config_text(
      "# comment\n"
      "\n"
      "  grid.points = 64  \n"
      "params.lambda=-1\n"
      "initial.u.center = 1.5, 2.5\n"
      "time.dealias = true\n"
      "name = focusing run\n");
  CHECK(c.size() == 5u);
  CHECK(get_int(c, "grid.points") == 64);
  CHECK(get_int(c, "params.lambda") == -1);
  CHECK(get_real_list(c, "initial.u.center") == std::vector<double>{1.5, 2.5});
  CHECK(get_bool(c, "time.dealias"));
  CHECK(get_text(c, "name") == "focusing run");
}

TEST_CASE("rejections name the offending line") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config_text(text, "t.cfg");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_invalid);
      return e.what();
    }
    return "";
  };
  CHECK(message("grid.pointz = 3\n").find("t.cfg:1") != std::string::npos);
  CHECK(message("grid.pointz = 3\n").find("unknown key") != std::string::npos);
  CHECK(message("\ngrid.points = many\n").find("t.cfg:2") != std::string::npos);
  CHECK(message("grid.points = 3.5\n").find("integer") != std::string::npos);
  CHECK(message("params.mu = 1\nparams.mu = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("just words\n").find("key = value") != std::string::npos);
  CHECK(message("time.dealias = maybe\n").find("boolean") != std::string::npos);
  CHECK(message("output.snapshot_times = 0.1, x\n").find("t.cfg:1") != std::string::npos);
  CHECK(error_of([] { load_config_file("/nonexistent/file.cfg"); }) == Errc::config_invalid);
}

TEST_CASE("overrides are type-checked") {
  ConfigMap c = default_config();
  apply_override(c, "params.mu=0.25");
  CHECK(get_real(c, "params.mu") == 0.25);
  CHECK(error_of([&] { apply_override(c, "params.mu"); }) == Errc::config_invalid);
  CHECK(error_of([&] { apply_override(c, "params.mu=fast"); }) == Errc::config_invalid);
  CHECK(error_of([&] { apply_override(c, "nonsense=1"); }) == Errc::config_invalid);
  CHECK(error_of([&] { get_int(c, "params.mu"); }) == Errc::config_invalid);
}

TEST_CASE("three-layer precedence: command line over file over defaults") {
  const auto dir = oracle::scratch_dir("layers");
  const auto path = (dir / "run.cfg").string();
  {
    std::ofstream out(path);
    out << "grid.points = 64\nparams.mu = 2.0\n";
  }
  const ConfigMap file = load_config_file(path);
  const ConfigMap c = layer_config(file, {"params.mu=3.5", "time.dt=0.002"});
  CHECK(get_int(c, "grid.points") == 64);   // file over default
  CHECK(get_real(c, "params.mu") == 3.5);   // override over file
  CHECK(get_real(c, "time.dt") == 0.002);   // override over default
  CHECK(get_real(c, "grid.extent") == 20.0);  // default
  const ConfigMap twice = layer_config(file, {"params.mu=3.5", "params.mu=4"});
  CHECK(get_real(twice, "params.mu") == 4.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rendered config parses back to itself") {
  ConfigMap c = default_config();
  apply_override(c, "name=echo");
  CHECK(parse_config_text(render_config(c)) == c);
}
