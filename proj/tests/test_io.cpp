#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "generators.hpp"
#include "maxlab/errors.hpp"
#include "maxlab/io.hpp"

using namespace maxlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("maxlab_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& body = "") const {
    const auto p = (path / name).string();
    if (!body.empty()) std::ofstream(p) << body;
    return p;
  }
};

}  // namespace

TEST_CASE("profile CSV round trip is exact") {
  TempDir dir;
  gen::Source s(11);
  for (int k = 0; k < 5; ++k) {
    const Profile f = gen::line_profile(s);
    const auto p = dir.file("f.csv");
    io::write_profile_csv(p, f);
    const Profile g = io::read_profile_csv(p, Domain::line());
    CHECK(g.breakpoints() == f.breakpoints());
    CHECK(g.values() == f.values());
  }
}

TEST_CASE("CSV errors name the file and the line") {
  TempDir dir;
  const auto bad = dir.file("bad.csv", "t,value\n0,0\n1,abc\n2,0\n");
  try {
    io::read_profile_csv(bad, Domain::line());
    FAIL("no exception");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find(bad + ":3") != std::string::npos);
  }
  const auto hdr = dir.file("hdr.csv", "x,y\n0,0\n");
  CHECK_THROWS_AS(io::read_profile_csv(hdr, Domain::line()), InvalidInput);
  const auto cols = dir.file("cols.csv", "t,value\n0,0,1\n");
  CHECK_THROWS_AS(io::read_profile_csv(cols, Domain::line()), InvalidInput);
  CHECK_THROWS_AS(io::read_profile_csv(dir.file("missing.csv"), Domain::line()), IoError);
}

TEST_CASE("domain JSON round trip") {
  for (const Domain& d : {Domain::line(), Domain::radial(3), Domain::circle(), Domain::polar(2)})
    CHECK(io::domain_from_json(io::domain_json(d)) == d);
}

TEST_CASE("dump sorts keys and ends with a newline") {
  const io::json j = {{"b", 1}, {"a", {1, 2}}};
  const std::string s = io::dump(j);
  REQUIRE(!s.empty());
  CHECK(s.back() == '\n');
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(io::dump(io::json::parse(s)) == s);
}
