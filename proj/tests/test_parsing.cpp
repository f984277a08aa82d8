#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diffcol/config.hpp"
#include "diffcol/errors.hpp"
#include "diffcol/estimators.hpp"
#include "diffcol/shape_spec.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace diffcol;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_shape_spec(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shape specs") {
  CHECK(std::get<Sphere>(parse_shape_spec("sphere:1.0")).radius == 1.0);
  CHECK(std::get<Ellipsoid>(parse_shape_spec("ellipsoid:2,1,1")).semi_axes == Eigen::Vector3d(2, 1, 1));
  CHECK(std::get<Box>(parse_shape_spec("box:0.5,1,2e-1")).half_extents == Eigen::Vector3d(0.5, 1, 0.2));
  const Capsule c = std::get<Capsule>(parse_shape_spec("capsule:1.5,0.25"));
  CHECK(c.half_length == 1.5);
  CHECK(c.radius == 0.25);
}

TEST_CASE("shape spec diagnostics") {
  CHECK(parse_error("sphere:-1").find("radius must be positive") != std::string::npos);
  CHECK(parse_error("sphere:-1").find("at 7") != std::string::npos);
  CHECK(parse_error("ellipsoid:1,x,1").find("bad number 'x'") != std::string::npos);
  CHECK(parse_error("ellipsoid:1,x,1").find("at 12") != std::string::npos);
  CHECK(parse_error("ellipsoid:1,1").find("expects 3") != std::string::npos);
  CHECK(parse_error("cone:1").find("cone") != std::string::npos);
  CHECK(parse_error("sphere").find("KIND:PARAMS") != std::string::npos);
  CHECK(parse_error("sphere:1.0abc").find("bad number") != std::string::npos);
  CHECK(parse_error("box:1,0,1").find("positive") != std::string::npos);
  try {
    parse_shape_spec("mesh:/nonexistent/diffcol.obj");
    FAIL("expected FileNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FileNotFound);
  }
}

TEST_CASE("mesh shape spec loads an OBJ hull") {
  const auto path = (std::filesystem::temp_directory_path() / "diffcol_spec_cube.obj").string();
  write_obj(path, box_mesh(make_box({1, 2, 3})));
  const ConvexMesh m = std::get<ConvexMesh>(parse_shape_spec("mesh:" + path));
  CHECK(m.size() == 8);
  CHECK(m.vertices().rowwise().maxCoeff() == Eigen::Vector3d(1, 2, 3));
  std::remove(path.c_str());
}

TEST_CASE("key-value config") {
  const KeyValueConfig kv = KeyValueConfig::parse(
      "top = 1  # trailing comment\n"
      "\n"
      "[section]\n"
      "name = \"a # not a comment\"\n"
      "flag = true\n"
      "ratio = 2.5e-3\n"
      "seed = 18446744073709551615\n"
      "list = [\"x\", \"y\" , 3]\n"
      "empty = []\n");
  CHECK(kv.get_int("top", 0) == 1);
  CHECK(kv.get_string("section.name", "") == "a # not a comment");
  CHECK(kv.get_bool("section.flag", false));
  CHECK(kv.get_double("section.ratio", 0.0) == 2.5e-3);
  CHECK(kv.get_u64("section.seed", 0) == 18446744073709551615ull);
  CHECK(kv.get_list("section.list", {}) == std::vector<std::string>{"x", "y", "3"});
  CHECK(kv.get_list("section.empty", {"z"}).empty());
  CHECK(kv.get_double("missing", 7.0) == 7.0);
  CHECK(kv.keys().size() == 7);

  CHECK_THROWS_AS(kv.get_int("section.ratio", 0), Error);
  CHECK_THROWS_AS(kv.get_bool("top", false), Error);
  CHECK_THROWS_AS(kv.get_string("section.list", ""), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("[open\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("novalue\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("s = \"unterminated\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("l = [1, 2\n"), Error);
  try {
    KeyValueConfig::parse("ok = 1\nbad key = 2\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/diffcol.toml"), Error);
}

TEST_CASE("estimator specs") {
  const EstimatorSpec fd = parse_estimator_spec("fd:1e-3");
  CHECK(fd.kind == EstimatorKind::FiniteDifference);
  CHECK(fd.noise == 1e-3);
  CHECK(parse_estimator_spec("fd").noise == 1e-6);

  const EstimatorSpec z = parse_estimator_spec("zeroth");
  CHECK(z.kind == EstimatorKind::ZerothOrder);
  CHECK(z.samples == 50);
  CHECK(z.noise == 1e-2);
  CHECK(z.control_variate);
  CHECK_FALSE(parse_estimator_spec("zeroth-raw:10:0.1").control_variate);

  const EstimatorSpec g = parse_estimator_spec("first-gaussian");
  CHECK(g.samples == 20);
  CHECK(g.noise == 1e-3);
  const EstimatorSpec u = parse_estimator_spec("first-gumbel");
  CHECK(u.kind == EstimatorKind::FirstOrderGumbel);
  CHECK(u.samples == 1);
  CHECK(u.noise == 1e-4);
  CHECK(parse_estimator_spec("first-gumbel:0:1e-2").samples == 0);
  CHECK(parse_estimator_spec("first-analytic").kind == EstimatorKind::FirstOrderAnalytic);

  for (const char* text : {"fd:1e-06", "zeroth:50:0.01", "zeroth-raw:7:0.5", "first-analytic",
                           "first-gaussian:20:0.001", "first-gumbel:3:0.0001"}) {
    CHECK(format_estimator_spec(parse_estimator_spec(text)) == text);
  }
}

TEST_CASE("estimator spec diagnostics") {
  try {
    parse_estimator_spec("gumbel:1:1e-4");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    const std::string msg = e.what();
    for (const char* kind : {"fd", "zeroth", "first-analytic", "first-gaussian", "first-gumbel"}) {
      CHECK(msg.find(kind) != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse_estimator_spec(""), Error);
  CHECK_THROWS_AS(parse_estimator_spec("fd:-1"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("fd:1e-3:5"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("zeroth:0:1e-2"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("zeroth:ten"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("first-gumbel:-1"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("first-analytic:3"), Error);
  CHECK_THROWS_AS(parse_estimator_spec("first-gaussian:20:0"), Error);
}

TEST_CASE("flag descriptions") {
  CHECK(describe_flags(kConverged) == "ok");
  const std::string both = describe_flags(kMaxIterations | kSingularSystem);
  CHECK(both.find("MaxIterations") != std::string::npos);
  CHECK(both.find("SingularSystem") != std::string::npos);
  CHECK((kFailureFlags & kTouching) == 0);
  CHECK((kFailureFlags & kLineSearchStall) == 0);
}
