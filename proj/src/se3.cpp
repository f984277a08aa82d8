#include "diffcol/se3.hpp"

#include "diffcol/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace diffcol {

std::string format_pose(const Pose& pose) {
  const Pose::Parameters p = pose.parameters();
  std::string out;
  char buf[32];
  for (int i = 0; i < 7; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", p(i));
    if (i) out += ' ';
    out += buf;
  }
  return out;
}

Pose parse_pose(const std::string& text) {
  std::istringstream in(text);
  Pose::Parameters p;
  for (int i = 0; i < 7; ++i) {
    if (!(in >> p(i))) {
      throw Error(ErrorCode::ParseError,
                  "pose needs 7 scalars 'tx ty tz qx qy qz qw', got '" + text + "'");
    }
    if (!std::isfinite(p(i))) throw Error(ErrorCode::ParseError, "pose entry is not finite");
  }
  std::string rest;
  if (in >> rest) throw Error(ErrorCode::ParseError, "trailing token '" + rest + "' in pose");
  if (p.tail<4>().norm() < 1e-12) throw Error(ErrorCode::ParseError, "zero quaternion in pose");
  return Pose::fromParameters(p);
}

}  // namespace diffcol
