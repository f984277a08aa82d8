#include "diffcol/errors.hpp"

namespace diffcol {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Unavailable: return "Unavailable";
    case ErrorCode::BackendMismatch: return "BackendMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FileNotFound: return "FileNotFound";
  }
  return "Unknown";
}

std::string describe_flags(Flags flags) {
  if (flags == kConverged) return "ok";
  std::string out;
  auto add = [&](Flag f, const char* name) {
    if (flags & f) {
      if (!out.empty()) out += '|';
      out += name;
    }
  };
  add(kMaxIterations, "MaxIterations");
  add(kMaxFaces, "MaxFaces");
  add(kNumericalDegeneracy, "NumericalDegeneracy");
  add(kTouching, "Touching");
  add(kSampleFailure, "SampleFailure");
  add(kSingularSystem, "SingularSystem");
  add(kLineSearchStall, "LineSearchStall");
  return out;
}

}  // namespace diffcol
