#pragma once

#include "doctest.h"
#include "openbilliards/pipeline.hpp"

namespace obt {
using namespace ob;

inline const char* kH = "5.196152422706632"; // 3 sqrt(3), to the digits the configs use

inline Table equilateral() {
    return Table({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1"), CurveSpec::circle("3", kH, "1")});
}

inline Table pair_at(const std::string& d) {
    return Table({CurveSpec::circle("0", "0", "1"), CurveSpec::circle(d, "0", "1")});
}

inline std::string config_path(const std::string& name) { return std::string(OB_SOURCE_DIR) + "/configs/" + name; }

inline bool close(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol; }
} // namespace obt
