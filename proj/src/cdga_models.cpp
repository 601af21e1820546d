#include "twistkit/cdga.hpp"

#include <map>
#include <stdexcept>

namespace twk {

namespace {

const char* kPt = R"(
model pt
dim 0
integral 1 = 1
)";

const char* kS1 = R"(
model s1
dim 1
gen dt deg 1
integral dt = 1
)";

const char* kS2 = R"(
model s2
dim 2
gen w deg 2
integral w = 1
)";

const char* kS3 = R"(
model s3
dim 3
gen v deg 3
integral v = 1
)";

const char* kS4 = R"(
model s4
dim 4
gen q deg 4
integral q = 1
)";

const char* kCp2 = R"(
model cp2
dim 4
gen y deg 2
gen y2 deg 4
mul y*y = y2
integral y2 = 1
)";

const char* kT2 = R"(
model t2
dim 2
gen dx deg 1
gen dy deg 1
gen dxdy deg 2
mul dx*dy = dxdy
integral dxdy = 1
)";

const char* kT3 = R"(
model t3
dim 3
gen dx deg 1
gen dy deg 1
gen dz deg 1
gen dxdy deg 2
gen dxdz deg 2
gen dydz deg 2
gen dxdydz deg 3
mul dx*dy = dxdy
mul dx*dz = dxdz
mul dy*dz = dydz
mul dx*dydz = dxdydz
mul dy*dxdz = -dxdydz
mul dz*dxdy = dxdydz
integral dxdydz = 1
)";

// Contractible chart: free on y (degree 2) with dy = v, truncated above
// degree 9.  The only shipped model with an exact degree-3 form, used where
// connection data need a global curving primitive (d kappa0 = H).
const char* kChart3 = R"(
model chart3
dim 9
gen y deg 2
gen v deg 3
gen y2 deg 4
gen yv deg 5
gen y3 deg 6
gen y2v deg 7
gen y4 deg 8
gen y3v deg 9
d y = v
d y2 = 2*yv
d y3 = 3*y2v
d y4 = 4*y3v
mul y*y = y2
mul y*v = yv
mul y*y2 = y3
mul y*yv = y2v
mul y*y3 = y4
mul y*y2v = y3v
mul y2*y2 = y4
mul y2*v = y2v
mul y2*yv = y3v
mul y3*v = y3v
)";

std::map<std::string, CdgaModel> build_registry() {
  std::map<std::string, CdgaModel> reg;
  for (const char* text : {kPt, kS1, kS2, kS3, kS4, kCp2, kT2, kT3, kChart3}) {
    CdgaModel m = parse_model(text, "<builtin>");
    reg.emplace(m.name, std::move(m));
  }
  return reg;
}

const std::map<std::string, CdgaModel>& registry() {
  static const std::map<std::string, CdgaModel> reg = build_registry();
  return reg;
}

}  // namespace

const CdgaModel& model_registry(const std::string& name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) {
    std::string msg = "unknown model '" + name + "'; shipped models:";
    for (const auto& [k, v] : reg) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  return it->second;
}

std::vector<std::string> model_registry_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

}  // namespace twk
