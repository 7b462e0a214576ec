#include "rdo/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "rdo/error.hpp"

namespace rdo {

namespace {

void validate(const ParameterSpec& p) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::invalid_space, "parameter '" + p.name + "': " + why);
  };
  if (p.name.empty()) fail("empty name");
  if (!std::isfinite(p.lower) || !std::isfinite(p.upper) ||
      !std::isfinite(p.tolerance)) {
    fail("non-finite bound or tolerance");
  }
  if (!(p.lower < p.upper)) fail("lower bound must be below upper bound");
  if (p.tolerance < 0.0) fail("negative tolerance");
  if (p.kind == ParameterKind::geometric && !(p.tolerance < p.width() / 2.0)) {
    fail("tolerance must be below half the interval width");
  }
}

}  // namespace

DesignSpace::DesignSpace(std::vector<ParameterSpec> params)
    : params_(std::move(params)) {
  std::set<std::string> seen;
  for (const auto& p : params_) {
    validate(p);
    if (!seen.insert(p.name).second) {
      throw Error(ErrorCode::invalid_space, "duplicate parameter '" + p.name + "'");
    }
  }
}

DesignSpace DesignSpace::table_one() {
  using K = ParameterKind;
  return DesignSpace({
      {"Slot_angle", 2.47, 3.27, 0.1, K::geometric},
      {"Beta_L1_P1", 27.03, 29.66, 0.33, K::geometric},
      {"Beta_L1_P2", 37.03, 39.66, 0.33, K::geometric},
      {"Beta_L2_P1", 31.03, 33.66, 0.33, K::geometric},
      {"Beta_L2_P2", 47.03, 49.66, 0.33, K::geometric},
      {"Beta_L3_P1", 33.7, 37.0, 0.33, K::geometric},
      {"Beta_L3_P2", 59.7, 63.0, 0.33, K::geometric},
      {"Airgap", 0.55, 0.65, 0.03, K::geometric},
      {"Bridge_L1", 2.6, 2.98, 0.05, K::geometric},
      {"Bridge_L2", 0.9, 1.18, 0.05, K::geometric},
      {"Bridge_L3", 0.5, 0.62, 0.03, K::geometric},
      {"Bridge_tang", 0.4, 0.6, 0.05, K::geometric},
  });
}

std::optional<std::size_t> DesignSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> DesignSpace::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

DesignPoint DesignSpace::lower() const {
  DesignPoint out;
  for (const auto& p : params_) out.push_back(p.lower);
  return out;
}

DesignPoint DesignSpace::upper() const {
  DesignPoint out;
  for (const auto& p : params_) out.push_back(p.upper);
  return out;
}

DesignPoint DesignSpace::midpoint() const {
  DesignPoint out;
  for (const auto& p : params_) out.push_back(0.5 * (p.lower + p.upper));
  return out;
}

bool DesignSpace::contains(std::span<const double> x, double slack) const {
  if (x.size() != params_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < params_[i].lower - slack || x[i] > params_[i].upper + slack) return false;
  }
  return true;
}

DesignSpace with_material(const DesignSpace& space) {
  auto params = space.params();
  params.push_back({"alpha", 0.0, 1.0, 0.0, ParameterKind::material});
  params.push_back({"beta", 0.0, MaterialState::max_beta, 0.0, ParameterKind::material});
  return DesignSpace(std::move(params));
}

UncertaintySpec UncertaintySpec::none(const DesignSpace& space) {
  return {std::vector<double>(space.size(), 0.0), false};
}

UncertaintySpec UncertaintySpec::geometric(const DesignSpace& space,
                                           std::span<const std::string> uncertain,
                                           bool include_material) {
  UncertaintySpec u = none(space);
  u.include_material = include_material;
  for (const auto& name : uncertain) {
    const auto idx = space.index_of(name);
    if (!idx) throw Error(ErrorCode::invalid_argument, "unknown parameter '" + name + "'");
    if (space[*idx].kind != ParameterKind::geometric) {
      throw Error(ErrorCode::invalid_argument, "'" + name + "' is not geometric");
    }
    u.half_widths[*idx] = space[*idx].tolerance;
  }
  return u;
}

bool UncertaintySpec::degenerate() const {
  if (include_material) return false;
  return std::all_of(half_widths.begin(), half_widths.end(),
                     [](double w) { return w == 0.0; });
}

std::vector<std::size_t> Box::active_dimensions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!degenerate(i)) out.push_back(i);
  }
  return out;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

DesignSpace robust_search_space(const DesignSpace& space, const UncertaintySpec& u) {
  if (u.half_widths.size() != space.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "uncertainty has " + std::to_string(u.half_widths.size()) +
                    " half-widths for a space of " + std::to_string(space.size()));
  }
  std::vector<ParameterSpec> params = space.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double w = u.half_widths[i];
    const double lo = params[i].lower + w;
    const double hi = params[i].upper - w;
    if (!(lo < hi)) {
      throw Error(ErrorCode::invalid_space,
                  "interval of '" + params[i].name + "' collapses under its tolerance");
    }
    params[i].lower = lo;
    params[i].upper = hi;
    // keep the tolerance invariant on narrow intervals
    params[i].tolerance = std::min(params[i].tolerance, 0.5 * (hi - lo) * 0.999);
  }
  return DesignSpace(std::move(params));
}

Box perturbation_box(const UncertaintySpec& u) {
  Box box;
  for (double w : u.half_widths) {
    box.lower.push_back(-w);
    box.upper.push_back(w);
  }
  if (u.include_material) {
    box.lower.push_back(0.0);
    box.upper.push_back(1.0);
    box.lower.push_back(0.0);
    box.upper.push_back(MaterialState::max_beta);
  }
  return box;
}

PerturbedPoint apply_perturbation(std::span<const double> x,
                                  std::span<const double> perturbation,
                                  const UncertaintySpec& u) {
  if (x.size() != u.geometric_size() || perturbation.size() != u.perturbation_size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "perturbation of size " + std::to_string(perturbation.size()) +
                    " does not fit a design of size " + std::to_string(x.size()));
  }
  PerturbedPoint out;
  out.geometry.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.geometry[i] = x[i] + perturbation[i];
  if (u.include_material) {
    out.material.alpha = perturbation[x.size()];
    out.material.beta = perturbation[x.size() + 1];
  }
  return out;
}

DesignSpace parse_design_space(std::string_view text) {
  std::vector<ParameterSpec> params;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    ParameterSpec p;
    std::string kind;
    if (!(fields >> p.name)) continue;
    if (!(fields >> p.lower >> p.upper >> p.tolerance >> kind)) {
      throw Error(ErrorCode::parse_error,
                  "design space line " + std::to_string(line_no) +
                      ": expected '<name> <lower> <upper> <tolerance> <kind>'");
    }
    if (kind == "geometric") {
      p.kind = ParameterKind::geometric;
    } else if (kind == "material") {
      p.kind = ParameterKind::material;
    } else {
      throw Error(ErrorCode::parse_error, "design space line " + std::to_string(line_no) +
                                              ": unknown kind '" + kind + "'");
    }
    std::string extra;
    if (fields >> extra) {
      throw Error(ErrorCode::parse_error, "design space line " + std::to_string(line_no) +
                                              ": trailing field '" + extra + "'");
    }
    params.push_back(std::move(p));
  }
  if (params.empty()) throw Error(ErrorCode::parse_error, "design space has no parameters");
  return DesignSpace(std::move(params));
}

DesignSpace load_design_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open design space file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_design_space(buffer.str());
}

std::string format_design_space(const DesignSpace& space) {
  std::ostringstream out;
  out << "# name lower upper tolerance kind\n" << std::setprecision(17);
  for (const auto& p : space.params()) {
    out << p.name << ' ' << p.lower << ' ' << p.upper << ' ' << p.tolerance << ' '
        << (p.kind == ParameterKind::geometric ? "geometric" : "material") << '\n';
  }
  return out.str();
}

}  // namespace rdo
