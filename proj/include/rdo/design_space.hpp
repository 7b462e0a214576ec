#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdo {

enum class ParameterKind { geometric, material };

/// One bounded design parameter with its manufacturing tolerance (the
/// half-width of a uniform perturbation), in native units.
struct ParameterSpec {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double tolerance = 0.0;
  ParameterKind kind = ParameterKind::geometric;

  double width() const { return upper - lower; }
};

/// Values in parameter order of the owning DesignSpace.
using DesignPoint = std::vector<double>;

class DesignSpace {
 public:
  /// Throws Error(invalid_space) when a parameter violates its invariants or
  /// names collide.
  explicit DesignSpace(std::vector<ParameterSpec> params);

  /// The twelve geometric variables of the reference machine.
  static DesignSpace table_one();

  std::size_t size() const { return params_.size(); }
  const std::vector<ParameterSpec>& params() const { return params_; }
  const ParameterSpec& operator[](std::size_t i) const { return params_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;
  DesignPoint lower() const;
  DesignPoint upper() const;
  DesignPoint midpoint() const;
  bool contains(std::span<const double> x, double slack = 0.0) const;

 private:
  std::vector<ParameterSpec> params_;
};

/// Material degradation state: alpha scales the B(H) knee (1 = nominal,
/// 0 = fully degraded), beta is the magnet degradation fraction.
struct MaterialState {
  double alpha = 1.0;
  double beta = 0.0;

  static constexpr double max_beta = 0.065;

  bool nominal() const { return alpha == 1.0 && beta == 0.0; }
  friend bool operator==(const MaterialState&, const MaterialState&) = default;
};

/// Appends alpha and beta as material-kind parameters (used for surrogates
/// that take the material state as input).
DesignSpace with_material(const DesignSpace& space);

/// Per-parameter uniform perturbation half-widths plus the material flag.
/// Half-widths are either 0 (certain) or the owning parameter's tolerance.
struct UncertaintySpec {
  std::vector<double> half_widths;
  bool include_material = false;

  /// No uncertainty at all.
  static UncertaintySpec none(const DesignSpace& space);
  /// Tolerances of the named geometric parameters become uncertain; unknown
  /// names throw Error(invalid_argument).
  static UncertaintySpec geometric(const DesignSpace& space,
                                   std::span<const std::string> uncertain,
                                   bool include_material = false);

  std::size_t geometric_size() const { return half_widths.size(); }
  /// Length of a perturbation vector: geometry plus (alpha, beta) if included.
  std::size_t perturbation_size() const {
    return half_widths.size() + (include_material ? 2 : 0);
  }
  bool degenerate() const;
};

/// Axis-aligned box; dimensions with lower == upper are degenerate.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  double width(std::size_t i) const { return upper[i] - lower[i]; }
  bool degenerate(std::size_t i) const { return !(upper[i] > lower[i]); }
  /// Indices of non-degenerate dimensions.
  std::vector<std::size_t> active_dimensions() const;
  bool contains(std::span<const double> x) const;
};

/// A perturbed design: geometry after additive perturbation and the material
/// state (nominal unless the uncertainty includes material).
struct PerturbedPoint {
  DesignPoint geometry;
  MaterialState material;
};

/// Controllable space for robust runs: each interval shrunk by its
/// half-width so that every perturbed point stays inside `space`.
DesignSpace robust_search_space(const DesignSpace& space,
                                const UncertaintySpec& u);

/// The perturbation box: [-u, u] per geometric dimension, followed by
/// alpha in [0, 1] and beta in [0, 0.065] as absolute coordinates when the
/// material is uncertain.
Box perturbation_box(const UncertaintySpec& u);

/// Geometry is shifted componentwise, material coordinates replace the
/// nominal state.
PerturbedPoint apply_perturbation(std::span<const double> x,
                                  std::span<const double> perturbation,
                                  const UncertaintySpec& u);

/// Line-oriented text format, one parameter per line:
///   <name> <lower> <upper> <tolerance> <geometric|material>
/// Blank lines and '#' comments are ignored.
DesignSpace parse_design_space(std::string_view text);
DesignSpace load_design_space(const std::string& path);
std::string format_design_space(const DesignSpace& space);

}  // namespace rdo
