#pragma once

// Grids, scalar fields, split-frame differentiation and quadrature.
//
// Periodic axes use Fourier collocation (dense differentiation matrices built
// from the trigonometric symbols); truncated axes use 4th-order centred
// differences with even reflection at both endpoints (homogeneous Neumann).

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "splitma/errors.hpp"

namespace splitma {

enum class BackendKind { Torus4D, HopfCylinder, InoueStrip };

const char* to_string(BackendKind kind) noexcept;

struct AxisSpec {
  std::size_t n = 0;
  double lo = 0.0;
  double hi = 1.0;  // periodic: lo + period; truncated: last sample
  bool periodic = true;
};

/// Chart descriptor.
///
/// Torus4D: axes (x1, x2, x3, x4) with z = x1 + i x2, w = x3 + i x4.
/// HopfCylinder: axes (x, s) with mu = s + x/2, nu = s - x/2; s has period 2.
/// InoueStrip: single axis y = Im(z) on [y_lo, y_hi].
struct GridSpec {
  BackendKind kind = BackendKind::Torus4D;
  std::vector<AxisSpec> axes;
  double alpha = 1.0;  // Hopf only
  double beta = 1.0;   // Hopf only

  static GridSpec torus(std::array<std::size_t, 4> n, std::array<double, 4> periods = {1.0, 1.0, 1.0, 1.0});
  /// `half_width <= 0` selects the default truncation 10 / min(alpha, beta, 1).
  static GridSpec hopf(double alpha, double beta, std::size_t nx, std::size_t ns, double half_width = 0.0);
  static GridSpec inoue(std::size_t ny, double y_lo, double y_hi);

  static double default_hopf_half_width(double alpha, double beta);
};

/// Immutable grid with precomputed operators. Shared by every field on it.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(const GridSpec& spec);

  const GridSpec& spec() const noexcept { return spec_; }
  BackendKind kind() const noexcept { return spec_.kind; }
  std::size_t rank() const noexcept { return spec_.axes.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t extent(std::size_t axis) const { return spec_.axes[axis].n; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  bool periodic(std::size_t axis) const { return spec_.axes[axis].periodic; }
  double spacing(std::size_t axis) const { return h_[axis]; }
  double coordinate(std::size_t axis, std::size_t i) const { return spec_.axes[axis].lo + h_[axis] * double(i); }
  std::span<const double> weights(std::size_t axis) const { return weights_[axis]; }

  /// Wavenumbers of the periodic axis in DFT order (0, 1, ..., -1) times 2 pi / L.
  std::span<const double> wavenumbers(std::size_t axis) const { return wavenumbers_[axis]; }
  /// Symbol of the first-derivative matrix (zero at the Nyquist mode).
  double d1_symbol(std::size_t axis, std::size_t mode) const;
  /// Symbol of the second-derivative matrix (-k^2, Nyquist included).
  double d2_symbol(std::size_t axis, std::size_t mode) const;

  void index_to_multi(std::size_t flat, std::span<std::size_t> multi) const;
  void coordinates(std::size_t flat, std::span<double> out) const;

  /// Applies d/dx_axis (order 1) or d^2/dx_axis^2 (order 2) along one axis.
  void apply_axis(std::span<const double> in, std::span<double> out, std::size_t axis, int order) const;

  /// Quadrature weight product for the flat index (no chart density factor).
  double weight(std::size_t flat) const;
  /// Chart density folded into `integrate`: 4 on Torus4D, 4 pi^2/(alpha beta) on Hopf, 1 on Inoue.
  double density_factor() const noexcept;

  /// True when the point lies at least `margin` samples away from every truncated-axis end.
  bool interior(std::size_t flat, std::size_t margin = 3) const;

  bool same_as(const Grid& other) const noexcept { return this == &other; }

  Grid(const GridSpec& spec, int);  // use make()

 private:
  GridSpec spec_;
  std::size_t size_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<double> h_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> wavenumbers_;
  std::vector<Eigen::MatrixXd> d1_;  // periodic axes only
  std::vector<Eigen::MatrixXd> d2_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real samples on a grid. Plain value type.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Samples f(coords) at every grid point.
  static ScalarField sample(GridPtr grid, const std::function<double(std::span<const double>)>& f);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  ScalarField map(const std::function<double(double)>& f) const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double s);

  double min() const;
  double max() const;
  double sup_norm() const;
  /// Sup norm over points away from truncated-axis ends.
  double interior_sup_norm(std::size_t margin = 3) const;
  /// Quadrature-weighted mean (no chart density).
  double mean() const;
  bool finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);

/// Real and imaginary parts of the mixed coefficient.
struct ComplexField {
  ScalarField re;
  ScalarField im;
};

void require_same_grid(const ScalarField& a, const ScalarField& b);

/// a with i d+ dbar+ u = a Theta+.
ScalarField second_plus(const ScalarField& u);
/// b with i d- dbar- u = b Theta-.
ScalarField second_minus(const ScalarField& u);
/// Mixed d+ dbar- coefficient against the backend's mixed frame.
ComplexField mixed_cross(const ScalarField& u);
/// Integral against Theta+ ^ Theta- with the chart density folded in.
double integrate(const ScalarField& v);
/// Same integral on the every-other-sample subgrid (where the axis allows it).
double integrate_coarse(const ScalarField& v);

/// Band-limited deterministic test field with zero mean and sup norm `amplitude`.
ScalarField random_smooth_field(GridPtr grid, std::uint64_t seed, double amplitude, double decay = 1.0);

}  // namespace splitma
