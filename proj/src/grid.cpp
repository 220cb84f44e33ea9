#include "splitma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace splitma {

const char* to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Torus4D: return "torus4d";
    case BackendKind::HopfCylinder: return "hopf";
    case BackendKind::InoueStrip: return "inoue";
  }
  return "unknown";
}

GridSpec GridSpec::torus(std::array<std::size_t, 4> n, std::array<double, 4> periods) {
  GridSpec spec;
  spec.kind = BackendKind::Torus4D;
  for (std::size_t a = 0; a < 4; ++a) spec.axes.push_back({n[a], 0.0, periods[a], true});
  return spec;
}

double GridSpec::default_hopf_half_width(double alpha, double beta) {
  return 10.0 / std::min({alpha, beta, 1.0});
}

GridSpec GridSpec::hopf(double alpha, double beta, std::size_t nx, std::size_t ns, double half_width) {
  GridSpec spec;
  spec.kind = BackendKind::HopfCylinder;
  spec.alpha = alpha;
  spec.beta = beta;
  const double X = half_width > 0.0 ? half_width : default_hopf_half_width(alpha, beta);
  spec.axes.push_back({nx, -X, X, false});
  spec.axes.push_back({ns, 0.0, 2.0, true});
  return spec;
}

GridSpec GridSpec::inoue(std::size_t ny, double y_lo, double y_hi) {
  GridSpec spec;
  spec.kind = BackendKind::InoueStrip;
  spec.axes.push_back({ny, y_lo, y_hi, false});
  return spec;
}

namespace {

void validate(const GridSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  const std::size_t expected_rank = spec.kind == BackendKind::Torus4D ? 4 : spec.kind == BackendKind::HopfCylinder ? 2 : 1;
  if (spec.axes.size() != expected_rank) fail("grid: wrong number of axes for backend");
  for (const auto& ax : spec.axes) {
    if (ax.n < 4) fail("grid: every axis needs at least 4 samples");
    if (!(ax.hi > ax.lo) || !std::isfinite(ax.hi - ax.lo)) fail("grid: axis extent must be positive");
  }
  if (spec.kind == BackendKind::HopfCylinder) {
    if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) fail("grid: Hopf alpha and beta must be positive");
    if (spec.axes[0].periodic || !spec.axes[1].periodic) fail("grid: Hopf axes are (truncated x, periodic s)");
    if (std::abs(spec.axes[0].lo + spec.axes[0].hi) > 1e-12 * spec.axes[0].hi) fail("grid: Hopf x-range must be symmetric");
  }
  if (spec.kind == BackendKind::InoueStrip) {
    if (spec.axes[0].periodic) fail("grid: Inoue y-axis is truncated");
    if (!(spec.axes[0].lo > 0.0)) fail("grid: Inoue strip needs 0 < y_lo < y_hi");
  }
  if (spec.kind == BackendKind::Torus4D) {
    for (const auto& ax : spec.axes)
      if (!ax.periodic) fail("grid: torus axes are periodic");
  }
}

}  // namespace

Grid::Grid(const GridSpec& spec, int) : spec_(spec) {
  const std::size_t r = spec.axes.size();
  strides_.assign(r, 1);
  size_ = 1;
  for (std::size_t a = r; a-- > 0;) {
    strides_[a] = size_;
    size_ *= spec.axes[a].n;
  }
  h_.resize(r);
  weights_.resize(r);
  wavenumbers_.resize(r);
  d1_.resize(r);
  d2_.resize(r);
  for (std::size_t a = 0; a < r; ++a) {
    const auto& ax = spec.axes[a];
    const std::size_t n = ax.n;
    if (ax.periodic) {
      const double L = ax.hi - ax.lo;
      h_[a] = L / double(n);
      weights_[a].assign(n, h_[a]);
      wavenumbers_[a].resize(n);
      for (std::size_t m = 0; m < n; ++m) {
        const long mm = m <= n / 2 ? long(m) : long(m) - long(n);
        wavenumbers_[a][m] = 2.0 * std::numbers::pi * double(mm) / L;
      }
      Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n), d2 = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          const double dx = h_[a] * (double(j) - double(k));
          double s1 = 0.0, s2 = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            const double kap = wavenumbers_[a][m];
            s1 += d1_symbol(a, m) * std::sin(kap * dx);
            s2 += -kap * kap * std::cos(kap * dx);
          }
          d1(j, k) = -s1 / double(n);
          d2(j, k) = s2 / double(n);
        }
      }
      d1_[a] = std::move(d1);
      d2_[a] = std::move(d2);
    } else {
      h_[a] = (ax.hi - ax.lo) / double(n - 1);
      weights_[a].assign(n, h_[a]);
      weights_[a].front() *= 0.5;
      weights_[a].back() *= 0.5;
    }
  }
}

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) {
  validate(spec);
  return std::make_shared<const Grid>(spec, 0);
}

double Grid::d1_symbol(std::size_t axis, std::size_t mode) const {
  const std::size_t n = extent(axis);
  if (n % 2 == 0 && mode == n / 2) return 0.0;
  return wavenumbers_[axis][mode];
}

double Grid::d2_symbol(std::size_t axis, std::size_t mode) const {
  const double k = wavenumbers_[axis][mode];
  return -k * k;
}

void Grid::index_to_multi(std::size_t flat, std::span<std::size_t> multi) const {
  for (std::size_t a = 0; a < rank(); ++a) {
    multi[a] = flat / strides_[a];
    flat %= strides_[a];
  }
}

void Grid::coordinates(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = 0; a < rank(); ++a) {
    const std::size_t i = flat / strides_[a];
    flat %= strides_[a];
    out[a] = coordinate(a, i);
  }
}

double Grid::weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t a = 0; a < rank(); ++a) {
    const std::size_t i = flat / strides_[a];
    flat %= strides_[a];
    w *= weights_[a][i];
  }
  return w;
}

double Grid::density_factor() const noexcept {
  switch (spec_.kind) {
    case BackendKind::Torus4D: return 4.0;
    case BackendKind::HopfCylinder: return 4.0 * std::numbers::pi * std::numbers::pi / (spec_.alpha * spec_.beta);
    case BackendKind::InoueStrip: return 1.0;
  }
  return 1.0;
}

bool Grid::interior(std::size_t flat, std::size_t margin) const {
  for (std::size_t a = 0; a < rank(); ++a) {
    const std::size_t i = flat / strides_[a];
    flat %= strides_[a];
    if (!periodic(a) && (i < margin || i + margin >= extent(a))) return false;
  }
  return true;
}

void Grid::apply_axis(std::span<const double> in, std::span<double> out, std::size_t axis, int order) const {
  const std::size_t n = extent(axis);
  const std::size_t inner = strides_[axis];
  const std::size_t outer = size_ / (n * inner);
  std::vector<double> line(n), res(n);
  const bool per = periodic(axis);
  const double h = h_[axis];
  const Eigen::MatrixXd* mat = per ? (order == 1 ? &d1_[axis] : &d2_[axis]) : nullptr;
  auto reflect = [n](long j) -> std::size_t {
    const long last = long(n) - 1;
    if (j < 0) j = -j;
    if (j > last) j = 2 * last - j;
    return std::size_t(j);
  };
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      for (std::size_t k = 0; k < n; ++k) line[k] = in[base + k * inner];
      if (per) {
        Eigen::Map<const Eigen::VectorXd> x(line.data(), long(n));
        Eigen::Map<Eigen::VectorXd> y(res.data(), long(n));
        y.noalias() = (*mat) * x;
      } else if (order == 1) {
        const double c = 1.0 / (12.0 * h);
        for (std::size_t k = 0; k < n; ++k) {
          const long j = long(k);
          res[k] = c * (line[reflect(j - 2)] - 8.0 * line[reflect(j - 1)] + 8.0 * line[reflect(j + 1)] - line[reflect(j + 2)]);
        }
      } else {
        const double c = 1.0 / (12.0 * h * h);
        for (std::size_t k = 0; k < n; ++k) {
          const long j = long(k);
          res[k] = c * (-line[reflect(j - 2)] + 16.0 * line[reflect(j - 1)] - 30.0 * line[k] + 16.0 * line[reflect(j + 1)] -
                        line[reflect(j + 2)]);
        }
      }
      for (std::size_t k = 0; k < n; ++k) out[base + k * inner] = res[k];
    }
  }
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridPtr grid, double value) : grid_(std::move(grid)) {
  if (!grid_) throw Error(ErrorKind::InvalidArgument, "field: null grid");
  values_.assign(grid_->size(), value);
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorKind::InvalidArgument, "field: null grid");
  if (values_.size() != grid_->size()) throw Error(ErrorKind::InvalidArgument, "field: value count does not match grid");
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(std::span<const double>)>& f) {
  ScalarField out(grid);
  std::vector<double> c(grid->rank());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    grid->coordinates(i, c);
    out.values_[i] = f(c);
  }
  return out;
}

ScalarField ScalarField::map(const std::function<double(double)>& f) const {
  ScalarField out = *this;
  for (double& v : out.values_) v = f(v);
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.grid() || !b.grid() || !a.grid()->same_as(*b.grid()))
    throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double s) {
  for (double& v : values_) v += s;
  return *this;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::interior_sup_norm(std::size_t margin) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (grid_->interior(i, margin)) m = std::max(m, std::abs(values_[i]));
  return m;
}

double ScalarField::mean() const {
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double wi = grid_->weight(i);
    s += wi * values_[i];
    w += wi;
  }
  return s / w;
}

bool ScalarField::finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] *= b[i];
  return out;
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] /= b[i];
  return out;
}

ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField exp(const ScalarField& a) { return a.map([](double v) { return std::exp(v); }); }
ScalarField log(const ScalarField& a) { return a.map([](double v) { return std::log(v); }); }

// ---------------------------------------------------------------------------

namespace {

ScalarField axis_op(const ScalarField& u, std::size_t axis, int order) {
  ScalarField out(u.grid());
  u.grid()->apply_axis(u.values(), out.values(), axis, order);
  return out;
}

ScalarField mixed_axes(const ScalarField& u, std::size_t a, std::size_t b) {
  return axis_op(axis_op(u, b, 1), a, 1);
}

}  // namespace

ScalarField second_plus(const ScalarField& u) {
  switch (u.grid()->kind()) {
    case BackendKind::Torus4D: return 0.25 * (axis_op(u, 0, 2) + axis_op(u, 1, 2));
    case BackendKind::HopfCylinder:
      // (d_x + d_s / 2)^2
      return axis_op(u, 0, 2) + mixed_axes(u, 0, 1) + 0.25 * axis_op(u, 1, 2);
    case BackendKind::InoueStrip: return 0.25 * axis_op(u, 0, 2);
  }
  throw Error(ErrorKind::UnsupportedBackend, "second_plus: unsupported backend");
}

ScalarField second_minus(const ScalarField& u) {
  switch (u.grid()->kind()) {
    case BackendKind::Torus4D: return 0.25 * (axis_op(u, 2, 2) + axis_op(u, 3, 2));
    case BackendKind::HopfCylinder:
      // (d_s / 2 - d_x)^2
      return axis_op(u, 0, 2) - mixed_axes(u, 0, 1) + 0.25 * axis_op(u, 1, 2);
    case BackendKind::InoueStrip: return ScalarField(u.grid(), 0.0);
  }
  throw Error(ErrorKind::UnsupportedBackend, "second_minus: unsupported backend");
}

ComplexField mixed_cross(const ScalarField& u) {
  switch (u.grid()->kind()) {
    case BackendKind::Torus4D: {
      // 1/4 (d1 - i d2)(d3 + i d4)
      ScalarField re = 0.25 * (mixed_axes(u, 0, 2) + mixed_axes(u, 1, 3));
      ScalarField im = 0.25 * (mixed_axes(u, 0, 3) - mixed_axes(u, 1, 2));
      return {std::move(re), std::move(im)};
    }
    case BackendKind::HopfCylinder:
      // d_mu d_nu = d_s^2 / 4 - d_x^2
      return {0.25 * axis_op(u, 1, 2) - axis_op(u, 0, 2), ScalarField(u.grid(), 0.0)};
    case BackendKind::InoueStrip: return {ScalarField(u.grid(), 0.0), ScalarField(u.grid(), 0.0)};
  }
  throw Error(ErrorKind::UnsupportedBackend, "mixed_cross: unsupported backend");
}

double integrate(const ScalarField& v) {
  const Grid& g = *v.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += g.weight(i) * v[i];
  return g.density_factor() * s;
}

double integrate_coarse(const ScalarField& v) {
  const Grid& g = *v.grid();
  std::vector<std::vector<double>> w(g.rank());
  for (std::size_t a = 0; a < g.rank(); ++a) {
    const std::size_t n = g.extent(a);
    const double h = g.spacing(a);
    w[a].assign(n, 0.0);
    if (g.periodic(a) && n % 2 == 0) {
      for (std::size_t i = 0; i < n; i += 2) w[a][i] = 2.0 * h;
    } else if (!g.periodic(a) && n % 2 == 1) {
      for (std::size_t i = 0; i < n; i += 2) w[a][i] = 2.0 * h;
      w[a].front() = h;
      w[a].back() = h;
    } else {
      auto fine = g.weights(a);
      std::copy(fine.begin(), fine.end(), w[a].begin());
    }
  }
  std::vector<std::size_t> multi(g.rank());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    g.index_to_multi(i, multi);
    double wi = 1.0;
    for (std::size_t a = 0; a < g.rank(); ++a) wi *= w[a][multi[a]];
    s += wi * v[i];
  }
  return g.density_factor() * s;
}

ScalarField random_smooth_field(GridPtr grid, std::uint64_t seed, double amplitude, double decay) {
  if (amplitude < 0.0 || !(decay > 0.0)) throw Error(ErrorKind::InvalidArgument, "random_smooth_field: need amplitude >= 0, decay > 0");
  ScalarField out(grid, 0.0);
  if (amplitude == 0.0) return out;
  const std::size_t r = grid->rank();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  std::vector<std::size_t> max_mode(r);
  std::size_t terms = 1;
  for (std::size_t a = 0; a < r; ++a) {
    max_mode[a] = std::min<std::size_t>(2, grid->extent(a) / 4);
    terms *= max_mode[a] + 1;
  }
  std::vector<std::size_t> m(r);
  std::vector<std::vector<double>> factor(r);
  std::vector<std::size_t> multi(r);
  for (std::size_t t = 1; t < terms; ++t) {
    std::size_t rem = t, l1 = 0;
    for (std::size_t a = 0; a < r; ++a) {
      m[a] = rem % (max_mode[a] + 1);
      rem /= max_mode[a] + 1;
      l1 += m[a];
    }
    const double coeff = normal(rng) * std::exp(-0.5 * decay * double(l1));
    for (std::size_t a = 0; a < r; ++a) {
      const auto& ax = grid->spec().axes[a];
      const std::size_t n = ax.n;
      factor[a].resize(n);
      const double th = phase(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid->coordinate(a, i);
        if (ax.periodic)
          factor[a][i] = std::cos(2.0 * std::numbers::pi * double(m[a]) * (x - ax.lo) / (ax.hi - ax.lo) + th);
        else
          factor[a][i] = std::cos(std::numbers::pi * double(m[a]) * (x - ax.lo) / (ax.hi - ax.lo));
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      grid->index_to_multi(i, multi);
      double v = coeff;
      for (std::size_t a = 0; a < r; ++a) v *= factor[a][multi[a]];
      out[i] += v;
    }
  }
  out += -out.mean();
  const double s = out.sup_norm();
  if (s > 0.0) out *= amplitude / s;
  return out;
}

}  // namespace splitma
