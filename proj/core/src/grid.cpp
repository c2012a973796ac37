#include "bbmlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bbmlab/fft.hpp"

namespace bbm {

Grid::Grid(GridKind k, double half_length, int points) : kind(k), L(half_length), n(points) {
  if (!(half_length > 0.0)) throw GridError("grid half length must be positive");
  if (points < 16) throw GridError("grid needs at least 16 points");
  if (k == GridKind::periodic && (points & (points - 1)) != 0)
    throw GridError("periodic grid size must be a power of two");
  if (points % 2 != 0) throw GridError("grid size must be even");
}

std::vector<double> Grid::points() const {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = this->x(j);
  return x;
}

int Grid::zero_index() const { return n / 2; }

GridFunction::GridFunction(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
  if (static_cast<int>(v.size()) != g.n) throw GridError("value count does not match grid");
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(double)>& f) {
  GridFunction out(g);
  for (int j = 0; j < g.n; ++j) out.v[j] = f(g.x(j));
  return out;
}

bool GridFunction::finite() const {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

GridFunction GridFunction::reflected() const {
  // x_j = -L + j h, so -x_j = x_{n-j}; x_0 = -L has no partner and maps to itself.
  GridFunction r(grid);
  r.v[0] = v[0];
  for (int j = 1; j < grid.n; ++j) r.v[j] = v[grid.n - j];
  return r;
}

static void check_same(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw GridError("grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  check_same(*this, o);
  for (int j = 0; j < size(); ++j) v[j] += o.v[j];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  check_same(*this, o);
  for (int j = 0; j < size(); ++j) v[j] -= o.v[j];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& a : v) a *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, double s) { return a *= s; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }
GridFunction operator-(GridFunction a) { return a *= -1.0; }

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  check_same(a, b);
  GridFunction out(a.grid);
  for (int j = 0; j < a.size(); ++j) out.v[j] = a.v[j] * b.v[j];
  return out;
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double a : f.v) s += a;
  return s * f.grid.h();
}

double dot(const GridFunction& f, const GridFunction& g) {
  check_same(f, g);
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.v[j] * g.v[j];
  return s * f.grid.h();
}

GridFunction derivative(const GridFunction& f, int order) {
  if (order < 1 || order > 4) throw GridError("derivative order must be 1..4");
  const int n = f.grid.n;
  const auto& fft = fft_for(n);
  std::vector<cplx> c(fft.modes());
  fft.forward(f.v.data(), c.data());
  const auto k = wavenumbers(n, f.grid.L);
  const cplx ik(0.0, 1.0);
  for (int j = 0; j < fft.modes(); ++j) {
    cplx m = 1.0;
    for (int r = 0; r < order; ++r) m *= ik * k[j];
    c[j] *= m / static_cast<double>(n);
  }
  if (order % 2 == 1) c[n / 2] = 0.0;
  GridFunction out(f.grid);
  fft.backward(c.data(), out.v.data());
  return out;
}

GridFunction lowpass(const GridFunction& f, double kc) {
  const int n = f.grid.n;
  const auto& fft = fft_for(n);
  std::vector<cplx> c(fft.modes());
  fft.forward(f.v.data(), c.data());
  const auto k = wavenumbers(n, f.grid.L);
  for (int j = 0; j < fft.modes(); ++j) c[j] *= (k[j] <= kc ? 1.0 : 0.0) / static_cast<double>(n);
  GridFunction out(f.grid);
  fft.backward(c.data(), out.v.data());
  return out;
}

double norm_l2(const GridFunction& f) { return std::sqrt(dot(f, f)); }

double norm_h1(const GridFunction& f) {
  auto d = derivative(f, 1);
  return std::sqrt(dot(f, f) + dot(d, d));
}

double norm_h1_c2(const GridFunction& f, const NormWeights& w) {
  if (!(w.c2 > 1.0)) throw GridError("H1_c2 weight needs c2 > 1");
  auto d = derivative(f, 1);
  return std::sqrt(dot(d, d) + (w.c2 - 1.0) * dot(f, f));
}

namespace {
double half_sum(const GridFunction& f, const GridFunction* g, double x0, Side side) {
  // sample j carries the cell [x_j - h/2, x_j + h/2]; the cell holding x0 is split,
  // so the two sides add up to the full sum
  const double h = f.grid.h();
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const double right = std::clamp((f.grid.x(j) + 0.5 * h - x0) / h, 0.0, 1.0);
    const double w = side == Side::right ? right : 1.0 - right;
    if (w == 0.0) continue;
    double v = f.v[j] * f.v[j];
    if (g) v += g->v[j] * g->v[j];
    s += w * v;
  }
  return s * h;
}
}  // namespace

double norm_l2_halfline(const GridFunction& f, double x0, Side side) {
  return std::sqrt(half_sum(f, nullptr, x0, side));
}

double norm_h1_halfline(const GridFunction& f, double x0, Side side) {
  auto d = derivative(f, 1);
  return std::sqrt(half_sum(f, &d, x0, side));
}

double norm_h1_c2_halfline(const GridFunction& f, double c2, double x0, Side side) {
  auto d = derivative(f, 1);
  double a = half_sum(d, nullptr, x0, side);
  double b = half_sum(f, nullptr, x0, side);
  return std::sqrt(a + (c2 - 1.0) * b);
}

double parity_defect(const GridFunction& f, int sign) {
  double m = f.max_abs();
  if (m == 0.0) return 0.0;
  double d = 0.0;
  const int n = f.grid.n;
  for (int j = 1; j < n; ++j) d = std::max(d, std::abs(f.v[j] - sign * f.v[n - j]));
  return d / m;
}

std::string to_csv(const GridFunction& f) {
  std::ostringstream os;
  os.precision(17);
  os << "x,value\r\n";
  for (int j = 0; j < f.size(); ++j) os << f.grid.x(j) << ',' << f.v[j] << "\r\n";
  return os.str();
}

std::string to_json(const GridFunction& f) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"grid\":{\"L\":" << f.grid.L << ",\"n\":" << f.grid.n << ",\"kind\":\""
     << (f.grid.kind == GridKind::periodic ? "periodic" : "line") << "\"},\"values\":[";
  for (int j = 0; j < f.size(); ++j) os << (j ? "," : "") << f.v[j];
  os << "]}";
  return os.str();
}

}  // namespace bbm
