#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbm {

enum class GridKind { periodic, line };

// Uniform samples x_j = -L + j h on [-L, L). Line grids carry decaying data
// only, so they are treated as periodic by the spectral routines.
struct Grid {
  GridKind kind = GridKind::line;
  double L = 60.0;
  int n = 4096;

  Grid() = default;
  Grid(GridKind k, double half_length, int points);

  static Grid line(double half_length = 60.0, int points = 4096) {
    return Grid(GridKind::line, half_length, points);
  }
  static Grid periodic(double half_length, int points) {
    return Grid(GridKind::periodic, half_length, points);
  }

  double h() const { return 2.0 * L / n; }
  double x(int j) const { return -L + j * h(); }
  std::vector<double> points() const;
  // first index with x_j >= 0
  int zero_index() const;
  bool operator==(const Grid& o) const { return kind == o.kind && L == o.L && n == o.n; }
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridFunction {
  Grid grid;
  std::vector<double> v;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(g), v(g.n, 0.0) {}
  GridFunction(const Grid& g, std::vector<double> values);
  static GridFunction sample(const Grid& g, const std::function<double(double)>& f);

  int size() const { return static_cast<int>(v.size()); }
  double operator[](int j) const { return v[j]; }
  double& operator[](int j) { return v[j]; }

  bool finite() const;
  double max_abs() const;
  GridFunction reflected() const;  // f(-x) on the same grid

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, double s);
GridFunction operator*(double s, GridFunction a);
GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction operator-(GridFunction a);

double integrate(const GridFunction& f);
double dot(const GridFunction& f, const GridFunction& g);  // integral of f g

// Spectral derivative of order 1..4. For line grids the data must decay at both ends.
GridFunction derivative(const GridFunction& f, int order);

// Sharp spectral cutoff: keep |k| <= kc.
GridFunction lowpass(const GridFunction& f, double kc);

struct NormWeights {
  double c2 = 1.1;
  double cutoff_center = 0.0;
  double cutoff_width = 1.0;
};

enum class Side { left, right };

double norm_l2(const GridFunction& f);
double norm_h1(const GridFunction& f);
// (int f'^2 + (c2 - 1) f^2)^{1/2}
double norm_h1_c2(const GridFunction& f, const NormWeights& w);
double norm_l2_halfline(const GridFunction& f, double x0, Side side);
double norm_h1_halfline(const GridFunction& f, double x0, Side side);
double norm_h1_c2_halfline(const GridFunction& f, double c2, double x0, Side side);

// Parity defect max|f(x) - s f(-x)| / max|f| with s = +1 (even) or -1 (odd).
// Needs a grid symmetric about 0, i.e. x_{n-j} = -x_j.
double parity_defect(const GridFunction& f, int sign);

std::string to_csv(const GridFunction& f);
std::string to_json(const GridFunction& f);

}  // namespace bbm
