#pragma once

#include <compare>
#include <map>
#include <utility>
#include <vector>

#include "bbmlab/profile.hpp"

namespace bbm {

// sigma^l Qt^k (Qt')^e with Qt = Q~_sigma(y_sigma), e in {0,1}.
// grade = l + k + e; the expansion keeps grade <= max_grade.
struct Mono {
  int l = 0, k = 0, e = 0;
  int grade() const { return l + k + e; }
  auto operator<=>(const Mono&) const = default;
};

using MonoSum = std::vector<std::pair<Mono, double>>;

// Monomial algebra with (Qt')^2 = sigma Qt^2 - 2/(3 theta) Qt^3,
// Qt'' = sigma Qt - Qt^2/theta, 1/theta = (1 - lambda sigma)/(1 - lambda).
class MonoAlgebra {
 public:
  MonoAlgebra(double lambda, int max_grade) : lambda_(lambda), max_grade_(max_grade) {}
  double lambda() const { return lambda_; }
  int max_grade() const { return max_grade_; }
  MonoSum mul(const Mono& a, const Mono& b) const;
  MonoSum ds(const Mono& a) const;  // d/ds of the monomial

 private:
  MonoSum reduce(int l, int k, int e, double c) const;
  double lambda_;
  int max_grade_;
};

// Truncated series with constant coefficients (used for endpoint matching).
struct ScalarSeries {
  const MonoAlgebra* alg = nullptr;
  std::map<Mono, double> t;

  explicit ScalarSeries(const MonoAlgebra* a) : alg(a) {}
  void add(const Mono& m, double c);
  double at(const Mono& m) const;
  ScalarSeries operator*(const ScalarSeries& o) const;
  ScalarSeries operator+(const ScalarSeries& o) const;
  ScalarSeries scaled(double s) const;
  ScalarSeries ds() const;
};

// Truncated series whose coefficients are profiles in y.
class Series {
 public:
  Series(const MonoAlgebra* alg, const Grid& g) : alg_(alg), grid_(g) {}

  const MonoAlgebra& algebra() const { return *alg_; }
  const Grid& grid() const { return grid_; }
  const std::map<Mono, Profile>& terms() const { return t_; }

  void add(const Mono& m, const Profile& p);
  void add_constant(const Mono& m, double c);
  Profile coeff(const Mono& m) const;

  Series operator+(const Series& o) const;
  Series operator-(const Series& o) const;
  Series scaled(double s) const;
  Series operator*(const Series& o) const;
  Series dy() const;  // derivative of every coefficient profile
  Series ds() const;  // derivative of every monomial

 private:
  const MonoAlgebra* alg_;
  Grid grid_;
  std::map<Mono, Profile> t_;
};

// Chain rule in (t,x) for coefficients evaluated at y = x - alpha(y_sigma),
// y_sigma = x + mu t: d_x = (1 - beta) d_y + d_s, d_t = -mu beta d_y + mu d_s.
struct ChainRule {
  Series beta;
  Series mu;
  Series dx(const Series& X) const;
  Series dt(const Series& X) const;
};

ScalarSeries mu_series(const MonoAlgebra* alg);

// (1 - lambda d_x^2) d_t z + d_x(d_x^2 z - z + z^2)
Series residual_series(const Series& z, const ChainRule& cr, double lambda);

}  // namespace bbm
