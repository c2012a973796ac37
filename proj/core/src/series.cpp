#include "bbmlab/series.hpp"

#include <cmath>

namespace bbm {

MonoSum MonoAlgebra::reduce(int l, int k, int e, double c) const {
  MonoSum out;
  auto push = [&](Mono m, double v) {
    if (m.grade() <= max_grade_ && v != 0.0) out.push_back({m, v});
  };
  if (e <= 1) {
    push({l, k, e}, c);
    return out;
  }
  // Qt'^2 = sigma Qt^2 - (2/3)(1 - lambda sigma)/(1 - lambda) Qt^3
  const double w = 2.0 / (3.0 * (1.0 - lambda_));
  push({l + 1, k + 2, 0}, c);
  push({l, k + 3, 0}, -w * c);
  push({l + 1, k + 3, 0}, w * lambda_ * c);
  return out;
}

MonoSum MonoAlgebra::mul(const Mono& a, const Mono& b) const {
  if (a.grade() + b.grade() > max_grade_) return {};
  return reduce(a.l + b.l, a.k + b.k, a.e + b.e, 1.0);
}

MonoSum MonoAlgebra::ds(const Mono& a) const {
  MonoSum out;
  if (a.e == 0) {
    if (a.k > 0) out = reduce(a.l, a.k - 1, 1, a.k);
    return out;
  }
  if (a.k > 0) out = reduce(a.l, a.k - 1, 2, a.k);
  // Qt^k Qt'' with Qt'' = sigma Qt - (1 - lambda sigma)/(1 - lambda) Qt^2
  const double w = 1.0 / (1.0 - lambda_);
  for (auto [m, c] : MonoSum{{{a.l + 1, a.k + 1, 0}, 1.0},
                             {{a.l, a.k + 2, 0}, -w},
                             {{a.l + 1, a.k + 2, 0}, w * lambda_}})
    if (m.grade() <= max_grade_) out.push_back({m, c});
  return out;
}

void ScalarSeries::add(const Mono& m, double c) {
  if (m.grade() > alg->max_grade()) return;
  t[m] += c;
}

double ScalarSeries::at(const Mono& m) const {
  auto it = t.find(m);
  return it == t.end() ? 0.0 : it->second;
}

ScalarSeries ScalarSeries::operator*(const ScalarSeries& o) const {
  ScalarSeries r(alg);
  for (auto& [ma, ca] : t)
    for (auto& [mb, cb] : o.t)
      for (auto& [m, f] : alg->mul(ma, mb)) r.add(m, f * ca * cb);
  return r;
}

ScalarSeries ScalarSeries::operator+(const ScalarSeries& o) const {
  ScalarSeries r = *this;
  for (auto& [m, c] : o.t) r.add(m, c);
  return r;
}

ScalarSeries ScalarSeries::scaled(double s) const {
  ScalarSeries r = *this;
  for (auto& [m, c] : r.t) c *= s;
  return r;
}

ScalarSeries ScalarSeries::ds() const {
  ScalarSeries r(alg);
  for (auto& [m, c] : t)
    for (auto& [mm, f] : alg->ds(m)) r.add(mm, f * c);
  return r;
}

void Series::add(const Mono& m, const Profile& p) {
  if (m.grade() > alg_->max_grade()) return;
  auto it = t_.find(m);
  if (it == t_.end())
    t_.emplace(m, p);
  else
    it->second += p;
}

void Series::add_constant(const Mono& m, double c) { add(m, Profile::constant(grid_, c)); }

Profile Series::coeff(const Mono& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? Profile(grid_) : it->second;
}

Series Series::operator+(const Series& o) const {
  Series r = *this;
  for (auto& [m, p] : o.t_) r.add(m, p);
  return r;
}

Series Series::operator-(const Series& o) const { return *this + o.scaled(-1.0); }

Series Series::scaled(double s) const {
  Series r = *this;
  for (auto& [m, p] : r.t_) p *= s;
  return r;
}

Series Series::operator*(const Series& o) const {
  Series r(alg_, grid_);
  for (auto& [ma, pa] : t_)
    for (auto& [mb, pb] : o.t_) {
      auto terms = alg_->mul(ma, mb);
      if (terms.empty()) continue;
      Profile prod = pa * pb;
      for (auto& [m, f] : terms) r.add(m, prod * f);
    }
  return r;
}

Series Series::dy() const {
  Series r(alg_, grid_);
  for (auto& [m, p] : t_) r.add(m, p.deriv());
  return r;
}

Series Series::ds() const {
  Series r(alg_, grid_);
  for (auto& [m, p] : t_)
    for (auto& [mm, f] : alg_->ds(m)) r.add(mm, p * f);
  return r;
}

Series ChainRule::dx(const Series& X) const {
  Series one_minus_beta(&X.algebra(), X.grid());
  one_minus_beta.add_constant({0, 0, 0}, 1.0);
  one_minus_beta = one_minus_beta - beta;
  return X.dy() * one_minus_beta + X.ds();
}

Series ChainRule::dt(const Series& X) const {
  return (mu * beta).scaled(-1.0) * X.dy() + mu * X.ds();
}

ScalarSeries mu_series(const MonoAlgebra* alg) {
  // (1 - sigma)/(1 - lambda sigma) = 1 + sum_j (lambda^j - lambda^{j-1}) sigma^j
  ScalarSeries m(alg);
  const double lam = alg->lambda();
  m.add({0, 0, 0}, 1.0);
  for (int j = 1; j <= alg->max_grade(); ++j) m.add({j, 0, 0}, std::pow(lam, j) - std::pow(lam, j - 1));
  return m;
}

Series residual_series(const Series& z, const ChainRule& cr, double lambda) {
  Series zt = cr.dt(z);
  Series bbm = zt - cr.dx(cr.dx(zt)).scaled(lambda);
  Series inner = cr.dx(cr.dx(z)) - z + z * z;
  return bbm + cr.dx(inner);
}

}  // namespace bbm
