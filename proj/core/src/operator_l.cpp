#include "bbmlab/operator_l.hpp"

#include <lapacke.h>

#include <cmath>

#include "bbmlab/soliton.hpp"

namespace bbm {

namespace {
constexpr int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
}

OperatorL::OperatorL(const Grid& g) : grid_(g), q_(q_profile(g)), qp_(qp_profile(g)) {
  qp_norm2_ = dot(qp_, qp_);
  const int n = g.n;
  const double h = g.h();
  const double s = 1.0 / (12.0 * h * h);
  // column-major band storage for dgbtrf: A(i,j) -> ab[kl+ku+i-j + j*ldab]
  ab_.assign(static_cast<size_t>(ldab) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return ab_[kl + ku + i - j + static_cast<size_t>(j) * ldab]; };
  const double w[5] = {s, -16.0 * s, 30.0 * s, -16.0 * s, s};
  for (int i = 0; i < n; ++i) {
    for (int o = -2; o <= 2; ++o) {
      int j = i + o;
      if (j < 0 || j >= n) continue;
      at(i, j) += w[o + 2];
    }
    at(i, i) += 1.0 - 2.0 * q_.v[i];
  }
  ipiv_.assign(n, 0);
  int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab_.data(), ldab, ipiv_.data());
  if (info != 0) throw SingularSolve("banded factorization of L failed");
}

GridFunction OperatorL::apply(const GridFunction& f) const {
  if (!(f.grid == grid_)) throw GridError("operator grid mismatch");
  auto d2 = derivative(f, 2);
  GridFunction out(grid_);
  for (int j = 0; j < grid_.n; ++j) out.v[j] = -d2.v[j] + f.v[j] - 2.0 * q_.v[j] * f.v[j];
  return out;
}

GridFunction OperatorL::project(const GridFunction& f) const {
  double c = dot(f, qp_) / qp_norm2_;
  GridFunction out = f;
  for (int j = 0; j < grid_.n; ++j) out.v[j] -= c * qp_.v[j];
  return out;
}

GridFunction OperatorL::banded_solve(const GridFunction& h) const {
  GridFunction x = h;
  int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', grid_.n, kl, ku, 1, ab_.data(), ldab,
                            ipiv_.data(), x.v.data(), grid_.n);
  if (info != 0) throw SingularSolve("banded solve of L failed");
  if (!x.finite()) throw SingularSolve("banded solve of L produced non-finite values");
  return x;
}

OperatorL::Solve OperatorL::solve(const GridFunction& h) const {
  if (!(h.grid == grid_)) throw GridError("operator grid mismatch");
  double hn = norm_l2(h);
  if (hn == 0.0) return {GridFunction(grid_), 0.0, 0};
  if (std::abs(dot(h, qp_)) > 1e-8 * hn * std::sqrt(qp_norm2_))
    throw NotOrthogonal("right-hand side is not orthogonal to Q'");

  const double hmax = h.max_abs();
  GridFunction f = project(banded_solve(project(h)));
  Solve s{f, 0.0, 0};
  double prev = INFINITY;
  for (int it = 0; it < 60; ++it) {
    GridFunction r = h - apply(f);
    double rn = r.max_abs() / hmax;
    s.residual = rn;
    s.iterations = it;
    if (rn < 1e-14 || rn > 0.9 * prev) break;
    prev = rn;
    f += project(banded_solve(project(r)));
    f = project(f);
  }
  s.f = f;
  return s;
}

double OperatorL::kernel_alignment() const {
  GridFunction v = GridFunction::sample(grid_, [](double x) { return std::exp(-0.1 * x * x) * (1.0 + 0.3 * x); });
  for (int it = 0; it < 6; ++it) {
    v = banded_solve(v);
    v *= 1.0 / norm_l2(v);
  }
  return std::abs(dot(v, qp_)) / std::sqrt(qp_norm2_);
}

AuxProfiles aux_profiles(double lambda, const Grid& g) {
  AuxProfiles a;
  a.phi = GridFunction::sample(g, phi_at);
  a.P = GridFunction::sample(g, [](double x) { return 2.0 * q_at(x) + x * qp_at(x); });
  a.P_lambda = GridFunction::sample(
      g, [lambda](double x) { return 2.0 * q_at(x) + 0.5 * (3.0 - lambda) * x * qp_at(x); });
  a.V_lambda = GridFunction::sample(
      g, [lambda](double x) { return 0.5 * (lambda - 3.0) * x * qp_at(x) - q_at(x); });
  return a;
}

LphiCheck check_lphi(const Grid& g) {
  // L phi = phi + (-phi'' - 2 Q phi) with phi'' = Q'/3; the bracket decays
  auto rest = GridFunction::sample(g, [](double x) { return -qp_at(x) / 3.0 - 2.0 * q_at(x) * phi_at(x); });
  auto d = derivative(rest, 1);
  LphiCheck c;
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j), q = q_at(x);
    double lhs = q / 3.0 + d.v[j];
    double rhs = 2.0 * q - 5.0 / 3.0 * q * q;
    double alt = q / 3.0 + 5.0 / 3.0 * qpp_at(x);
    c.residual = std::max(c.residual, std::abs(lhs - rhs));
    c.alt_agree = std::max(c.alt_agree, std::abs(rhs - alt));
  }
  c.phi0 = phi_at(0.0);
  return c;
}

double omega_normalizer(double lambda, const Grid& g) {
  auto a = aux_profiles(lambda, g);
  auto Qp = qp_profile(g);
  auto lhs = GridFunction::sample(g, [lambda](double x) {
    double q = q_at(x);
    return (lambda - 3.0) * qpp_at(x) - q * q;
  });
  return (2.0 * lambda - 3.0) * dot(Qp, Qp) + dot(lhs, a.P_lambda);
}

}  // namespace bbm
