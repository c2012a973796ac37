#include "bbmlab/profile.hpp"

#include <cmath>

#include "bbmlab/fft.hpp"
#include "bbmlab/soliton.hpp"

namespace bbm {

namespace {
struct Basis {
  GridFunction q, qp, phi;
  double qmass;
};

const Basis& basis(const Grid& g) {
  thread_local Grid last;
  thread_local Basis b;
  if (b.q.size() == 0 || !(last == g)) {
    b.q = q_profile(g);
    b.qp = qp_profile(g);
    b.phi = GridFunction::sample(g, phi_at);
    b.qmass = integrate(b.q);
    last = g;
  }
  return b;
}
}  // namespace

bool Profile::is_zero() const { return c0 == 0.0 && c1 == 0.0 && d.max_abs() == 0.0; }

Profile Profile::deriv(int order) const {
  Profile p = *this;
  for (int r = 0; r < order; ++r) {
    const auto& b = basis(p.grid());
    GridFunction nd = derivative(p.d, 1);
    if (p.c1 != 0.0) nd += b.q * (p.c1 / 3.0);
    p = Profile(std::move(nd), 0.0, 0.0);
  }
  return p;
}

GridFunction Profile::samples() const {
  const auto& b = basis(grid());
  GridFunction out = d;
  for (int j = 0; j < out.size(); ++j) out.v[j] += c0 + c1 * b.phi.v[j];
  return out;
}

Profile& Profile::operator+=(const Profile& o) {
  d += o.d;
  c0 += o.c0;
  c1 += o.c1;
  return *this;
}

Profile& Profile::operator-=(const Profile& o) {
  d -= o.d;
  c0 -= o.c0;
  c1 -= o.c1;
  return *this;
}

Profile& Profile::operator*=(double s) {
  d *= s;
  c0 *= s;
  c1 *= s;
  return *this;
}

Profile operator+(Profile a, const Profile& b) { return a += b; }
Profile operator-(Profile a, const Profile& b) { return a -= b; }
Profile operator*(Profile a, double s) { return a *= s; }
Profile operator*(double s, Profile a) { return a *= s; }

Profile operator*(const Profile& a, const Profile& b) {
  const auto& B = basis(a.grid());
  const int n = a.d.size();
  GridFunction d(a.grid());
  // phi^2 = 1 - (2/3) Q
  for (int j = 0; j < n; ++j) {
    double ph = B.phi.v[j];
    double ta = a.c0 + a.c1 * ph;
    double tb = b.c0 + b.c1 * ph;
    d.v[j] = a.d.v[j] * b.d.v[j] + a.d.v[j] * tb + ta * b.d.v[j] - a.c1 * b.c1 * (2.0 / 3.0) * B.q.v[j];
  }
  return Profile(std::move(d), a.c0 * b.c0 + a.c1 * b.c1, a.c0 * b.c1 + a.c1 * b.c0);
}

Profile antiderivative(const GridFunction& f) {
  const Grid& g = f.grid;
  const auto& B = basis(g);
  const double m = integrate(f);
  const double s = m / B.qmass;
  GridFunction r = f - B.q * s;  // zero discrete mass
  const auto& fft = fft_for(g.n);
  std::vector<cplx> c(fft.modes());
  fft.forward(r.v.data(), c.data());
  const auto k = wavenumbers(g.n, g.L);
  c[0] = 0.0;
  for (int j = 1; j < fft.modes(); ++j) c[j] /= cplx(0.0, k[j]) * static_cast<double>(g.n);
  c[g.n / 2] = 0.0;
  GridFunction D(g);
  fft.backward(c.data(), D.v.data());
  // pin the decaying part to vanish at the far left end
  double shift = D.v[0];
  for (double& v : D.v) v -= shift;
  // int_{-inf}^x s Q = 3 s (1 + phi)
  return Profile(std::move(D), 3.0 * s, 3.0 * s);
}

Profile antiderivative_from_zero(const GridFunction& f) {
  Profile p = antiderivative(f);
  // subtract the value at x = 0, phi(0) = 0
  int j0 = f.grid.zero_index();
  double v0 = p.d.v[j0] + p.c0;
  p.c0 -= v0;
  return p;
}

Profile apply_L(const Profile& p) {
  const auto& B = basis(p.grid());
  auto d2 = derivative(p.d, 2);
  GridFunction out(p.grid());
  for (int j = 0; j < out.size(); ++j) {
    double q = B.q.v[j];
    out.v[j] = -d2.v[j] + p.d.v[j] - 2.0 * q * p.d.v[j] - 2.0 * q * p.c0 -
               p.c1 * (B.qp.v[j] / 3.0 + 2.0 * q * B.phi.v[j]);
  }
  return Profile(std::move(out), p.c0, p.c1);
}

}  // namespace bbm
