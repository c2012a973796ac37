#include <cmath>

#include "bbmlab/operator_l.hpp"
#include "bbmlab/soliton.hpp"
#include "doctest.h"

using namespace bbm;

namespace {

double rel(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs() / b.max_abs(); }

GridFunction xqp(const Grid& g) {
  return GridFunction::sample(g, [](double x) { return x * qp_at(x); });
}

}  // namespace

TEST_CASE("L on the explicit preimages") {
  Grid g = Grid::line();
  OperatorL L(g);
  auto Q = q_profile(g), Qp = qp_profile(g);
  auto Qpp = GridFunction::sample(g, qpp_at);
  auto Q32 = GridFunction::sample(g, [](double x) { return std::pow(q_at(x), 1.5); });
  CHECK(L.apply(Qp).max_abs() < 1e-8);
  CHECK(rel(L.apply(Q32), Q32 * -1.25) < 1e-8);
  CHECK(rel(L.apply(Q), Q * Q * -1.0) < 1e-8);
  CHECK(rel(L.apply(xqp(g)), Qpp * -2.0) < 1e-8);
  auto aux = aux_profiles(0.5, g);
  CHECK(rel(L.apply(aux.P), Q * -2.0) < 1e-8);
}

TEST_CASE("invert_L round trip and the kernel") {
  Grid g = Grid::line();
  OperatorL L(g);
  auto Q = q_profile(g);
  auto s = L.solve(Q * Q * -1.0);
  CHECK(s.residual < 1e-9);
  // preimage of -Q^2 is Q up to the kernel
  CHECK(rel(L.project(s.f), L.project(Q)) < 1e-7);
  CHECK(L.kernel_alignment() > 0.999999);
  // Q' has no component left after projection
  CHECK(std::abs(dot(L.project(Q + L.qp() * 3.0), L.qp())) < 1e-10);
}

TEST_CASE("(L phi)' identity") {
  auto r = check_lphi(Grid::line());
  CHECK(r.residual < 1e-8);
  CHECK(r.alt_agree < 1e-12);
  CHECK(std::abs(r.phi0) < 1e-14);
}

TEST_CASE("P_lambda and V_lambda") {
  Grid g = Grid::line();
  OperatorL L(g);
  auto Q = q_profile(g);
  auto Qpp = GridFunction::sample(g, qpp_at);
  for (double lam : {0.2, 0.7}) {
    auto a = aux_profiles(lam, g);
    // L(2Q + c x Q') = -2 Q^2 - 2c Q''
    CHECK(rel(L.apply(a.P_lambda), Q * Q * -2.0 - Qpp * (3.0 - lam)) < 1e-8);
    CHECK(rel(L.apply(a.V_lambda), Qpp * (3.0 - lam) + Q * Q) < 1e-8);
  }
}
