#pragma once

#include <string>
#include <vector>

#include "bbmlab/grid.hpp"

namespace bbm {

// Q(x) = 3/2 sech^2(x/2) and its derivatives, pointwise.
double q_at(double x);
double qp_at(double x);   // Q'
double qpp_at(double x);  // Q'' = Q - Q^2
double qppp_at(double x);
double phi_at(double x);  // -Q'/Q = tanh(x/2)

// phi_c(x) = (c-1) Q(sqrt((c-1)/c) x)
double phic_at(double c, double x);
double phic_p_at(double c, double x);

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Speeds of the two waves and the rescaled-frame constants derived from them.
// Everything downstream reads the stored values.
struct SpeedParams {
  double c1 = 2.0;
  double c2 = 1.1;
  double lambda = 0.5;
  double sigma = 0.2;
  double theta = 1.0;  // theta_sigma = (1 - lambda)/(1 - lambda sigma)
  double mu = 0.0;     // mu_sigma = (1 - sigma)/(1 - lambda sigma)

  static SpeedParams from_speeds(double c1, double c2);
  // lambda and sigma given directly (rescaled-frame experiments)
  static SpeedParams from_lambda_sigma(double lambda, double sigma);
  double inv_theta() const { return 1.0 / theta; }
};

GridFunction q_profile(const Grid& g);
GridFunction qp_profile(const Grid& g);
GridFunction phi_c(double c, const Grid& g, double x0 = 0.0);

// Q~_sigma(x) = sigma theta Q(sqrt(sigma) x) and derivatives up to order 3
double qtilde_at(const SpeedParams& p, double x, int order = 0);
GridFunction qtilde_sigma(const SpeedParams& p, const Grid& g);

struct EnergyMass {
  double E = 0.0;
  double N = 0.0;
};
EnergyMass energy_mass(const GridFunction& f);

// (t,x) <-> (t',x') with x' = sqrt(lambda)(x - t/(1-lambda)),
// t' = lambda^{3/2} t/(1-lambda), z = ((1-lambda)/lambda) u.
struct FrameMap {
  double lambda;
  explicit FrameMap(double lam) : lambda(lam) {}
  double tprime(double t) const;
  double xprime(double t, double x) const;
  double t_of(double tp) const;
  double x_of(double tp, double xp) const;
  double u_to_z() const { return (1.0 - lambda) / lambda; }
  double z_to_u() const { return lambda / (1.0 - lambda); }
  // a rescaled translation delta is a physical translation delta/sqrt(lambda)
  double shift_to_physical(double delta) const;
};

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool relative = true;
  double error() const;
  bool pass() const { return error() <= tol; }
};

// Integral identities on Q and phi_c, evaluated by quadrature on g.
std::vector<IdentityCheck> identity_suite(const Grid& g, double tol = 1e-7);

}  // namespace bbm
