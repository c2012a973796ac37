#pragma once

#include <vector>

#include "bbmlab/grid.hpp"

namespace bbm {

class NotOrthogonal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSolve : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// L f = -f'' + f - 2 Q f on a line grid.
//
// apply() is spectral. invert() factors the 4th-order centred stencil with
// homogeneous Dirichlet rows once, then runs defect correction against the
// spectral operator, projecting out Q' before and after every banded solve.
class OperatorL {
 public:
  explicit OperatorL(const Grid& g);

  struct Solve {
    GridFunction f;
    double residual = 0.0;  // max |L f - h| / max |h| after correction
    int iterations = 0;
  };

  const Grid& grid() const { return grid_; }
  const GridFunction& q() const { return q_; }
  const GridFunction& qp() const { return qp_; }

  GridFunction apply(const GridFunction& f) const;
  Solve solve(const GridFunction& h) const;
  GridFunction invert(const GridFunction& h) const { return solve(h).f; }
  GridFunction project(const GridFunction& f) const;  // remove the Q' component

  // cosine between Q' and the discrete smallest-|eigenvalue| direction (inverse iteration)
  double kernel_alignment() const;

 private:
  GridFunction banded_solve(const GridFunction& h) const;

  Grid grid_;
  GridFunction q_, qp_;
  double qp_norm2_ = 0.0;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

struct AuxProfiles {
  GridFunction phi;       // -Q'/Q = tanh(x/2)
  GridFunction P;         // 2Q + x Q'
  GridFunction P_lambda;  // 2Q + (3-lambda)/2 x Q'
  GridFunction V_lambda;  // (lambda-3)/2 x Q' - Q
};
AuxProfiles aux_profiles(double lambda, const Grid& g);

struct LphiCheck {
  double residual = 0.0;   // max |(L phi)' - (2Q - 5/3 Q^2)|
  double alt_agree = 0.0;  // max |(2Q - 5/3 Q^2) - (Q/3 + 5/3 Q'')|
  double phi0 = 0.0;
};
LphiCheck check_lphi(const Grid& g);

// (2 lambda - 3) int Q'^2 + int ((lambda-3) Q'' - Q^2) P_lambda
double omega_normalizer(double lambda, const Grid& g);

}  // namespace bbm
