#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "bbmlab/fft.hpp"
#include "bbmlab/grid.hpp"
#include "bbmlab/soliton.hpp"

namespace bbm {

class NonFinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 0.0;
  bool dealias = false;
  int record_every = 0;  // 0: no snapshots
  // Evolve in a frame moving at this speed (u(t, x + V t)). Nonzero speeds use the
  // Lawson integrating-factor RK4 because i V k is stiff at the grid scale.
  double frame_speed = 0.0;
  void validate() const;
};

struct EvolutionState {
  GridFunction u;
  double t = 0.0;
  double dt = 0.0;
  long step_count = 0;
};

struct Snapshot {
  double t = 0.0;
  double E = 0.0, N = 0.0;
  GridFunction u;
};

// (1 - d_x^2) u_t + d_x(u + u^2) = 0 on a periodic grid, Fourier pseudospectral in x,
// classical RK4 in t.
class BBMSolver {
 public:
  BBMSolver(const Grid& g, const IntegratorConfig& cfg);

  const Grid& grid() const { return grid_; }
  const IntegratorConfig& config() const { return cfg_; }

  // -(1 - d_x^2)^{-1} d_x (u + u^2), plus V u_x in a moving frame
  GridFunction rhs(const GridFunction& u) const;
  void step(EvolutionState& s) const;
  // advance to cfg.t_end; the observer sees every recorded state
  std::vector<Snapshot> evolve(EvolutionState& s, const std::function<void(const EvolutionState&)>& observer = {},
                               bool keep_fields = false) const;
  // advance by a fixed number of steps
  void advance(EvolutionState& s, long steps) const;

 private:
  void nonlinear_hat(const std::vector<cplx>& uh, std::vector<cplx>& out) const;
  void step_rk4(EvolutionState& s) const;
  void step_lawson(EvolutionState& s) const;

  Grid grid_;
  IntegratorConfig cfg_;
  std::vector<double> k_;
  std::vector<cplx> symbol_;      // -i k/(1+k^2)
  std::vector<cplx> lin_;         // i k (V - 1/(1+k^2))
  std::vector<cplx> e_half_, e_full_;
  int cut_ = 0;                   // highest kept mode in the nonlinear term
};

// (E, N) = (int u^2/2 + u^3/3, int (u^2 + u_x^2)/2)
EnergyMass conserved(const GridFunction& u);

// phi_c(x - x0) evolved to cfg.t_end and compared with phi_c(x - x0 - c t_end)
struct PropagationCheck {
  double c = 0.0, dt = 0.0;
  double error_h1 = 0.0;  // relative to ||phi_c||_H1
  double drift_N = 0.0, drift_E = 0.0;  // max relative drift over all steps
  long steps = 0;
};
PropagationCheck propagate_soliton(double c, double x0, const Grid& g, const IntegratorConfig& cfg);

// log2(e_i / e_{i+1}) for errors at successively halved steps
std::vector<double> convergence_orders(const std::vector<double>& errors);

}  // namespace bbm
