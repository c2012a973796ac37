#pragma once

#include <map>
#include <string>
#include <utility>

#include "bbmlab/operator_l.hpp"
#include "bbmlab/profile.hpp"
#include "bbmlab/series.hpp"

namespace bbm {

using KL = std::pair<int, int>;  // (k, l)

struct ProfileSet {
  int k = 1, l = 0;
  double a = 0.0;
  double gamma = 0.0;  // limit of A at +infinity
  double b = 0.0;      // limit of B at +infinity
  Profile A, B;
};

struct SourceTerms {
  Profile F;  // odd
  Profile G;  // even
};

class DegenerateDenominator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// closed forms in lambda
double a10_closed(double lambda);
double b10_closed(double lambda);
double kappa_B(double lambda);  // the Q' coefficient that makes int B10 Q' = 0
double q_poly(double lambda);
double g_poly(double lambda);
double b20_closed(double lambda);
double d_closed(double lambda);   // b20 + b10^3/(6(1-lambda))
double d_via_g(double lambda);    // -4 lambda^2 g/(5(1-lambda)(15+10lambda-lambda^2)^3)

double akl_coefficient(const GridFunction& F, const GridFunction& G, double gamma, double lambda);

ProfileSet solve_omega10(double lambda, const Grid& g);

struct ModelInfo {
  double z0q = 0.0;            // int Z0 Q
  double solve_residual = 0.0; // worst invert_L residual
  double source_tail = 0.0;    // |tails| of F and G that were discarded
};

ProfileSet solve_model_problem(const Profile& F, const Profile& G, double gamma, double lambda,
                               const OperatorL& L, ModelInfo* info = nullptr);

struct SystemResidual {
  double first = 0.0;   // max |(LA)' - a((lambda-3)Q''-Q^2)' - F|
  double second = 0.0;  // max |(LB)' - (3-lambda)A'' - 2QA - a(2lambda-3)Q'' - G|
};
SystemResidual system_residual(const ProfileSet& s, const SourceTerms& src, double lambda);

// The explicit tables for (1,0), (1,1), (2,0).
SourceTerms printed_sources(int k, int l, const ProfileSet& s10, double lambda);

// Series for z with the given profile sets (absent sets count as zero).
// sharp_d != 0 adds -d (Qt^2)'(1 - P(y)).
Series build_z_series(const MonoAlgebra& alg, const Grid& g, const std::map<KL, ProfileSet>& sets,
                      double sharp_d = 0.0);
ChainRule build_chain_rule(const MonoAlgebra& alg, const Grid& g, const std::map<KL, ProfileSet>& sets);

// F_{k,l}, G_{k,l} read off the residual series of z built from the lower sets.
std::map<KL, SourceTerms> engine_sources(int level, const std::map<KL, ProfileSet>& lower, double lambda,
                                         const Grid& g);

enum class GammaRule { matched, printed, printed_alt };
const char* to_string(GammaRule r);

struct Gammas {
  double g20 = 0.0, g11 = 0.0, g30 = 0.0, g21 = 0.0, g12 = 0.0;
};

// printed formulas; `printed_alt` differs from `printed` in the sign of the b^4 term of gamma21
Gammas gamma_constants(double lambda, double b10, double b11, double d, GammaRule printed = GammaRule::printed);
// coefficients of Q~(s - eps) - d (Q~^2)'(s - eps), eps = b10 + sigma (b11 - b10^3/6)
Gammas gamma_matched(double lambda, double b10, double b11, double d);

struct OmegaOptions {
  GammaRule rule = GammaRule::matched;
  bool printed_sources = false;  // use the explicit tables at levels 1-2
  int max_level = 3;
};

struct OmegaSolution {
  double lambda = 0.5;
  Grid grid;
  std::map<KL, ProfileSet> sets;
  std::map<KL, SourceTerms> sources;
  std::map<KL, SystemResidual> residuals;
  Gammas gammas;
  Gammas gammas_printed, gammas_printed_alt, gammas_matched;
  double kappa = 0.0;
  double b11 = 0.0;
  double b20_numeric = 0.0;   // b of the model problem on (2,0)
  double b20_identity = 0.0;  // from 2 b20 = int(2QA20 + A10^2 + A10) + 2 b10 (lambda-2)/(1-lambda)
  double b20 = 0.0;           // closed form
  double d = 0.0;             // from b20_numeric
  double level3_tail = 0.0;   // largest nonlocal part among level-3 sources
  double worst_solve_residual = 0.0;

  const ProfileSet& at(int k, int l) const { return sets.at({k, l}); }
};

OmegaSolution solve_omega(double lambda, const OmegaOptions& opt = {}, const Grid& g = Grid::line());

// max over monomials of grade <= 3 of the residual series of the assembled z
double series_residual(const OmegaSolution& s, double sharp_d = 0.0);

}  // namespace bbm
