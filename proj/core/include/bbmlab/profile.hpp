#pragma once

#include "bbmlab/grid.hpp"

namespace bbm {

// f(y) = d(y) + c0 + c1 phi(y), phi = tanh(y/2), with d decaying on a line grid.
// Closed under +, *, d/dy; bounded profiles A = A~ + gamma and B = B~ + b phi
// are represented without truncation error in their tails.
struct Profile {
  GridFunction d;
  double c0 = 0.0;
  double c1 = 0.0;

  Profile() = default;
  explicit Profile(const Grid& g) : d(g) {}
  explicit Profile(GridFunction dec, double k0 = 0.0, double k1 = 0.0)
      : d(std::move(dec)), c0(k0), c1(k1) {}
  static Profile constant(const Grid& g, double c) { return Profile(GridFunction(g), c, 0.0); }

  const Grid& grid() const { return d.grid; }
  double plus_inf() const { return c0 + c1; }
  double minus_inf() const { return c0 - c1; }
  bool is_zero() const;
  double max_abs_decaying() const { return d.max_abs(); }

  Profile deriv(int order = 1) const;
  GridFunction samples() const;

  Profile& operator+=(const Profile& o);
  Profile& operator-=(const Profile& o);
  Profile& operator*=(double s);
};

Profile operator+(Profile a, const Profile& b);
Profile operator-(Profile a, const Profile& b);
Profile operator*(Profile a, double s);
Profile operator*(double s, Profile a);
Profile operator*(const Profile& a, const Profile& b);

// integral from -infinity of a decaying function, exact tail:
// returns D + m/2 + (m/2) phi with m the total mass
Profile antiderivative(const GridFunction& f);
// integral from 0: odd part only for even f; constant tail removed
Profile antiderivative_from_zero(const GridFunction& f);

// -f'' + f - 2Qf applied termwise (phi'' = Q'/3 analytically)
Profile apply_L(const Profile& p);

}  // namespace bbm
