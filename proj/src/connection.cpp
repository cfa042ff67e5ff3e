#include "srvol/connection.hpp"

#include <cmath>

namespace srvol {

ExtendedConstants extended_constants(const ContactStructure& s,
                                     const Point3& pt) {
  ExtendedConstants ext{};
  // [X1, X0] and [X2, X0]; their X0-components vanish identically.
  ext.c[1][0][1] = s.c.c01_1.eval(pt);
  ext.c[1][0][2] = s.c.c01_2.eval(pt);
  ext.c[1][0][0] = s.c.c01_0.eval(pt);
  ext.c[2][0][1] = s.c.c02_1.eval(pt);
  ext.c[2][0][2] = s.c.c02_2.eval(pt);
  ext.c[2][0][0] = s.c.c02_0.eval(pt);
  // [X2, X1] carries the forced X0-component equal to one.
  ext.c[2][1][1] = s.c.c12_1.eval(pt);
  ext.c[2][1][2] = s.c.c12_2.eval(pt);
  ext.c[2][1][0] = s.c.c12_0.eval(pt);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j)
      for (int k = 0; k < 3; ++k) ext.c[j][i][k] = -ext.c[i][j][k];
  return ext;
}

ChristoffelTable christoffel(const ExtendedConstants& ext) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (std::abs(ext.c[i][j][k] + ext.c[j][i][k]) > 1e-12)
          throw ConfigError(
              "christoffel: structure-constant table is not antisymmetric");
  ChristoffelTable t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        t.g[i][j][k] = -0.5 * (ext.c[i][j][k] - ext.c[j][k][i] +
                               ext.c[k][i][j]);
  return t;
}

double sectional_D(const ContactStructure& s, const Point3& pt) {
  const RationalFn d1 = directional_derivative(s.frame.X1, s.c.c12_2);
  const RationalFn d2 = directional_derivative(s.frame.X2, s.c.c12_1);
  const double c121 = s.c.c12_1.eval(pt);
  const double c122 = s.c.c12_2.eval(pt);
  const double c011 = s.c.c01_1.eval(pt);
  const double c012 = s.c.c01_2.eval(pt);
  const double c021 = s.c.c02_1.eval(pt);
  const double mixed = c021 + c012;
  return -d1.eval(pt) + d2.eval(pt) - c121 * c121 - c122 * c122 +
         (c021 - c012) / 2.0 + c011 * c011 + mixed * mixed / 4.0 - 0.75;
}

double verify_sec_identity(const ContactStructure& s, const Point3& pt) {
  const double kappa = kappa_at(s, pt);
  const double chi = chi_at(s, pt);
  return std::abs(sectional_D(s, pt) - (kappa + chi * chi - 0.75));
}

}  // namespace srvol
