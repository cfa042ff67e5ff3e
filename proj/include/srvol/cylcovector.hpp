#pragma once

namespace srvol {

/// Initial covector in cylindrical coordinates on the cotangent fiber at the
/// base point: rho >= 0 is the metric length of the horizontal part, theta
/// its direction, w the vertical component.
struct CylCovector {
  double rho, theta, w;
};

}  // namespace srvol
