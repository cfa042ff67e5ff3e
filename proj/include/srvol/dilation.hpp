#pragma once

#include "srvol/contact.hpp"
#include "srvol/cylcovector.hpp"

namespace srvol {

/// Anisotropic dilation delta_eps(x, y, z) = (eps x, eps y, eps^2 z) adapted
/// to the horizontal/vertical grading (weights 1, 1, 2).
Point3 dilate_point(double eps, const Point3& p);

/// Inverse dilation delta_{1/eps}.
Point3 contract_point(double eps, const Point3& p);

/// Rescaled pushforward frame: component-wise substitution
/// (x, y, z) -> (eps x, eps y, eps^2 z) followed by dividing the z-component
/// by eps, realizing eps * D(delta_{1/eps}) X_i(delta_eps q) exactly on
/// polynomial coefficients.  The model frame is a fixed point of this map.
FrameField dilate_frame(double eps, const FrameField& frame);

/// Covector rescaling matching the dilation: (rho, theta, w) -> (rho eps,
/// theta, w).  Geodesics of the dilated structure from covector c reach, at
/// time 1, the contraction of where the original structure's geodesic from
/// tau(eps, c) arrives.
CylCovector tau(double eps, const CylCovector& c);

/// A dilated frame bundled with its scale and the frame it came from.
struct DilatedStructure {
  double epsilon;
  FrameField frame;          // the dilated frame
  const FrameField* parent;  // original frame (not owned)
};

/// Builds the dilated structure for eps > 0; at eps = 1 the dilated frame
/// coincides with the parent.
DilatedStructure make_dilated(double eps, const FrameField& frame);

}  // namespace srvol
