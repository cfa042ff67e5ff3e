#pragma once

#include <iosfwd>

namespace srvol {

/// End-to-end verification suite: nine numbered checks covering the flat
/// unit-ball constant, the second-order integral identity, the numerical
/// exponential against its closed form, the origin invariant formulas, the
/// curvature identity, the theta-averaged second-order Jacobian coefficient,
/// the fitted volume expansion, dilation homogeneity with the rescaling
/// diagram, and the intrinsic density expansion.  Each check prints one
/// PASS/FAIL line (with its runtime) to `out`; failed checks add indented
/// detail lines.  `seed` drives the randomized draws.  Returns the number of
/// failed checks.
int run_acceptance(unsigned seed, std::ostream& out);

}  // namespace srvol
