#include "srvol/dilation.hpp"

#include "srvol/errors.hpp"

namespace srvol {

namespace {
void check_eps(double eps) {
  if (!(eps > 0.0)) throw Error("dilation scale must be positive");
}
}  // namespace

Point3 dilate_point(double eps, const Point3& p) {
  check_eps(eps);
  return {eps * p[0], eps * p[1], eps * eps * p[2]};
}

Point3 contract_point(double eps, const Point3& p) {
  check_eps(eps);
  return dilate_point(1.0 / eps, p);
}

FrameField dilate_frame(double eps, const FrameField& frame) {
  check_eps(eps);
  auto push = [eps](const RationalField3& V) {
    RationalField3 r;
    for (int k = 0; k < 3; ++k) {
      Polynomial num = V.c[k].num().scale_axes(eps, eps, eps * eps);
      Polynomial den = V.c[k].den().scale_axes(eps, eps, eps * eps);
      if (k == 2) num = num * (1.0 / eps);
      r.c[k] = RationalFn(std::move(num), std::move(den));
    }
    return r;
  };
  return FrameField(push(frame.X1), push(frame.X2));
}

CylCovector tau(double eps, const CylCovector& c) {
  check_eps(eps);
  return {c.rho * eps, c.theta, c.w};
}

DilatedStructure make_dilated(double eps, const FrameField& frame) {
  return DilatedStructure{eps, dilate_frame(eps, frame), &frame};
}

}  // namespace srvol
