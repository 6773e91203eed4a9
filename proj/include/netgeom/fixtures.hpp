#pragma once

#include <string>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/codazzi.hpp"

// Reference metrics and tensors used by the self-test battery.
namespace netgeom::fixtures {

struct Named {
  std::string name;
  MetricField g;  // chart carries the block partition
};

Named euclidean();       // dx0^2 + dx1^2 on [-1, 1]^2
Named polar();           // dt^2 + t^2 dth^2, t in [0.5, 2.5]
Named torus();           // du^2 + (2 + cos u)^2 dv^2, u in [0.1, 2.5]
Named conformal_flat();  // e^{2(x0+x1)} (dx0^2 + dx1^2) on [-1, 1]^2
Named twisted_control(); // dx0^2 + (1 + x0^2 x1)^2 dx1^2 on [0, 1]^2
Named warped3();         // dx0^2 + dx1^2 + e^{2 x0} dx2^2
Named quasi_warped3();   // dx0^2 + (1 + x0^2 x1)^2 dx1^2 + e^{2 x0 x2} dx2^2 on [0, 1]^3

/// Shape operator of the torus of revolution with radii 2 and 1.
SymTensorField torus_shape_operator();
/// diag(0, 1/t) on the polar metric.
SymTensorField cone_tensor();

}  // namespace netgeom::fixtures
