#pragma once

#include <vector>

#include "frameflow/camera.hpp"
#include "frameflow/flow.hpp"
#include "frameflow/mesh.hpp"

namespace frameflow {

// Per-pixel flow response to a unit offset of each control section, zero
// outside the structure silhouette. Pose recovery against a denoised flow
// field is then a small linear least-squares problem.
struct FlowBasis {
  std::vector<FlowField> fields;  // one per control section
  StructureMask mask;
};

// Builds the basis geometrically: each mask pixel is unprojected using the
// undeformed depth buffer, displaced under H = eps * e_i, reprojected, and the
// image delta divided by eps.
FlowBasis build_flow_basis(const FrameMesh& mesh, const Camera& camera, double eps = 1e-3);

// argmin_H sum over mask pixels of |sum_i H_i B_i - K|^2, solved through the
// normal equations. Throws ShapeError on dimension mismatch and NumericError
// naming the offending sections when the basis is rank deficient.
PoseParams estimate_lsq(const FlowField& flow, const FlowBasis& basis);

}  // namespace frameflow
