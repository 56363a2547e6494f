#pragma once

#include <vector>

#include "ert/common/geometry.hpp"
#include "ert/sim/vocab.hpp"

namespace ert::sim {

// Analytic shape stencils in object-local units: the object's box has side 1
// and local coordinates are shifted so that the stencil's area centroid sits
// at the origin. +v points down the image.
//
// The footprint is the stencil with holes and concavities filled. It is what
// a gripper or a container "covers": pick hits, sweep contact and
// containment are all tested against it.
bool stencil_contains(ObjectKind k, Vec2 local);
bool footprint_contains(ObjectKind k, Vec2 local);

// Area of the stencil in unit-box fractions.
double stencil_area(ObjectKind k);

// Max distance from the origin to any footprint point, in box units.
double footprint_radius(ObjectKind k);

// Points sampled on a fine lattice inside the footprint (box units).
const std::vector<Vec2>& footprint_samples(ObjectKind k);

// Offset from box centre to stencil centroid (box units).
Vec2 stencil_centroid_offset(ObjectKind k);

// Binary raster of the stencil at rotation 0, res x res covering the unit box
// (row-major). This is the canonical mask for the kind.
std::vector<unsigned char> canonical_mask(ObjectKind k, int res);

}  // namespace ert::sim
