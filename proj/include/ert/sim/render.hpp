#pragma once

#include "ert/common/frame.hpp"
#include "ert/sim/scene.hpp"

namespace ert::sim {

// Colour of the texture at object-local pixel offset (lx, ly).
Rgb texture_color(TextureId t, double lx, double ly);

Frame render(const Scene& scene);

}  // namespace ert::sim
