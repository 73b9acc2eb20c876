#pragma once

#include "dynslam/mask/binary_image.hpp"

namespace dynslam {

/// Binary dilation with a (2r+1)x(2r+1) square structuring element, clipped at
/// the image border. Radius 0 is the identity. Separable: a horizontal pass
/// followed by a vertical pass, both built on the SIMD or-kernel.
BinaryImage dilate(const BinaryImage& mask, int radius);

/// Square erosion; pixels outside the image count as set, so objects touching
/// the border are not eroded from that side.
BinaryImage erode(const BinaryImage& mask, int radius);

}  // namespace dynslam
