#pragma once

#include <functional>

#include "fspt/geometry.hpp"
#include "fspt/grid.hpp"

namespace fspt {

/// Inner/outer radii of the smooth cutoff; the window is identically 1 on
/// [-r_in,r_in]^2 and identically 0 outside [-r_out,r_out]^2.
struct WindowParams {
    double r_in = 0.0;
    double r_out = 0.0;
};

void validate_window(const WindowParams& p, double a);

/// Throws GeometryError unless the shape fits inside the flat region
/// [-r_in, r_in]^2 of the window.
void validate_window_covers(const WindowParams& p, const ShapeDescriptor& shape);

/// 1D smooth vanishing window: 1 for |x| <= r_in, 0 for |x| >= r_out,
/// exp(2 e^{-1/r} / (r-1)) with r = (|x|-r_in)/(r_out-r_in) in between.
double zeta(double x, const WindowParams& p);

/// Tensor window zeta(x1) * zeta(x2).
double eta(Point x, const WindowParams& p);

/// Smooth global extension m~ of the contrast together with the scatterer
/// it extends; m~ restricted to D equals the physical contrast 1 - mu^2.
struct ContrastSpec {
    std::function<double(Point)> extension;
    ShapeDescriptor shape;
};

/// Samples m_e = m~ * eta at every grid node.
ComplexField sample_contrast(const ContrastSpec& c, const WindowParams& p, const GridSpec& g);

}  // namespace fspt
