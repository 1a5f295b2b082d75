#ifndef RESLAB_GEOMETRY_HPP
#define RESLAB_GEOMETRY_HPP

#include "reslab/airy.hpp"

namespace reslab {

enum class ObstacleKind { Sphere, Ellipsoid, Explicit };

// Convex obstacle reduced to the data the band analysis consumes: extreme
// normal curvatures over the unit tangent bundle and the boundary area.
struct ObstacleModel {
    ObstacleKind kind;
    int dimension = 3;  // ambient dimension; everything here lives in R^3
    double radius = 0.0;                              // sphere
    double axis_a = 0.0, axis_b = 0.0, axis_c = 0.0;  // ellipsoid, a >= b >= c
    double q_min = 0.0, q_max = 0.0;                  // explicit bounds
    double surface_area = 0.0;

    static ObstacleModel sphere(double radius);
    static ObstacleModel ellipsoid(double a, double b, double c);
    static ObstacleModel explicit_bounds(double q_min, double q_max,
                                         double surface_area);
};

struct CurvatureExtremes {
    double q_min;
    double q_max;
    double error_bound;  // sampling-resolution estimate; 0 for exact kinds
};

// Min/max of the second fundamental form on unit tangent vectors.  Spheres
// and explicit models are exact and ignore n_samples; ellipsoids sweep an
// n_samples grid of principal-curvature extremes (n_samples >= 10000) and
// sharpen the winners by pattern-search refinement.
CurvatureExtremes curvature_extremes(const ObstacleModel& model, int n_samples);

// kappa = 2^{-1/3} cos(pi/6) q_min^{2/3}, K_const likewise from q_max; j0 is
// the largest index such that q_max/q_min < (zeta'_{i+1}/zeta'_i)^{3/2} for
// every i <= j0 (0 when the first separation already fails).
struct BandConstants {
    double kappa;
    double K_const;
    int j0;
};

BandConstants band_constants(const ObstacleModel& model,
                             const AiryZeroTable& table);

// Boundary area of a triaxial ellipsoid by tensor quadrature, converged to
// 1e-6 relative (Gauss-Legendre in the polar angle, trapezoid in azimuth).
double ellipsoid_surface_area(double a, double b, double c);

}  // namespace reslab

#endif
