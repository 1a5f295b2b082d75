#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "reslab/airy.hpp"
#include "reslab/geometry.hpp"

using namespace reslab;

namespace {

const AiryZeroTable& table() {
    static AiryZeroTable t = build_zero_table(200);
    return t;
}

}  // namespace

TEST_CASE("sphere model: exact curvature, area and band constants") {
    ObstacleModel m = ObstacleModel::sphere(2.5);
    CHECK(m.kind == ObstacleKind::Sphere);
    CHECK(m.dimension == 3);
    CHECK(m.q_min == 0.4);
    CHECK(m.q_max == 0.4);
    CHECK(m.surface_area == doctest::Approx(25.0 * kPi).epsilon(1e-15));

    CurvatureExtremes ex = curvature_extremes(m, 0);  // exact kind ignores n
    CHECK(ex.q_min == 0.4);
    CHECK(ex.q_max == 0.4);
    CHECK(ex.error_bound == 0.0);

    // kappa = K = 2^{-1/3} cos(pi/6) q^{2/3}; for q = 1 the cube is the
    // algebraic number 3 sqrt(3)/16.
    BandConstants unit = band_constants(ObstacleModel::sphere(1.0), table());
    CHECK(unit.kappa == doctest::Approx(0.6873648184993014).epsilon(1e-15));
    CHECK(unit.K_const == unit.kappa);
    CHECK(std::pow(unit.kappa, 3.0) ==
          doctest::Approx(3.0 * std::sqrt(3.0) / 16.0).epsilon(1e-14));

    // Equal extremes separate every tabulated pair of zeros, so j0 runs to
    // the end of what the table can certify.
    CHECK(unit.j0 == table().count - 1);

    BandConstants scaled = band_constants(m, table());
    CHECK(scaled.kappa ==
          doctest::Approx(unit.kappa * std::pow(0.4, 2.0 / 3.0)).epsilon(1e-14));

    CHECK_THROWS_AS(ObstacleModel::sphere(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ObstacleModel::sphere(-1.0), std::invalid_argument);
}

TEST_CASE("prolate spheroid: area, sampled extremes, separation index") {
    // a = 1.2, b = c = 1: closed-form area 2 pi b^2 (1 + (a/(b e)) asin e),
    // e^2 = 1 - b^2/a^2, and curvature extremes c/a^2 (equator, meridional)
    // and a/c^2 (tips).
    ObstacleModel m = ObstacleModel::ellipsoid(1.2, 1.0, 1.0);
    CHECK(m.kind == ObstacleKind::Ellipsoid);
    const double e = std::sqrt(1.0 - 1.0 / 1.44);
    const double area_closed = 2.0 * kPi * (1.0 + 1.2 / e * std::asin(e));
    CHECK(m.surface_area == doctest::Approx(area_closed).epsilon(1e-9));
    CHECK(m.surface_area == doctest::Approx(14.271966506140146).epsilon(1e-12));

    CurvatureExtremes ex = curvature_extremes(m, 40000);
    CHECK(ex.error_bound > 0.0);
    CHECK(ex.error_bound < 1e-2);
    CHECK(std::abs(ex.q_min - 25.0 / 36.0) < 1e-6);
    CHECK(std::abs(ex.q_max - 1.2) < 1e-6);

    // Curvature ratio 1.728 clears the first two zero-separation ratios
    // (5.69, 1.81) and loses to the third (1.45): j0 = 2.
    BandConstants bc = band_constants(m, table());
    CHECK(bc.j0 == 2);
    CHECK(bc.kappa ==
          doctest::Approx(0.6873648184993014 * std::pow(25.0 / 36.0, 2.0 / 3.0))
              .epsilon(1e-5));
    CHECK(bc.K_const ==
          doctest::Approx(0.6873648184993014 * std::pow(1.2, 2.0 / 3.0))
              .epsilon(1e-5));

    // Doubling all axes halves every curvature.
    CurvatureExtremes dbl =
        curvature_extremes(ObstacleModel::ellipsoid(2.4, 2.0, 2.0), 40000);
    CHECK(std::abs(dbl.q_max - 0.6) < 1e-6);
    CHECK(std::abs(dbl.q_min - 25.0 / 72.0) < 1e-6);

    CHECK_THROWS_AS(ObstacleModel::ellipsoid(1.0, 1.2, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ObstacleModel::ellipsoid(1.0, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(curvature_extremes(m, 9999), std::invalid_argument);

    // Extreme needles are rejected twice over: the factory's area quadrature
    // cannot resolve the tips, and even a hand-assembled model trips the
    // axis-ratio guard in the curvature sweep.
    CHECK_THROWS_AS(ObstacleModel::ellipsoid(2000.0, 1.0, 1.0),
                    std::runtime_error);
    ObstacleModel needle;
    needle.kind = ObstacleKind::Ellipsoid;
    needle.axis_a = 2000.0;
    needle.axis_b = 1.0;
    needle.axis_c = 1.0;
    CHECK_THROWS_AS(curvature_extremes(needle, 40000), std::invalid_argument);
}

TEST_CASE("explicit bounds: pass-through extremes and j0 thresholds") {
    ObstacleModel m = ObstacleModel::explicit_bounds(1.0, 6.0, 10.0);
    CHECK(m.kind == ObstacleKind::Explicit);
    CurvatureExtremes ex = curvature_extremes(m, 0);
    CHECK(ex.q_min == 1.0);
    CHECK(ex.q_max == 6.0);
    CHECK(ex.error_bound == 0.0);

    // Ratio 6 already exceeds the first separation (zeta'_2/zeta'_1)^{3/2}
    // = 5.6929: no gap is certified.
    CHECK(band_constants(m, table()).j0 == 0);

    // Straddle that first threshold from both sides.
    CHECK(band_constants(ObstacleModel::explicit_bounds(1.0, 5.70, 1.0), table())
              .j0 == 0);
    CHECK(band_constants(ObstacleModel::explicit_bounds(1.0, 5.68, 1.0), table())
              .j0 == 1);
    CHECK(band_constants(ObstacleModel::explicit_bounds(1.0, 1.7, 1.0), table())
              .j0 == 2);

    CHECK_THROWS_AS(ObstacleModel::explicit_bounds(0.0, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ObstacleModel::explicit_bounds(2.0, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ObstacleModel::explicit_bounds(1.0, 2.0, 0.0),
                    std::invalid_argument);

    AiryZeroTable tiny = build_zero_table(1);
    CHECK_THROWS_AS(band_constants(m, tiny), std::invalid_argument);
}

TEST_CASE("ellipsoid surface area: degenerate and closed-form anchors") {
    // Sphere degenerate case.
    CHECK(ellipsoid_surface_area(1.0, 1.0, 1.0) ==
          doctest::Approx(4.0 * kPi).epsilon(1e-12));

    // Oblate closed form at a = b = 1, c = 0.6 (e = 0.8):
    // 2 pi (1 + ((1-e^2)/e) atanh e) = 9.389438372880468.
    CHECK(ellipsoid_surface_area(1.0, 1.0, 0.6) ==
          doctest::Approx(9.389438372880468).epsilon(1e-10));

    // Triaxial has no elementary form; check the exact quadratic scaling law
    // instead.
    const double base = ellipsoid_surface_area(1.3, 1.1, 0.7);
    CHECK(ellipsoid_surface_area(2.6, 2.2, 1.4) ==
          doctest::Approx(4.0 * base).epsilon(1e-9));
    // And monotonicity between nested ellipsoids.
    CHECK(base > ellipsoid_surface_area(1.1, 1.0, 0.7));

    CHECK_THROWS_AS(ellipsoid_surface_area(1.0, 1.2, 1.0),
                    std::invalid_argument);
}
