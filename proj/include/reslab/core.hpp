#ifndef RESLAB_CORE_HPP
#define RESLAB_CORE_HPP

#include <complex>

namespace reslab {

using Complex = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

// Primitive cube root of unity used throughout the rotated-operator algebra.
// omega = exp(2*pi*i/3), omega_bar = exp(-2*pi*i/3).
inline const Complex kOmega{-0.5, 0.8660254037844386467637231707529362};
inline const Complex kOmegaBar{-0.5, -0.8660254037844386467637231707529362};

// Axis-aligned rectangle in the complex plane.
struct Rect {
    double re_lo, re_hi;
    double im_lo, im_hi;
};

}  // namespace reslab

#endif
