#ifndef RESLAB_DD_HPP
#define RESLAB_DD_HPP

#include <cmath>

namespace reslab {
namespace detail {

// Compensated (double-double) arithmetic: a value is carried as an unevaluated
// sum hi + lo with |lo| <= ulp(hi)/2, giving roughly 32 significant digits.
// Only the handful of operations needed by the Airy power series are provided.
struct dd {
    double hi, lo;
};

// Knuth two-sum: exact error of a floating-point addition.
inline dd two_sum(double a, double b) {
    double s = a + b;
    double bv = s - a;
    double err = (a - (s - bv)) + (b - bv);
    return {s, err};
}

// Requires |a| >= |b| (or a == 0).
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

// Exact product via fused multiply-add.
inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_add(dd a, double b) {
    dd s = two_sum(a.hi, b);
    s.lo += a.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_mul(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_div(dd a, double b) {
    double q1 = a.hi / b;
    dd p = two_prod(q1, b);
    double r = ((a.hi - p.hi) - p.lo) + a.lo;
    return quick_two_sum(q1, r / b);
}

// Complex double-double, componentwise.
struct cdd {
    dd re, im;
};

inline cdd cdd_from(double re, double im) { return {{re, 0.0}, {im, 0.0}}; }

inline cdd cdd_add(cdd a, cdd b) {
    return {dd_add(a.re, b.re), dd_add(a.im, b.im)};
}

inline cdd cdd_mul(cdd a, cdd b) {
    dd re = dd_add(dd_mul(a.re, b.re), dd_neg(dd_mul(a.im, b.im)));
    dd im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
    return {re, im};
}

inline cdd cdd_mul(cdd a, dd b) {
    return {dd_mul(a.re, b), dd_mul(a.im, b)};
}

inline cdd cdd_div(cdd a, double b) {
    return {dd_div(a.re, b), dd_div(a.im, b)};
}

inline double cdd_abs_estimate(cdd a) {
    return std::abs(a.re.hi) + std::abs(a.im.hi);
}

}  // namespace detail
}  // namespace reslab

#endif
