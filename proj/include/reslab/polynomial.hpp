#ifndef RESLAB_POLYNOMIAL_HPP
#define RESLAB_POLYNOMIAL_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reslab/core.hpp"

namespace reslab {

// Dense polynomial over C, constant term first.  Trailing coefficients below
// 1e-300 in magnitude are trimmed on normalization so that degree() always
// points at a nonzero leading coefficient.
struct ComplexPolynomial {
    std::vector<Complex> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    void normalize();
    Complex eval(Complex z) const;
    // Value and derivative in one Horner pass.
    void eval_with_derivative(Complex z, Complex* p, Complex* dp) const;
};

// Thrown when the simultaneous iteration stalls; carries the best iterates
// seen so that callers can diagnose which roots were lost.
class RootFindError : public std::runtime_error {
public:
    RootFindError(const std::string& what, std::vector<Complex> best,
                  double residual)
        : std::runtime_error(what),
          best_iterates(std::move(best)),
          worst_residual(residual) {}
    std::vector<Complex> best_iterates;
    double worst_residual;
};

class BoundaryTooCloseError : public std::runtime_error {
public:
    explicit BoundaryTooCloseError(const std::string& what)
        : std::runtime_error(what) {}
};

// All roots with multiplicity via Aberth-Ehrlich iteration plus Newton polish.
// Roots closer than 1e-7 (1+|r|) are merged into one entry with multiplicity.
// Residual gate: |p(r)| <= tol * max|coeff| * (1+|r|)^degree.
std::vector<Complex> find_all_roots(const ComplexPolynomial& p, double tol);

// Same iteration driven by a value/derivative callback instead of stored
// coefficients.  The callback may apply any common positive rescaling to the
// pair (only the ratio enters the iteration).  Callers supply the initial
// circle radius (an upper bound on root moduli) and the residual gate is
// relative: |q(r)| <= tol * (1+|r|) * |q'(r)| + 1e-280.
using ValueDerivFn = std::function<void(Complex z, Complex* q, Complex* dq)>;
std::vector<Complex> find_all_roots(const ValueDerivFn& f, int degree,
                                    double radius, double tol);

// Number of zeros of f inside rect (with multiplicity) by the argument
// principle: trapezoid winding of f'/f along the boundary, f' by central
// differences.  n_boundary is the sample count per side.  Throws
// BoundaryTooCloseError when |f| on the boundary is not safely above the
// sample-to-sample variation (a zero could hide between samples).
int count_zeros_in_rectangle(const std::function<Complex(Complex)>& f,
                             const Rect& rect, int n_boundary);

// Same count driven by a value/derivative callback.  The winding integrand
// q'/q is immune to any common positive rescaling the callback applies, so
// this form stays valid for evaluators that renormalize internally (where
// the value-only form above would see spurious jumps).  The hiding test
// uses the Newton distance |q/dq|: a simple zero within about one sample
// spacing of the contour makes it small.
int count_zeros_in_rectangle(const ValueDerivFn& f, const Rect& rect,
                             int n_boundary);

}  // namespace reslab

#endif
