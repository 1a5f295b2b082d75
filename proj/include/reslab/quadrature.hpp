#ifndef RESLAB_QUADRATURE_HPP
#define RESLAB_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "reslab/core.hpp"

namespace reslab {

// Gaussian quadrature rules.  Two kinds:
//  - GaussLegendre: n-point rule mapped to a finite interval [a, b].
//  - SemiInfinite: n-point exponentially weighted rule for integrals over
//    [a, infinity) of integrands decaying at least like exp(-sigma*t).  Nodes
//    are t_i = a + x_i/sigma with x_i the Gauss-Laguerre abscissae; weights
//    absorb the exp(+x_i) factor so that integrate() sums W_i * f(t_i) directly.
struct QuadratureRule {
    enum class Kind { GaussLegendre, SemiInfinite };
    Kind kind;
    int n;
    double a;
    double b;       // right endpoint (GaussLegendre only)
    double sigma;   // decay rate (SemiInfinite only)
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule make_gauss_legendre(int n, double a, double b);
QuadratureRule make_semi_infinite(int n, double a, double sigma);

struct IntegrationResult {
    Complex value;
    double error_estimate;
};

// Applies the rule and reports a doubled-rule error estimate: the same rule
// rebuilt with 2n points is guaranteed to land within error_estimate of value.
IntegrationResult integrate(const std::function<Complex(double)>& f,
                            const QuadratureRule& rule);

// Plain weighted sum with no error estimate (used by hot loops that manage
// convergence themselves).
Complex apply_rule(const std::function<Complex(double)>& f,
                   const QuadratureRule& rule);

}  // namespace reslab

#endif
