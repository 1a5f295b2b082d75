#include "reslab/quadrature.hpp"

#include <cmath>
#include <cstdlib>

namespace reslab {

namespace {

// Legendre P_n and its derivative by the three-term recurrence.
void legendre_pair(int n, double x, double* pn, double* dpn) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    *pn = (n == 0) ? p0 : p1;
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1), valid away from +-1.
    *dpn = (n == 0) ? 0.0 : n * (x * p1 - p0) / (x * x - 1.0);
}

// Scaled Laguerre Lhat_k(x) = L_k(x) exp(-x/2); the usual recurrence
// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1} survives the common factor.
// long double keeps exp(-x/2) representable out to the largest roots.
long double laguerre_scaled(int n, long double x, long double* prev) {
    long double e = expl(-x / 2.0L);
    long double l0 = e, l1 = (1.0L - x) * e;
    if (n == 0) {
        *prev = 0.0L;
        return l0;
    }
    for (int k = 1; k < n; ++k) {
        long double l2 = ((2 * k + 1 - x) * l1 - k * l0) / (k + 1);
        l0 = l1;
        l1 = l2;
    }
    *prev = l0;
    return l1;
}

}  // namespace

QuadratureRule make_gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("make_gauss_legendre: n < 1");
    if (!(b > a)) throw std::invalid_argument("make_gauss_legendre: b <= a");
    QuadratureRule rule;
    rule.kind = QuadratureRule::Kind::GaussLegendre;
    rule.n = n;
    rule.a = a;
    rule.b = b;
    rule.sigma = 0.0;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        // Tricomi-style seed, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pn = 0.0, dpn = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, &pn, &dpn);
            double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        legendre_pair(n, x, &pn, &dpn);
        rule.nodes[i] = mid + half * x;
        rule.weights[i] = 2.0 * half / ((1.0 - x * x) * dpn * dpn);
    }
    return rule;
}

QuadratureRule make_semi_infinite(int n, double a, double sigma) {
    if (n < 1 || n > 2048)
        throw std::invalid_argument("make_semi_infinite: n out of range [1, 2048]");
    if (!(sigma > 0.0))
        throw std::invalid_argument("make_semi_infinite: sigma must be positive");
    QuadratureRule rule;
    rule.kind = QuadratureRule::Kind::SemiInfinite;
    rule.n = n;
    rule.a = a;
    rule.b = 0.0;
    rule.sigma = sigma;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    long double x = 0.0L, root1 = 0.0L, root2 = 0.0L;
    for (int i = 0; i < n; ++i) {
        // Stroud-Secrest seeds for Laguerre roots, then Newton.
        if (i == 0) {
            x = 3.0L / (1.0L + 2.4L * n);
        } else if (i == 1) {
            x = root1 + 15.0L / (1.0L + 2.5L * n);
        } else {
            x = root1 + (root1 - root2) * (1.0L + 2.55L * (i - 1)) / (1.9L * (i - 1));
        }
        for (int it = 0; it < 200; ++it) {
            long double lm;
            long double ln = laguerre_scaled(n, x, &lm);
            // d/dx Lhat_n = (n (L_n - L_{n-1}) / x - L_n / 2) e^{-x/2}.
            long double d = (n * (ln - lm) / x) - 0.5L * ln;
            long double dx = ln / d;
            x -= dx;
            if (fabsl(dx) < 1e-18L * (1.0L + fabsl(x))) break;
        }
        root2 = root1;
        root1 = x;
        long double lm;
        long double lnp1 = laguerre_scaled(n + 1, x, &lm);
        // Weight for the e^{-x} measure, with the exp(+x) restoration folded
        // in by using the scaled polynomial: w e^x = x / ((n+1) Lhat_{n+1})^2.
        long double w = x / ((n + 1.0L) * (n + 1.0L) * lnp1 * lnp1);
        rule.nodes[i] = static_cast<double>(a + x / sigma);
        rule.weights[i] = static_cast<double>(w / sigma);
    }
    return rule;
}

Complex apply_rule(const std::function<Complex(double)>& f,
                   const QuadratureRule& rule) {
    Complex sum = 0.0;
    for (int i = 0; i < rule.n; ++i) sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

IntegrationResult integrate(const std::function<Complex(double)>& f,
                            const QuadratureRule& rule) {
    QuadratureRule doubled =
        rule.kind == QuadratureRule::Kind::GaussLegendre
            ? make_gauss_legendre(2 * rule.n, rule.a, rule.b)
            : make_semi_infinite(2 * rule.n, rule.a, rule.sigma);
    Complex coarse = apply_rule(f, rule);
    Complex fine = apply_rule(f, doubled);
    if (!std::isfinite(coarse.real()) || !std::isfinite(coarse.imag()) ||
        !std::isfinite(fine.real()) || !std::isfinite(fine.imag()))
        throw std::runtime_error("integrate: non-finite integrand value");
    double diff = std::abs(fine - coarse);
    double floor = 1e-13 * (1.0 + std::abs(coarse));
    return {coarse, std::max(diff * (1.0 + 1e-6), floor)};
}

}  // namespace reslab
