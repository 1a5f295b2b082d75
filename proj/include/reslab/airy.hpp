#ifndef RESLAB_AIRY_HPP
#define RESLAB_AIRY_HPP

#include <string>
#include <vector>

#include "reslab/core.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

// Ai and Ai' carried as a scaled pair: the true values are ai * exp(exponent)
// and aip * exp(exponent).  exponent is zero whenever |Re zeta| <= 700 with
// zeta = (2/3) z^{3/2}, i.e. whenever the plain values fit in a double.
struct AiryValue {
    Complex ai;
    Complex aip;
    double exponent;
};

// Airy function of the first kind on |z| <= 1e4 (std::domain_error beyond).
// Maclaurin series (compensated arithmetic) for |z| <= 10, asymptotic
// expansions beyond, rotated through the connection identity
//   Ai(z) = -omega Ai(omega z) - omega^2 Ai(omega^2 z),  omega = e^{2 pi i/3},
// for arguments beyond 2 pi/3, and reflected for Im z < 0.
AiryValue airy_ai(Complex z);

// Folds the exponent back in; harmlessly under/overflows for extreme z.
void airy_ai_unscaled(Complex z, Complex* ai, Complex* aip);

// Real-axis evaluations (the connection pieces are conjugates there; the
// imaginary rounding dross is discarded).
double airy_ai_real(double t);
double airy_aip_real(double t);

namespace detail {
// The two regimes individually, exposed so tests can cross-validate them
// against each other on the crossover annulus 8 <= |z| <= 12.
AiryValue airy_maclaurin(Complex z);   // |z| <= 12.5
AiryValue airy_asymptotic(Complex z);  // |z| >= 8
}  // namespace detail

// Negated zeros of Ai (zeta_j) and Ai' (zeta'_j), 1-based, together with the
// derived mode data: norm_j = ||Ai||_{L2(-zeta'_j, inf)} and the signed
// boundary value e_j(0) = Ai(-zeta'_j)/norm_j.
struct AiryZeroTable {
    std::vector<double> zeros_ai;
    std::vector<double> zeros_ai_prime;
    std::vector<double> boundary_values;
    std::vector<double> norms;
    int count = 0;

    double zeta(int j) const { return zeros_ai.at(j - 1); }
    double zeta_prime(int j) const { return zeros_ai_prime.at(j - 1); }
    double boundary_value(int j) const { return boundary_values.at(j - 1); }
    double norm(int j) const { return norms.at(j - 1); }
};

// Newton refinement from asymptotic seeds (bisection fallback), norms by
// composite Gauss-Legendre panels sized to the local oscillation wavelength.
// 1 <= J_max <= 500.
AiryZeroTable build_zero_table(int J_max, ExecMode mode = ExecMode::Parallel);

// CSV columns: j, zeta_j, zeta_prime_j, e_j_0, norm_j (17 significant digits).
void write_zero_table_csv(const AiryZeroTable& table, const std::string& path);

// Seed formulas the Newton solver starts from; also serve as the large-j
// extension for analytic tail sums past any table.
double zeta_prime_seed(int j);
double zeta_seed(int j);

// Normalized transverse mode e(t) = mu^{1/6} Lambda^{1/2} e_j(mu^{1/3} Lambda t)
// where e_j(s) = Ai(s - zeta'_j)/norm_j; unit L2 norm on (0, inf) and
// vanishing derivative at t = 0.
struct NeumannEigenfunction {
    int j;
    double mu;
    double lambda_scale;
    double zeta_prime;
    double norm_const;
    double amplitude;  // mu^{1/6} Lambda^{1/2}
    double scale;      // mu^{1/3} Lambda

    double operator()(double t) const;
    double derivative(double t) const;
};

NeumannEigenfunction eigenfunction(int j, double mu, double Lambda,
                                   const AiryZeroTable& table);

// Which rotation e^{+-2 pi i/3} multiplies lambda in the boundary-layer
// profile below; Plus is the convention used everywhere else in the library.
enum class RotationSign { Plus, Minus };

// Boundary-layer profile with unit derivative at t = 0:
//   f(t) = Ai(mu^{1/3} t + w) / (mu^{1/3} Ai'(w)),  w = e^{+-2 pi i/3} lambda mu^{-2/3}.
// The denominator is kept as a scaled pair; operator() folds the exponent
// difference, which is bounded on the evaluation range.
struct PoissonFunction {
    double lambda;
    double mu;
    Complex shift;        // w
    Complex denom;        // mu^{1/3} Ai'(w), scaled
    double denom_exponent;

    Complex operator()(double t) const;
    Complex derivative(double t) const;
};

PoissonFunction poisson_function(double lambda, double mu, RotationSign sign);

// ||f_lambda||_{L2(0, inf)} by adaptive panel quadrature of |f|^2 (mu = 1).
// Requires |lambda| >= 1; throws on quadrature non-convergence.
double poisson_function_norm(double lambda, RotationSign sign);

// Closed-form companion profile f#(t) = -e^{i pi/3} lambda^{-1/2}
// exp(-e^{-i pi/3} lambda^{1/2} t); its exact norm is lambda^{-3/4}.
Complex easy_model_profile(double lambda, double t);
double easy_model_norm_quadrature(double lambda);

}  // namespace reslab

#endif
