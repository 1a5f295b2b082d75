#ifndef RESLAB_GRUSHIN_HPP
#define RESLAB_GRUSHIN_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reslab/airy.hpp"
#include "reslab/core.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

// Model half-line operator e^{-2 pi i/3}(D_t^2 + mu t) + lambda - z acting on
// Neumann data, studied through the bordered (Grushin) system over the basis
// {f, e_1, e_2, ...}: f the boundary-layer profile with f'(0) = 1 and e_j the
// transverse modes.  Everything here is explicit coefficient-space algebra.
struct ModelParameters {
    double lambda;  // transverse symbol value, real
    Complex z;      // spectral parameter, |Im z| < C1
    double mu;      // curvature-type scale, in [1/10, 10]
    double C1;      // cap on |Im z|; fixes how many modes are bordered
    int N;          // largest j with (sqrt(3)/2) mu^{2/3} zeta'_j <= C1
};

// Computes N from the zero table; throws std::invalid_argument when the
// table is too short to bracket the C1 threshold or a field is out of range.
ModelParameters make_model_parameters(double lambda, Complex z, double mu,
                                      double C1, const AiryZeroTable& table);

inline int default_j_trunc(const ModelParameters& params) {
    return params.N + 60;
}

// Raised when a computed solution would carry more than 1% of its mass in
// basis modes beyond the truncation index.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double fraction)
        : std::runtime_error(what), tail_fraction(fraction) {}
    double tail_fraction;
};

// Raised by the interval toy when the discrete system is numerically rank
// deficient (z too close to a discrete eigenvalue).
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double ratio)
        : std::runtime_error(what), pivot_ratio(ratio) {}
    double pivot_ratio;
};

// eta_j = e^{-2 pi i/3} mu^{2/3} zeta'_j + lambda - z: the diagonal symbol of
// the model operator on mode j.
Complex eta_entry(const ModelParameters& params, const AiryZeroTable& table,
                  int j);

// f_j = <f, e_j> in closed form: -e^{-2 pi i/3} mu^{1/6} e_j(0) / (eta_j + z)
// (the denominator is z-independent).
Complex f_coefficient(const ModelParameters& params, const AiryZeroTable& table,
                      int j);

struct GrushinSolution {
    Complex u0;                     // coefficient of f
    std::vector<Complex> u_coeffs;  // coefficients of e_j, j = 1..J_trunc
    std::vector<Complex> u_minus;   // correction outputs, j = 1..N
    double residual;                // max equation defect of the solved system
    double tail_fraction;           // estimated mass beyond J_trunc
};

// Direct evaluation of the explicit solution formulas: u0 = v0,
// u_j = v_plus_j - f_j v0 for bordered modes, eta_j^{-1}-divisions only
// beyond the bordered range, u_minus_j = v_j - e^{-2 pi i/3} e_j(0) v0
// - eta_j v_plus_j.  Requires J_trunc > N, v_coeffs.size() == J_trunc,
// v_plus.size() == N.  Throws TruncationError per the 1% rule.
GrushinSolution solve_model(const ModelParameters& params,
                            const std::vector<Complex>& v_coeffs, Complex v0,
                            const std::vector<Complex>& v_plus, int J_trunc,
                            const AiryZeroTable& table);

struct EffectiveHamiltonian {
    std::vector<std::vector<Complex>> entries;  // N x N, diagonal -eta_j
    std::vector<Complex> eta;                   // eta_j, j = 1..N
    Complex determinant() const;                // product of -eta_j (1 if N=0)
};

EffectiveHamiltonian effective_hamiltonian(const ModelParameters& params,
                                           const AiryZeroTable& table);

// Sum over j > from_j of |e_j(0)|^2 / |eta_j|^2 in the mu-rescaled basis,
// i.e. sum of mu^{1/3} / (zeta'_j |eta_j|^2).  Table zeros are extended by
// the asymptotic seed formula; the j^-2 remainder is added analytically.
double tail_sum(const ModelParameters& params, int from_j,
                const AiryZeroTable& table);

// Quadrature grid plus Gram matrices for norms of u = u0 f + sum u_j e_j.
// Built once per (mu, J); the lambda-dependent profile couplings are computed
// on demand.  All Gram integrals run over [0, T] with T past the turning
// point of the deepest basis mode.
class ModelBasisWorkspace {
public:
    ModelBasisWorkspace(double mu, int J, const AiryZeroTable& table,
                        ExecMode mode = ExecMode::Parallel);

    double mu() const { return mu_; }
    int basis_size() const { return J_; }
    double zeta_prime(int j) const { return zeta_prime_.at(j - 1); }

    // Integrals coupling the boundary-layer profile f_lambda to the basis.
    struct ProfileCoupling {
        double lambda;
        Complex f_at_zero;            // gamma_0 f
        double f_sq;                  // ||f||^2
        double tf_sq;                 // ||sqrt(t) f||^2
        double ttf_sq;                // ||t f||^2
        double df_sq;                 // ||f'||^2
        double tdf_sq;                // ||sqrt(t) f'||^2
        std::vector<Complex> fe;      // <f, e_j>
        std::vector<Complex> tfe;     // <t f, e_j>
        std::vector<Complex> ttfe;    // <t^2 f, e_j>
        std::vector<Complex> dfde;    // <f', e_j'>
        std::vector<Complex> tdfde;   // <t f', e_j'>
    };
    ProfileCoupling couple(double lambda) const;

    // Quadratic forms for u = u0 f + sum u_j e_j (u sized J).
    double l2_norm_sq(const ProfileCoupling& c, Complex u0,
                      const std::vector<Complex>& u) const;
    // integral of t^p |u|^2, p = 1 or 2
    double weighted_norm_sq(int p, const ProfileCoupling& c, Complex u0,
                            const std::vector<Complex>& u) const;
    // integral of t^p w conj(u) for two represented functions, p = 0 or 1
    Complex weighted_pairing(int p, const ProfileCoupling& c, Complex w0,
                             const std::vector<Complex>& w, Complex u0,
                             const std::vector<Complex>& u) const;
    // integral of t^p |u'|^2, p = 0 or 1
    double deriv_norm_sq(int p, const ProfileCoupling& c, Complex u0,
                         const std::vector<Complex>& u) const;
    Complex boundary_value(const ProfileCoupling& c, Complex u0,
                           const std::vector<Complex>& u) const;

    // Quadrature Gram of the basis itself (should be the identity); exposed
    // so tests can confirm the grid resolves every mode.
    double basis_gram_defect() const;

private:
    double mu_;
    int J_;
    std::vector<double> zeta_prime_;  // table slice
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> e_vals_;   // J x nodes, e_j(t_i)
    std::vector<double> de_vals_;  // J x nodes, e_j'(t_i)
    std::vector<double> e_at_zero_;
    // Symmetric J x J Grams: t, t^2 on values; 1, t on derivatives.
    std::vector<double> g_t_, g_tt_, g_d_, g_td_;

    double quad_form(const std::vector<double>& g,
                     const std::vector<Complex>& u) const;
    Complex bilinear(const std::vector<double>& g, const std::vector<Complex>& w,
                     const std::vector<Complex>& u) const;
};

// ||u||_B = <lambda - Re z> ||u|| + ||D^2 u|| + ||t u|| with the second
// derivative taken through the exact relation (D^2 + mu t) u = w, w diagonal
// in the basis.  Returns the three pieces and their weighted sum.
struct BNormBreakdown {
    double l2;      // ||u||
    double d2;      // ||D_t^2 u||
    double t1;      // ||t u||
    double b_norm;  // <lambda - Re z> l2 + d2 + t1
};
BNormBreakdown b_norm(const ModelParameters& params,
                      const ModelBasisWorkspace& ws,
                      const ModelBasisWorkspace::ProfileCoupling& c, Complex u0,
                      const std::vector<Complex>& u);

// Random-data stress test of the a-priori estimate
//   ||u||_B + |u_minus| <= C (||v|| + <lambda-Re z>^{1/4} |v0|
//                                  + <lambda-Re z> |v_plus|):
// for each lambda in the sweep, draws `trials` unit right-hand sides, solves,
// and reports the worst ratio.  pass = fitted log-log slope < 0.1.
struct WellposednessReport {
    std::vector<double> lambda_sweep;
    std::vector<double> max_ratio;
    double slope;
    bool pass;
    std::string to_json() const;  // {lambda_sweep, max_ratio, slope, pass}
};
WellposednessReport verify_wellposedness(
    const ModelParameters& params, int trials, int J_trunc, std::uint64_t seed,
    const AiryZeroTable& table,
    const std::vector<double>& lambda_sweep = {0.0, 10.0, 40.0, 160.0},
    ExecMode mode = ExecMode::Parallel);

// Spot check of the large-lambda coercivity bound
//   |<(P_lambda - z) u, u>| + <lambda-Re z>^{-1/2} |gamma_1 u|^2
//       >= C^{-1} <lambda-Re z> ||u||^2
// on random truncated u; reports the smallest and largest C forced by the
// draws (the estimate holds with C = max over u).
struct CoercivityReport {
    double lambda;
    double min_C;
    double max_C;
};
CoercivityReport coercivity_check(const ModelParameters& params, int trials,
                                  int J_trunc, std::uint64_t seed,
                                  const AiryZeroTable& table);

// Finite-difference toy on [0, pi]: bordered Neumann system
//   -u'' - z u + u_minus / pi = v,  u'(0) = v0,  u'(pi) = 0,
//   (1/pi) integral u = v_plus,
// second order, ghost-point boundary rows, trapezoid extraction row.
// Returns the u_minus degree of freedom.  Throws SingularSystemError when
// the pivot ratio of the dense LU falls below 1e-12.
Complex interval_toy_u_minus(Complex z, int grid_n,
                             const std::function<Complex(double)>& v,
                             Complex v0, Complex v_plus);

// The effective map v_plus -> u_minus at v = 0, v0 = 0; equals pi z exactly
// for the continuum problem and to roundoff for this discretization.
Complex interval_toy_e_minus_plus(Complex z, int grid_n);

}  // namespace reslab

#endif
