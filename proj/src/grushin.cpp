// Bordered-system algebra for the rotated half-line model operator
//   P_lambda = e^{-2 pi i/3} (D_t^2 + mu t) + lambda
// on Neumann data.  The transverse modes e_j diagonalize D^2 + mu t, so the
// whole solve is coefficient arithmetic; the only analysis happening here is
// bookkeeping for the boundary-layer profile f (f'(0) = 1) through its exact
// expansion coefficients f_j and a set of quadrature Gram matrices.

#include "reslab/grushin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

#include "reslab/quadrature.hpp"
#include "reslab/rng.hpp"

namespace reslab {

namespace {

// Japanese bracket <x> = sqrt(1 + x^2), the weight in all the estimates.
double bracket(double x) { return std::sqrt(1.0 + x * x); }

double mu_sixth(double mu) { return std::pow(mu, 1.0 / 6.0); }

double mu_two_thirds(double mu) {
    const double c = std::cbrt(mu);
    return c * c;
}

}  // namespace

ModelParameters make_model_parameters(double lambda, Complex z, double mu,
                                      double C1, const AiryZeroTable& table) {
    if (!(mu >= 0.1 && mu <= 10.0))
        throw std::invalid_argument("make_model_parameters: mu outside [0.1, 10]");
    if (!(C1 > 0.0))
        throw std::invalid_argument("make_model_parameters: C1 must be positive");
    if (!(std::abs(z.imag()) < C1))
        throw std::invalid_argument("make_model_parameters: |Im z| must be below C1");
    if (table.count < 1)
        throw std::invalid_argument("make_model_parameters: empty zero table");

    // N counts the modes whose decay rate (sqrt(3)/2) mu^{2/3} zeta'_j stays
    // at or below C1; those must be bordered out of the direct solve.
    const double rate = 0.5 * std::sqrt(3.0) * mu_two_thirds(mu);
    int N = 0;
    while (N < table.count && rate * table.zeta_prime(N + 1) <= C1) ++N;
    if (N == table.count)
        throw std::invalid_argument(
            "make_model_parameters: zero table too short to bracket the C1 "
            "threshold");
    return ModelParameters{lambda, z, mu, C1, N};
}

Complex eta_entry(const ModelParameters& params, const AiryZeroTable& table,
                  int j) {
    if (j < 1 || j > table.count)
        throw std::invalid_argument("eta_entry: mode index outside zero table");
    const double c = mu_two_thirds(params.mu) * table.zeta_prime(j);
    return kOmegaBar * c + Complex(params.lambda, 0.0) - params.z;
}

Complex f_coefficient(const ModelParameters& params, const AiryZeroTable& table,
                      int j) {
    if (j < 1 || j > table.count)
        throw std::invalid_argument("f_coefficient: mode index outside zero table");
    // Denominator eta_j + z = e^{-2 pi i/3} mu^{2/3} zeta'_j + lambda has
    // strictly negative imaginary part, so it never vanishes.
    const double c = mu_two_thirds(params.mu) * table.zeta_prime(j);
    const Complex denom = kOmegaBar * c + Complex(params.lambda, 0.0);
    const double e0 = mu_sixth(params.mu) * table.boundary_value(j);
    return -kOmegaBar * e0 / denom;
}

GrushinSolution solve_model(const ModelParameters& params,
                            const std::vector<Complex>& v_coeffs, Complex v0,
                            const std::vector<Complex>& v_plus, int J_trunc,
                            const AiryZeroTable& table) {
    const int N = params.N;
    if (J_trunc <= N)
        throw std::invalid_argument("solve_model: J_trunc must exceed N");
    if (J_trunc > table.count)
        throw std::invalid_argument("solve_model: J_trunc beyond zero table");
    if (static_cast<int>(v_coeffs.size()) != J_trunc)
        throw std::invalid_argument("solve_model: v_coeffs must have J_trunc entries");
    if (static_cast<int>(v_plus.size()) != N)
        throw std::invalid_argument("solve_model: v_plus must have N entries");

    std::vector<Complex> eta(J_trunc), f(J_trunc);
    for (int j = 1; j <= J_trunc; ++j) {
        eta[j - 1] = eta_entry(params, table, j);
        f[j - 1] = f_coefficient(params, table, j);
    }

    GrushinSolution sol;
    sol.u0 = v0;
    sol.u_coeffs.resize(J_trunc);
    sol.u_minus.resize(N);

    const double m16 = mu_sixth(params.mu);
    for (int j = 1; j <= N; ++j) {
        // Bordered modes: the border equation pins the coefficient and the
        // correction u_minus absorbs the equation defect.
        sol.u_coeffs[j - 1] = v_plus[j - 1] - f[j - 1] * v0;
        sol.u_minus[j - 1] = v_coeffs[j - 1] -
                             kOmegaBar * (m16 * table.boundary_value(j)) * v0 -
                             eta[j - 1] * v_plus[j - 1];
    }
    for (int j = N + 1; j <= J_trunc; ++j) {
        // |Im eta_j| > (sqrt(3)/2) mu^{2/3} zeta'_j - C1 > 0 here, so the
        // division is safe for every admissible z.
        sol.u_coeffs[j - 1] = (v_coeffs[j - 1] + params.z * v0 * f[j - 1]) / eta[j - 1];
    }

    double res = std::abs(sol.u0 - v0);
    for (int j = 1; j <= J_trunc; ++j) {
        Complex defect = -params.z * sol.u0 * f[j - 1] +
                         eta[j - 1] * sol.u_coeffs[j - 1] - v_coeffs[j - 1];
        if (j <= N) defect += sol.u_minus[j - 1];
        res = std::max(res, std::abs(defect));
    }
    for (int j = 1; j <= N; ++j) {
        res = std::max(res, std::abs(sol.u0 * f[j - 1] + sol.u_coeffs[j - 1] -
                                     v_plus[j - 1]));
    }
    sol.residual = res;

    // Mass of the solution beyond the truncation: only the f-component leaks
    // there, with coefficients u0 f_j.  |f_j|^2 = mu^{1/3}/(zeta'_j |eta_j+z|^2)
    // is exactly the tail_sum integrand at z = 0.
    ModelParameters shifted = params;
    shifted.z = Complex(0.0, 0.0);
    const double tail_f_sq = tail_sum(shifted, J_trunc, table);
    double kept = 0.0;
    for (int j = 1; j <= J_trunc; ++j)
        kept += std::norm(sol.u_coeffs[j - 1] + sol.u0 * f[j - 1]);
    const double dropped = std::norm(sol.u0) * tail_f_sq;
    const double total = kept + dropped;
    sol.tail_fraction = (total > 0.0) ? dropped / total : 0.0;
    if (sol.tail_fraction > 0.01) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "solve_model: %.2f%% of the solution mass lies beyond "
                      "J_trunc = %d (limit 1%%)",
                      100.0 * sol.tail_fraction, J_trunc);
        throw TruncationError(msg, sol.tail_fraction);
    }
    return sol;
}

Complex EffectiveHamiltonian::determinant() const {
    Complex det(1.0, 0.0);
    for (std::size_t i = 0; i < entries.size(); ++i) det *= entries[i][i];
    return det;
}

EffectiveHamiltonian effective_hamiltonian(const ModelParameters& params,
                                           const AiryZeroTable& table) {
    const int N = params.N;
    EffectiveHamiltonian H;
    H.eta.resize(N);
    H.entries.assign(N, std::vector<Complex>(N, Complex(0.0, 0.0)));
    for (int j = 1; j <= N; ++j) {
        H.eta[j - 1] = eta_entry(params, table, j);
        H.entries[j - 1][j - 1] = -H.eta[j - 1];
    }
    return H;
}

double tail_sum(const ModelParameters& params, int from_j,
                const AiryZeroTable& table) {
    if (from_j < 0)
        throw std::invalid_argument("tail_sum: from_j must be nonnegative");
    const double mu13 = std::cbrt(params.mu);
    const double mu23 = mu13 * mu13;
    const double re_b = params.lambda - params.z.real();
    const double im_b = -params.z.imag();
    const double half_sqrt3 = 0.5 * std::sqrt(3.0);
    // |eta|^2 = c^2 - b c + |beta|^2 with c = mu^{2/3} zeta'_j, beta = lambda-z
    const double b_lin = re_b + std::sqrt(3.0) * im_b;
    const double beta_sq = re_b * re_b + im_b * im_b;

    // Sum terms until c dominates beta, then close with the midpoint-rule
    // integral of the j^{-2} tail (substituting the zero-count asymptotics
    // j - 3/4 = zeta'^{3/2}/(1.5 pi)).
    const double c_cut = 4.0 * (1.0 + std::abs(b_lin) + std::sqrt(beta_sq));
    long j = from_j;
    double sum = 0.0;
    for (;;) {
        ++j;
        const double zp = (j <= table.count)
                              ? table.zeta_prime(static_cast<int>(j))
                              : zeta_prime_seed(static_cast<int>(j));
        const double c = mu23 * zp;
        sum += mu13 / (zp * ((c - b_lin) * c + beta_sq));
        if (j >= from_j + 400 && c >= c_cut) break;
    }
    // Remainder: sum_{k>j} g(k) ~ (2 sqrt(c_h)/pi) int_0^1 r^2 dr /
    // (c_h^2 - b c_h r^2 + |beta|^2 r^4) after c = c_h / r^2; the cutoff
    // keeps the denominator bounded away from zero on [0, 1].
    const double s_half = std::pow(1.5 * kPi * (static_cast<double>(j) - 0.25),
                                   2.0 / 3.0);
    const double c_h = mu23 * s_half;
    static const QuadratureRule kTailRule = make_gauss_legendre(32, 0.0, 1.0);
    double integral = 0.0;
    for (int i = 0; i < kTailRule.n; ++i) {
        const double r = kTailRule.nodes[i];
        const double r2 = r * r;
        integral += kTailRule.weights[i] * r2 /
                    (c_h * c_h - b_lin * c_h * r2 + beta_sq * r2 * r2);
    }
    sum += 2.0 * std::sqrt(c_h) / kPi * integral;
    return sum;
}

ModelBasisWorkspace::ModelBasisWorkspace(double mu, int J,
                                         const AiryZeroTable& table,
                                         ExecMode mode)
    : mu_(mu), J_(J) {
    if (!(mu >= 0.1 && mu <= 10.0))
        throw std::invalid_argument("ModelBasisWorkspace: mu outside [0.1, 10]");
    if (J < 1)
        throw std::invalid_argument("ModelBasisWorkspace: basis size must be positive");
    if (J > table.count)
        throw std::invalid_argument("ModelBasisWorkspace: basis larger than zero table");

    zeta_prime_.resize(J);
    for (int j = 1; j <= J; ++j) zeta_prime_[j - 1] = table.zeta_prime(j);

    // Panel width tied to the shortest oscillation among the basis modes
    // (wavelength 2 pi / (mu^{1/3} sqrt(zeta'_J)) near t = 0); the domain
    // runs 15 decay lengths past the deepest turning point.  The same grid
    // resolves the profile f_lambda for lambda up to ~(mu^{1/3} sqrt(zeta'_J))^2.
    const double mu13 = std::cbrt(mu);
    const double zJ = zeta_prime_[J - 1];
    const double T = (zJ + 15.0) / mu13;
    const double width = kPi / (2.5 * mu13 * std::sqrt(zJ));
    const int panels = static_cast<int>(std::ceil(T / width));
    for (int p = 0; p < panels; ++p) {
        const double a = T * p / panels;
        const double b = T * (p + 1) / panels;
        const QuadratureRule rule = make_gauss_legendre(16, a, b);
        nodes_.insert(nodes_.end(), rule.nodes.begin(), rule.nodes.end());
        weights_.insert(weights_.end(), rule.weights.begin(), rule.weights.end());
    }
    const std::size_t n = nodes_.size();

    e_vals_.resize(static_cast<std::size_t>(J) * n);
    de_vals_.resize(static_cast<std::size_t>(J) * n);
    e_at_zero_.resize(J);
    parallel_for(static_cast<std::size_t>(J), mode, [&](std::size_t row) {
        const NeumannEigenfunction e =
            eigenfunction(static_cast<int>(row) + 1, mu, 1.0, table);
        for (std::size_t i = 0; i < n; ++i) {
            e_vals_[row * n + i] = e(nodes_[i]);
            de_vals_[row * n + i] = e.derivative(nodes_[i]);
        }
    });
    for (int j = 1; j <= J; ++j)
        e_at_zero_[j - 1] = mu_sixth(mu) * table.boundary_value(j);

    // Four symmetric Grams in one pass per (j, k) pair.  Each entry is
    // written exactly once (mirror included), so parallel and serial fills
    // agree bitwise.
    const std::size_t JJ = static_cast<std::size_t>(J) * J;
    g_t_.assign(JJ, 0.0);
    g_tt_.assign(JJ, 0.0);
    g_d_.assign(JJ, 0.0);
    g_td_.assign(JJ, 0.0);
    parallel_for(static_cast<std::size_t>(J), mode, [&](std::size_t row) {
        const double* ej = &e_vals_[row * n];
        const double* dj = &de_vals_[row * n];
        for (std::size_t k = row; k < static_cast<std::size_t>(J); ++k) {
            const double* ek = &e_vals_[k * n];
            const double* dk = &de_vals_[k * n];
            double st = 0.0, stt = 0.0, sd = 0.0, std1 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = nodes_[i];
                const double vv = weights_[i] * ej[i] * ek[i];
                const double dd = weights_[i] * dj[i] * dk[i];
                st += t * vv;
                stt += t * t * vv;
                sd += dd;
                std1 += t * dd;
            }
            g_t_[row * J + k] = st;
            g_t_[k * J + row] = st;
            g_tt_[row * J + k] = stt;
            g_tt_[k * J + row] = stt;
            g_d_[row * J + k] = sd;
            g_d_[k * J + row] = sd;
            g_td_[row * J + k] = std1;
            g_td_[k * J + row] = std1;
        }
    });
}

ModelBasisWorkspace::ProfileCoupling ModelBasisWorkspace::couple(
    double lambda) const {
    const PoissonFunction f = poisson_function(lambda, mu_, RotationSign::Plus);
    const std::size_t n = nodes_.size();
    std::vector<Complex> fv(n), dfv(n);
    for (std::size_t i = 0; i < n; ++i) {
        fv[i] = f(nodes_[i]);
        dfv[i] = f.derivative(nodes_[i]);
    }

    ProfileCoupling c;
    c.lambda = lambda;
    c.f_at_zero = f(0.0);
    c.f_sq = c.tf_sq = c.ttf_sq = c.df_sq = c.tdf_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = nodes_[i];
        const double av = weights_[i] * std::norm(fv[i]);
        const double ad = weights_[i] * std::norm(dfv[i]);
        c.f_sq += av;
        c.tf_sq += t * av;
        c.ttf_sq += t * t * av;
        c.df_sq += ad;
        c.tdf_sq += t * ad;
    }
    c.fe.assign(J_, Complex(0.0, 0.0));
    c.tfe.assign(J_, Complex(0.0, 0.0));
    c.ttfe.assign(J_, Complex(0.0, 0.0));
    c.dfde.assign(J_, Complex(0.0, 0.0));
    c.tdfde.assign(J_, Complex(0.0, 0.0));
    for (int j = 0; j < J_; ++j) {
        const double* ej = &e_vals_[static_cast<std::size_t>(j) * n];
        const double* dj = &de_vals_[static_cast<std::size_t>(j) * n];
        Complex s0(0.0, 0.0), s1(0.0, 0.0), s2(0.0, 0.0);
        Complex d0(0.0, 0.0), d1(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = nodes_[i];
            const Complex wv = weights_[i] * fv[i];
            const Complex wd = weights_[i] * dfv[i];
            s0 += wv * ej[i];
            s1 += t * wv * ej[i];
            s2 += t * t * wv * ej[i];
            d0 += wd * dj[i];
            d1 += t * wd * dj[i];
        }
        c.fe[j] = s0;
        c.tfe[j] = s1;
        c.ttfe[j] = s2;
        c.dfde[j] = d0;
        c.tdfde[j] = d1;
    }
    return c;
}

double ModelBasisWorkspace::quad_form(const std::vector<double>& g,
                                      const std::vector<Complex>& u) const {
    double acc = 0.0;
    for (int j = 0; j < J_; ++j)
        for (int k = 0; k < J_; ++k)
            acc += g[static_cast<std::size_t>(j) * J_ + k] *
                   (u[j].real() * u[k].real() + u[j].imag() * u[k].imag());
    return acc;
}

Complex ModelBasisWorkspace::bilinear(const std::vector<double>& g,
                                      const std::vector<Complex>& w,
                                      const std::vector<Complex>& u) const {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < J_; ++j)
        for (int k = 0; k < J_; ++k)
            acc += g[static_cast<std::size_t>(j) * J_ + k] * w[j] * std::conj(u[k]);
    return acc;
}

double ModelBasisWorkspace::l2_norm_sq(const ProfileCoupling& c, Complex u0,
                                       const std::vector<Complex>& u) const {
    if (static_cast<int>(u.size()) != J_)
        throw std::invalid_argument("l2_norm_sq: coefficient count mismatch");
    double s = std::norm(u0) * c.f_sq;
    Complex cross(0.0, 0.0);
    for (int j = 0; j < J_; ++j) cross += std::conj(u[j]) * c.fe[j];
    s += 2.0 * (u0 * cross).real();
    for (int j = 0; j < J_; ++j) s += std::norm(u[j]);  // exact mode Gram
    return s;
}

double ModelBasisWorkspace::weighted_norm_sq(int p, const ProfileCoupling& c,
                                             Complex u0,
                                             const std::vector<Complex>& u) const {
    if (static_cast<int>(u.size()) != J_)
        throw std::invalid_argument("weighted_norm_sq: coefficient count mismatch");
    const double F = (p == 1) ? c.tf_sq : c.ttf_sq;
    const std::vector<Complex>& V = (p == 1) ? c.tfe : c.ttfe;
    const std::vector<double>& G = (p == 1) ? g_t_ : g_tt_;
    if (p != 1 && p != 2)
        throw std::invalid_argument("weighted_norm_sq: weight power must be 1 or 2");
    double s = std::norm(u0) * F;
    Complex cross(0.0, 0.0);
    for (int j = 0; j < J_; ++j) cross += std::conj(u[j]) * V[j];
    s += 2.0 * (u0 * cross).real();
    s += quad_form(G, u);
    return s;
}

Complex ModelBasisWorkspace::weighted_pairing(int p, const ProfileCoupling& c,
                                              Complex w0,
                                              const std::vector<Complex>& w,
                                              Complex u0,
                                              const std::vector<Complex>& u) const {
    if (static_cast<int>(u.size()) != J_ || static_cast<int>(w.size()) != J_)
        throw std::invalid_argument("weighted_pairing: coefficient count mismatch");
    if (p != 0 && p != 1)
        throw std::invalid_argument("weighted_pairing: weight power must be 0 or 1");
    const double F = (p == 0) ? c.f_sq : c.tf_sq;
    const std::vector<Complex>& V = (p == 0) ? c.fe : c.tfe;
    Complex acc = w0 * std::conj(u0) * F;
    for (int k = 0; k < J_; ++k) acc += w0 * std::conj(u[k]) * V[k];
    for (int j = 0; j < J_; ++j) acc += w[j] * std::conj(u0) * std::conj(V[j]);
    if (p == 0) {
        for (int j = 0; j < J_; ++j) acc += w[j] * std::conj(u[j]);
    } else {
        acc += bilinear(g_t_, w, u);
    }
    return acc;
}

double ModelBasisWorkspace::deriv_norm_sq(int p, const ProfileCoupling& c,
                                          Complex u0,
                                          const std::vector<Complex>& u) const {
    if (static_cast<int>(u.size()) != J_)
        throw std::invalid_argument("deriv_norm_sq: coefficient count mismatch");
    if (p != 0 && p != 1)
        throw std::invalid_argument("deriv_norm_sq: weight power must be 0 or 1");
    const double F = (p == 0) ? c.df_sq : c.tdf_sq;
    const std::vector<Complex>& V = (p == 0) ? c.dfde : c.tdfde;
    const std::vector<double>& G = (p == 0) ? g_d_ : g_td_;
    double s = std::norm(u0) * F;
    Complex cross(0.0, 0.0);
    for (int j = 0; j < J_; ++j) cross += std::conj(u[j]) * V[j];
    s += 2.0 * (u0 * cross).real();
    s += quad_form(G, u);
    return s;
}

Complex ModelBasisWorkspace::boundary_value(const ProfileCoupling& c, Complex u0,
                                            const std::vector<Complex>& u) const {
    if (static_cast<int>(u.size()) != J_)
        throw std::invalid_argument("boundary_value: coefficient count mismatch");
    Complex s = u0 * c.f_at_zero;
    for (int j = 0; j < J_; ++j) s += u[j] * e_at_zero_[j];
    return s;
}

double ModelBasisWorkspace::basis_gram_defect() const {
    const std::size_t n = nodes_.size();
    double worst = 0.0;
    for (int j = 0; j < J_; ++j) {
        const double* ej = &e_vals_[static_cast<std::size_t>(j) * n];
        for (int k = j; k < J_; ++k) {
            const double* ek = &e_vals_[static_cast<std::size_t>(k) * n];
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += weights_[i] * ej[i] * ek[i];
            const double target = (j == k) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    }
    return worst;
}

BNormBreakdown b_norm(const ModelParameters& params,
                      const ModelBasisWorkspace& ws,
                      const ModelBasisWorkspace::ProfileCoupling& c, Complex u0,
                      const std::vector<Complex>& u) {
    if (c.lambda != params.lambda)
        throw std::invalid_argument("b_norm: coupling built for a different lambda");
    if (ws.mu() != params.mu)
        throw std::invalid_argument("b_norm: workspace built for a different mu");
    const int J = ws.basis_size();
    if (static_cast<int>(u.size()) != J)
        throw std::invalid_argument("b_norm: coefficient count mismatch");

    // (D^2 + mu t) u is diagonal in the representation: the profile solves
    // (D^2 + mu t) f = -omega lambda f and each mode scales by mu^{2/3} zeta'_j.
    const Complex w0 = -kOmega * params.lambda * u0;
    std::vector<Complex> w(J);
    const double m23 = mu_two_thirds(params.mu);
    for (int j = 1; j <= J; ++j) w[j - 1] = m23 * ws.zeta_prime(j) * u[j - 1];

    const double l2_sq = ws.l2_norm_sq(c, u0, u);
    const double t_sq = ws.weighted_norm_sq(2, c, u0, u);
    const double w_sq = ws.l2_norm_sq(c, w0, w);
    const Complex wt = ws.weighted_pairing(1, c, w0, w, u0, u);
    // ||D^2 u||^2 = ||w - mu t u||^2 expanded; roundoff can push the exact
    // square slightly negative, hence the clamp.
    const double d2_sq =
        std::max(0.0, w_sq - 2.0 * params.mu * wt.real() +
                          params.mu * params.mu * t_sq);

    BNormBreakdown out;
    out.l2 = std::sqrt(std::max(0.0, l2_sq));
    out.d2 = std::sqrt(d2_sq);
    out.t1 = std::sqrt(std::max(0.0, t_sq));
    out.b_norm =
        bracket(params.lambda - params.z.real()) * out.l2 + out.d2 + out.t1;
    return out;
}

std::string WellposednessReport::to_json() const {
    nlohmann::ordered_json j;
    j["lambda_sweep"] = lambda_sweep;
    j["max_ratio"] = max_ratio;
    j["slope"] = slope;
    j["pass"] = pass;
    return j.dump();
}

WellposednessReport verify_wellposedness(const ModelParameters& params,
                                         int trials, int J_trunc,
                                         std::uint64_t seed,
                                         const AiryZeroTable& table,
                                         const std::vector<double>& lambda_sweep,
                                         ExecMode mode) {
    if (trials < 100)
        throw std::invalid_argument("verify_wellposedness: need at least 100 trials");
    if (lambda_sweep.size() < 2)
        throw std::invalid_argument(
            "verify_wellposedness: sweep needs at least two lambda values");

    ModelBasisWorkspace ws(params.mu, J_trunc, table, mode);
    WellposednessReport rep;
    rep.lambda_sweep = lambda_sweep;
    rep.max_ratio.assign(lambda_sweep.size(), 0.0);

    for (std::size_t li = 0; li < lambda_sweep.size(); ++li) {
        ModelParameters plam = params;
        plam.lambda = lambda_sweep[li];
        const auto c = ws.couple(plam.lambda);
        const double br = bracket(plam.lambda - params.z.real());

        std::vector<double> slot(trials, 0.0);
        parallel_for(static_cast<std::size_t>(trials), mode, [&](std::size_t t) {
            std::mt19937_64 eng = make_trial_engine(
                seed, li * static_cast<std::size_t>(trials) + t);
            std::normal_distribution<double> gauss(0.0, 1.0);
            auto draw = [&]() {
                const double re = gauss(eng);
                const double im = gauss(eng);
                return Complex(re, im);
            };
            std::vector<Complex> v(J_trunc), vp(params.N);
            for (auto& x : v) x = draw();
            for (auto& x : vp) x = draw();
            const Complex v0 = draw();

            const GrushinSolution s = solve_model(plam, v, v0, vp, J_trunc, table);
            const BNormBreakdown b = b_norm(plam, ws, c, s.u0, s.u_coeffs);
            double um_sq = 0.0;
            for (const Complex& x : s.u_minus) um_sq += std::norm(x);
            double v_sq = 0.0;
            for (const Complex& x : v) v_sq += std::norm(x);
            double vp_sq = 0.0;
            for (const Complex& x : vp) vp_sq += std::norm(x);

            const double rhs = std::sqrt(v_sq) +
                               std::pow(br, 0.25) * std::abs(v0) +
                               br * std::sqrt(vp_sq);
            slot[t] = (b.b_norm + std::sqrt(um_sq)) / rhs;
        });
        double mx = 0.0;
        for (double r : slot) mx = std::max(mx, r);
        rep.max_ratio[li] = mx;
    }

    // Least-squares slope of log max_ratio against log <lambda - Re z>; a
    // bounded estimate shows up as slope near zero.
    const std::size_t m = lambda_sweep.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::log(bracket(lambda_sweep[i] - params.z.real()));
        ys[i] = std::log(rep.max_ratio[i]);
        sx += xs[i];
        sy += ys[i];
    }
    const double xbar = sx / m, ybar = sy / m;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        num += (xs[i] - xbar) * (ys[i] - ybar);
        den += (xs[i] - xbar) * (xs[i] - xbar);
    }
    rep.slope = (den > 0.0) ? num / den : 0.0;
    rep.pass = rep.slope < 0.1;
    return rep;
}

CoercivityReport coercivity_check(const ModelParameters& params, int trials,
                                  int J_trunc, std::uint64_t seed,
                                  const AiryZeroTable& table) {
    if (trials < 1)
        throw std::invalid_argument("coercivity_check: trials must be positive");
    ModelBasisWorkspace ws(params.mu, J_trunc, table);
    const auto c = ws.couple(params.lambda);
    const double br = bracket(params.lambda - params.z.real());
    const double m23 = mu_two_thirds(params.mu);

    double min_C = std::numeric_limits<double>::infinity();
    double max_C = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 eng = make_trial_engine(seed, trial);
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto draw = [&]() {
            const double re = gauss(eng);
            const double im = gauss(eng);
            return Complex(re, im);
        };
        std::vector<Complex> u(J_trunc);
        for (auto& x : u) x = draw();
        const Complex u0 = draw();

        const double l2_sq = ws.l2_norm_sq(c, u0, u);
        Complex w0 = -kOmega * params.lambda * u0;
        std::vector<Complex> w(J_trunc);
        for (int j = 1; j <= J_trunc; ++j)
            w[j - 1] = m23 * ws.zeta_prime(j) * u[j - 1];
        const Complex quad = kOmegaBar * ws.weighted_pairing(0, c, w0, w, u0, u) +
                             (Complex(params.lambda, 0.0) - params.z) * l2_sq;
        // gamma_1 u = u'(0) = u0: the modes have vanishing slope at 0 and
        // the profile is normalized to f'(0) = 1.
        const double denom = std::abs(quad) + std::norm(u0) / std::sqrt(br);
        const double C = br * l2_sq / denom;
        min_C = std::min(min_C, C);
        max_C = std::max(max_C, C);
    }
    return CoercivityReport{params.lambda, min_C, max_C};
}

Complex interval_toy_u_minus(Complex z, int grid_n,
                             const std::function<Complex(double)>& v,
                             Complex v0, Complex v_plus) {
    if (grid_n < 64)
        throw std::invalid_argument("interval_toy_u_minus: grid_n must be at least 64");
    if (!(z.real() < 1.0))
        throw std::invalid_argument(
            "interval_toy_u_minus: Re z must stay below the first nonzero "
            "Neumann eigenvalue");

    const int n = grid_n;
    const double h = kPi / n;
    const int dim = n + 2;  // u_0..u_n plus the correction unknown
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd rhs(dim);
    const double inv_h2 = 1.0 / (h * h);
    const Complex border(1.0 / kPi, 0.0);

    // Neumann ends via ghost points: u_{-1} = u_1 - 2 h v0 folds the flux
    // datum into the boundary row; the far end uses slope zero.
    M(0, 0) = Complex(2.0 * inv_h2, 0.0) - z;
    M(0, 1) = Complex(-2.0 * inv_h2, 0.0);
    M(0, n + 1) = border;
    rhs(0) = v(0.0) - 2.0 * v0 / h;
    for (int i = 1; i < n; ++i) {
        M(i, i - 1) = Complex(-inv_h2, 0.0);
        M(i, i) = Complex(2.0 * inv_h2, 0.0) - z;
        M(i, i + 1) = Complex(-inv_h2, 0.0);
        M(i, n + 1) = border;
        rhs(i) = v(i * h);
    }
    M(n, n - 1) = Complex(-2.0 * inv_h2, 0.0);
    M(n, n) = Complex(2.0 * inv_h2, 0.0) - z;
    M(n, n + 1) = border;
    rhs(n) = v(kPi);
    // Mean-value extraction row, trapezoid weights.
    M(n + 1, 0) = Complex(h / (2.0 * kPi), 0.0);
    for (int i = 1; i < n; ++i) M(n + 1, i) = Complex(h / kPi, 0.0);
    M(n + 1, n) = Complex(h / (2.0 * kPi), 0.0);
    rhs(n + 1) = v_plus;

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    double p_min = std::numeric_limits<double>::infinity();
    double p_max = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double a = std::abs(lu.matrixLU()(i, i));
        p_min = std::min(p_min, a);
        p_max = std::max(p_max, a);
    }
    const double ratio = (p_max > 0.0) ? p_min / p_max : 0.0;
    if (ratio < 1e-12) {
        char msg[96];
        std::snprintf(msg, sizeof msg,
                      "interval_toy_u_minus: system singular (pivot ratio %.2e)",
                      ratio);
        throw SingularSystemError(msg, ratio);
    }
    const Eigen::VectorXcd sol = lu.solve(rhs);
    return sol(n + 1);
}

Complex interval_toy_e_minus_plus(Complex z, int grid_n) {
    return interval_toy_u_minus(
        z, grid_n, [](double) { return Complex(0.0, 0.0); }, Complex(0.0, 0.0),
        Complex(1.0, 0.0));
}

}  // namespace reslab
