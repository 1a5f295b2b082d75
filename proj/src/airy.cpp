#include "reslab/airy.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "reslab/dd.hpp"
#include "reslab/quadrature.hpp"

namespace reslab {

namespace {

using detail::cdd;
using detail::dd;

// Ai(0) = 3^{-2/3}/Gamma(2/3) and Ai'(0) = -3^{-1/3}/Gamma(1/3), carried to
// double-double precision as the series anchors.
const dd kAi0{0.35502805388781722, 2.0523363243621199e-17};
const dd kAip0{-0.25881940379280682, 2.5222431116108321e-17};

const double kTwoPiOver3 = 2.0943951023931953;
const double kInvTwoSqrtPi = 0.28209479177387814;  // 1/(2 sqrt(pi))
const double kInvSqrtPi = 0.5641895835477563;

const dd kTwoPiDD{6.283185307179586, 2.4492935982947064e-16};
const dd kQuarterPiDD{0.7853981633974483, 3.061616997868383e-17};

AiryValue conjugate(AiryValue v) {
    return {std::conj(v.ai), std::conj(v.aip), v.exponent};
}

// Asymptotic expansion in the principal sector |arg z| <= 2 pi/3:
//   Ai(z)  ~  e^{-zeta} z^{-1/4}/(2 sqrt(pi)) * sum (-1)^k u_k zeta^{-k}
//   Ai'(z) ~ -e^{-zeta} z^{+1/4}/(2 sqrt(pi)) * sum (-1)^k v_k zeta^{-k}
// with zeta = (2/3) z^{3/2}, u_0 = v_0 = 1,
// u_k = u_{k-1} (6k-5)(6k-1)/(72k), v_k = u_k (6k+1)/(1-6k).
// The divergent tail is truncated at the smallest term.
AiryValue airy_direct(Complex z) {
    Complex zeta = (2.0 / 3.0) * std::pow(z, 1.5);
    Complex quarter_root = std::pow(z, 0.25);
    Complex inv = 1.0 / zeta;
    Complex sign_pow = 1.0;  // (-1)^k zeta^{-k}
    Complex sum_ai = 1.0, sum_aip = 1.0;
    double u = 1.0;
    double prev_mag = 1e308;
    for (int k = 1; k <= 40; ++k) {
        u *= double((6 * k - 5) * (6 * k - 1)) / (72.0 * k);
        double v = u * double(6 * k + 1) / double(1 - 6 * k);
        sign_pow *= -inv;
        Complex term_ai = u * sign_pow;
        double mag = std::abs(term_ai);
        if (mag > prev_mag) break;  // smallest-term truncation
        sum_ai += term_ai;
        sum_aip += v * sign_pow;
        prev_mag = mag;
        if (mag < 1e-18) break;
    }
    double grow = -zeta.real();
    if (std::abs(grow) <= 700.0) {
        Complex exp_part = std::exp(-zeta);
        return {kInvTwoSqrtPi * exp_part / quarter_root * sum_ai,
                -kInvTwoSqrtPi * exp_part * quarter_root * sum_aip, 0.0};
    }
    // Overflow guard: pull the real exponential out, keep the unit phase.
    Complex phase = std::exp(Complex(0.0, -zeta.imag()));
    return {kInvTwoSqrtPi * phase / quarter_root * sum_ai,
            -kInvTwoSqrtPi * phase * quarter_root * sum_aip, grow};
}

// Oscillatory asymptotics on the negative real axis, x >= 8:
//   Ai(-x)  = pi^{-1/2} x^{-1/4} [cos(phi) S1 + sin(phi) S2]
//   Ai'(-x) = pi^{-1/2} x^{+1/4} [sin(phi) S3 - cos(phi) S4]
// with phi = zeta - pi/4, zeta = (2/3) x^{3/2}, S1/S3 the even-index and
// S2/S4 the odd-index alternating u_k/v_k sums in powers of 1/zeta.
// zeta and the mod-2pi reduction are carried in double-double: plain doubles
// lose |zeta| eps of absolute phase, which is exactly what caps zero
// residuals at ~1e-12 for the deep zeros.
void airy_real_negative(double x, double* ai, double* aip) {
    double s0 = std::sqrt(x);
    dd x_dd{x, 0.0};
    dd sq = detail::two_prod(s0, s0);
    dd diff = detail::dd_add(x_dd, detail::dd_neg(sq));
    dd s{s0, (diff.hi + diff.lo) / (2.0 * s0)};  // refined sqrt(x)
    dd zeta_dd = detail::dd_div(detail::dd_mul(detail::dd_mul(x_dd, s), 2.0), 3.0);
    dd phase = detail::dd_add(zeta_dd, detail::dd_neg(kQuarterPiDD));
    double wraps = std::nearbyint(phase.hi / kTwoPiDD.hi);
    dd red = detail::dd_add(phase, detail::dd_neg(detail::dd_mul(kTwoPiDD, wraps)));
    double phi = red.hi + red.lo;
    double cphi = std::cos(phi), sphi = std::sin(phi);

    double zeta = zeta_dd.hi;
    double s1 = 1.0, s2 = 0.0, s3 = 1.0, s4 = 0.0;
    double u = 1.0, pw = 1.0;
    double prev = 1e308;
    for (int k = 1; k <= 40; ++k) {
        u *= double((6 * k - 5) * (6 * k - 1)) / (72.0 * k);
        double v = u * double(6 * k + 1) / double(1 - 6 * k);
        pw /= zeta;
        double tu = u * pw, tv = v * pw;
        if (std::abs(tu) > prev) break;
        double sign = ((k >> 1) & 1) ? -1.0 : 1.0;  // (-1)^floor(k/2)
        if (k & 1) {
            s2 += sign * tu;
            s4 += sign * tv;
        } else {
            s1 += sign * tu;
            s3 += sign * tv;
        }
        prev = std::abs(tu);
        if (prev < 1e-18) break;
    }
    double root4 = std::sqrt(s0);
    *ai = kInvSqrtPi / root4 * (cphi * s1 + sphi * s2);
    *aip = kInvSqrtPi * root4 * (sphi * s3 - cphi * s4);
}

}  // namespace

namespace detail {

AiryValue airy_maclaurin(Complex z) {
    if (std::abs(z) > 12.5)
        throw std::invalid_argument("airy_maclaurin: |z| > 12.5");
    // Ai = Ai(0) f + Ai'(0) g with
    //   f = sum a_k, a_0 = 1, a_{k+1} = a_k z^3 / ((3k+2)(3k+3))
    //   g = sum b_k, b_0 = z, b_{k+1} = b_k z^3 / ((3k+3)(3k+4))
    // and the termwise derivatives
    //   f' = sum c_k, c_0 = z^2/2, c_{k+1} = c_k z^3 / ((3k+3)(3k+5))
    //   g' = sum d_k, d_0 = 1,     d_{k+1} = d_k z^3 / ((3k+1)(3k+3)).
    // Compensated arithmetic absorbs the cancellation on the recessive side
    // (terms peak near e^{(2/3)|z|^{3/2}} while Ai(12) ~ 4e-13).
    cdd zc = cdd_from(z.real(), z.imag());
    cdd z3 = cdd_mul(cdd_mul(zc, zc), zc);
    cdd a = cdd_from(1.0, 0.0);
    cdd b = zc;
    cdd c = cdd_div(cdd_mul(zc, zc), 2.0);
    cdd d = cdd_from(1.0, 0.0);
    cdd sf = a, sg = b, sfp = c, sgp = d;
    double peak = 1.0;
    for (int k = 0; k < 320; ++k) {
        a = cdd_div(cdd_mul(a, z3), double((3 * k + 2) * (3 * k + 3)));
        b = cdd_div(cdd_mul(b, z3), double((3 * k + 3) * (3 * k + 4)));
        c = cdd_div(cdd_mul(c, z3), double((3 * k + 3) * (3 * k + 5)));
        d = cdd_div(cdd_mul(d, z3), double((3 * k + 1) * (3 * k + 3)));
        sf = cdd_add(sf, a);
        sg = cdd_add(sg, b);
        sfp = cdd_add(sfp, c);
        sgp = cdd_add(sgp, d);
        double mag = cdd_abs_estimate(a) + cdd_abs_estimate(b) +
                     cdd_abs_estimate(c) + cdd_abs_estimate(d);
        peak = std::max(peak, mag);
        if (mag < 1e-35 * peak) break;
    }
    cdd ai = cdd_add(cdd_mul(sf, kAi0), cdd_mul(sg, kAip0));
    cdd aip = cdd_add(cdd_mul(sfp, kAi0), cdd_mul(sgp, kAip0));
    return {Complex(ai.re.hi + ai.re.lo, ai.im.hi + ai.im.lo),
            Complex(aip.re.hi + aip.re.lo, aip.im.hi + aip.im.lo), 0.0};
}

AiryValue airy_asymptotic(Complex z) {
    if (std::abs(z) < 8.0)
        throw std::invalid_argument("airy_asymptotic: |z| < 8");
    if (z.imag() < 0.0) return conjugate(airy_asymptotic(std::conj(z)));
    if (std::arg(z) <= kTwoPiOver3) return airy_direct(z);
    // Rotate out of the sector:
    //   Ai(z)  = -omega Ai(omega z) - omega^2 Ai(omega^2 z)
    //   Ai'(z) = -omega^2 Ai'(omega z) - omega Ai'(omega^2 z)
    // Both rotated arguments land in |arg| <= 2 pi/3.
    AiryValue v1 = airy_direct(kOmega * z);
    AiryValue v2 = airy_direct(kOmegaBar * z);
    double e = std::max(v1.exponent, v2.exponent);
    Complex s1 = std::exp(v1.exponent - e);
    Complex s2 = std::exp(v2.exponent - e);
    return {-kOmega * v1.ai * s1 - kOmegaBar * v2.ai * s2,
            -kOmegaBar * v1.aip * s1 - kOmega * v2.aip * s2, e};
}

}  // namespace detail

AiryValue airy_ai(Complex z) {
    if (std::abs(z) > 1e4)
        throw std::domain_error("airy_ai: |z| > 1e4 unsupported");
    if (z.imag() < 0.0) return conjugate(airy_ai(std::conj(z)));
    if (std::abs(z) <= 10.0) return detail::airy_maclaurin(z);
    return detail::airy_asymptotic(z);
}

void airy_ai_unscaled(Complex z, Complex* ai, Complex* aip) {
    AiryValue v = airy_ai(z);
    double s = std::exp(v.exponent);
    *ai = v.ai * s;
    *aip = v.aip * s;
}

double airy_ai_real(double t) {
    if (t < -10.0) {
        double ai, aip;
        airy_real_negative(-t, &ai, &aip);
        return ai;
    }
    AiryValue v = airy_ai(Complex(t, 0.0));
    return v.ai.real() * std::exp(v.exponent);
}

double airy_aip_real(double t) {
    if (t < -10.0) {
        double ai, aip;
        airy_real_negative(-t, &ai, &aip);
        return aip;
    }
    AiryValue v = airy_ai(Complex(t, 0.0));
    return v.aip.real() * std::exp(v.exponent);
}

double zeta_prime_seed(int j) {
    return std::pow(1.5 * (j - 0.75) * kPi, 2.0 / 3.0);
}

double zeta_seed(int j) {
    return std::pow(1.5 * (j - 0.25) * kPi, 2.0 / 3.0);
}

namespace {

// Newton for the j-th zero of Ai(-x) (prime=false) or Ai'(-x) (prime=true),
// bracketed so an escaped step falls back to bisection.
double refine_zero(bool prime, int j) {
    double seed = prime ? zeta_prime_seed(j) : zeta_seed(j);
    double spacing = kPi / std::sqrt(std::max(1.0, seed));
    double lo = seed - 0.6 * spacing, hi = seed + 0.6 * spacing;
    auto F = [prime](double x) {
        return prime ? airy_aip_real(-x) : airy_ai_real(-x);
    };
    // d/dx Ai'(-x) = x Ai(-x) (Airy equation), d/dx Ai(-x) = -Ai'(-x).
    auto dF = [prime](double x) {
        return prime ? x * airy_ai_real(-x) : -airy_aip_real(-x);
    };
    double flo = F(lo), fhi = F(hi);
    for (int guard = 0; flo * fhi > 0.0 && guard < 4; ++guard) {
        lo -= 0.3 * spacing;
        hi += 0.3 * spacing;
        flo = F(lo);
        fhi = F(hi);
    }
    double x = seed;
    for (int it = 0; it < 60; ++it) {
        double fx = F(x), dfx = dF(x);
        double xn = (dfx != 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        double fn = F(xn);
        if (flo * fn <= 0.0) {
            hi = xn;
            fhi = fn;
        } else {
            lo = xn;
            flo = fn;
        }
        bool done = std::abs(xn - x) < 1e-13 * (1.0 + std::abs(xn));
        x = xn;
        if (done) break;
    }
    // Two unconstrained polish steps push the residual to evaluation noise.
    for (int it = 0; it < 2; ++it) {
        double dfx = dF(x);
        if (dfx != 0.0) x -= F(x) / dfx;
    }
    return x;
}

const QuadratureRule& reference_gl16() {
    static const QuadratureRule rule = make_gauss_legendre(16, -1.0, 1.0);
    return rule;
}

// Integral of Ai(t)^2 over [a, b] by 16-point panels sized to the local
// oscillation wavelength 2 pi / sqrt(|t|).
double panel_integral_ai_squared(double a, double b) {
    const QuadratureRule& ref = reference_gl16();
    double total = 0.0;
    double t = a;
    while (t < b) {
        double width =
            std::min(1.0, 2.0 * kPi / (2.5 * std::sqrt(std::max(1.0, std::abs(t)))));
        double end = std::min(b, t + width);
        double mid = 0.5 * (t + end), half = 0.5 * (end - t);
        for (int i = 0; i < ref.n; ++i) {
            double v = airy_ai_real(mid + half * ref.nodes[i]);
            total += ref.weights[i] * half * v * v;
        }
        t = end;
    }
    return total;
}

}  // namespace

AiryZeroTable build_zero_table(int J_max, ExecMode mode) {
    if (J_max < 1 || J_max > 500)
        throw std::invalid_argument("build_zero_table: J_max outside [1, 500]");
    AiryZeroTable table;
    table.count = J_max;
    table.zeros_ai.resize(J_max);
    table.zeros_ai_prime.resize(J_max);
    table.boundary_values.resize(J_max);
    table.norms.resize(J_max);

    parallel_for(J_max, mode, [&](std::size_t idx) {
        int j = static_cast<int>(idx) + 1;
        table.zeros_ai[idx] = refine_zero(false, j);
        table.zeros_ai_prime[idx] = refine_zero(true, j);
    });

    for (int idx = 0; idx < J_max; ++idx) {
        if (std::abs(airy_ai_real(-table.zeros_ai[idx])) > 1e-12 ||
            std::abs(airy_aip_real(-table.zeros_ai_prime[idx])) > 1e-12)
            throw std::runtime_error("build_zero_table: zero residual > 1e-12");
    }

    // Norms accumulate slice integrals between consecutive zeros of Ai':
    //   ||Ai||^2 on (-zeta'_j, inf) = base + sum of slices, base over
    //   (-zeta'_1, 15].  Ai(15)^2 ~ e^{-155}, so the upper cutoff is free.
    std::vector<double> slice(J_max);
    parallel_for(J_max, mode, [&](std::size_t idx) {
        if (idx == 0)
            slice[0] = panel_integral_ai_squared(-table.zeros_ai_prime[0], 15.0);
        else
            slice[idx] = panel_integral_ai_squared(-table.zeros_ai_prime[idx],
                                                   -table.zeros_ai_prime[idx - 1]);
    });
    double acc = 0.0;
    for (int idx = 0; idx < J_max; ++idx) {
        acc += slice[idx];
        table.norms[idx] = std::sqrt(acc);
        table.boundary_values[idx] =
            airy_ai_real(-table.zeros_ai_prime[idx]) / table.norms[idx];
    }
    return table;
}

void write_zero_table_csv(const AiryZeroTable& table, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out)
        throw std::runtime_error("write_zero_table_csv: cannot open " + path);
    std::fprintf(out, "j,zeta_j,zeta_prime_j,e_j_0,norm_j\n");
    for (int idx = 0; idx < table.count; ++idx) {
        std::fprintf(out, "%d,%.17g,%.17g,%.17g,%.17g\n", idx + 1,
                     table.zeros_ai[idx], table.zeros_ai_prime[idx],
                     table.boundary_values[idx], table.norms[idx]);
    }
    std::fclose(out);
}

double NeumannEigenfunction::operator()(double t) const {
    return amplitude * airy_ai_real(scale * t - zeta_prime) / norm_const;
}

double NeumannEigenfunction::derivative(double t) const {
    return amplitude * scale * airy_aip_real(scale * t - zeta_prime) / norm_const;
}

NeumannEigenfunction eigenfunction(int j, double mu, double Lambda,
                                   const AiryZeroTable& table) {
    if (j < 1 || j > table.count)
        throw std::invalid_argument("eigenfunction: index outside the table");
    if (mu < 0.1 || mu > 10.0)
        throw std::invalid_argument("eigenfunction: mu outside [1/10, 10]");
    if (Lambda < 1.0)
        throw std::invalid_argument("eigenfunction: Lambda < 1");
    NeumannEigenfunction e;
    e.j = j;
    e.mu = mu;
    e.lambda_scale = Lambda;
    e.zeta_prime = table.zeta_prime(j);
    e.norm_const = table.norm(j);
    e.amplitude = std::pow(mu, 1.0 / 6.0) * std::sqrt(Lambda);
    e.scale = std::cbrt(mu) * Lambda;
    return e;
}

Complex PoissonFunction::operator()(double t) const {
    AiryValue num = airy_ai(Complex(std::cbrt(mu) * t, 0.0) + shift);
    return num.ai / denom * std::exp(num.exponent - denom_exponent);
}

Complex PoissonFunction::derivative(double t) const {
    AiryValue num = airy_ai(Complex(std::cbrt(mu) * t, 0.0) + shift);
    return std::cbrt(mu) * num.aip / denom *
           std::exp(num.exponent - denom_exponent);
}

PoissonFunction poisson_function(double lambda, double mu, RotationSign sign) {
    if (mu < 0.1 || mu > 10.0)
        throw std::invalid_argument("poisson_function: mu outside [1/10, 10]");
    PoissonFunction f;
    f.lambda = lambda;
    f.mu = mu;
    Complex rot = (sign == RotationSign::Plus) ? kOmega : kOmegaBar;
    f.shift = rot * lambda * std::pow(mu, -2.0 / 3.0);
    AiryValue at_shift = airy_ai(f.shift);
    f.denom = std::cbrt(mu) * at_shift.aip;
    f.denom_exponent = at_shift.exponent;
    return f;
}

namespace {

// One resolution level of the norm quadrature: panels of the given width cap.
double poisson_norm_squared(const PoissonFunction& f, double T, double cap) {
    const QuadratureRule& ref = reference_gl16();
    double total = 0.0;
    double t = 0.0;
    while (t < T) {
        double end = std::min(T, t + cap);
        double mid = 0.5 * (t + end), half = 0.5 * (end - t);
        for (int i = 0; i < ref.n; ++i) {
            double v = std::norm(f(mid + half * ref.nodes[i]));
            total += ref.weights[i] * half * v;
        }
        t = end;
    }
    return total;
}

}  // namespace

double poisson_function_norm(double lambda, RotationSign sign) {
    if (std::abs(lambda) < 1.0)
        throw std::invalid_argument("poisson_function_norm: |lambda| < 1");
    PoissonFunction f = poisson_function(lambda, 1.0, sign);
    // Oscillation frequency along the ray is at most ~sqrt(lambda); decay
    // starts past t = lambda and is then faster than e^{-sqrt(lambda)(t-lambda)}.
    double T = lambda + 20.0 + 5.0 * std::cbrt(std::abs(lambda));
    double cap = 2.0 * kPi / (2.5 * std::sqrt(std::abs(lambda) + 5.0));
    double coarse = poisson_norm_squared(f, T, cap);
    for (int level = 0; level < 3; ++level) {
        cap *= 0.5;
        double fine = poisson_norm_squared(f, T, cap);
        double scale = std::max(std::abs(fine), std::pow(std::abs(lambda), -1.5));
        if (std::abs(fine - coarse) <= 1e-8 * scale) return std::sqrt(fine);
        coarse = fine;
    }
    throw std::runtime_error(
        "poisson_function_norm: quadrature did not converge (partial value " +
        std::to_string(std::sqrt(coarse)) + ")");
}

Complex easy_model_profile(double lambda, double t) {
    const Complex phase(0.5, 0.8660254037844386);    // e^{i pi/3}
    const Complex decay(0.5, -0.8660254037844386);   // e^{-i pi/3}
    return -phase / std::sqrt(lambda) *
           std::exp(-decay * std::sqrt(lambda) * t);
}

double easy_model_norm_quadrature(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("easy_model_norm_quadrature: lambda <= 0");
    // |f#|^2 = lambda^{-1} e^{-sqrt(lambda) t}: a pure exponential, matched
    // exactly by the weighted rule with sigma = sqrt(lambda).
    QuadratureRule rule = make_semi_infinite(64, 0.0, std::sqrt(lambda));
    Complex sum = 0.0;
    for (int i = 0; i < rule.n; ++i)
        sum += rule.weights[i] * std::norm(easy_model_profile(lambda, rule.nodes[i]));
    return std::sqrt(sum.real());
}

}  // namespace reslab
