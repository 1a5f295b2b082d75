#include "reslab/bands.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace reslab {

namespace {

void check_margin(double C_margin, const char* who) {
    if (!(C_margin >= 0.0)) {
        throw std::invalid_argument(std::string(who) + ": C_margin must be >= 0");
    }
}

}  // namespace

BandAssignment classify_lambda(Complex lambda, const BandConstants& constants,
                               const std::vector<double>& zero_seq,
                               double C_margin) {
    check_margin(C_margin, "classify_lambda");
    if (zero_seq.empty()) {
        throw std::invalid_argument("classify_lambda: empty anchor sequence");
    }
    if (lambda.imag() > 0.0) {
        throw std::domain_error(
            "classify_lambda: resonances live in the closed lower half-plane");
    }
    if (lambda.real() < C_margin) {
        return {BandKind::TooSmallRe, -1};
    }
    const double y = -lambda.imag();
    const double rhat = std::cbrt(lambda.real());
    for (std::size_t idx = 0; idx < zero_seq.size(); ++idx) {
        const double base = zero_seq[idx] * rhat;
        if (y < constants.kappa * base - C_margin) {
            return {BandKind::Gap, static_cast<int>(idx)};
        }
        if (y <= constants.K_const * base + C_margin) {
            return {BandKind::Band, static_cast<int>(idx) + 1};
        }
    }
    return {BandKind::BelowAxisUnclassified, -1};
}

BandAssignment classify_lambda(Complex lambda, const BandConstants& constants,
                               const AiryZeroTable& table, double C_margin) {
    return classify_lambda(lambda, constants, table.zeros_ai_prime, C_margin);
}

BandAssignment classify_rescaled(Complex z, double mu,
                                 const std::vector<double>& zero_seq,
                                 double C_margin, double h) {
    check_margin(C_margin, "classify_rescaled");
    if (zero_seq.empty()) {
        throw std::invalid_argument("classify_rescaled: empty anchor sequence");
    }
    if (!(mu > 0.0)) {
        throw std::invalid_argument("classify_rescaled: mu must be positive");
    }
    if (!(h > 0.0 && h < 1.0)) {
        throw std::invalid_argument("classify_rescaled: h must lie in (0,1)");
    }
    if (z.imag() > 0.0) {
        throw std::domain_error(
            "classify_rescaled: rescaled resonances live in the closed lower half-plane");
    }
    const double y = -z.imag();
    // (sqrt(3)/2) mu^{2/3} equals twice kappa at curvature Q = mu/2.
    const double rate = 0.5 * std::sqrt(3.0) * std::pow(mu, 2.0 / 3.0);
    const double collar = 2.0 * C_margin * std::cbrt(h);
    for (std::size_t idx = 0; idx < zero_seq.size(); ++idx) {
        const double center = rate * zero_seq[idx];
        if (y < center - collar) {
            return {BandKind::Gap, static_cast<int>(idx)};
        }
        if (y <= center + collar) {
            return {BandKind::Band, static_cast<int>(idx) + 1};
        }
    }
    return {BandKind::BelowAxisUnclassified, -1};
}

// The curve helpers reuse the classifier's evaluation order
// (anchor * cbrt first), so a point placed exactly on band_upper or
// band_lower ties bit-for-bit with the classifier threshold and lands
// in the band as documented.
double BandSpec::band_lower(double re_lambda) const {
    return kappa * (zeta_j * std::cbrt(re_lambda)) - C_margin;
}

double BandSpec::band_upper(double re_lambda) const {
    return K_const * (zeta_j * std::cbrt(re_lambda)) + C_margin;
}

double BandSpec::gap_upper(double re_lambda) const {
    return kappa * (zeta_j1 * std::cbrt(re_lambda)) - C_margin;
}

bool BandSpec::gap_nonempty() const {
    return K_const * zeta_j < kappa * zeta_j1;
}

double BandSpec::gap_onset_re() const {
    const double delta = kappa * zeta_j1 - K_const * zeta_j;
    if (!(delta > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    if (C_margin == 0.0) {
        return 0.0;
    }
    const double r = 2.0 * C_margin / delta;
    return r * r * r;
}

BandSpec make_band_spec(int j, const BandConstants& constants,
                        const AiryZeroTable& table, double C_margin) {
    check_margin(C_margin, "make_band_spec");
    if (j < 1 || j + 1 > table.count) {
        throw std::invalid_argument("make_band_spec: need 1 <= j and j+1 tabulated");
    }
    return BandSpec{j,
                    constants.kappa,
                    constants.K_const,
                    C_margin,
                    table.zeta_prime(j),
                    table.zeta_prime(j + 1)};
}

}  // namespace reslab
