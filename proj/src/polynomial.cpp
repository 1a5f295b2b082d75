#include "reslab/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace reslab {

void ComplexPolynomial::normalize() {
    while (coefficients.size() > 1 &&
           std::abs(coefficients.back()) < 1e-300)
        coefficients.pop_back();
}

Complex ComplexPolynomial::eval(Complex z) const {
    Complex p = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        p = p * z + *it;
    return p;
}

void ComplexPolynomial::eval_with_derivative(Complex z, Complex* p,
                                             Complex* dp) const {
    Complex v = 0.0, d = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        d = d * z + v;
        v = v * z + *it;
    }
    *p = v;
    *dp = d;
}

namespace {

struct MergedRoot {
    Complex value;
    int multiplicity;
};

// Aberth-Ehrlich sweep from a circle of initial guesses.  eval fills (q, q')
// at z; only the ratio q/q' enters the update, so scaled evaluators are fine.
std::vector<Complex> aberth_iterate(const ValueDerivFn& eval, int degree,
                                    double radius, bool* converged) {
    std::vector<Complex> z(degree);
    for (int i = 0; i < degree; ++i) {
        double angle = 2.0 * kPi * i / degree + 0.4;
        z[i] = radius * Complex(std::cos(angle), std::sin(angle));
    }
    *converged = false;
    // Evaluators with internal cancellation bottom out at step sizes far
    // above 1e-13; once small steps stop shrinking, more sweeps only stir
    // the noise, so bail out early in that regime.
    double best_step = 1e300;
    int best_iter = 0;
    for (int iter = 0; iter < 400; ++iter) {
        double worst_step = 0.0;
        for (int i = 0; i < degree; ++i) {
            Complex q, dq;
            eval(z[i], &q, &dq);
            if (std::abs(q) == 0.0) continue;
            Complex w;
            if (std::abs(dq) == 0.0) {
                // Stationary point: nudge off it instead of dividing by zero.
                w = Complex(1e-3 * (1.0 + std::abs(z[i])), 0.0);
            } else {
                w = q / dq;
            }
            Complex repulsion = 0.0;
            for (int j = 0; j < degree; ++j) {
                if (j == i) continue;
                Complex diff = z[i] - z[j];
                if (std::abs(diff) < 1e-300) diff = Complex(1e-300, 0.0);
                repulsion += 1.0 / diff;
            }
            Complex denom = 1.0 - w * repulsion;
            if (std::abs(denom) < 1e-30) denom = Complex(1e-30, 0.0);
            Complex step = w / denom;
            z[i] -= step;
            worst_step = std::max(worst_step,
                                  std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (worst_step < 1e-13) {
            *converged = true;
            break;
        }
        if (worst_step < 0.9 * best_step) {
            best_step = worst_step;
            best_iter = iter;
        } else if (iter - best_iter > 15 && worst_step < 1e-6) {
            *converged = true;
            break;
        }
    }
    // Newton polish, a few steps per root.
    for (int i = 0; i < degree; ++i) {
        for (int it = 0; it < 5; ++it) {
            Complex q, dq;
            eval(z[i], &q, &dq);
            if (std::abs(dq) == 0.0 || std::abs(q) == 0.0) break;
            Complex step = q / dq;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(z[i]))) break;
            z[i] -= step;
        }
    }
    return z;
}

std::vector<MergedRoot> merge_clusters(std::vector<Complex> roots) {
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<MergedRoot> merged;
    for (Complex r : roots) {
        bool attached = false;
        for (auto& m : merged) {
            if (std::abs(r - m.value) < 1e-7 * (1.0 + std::abs(r))) {
                // Running mean keeps the representative centered.
                m.value += (r - m.value) / double(m.multiplicity + 1);
                ++m.multiplicity;
                attached = true;
                break;
            }
        }
        if (!attached) merged.push_back({r, 1});
    }
    return merged;
}

std::vector<Complex> expand_with_multiplicity(
    const std::vector<MergedRoot>& merged) {
    std::vector<Complex> out;
    for (const auto& m : merged)
        out.insert(out.end(), m.multiplicity, m.value);
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

std::vector<Complex> gate_callback_roots(const ValueDerivFn& f,
                                         std::vector<Complex> roots,
                                         double tol) {
    auto merged = merge_clusters(std::move(roots));
    double worst = 0.0;
    bool ok = true;
    for (const auto& m : merged) {
        Complex q, dq;
        f(m.value, &q, &dq);
        double ratio = std::abs(q);
        worst = std::max(worst, ratio);
        if (ratio > tol * (1.0 + std::abs(m.value)) * std::abs(dq) + 1e-280)
            ok = false;
    }
    auto out = expand_with_multiplicity(merged);
    if (!ok)
        throw RootFindError("find_all_roots: evaluator residual gate failed",
                            out, worst);
    return out;
}

}  // namespace

std::vector<Complex> find_all_roots(const ComplexPolynomial& poly, double tol) {
    if (!(tol > 0.0) || tol > 1e-6)
        throw std::invalid_argument("find_all_roots: tol outside (0, 1e-6]");
    ComplexPolynomial p = poly;
    p.normalize();
    int degree = p.degree();
    if (degree < 1) throw std::invalid_argument("find_all_roots: degree < 1");

    // Factor out exact roots at the origin so the Aberth circle is sane.
    int zero_roots = 0;
    while (p.degree() >= 1 && std::abs(p.coefficients.front()) < 1e-300) {
        p.coefficients.erase(p.coefficients.begin());
        ++zero_roots;
    }

    std::vector<Complex> roots;
    double max_coeff = 0.0;
    for (Complex c : poly.coefficients)
        max_coeff = std::max(max_coeff, std::abs(c));

    if (p.degree() >= 1) {
        // Initial circle: degree-scaled coefficient bound, a true upper bound
        // on root moduli: 1 + max_k |c_k / c_n|^{1/(n-k)}.
        int n = p.degree();
        Complex lead = p.coefficients.back();
        double radius = 1.0;
        for (int k = 0; k < n; ++k) {
            double m = std::abs(p.coefficients[k] / lead);
            if (m > 0.0)
                radius = std::max(radius,
                                  1.0 + std::pow(m, 1.0 / double(n - k)));
        }
        bool converged = false;
        auto eval = [&p](Complex z, Complex* q, Complex* dq) {
            p.eval_with_derivative(z, q, dq);
        };
        roots = aberth_iterate(eval, n, radius, &converged);
        (void)converged;  // residual gate below is the real accept test
    }
    roots.insert(roots.end(), zero_roots, Complex(0.0));

    auto merged = merge_clusters(std::move(roots));
    // Residual gate in log space; (1+|r|)^degree overflows double at the
    // degrees we support, the logarithm does not.
    double worst = 0.0;
    bool ok = true;
    for (const auto& m : merged) {
        double pv = std::abs(poly.eval(m.value));
        worst = std::max(worst, pv);
        if (pv == 0.0) continue;
        double log_gate = std::log(tol) + std::log(max_coeff) +
                          degree * std::log1p(std::abs(m.value));
        if (std::log(pv) > log_gate) ok = false;
    }
    auto out = expand_with_multiplicity(merged);
    if (!ok)
        throw RootFindError("find_all_roots: residual gate failed", out, worst);
    return out;
}

std::vector<Complex> find_all_roots(const ValueDerivFn& f, int degree,
                                    double radius, double tol) {
    if (degree < 1) throw std::invalid_argument("find_all_roots: degree < 1");
    if (!(radius > 0.0))
        throw std::invalid_argument("find_all_roots: radius must be positive");
    bool converged = false;
    auto roots = aberth_iterate(f, degree, radius, &converged);
    return gate_callback_roots(f, std::move(roots), tol);
}

int count_zeros_in_rectangle(const std::function<Complex(Complex)>& f,
                             const Rect& rect, int n_boundary) {
    if (n_boundary < 8)
        throw std::invalid_argument("count_zeros_in_rectangle: n_boundary < 8");
    if (!(rect.re_hi > rect.re_lo) || !(rect.im_hi > rect.im_lo))
        throw std::invalid_argument("count_zeros_in_rectangle: empty rectangle");

    // Counterclockwise boundary polyline, n_boundary segments per side.
    std::vector<Complex> pts;
    pts.reserve(4 * n_boundary);
    auto push_side = [&](Complex from, Complex to) {
        for (int i = 0; i < n_boundary; ++i)
            pts.push_back(from + (to - from) * (double(i) / n_boundary));
    };
    Complex c1(rect.re_lo, rect.im_lo), c2(rect.re_hi, rect.im_lo);
    Complex c3(rect.re_hi, rect.im_hi), c4(rect.re_lo, rect.im_hi);
    push_side(c1, c2);
    push_side(c2, c3);
    push_side(c3, c4);
    push_side(c4, c1);
    const int total = static_cast<int>(pts.size());

    std::vector<Complex> values(total);
    for (int i = 0; i < total; ++i) values[i] = f(pts[i]);

    // A zero can hide between samples only if |f| dips toward the local
    // sample-to-sample variation; demand an order of magnitude of headroom.
    for (int i = 0; i < total; ++i) {
        double fi = std::abs(values[i]);
        double var = std::max(std::abs(values[(i + 1) % total] - values[i]),
                              std::abs(values[(i + total - 1) % total] - values[i]));
        if (fi == 0.0 || (var > 0.0 && fi <= 10.0 * var))
            throw BoundaryTooCloseError(
                "count_zeros_in_rectangle: |f| on the boundary is too close to "
                "zero relative to the local variation");
    }

    // Trapezoid winding of (1/2 pi i) * f'/f, derivative by central difference.
    std::vector<Complex> logderiv(total);
    for (int i = 0; i < total; ++i) {
        double h = 1e-6 * (1.0 + std::abs(pts[i]));
        Complex df = (f(pts[i] + h) - f(pts[i] - h)) / (2.0 * h);
        logderiv[i] = df / values[i];
    }
    Complex winding = 0.0;
    for (int i = 0; i < total; ++i) {
        int j = (i + 1) % total;
        winding += 0.5 * (logderiv[i] + logderiv[j]) * (pts[j] - pts[i]);
    }
    winding /= Complex(0.0, 2.0 * kPi);
    double k = std::round(winding.real());
    if (std::abs(winding - k) > 0.25)
        throw std::runtime_error(
            "count_zeros_in_rectangle: winding integral did not settle on an "
            "integer; increase n_boundary");
    if (k < 0.0)
        throw std::runtime_error(
            "count_zeros_in_rectangle: negative winding (f not analytic?)");
    return static_cast<int>(k);
}

int count_zeros_in_rectangle(const ValueDerivFn& f, const Rect& rect,
                             int n_boundary) {
    if (n_boundary < 8)
        throw std::invalid_argument("count_zeros_in_rectangle: n_boundary < 8");
    if (!(rect.re_hi > rect.re_lo) || !(rect.im_hi > rect.im_lo))
        throw std::invalid_argument("count_zeros_in_rectangle: empty rectangle");

    std::vector<Complex> pts;
    pts.reserve(4 * n_boundary);
    auto push_side = [&](Complex from, Complex to) {
        for (int i = 0; i < n_boundary; ++i)
            pts.push_back(from + (to - from) * (double(i) / n_boundary));
    };
    Complex c1(rect.re_lo, rect.im_lo), c2(rect.re_hi, rect.im_lo);
    Complex c3(rect.re_hi, rect.im_hi), c4(rect.re_lo, rect.im_hi);
    push_side(c1, c2);
    push_side(c2, c3);
    push_side(c3, c4);
    push_side(c4, c1);
    const int total = static_cast<int>(pts.size());

    std::vector<Complex> logderiv(total);
    for (int i = 0; i < total; ++i) {
        Complex q, dq;
        f(pts[i], &q, &dq);
        const double qa = std::abs(q);
        if (qa == 0.0)
            throw BoundaryTooCloseError(
                "count_zeros_in_rectangle: exact zero on the boundary");
        // Newton distance below ~2 samples means a zero could sit on either
        // side of the contour; refuse rather than risk a miscount.
        const double step = std::abs(pts[(i + 1) % total] - pts[i]);
        const double dqa = std::abs(dq);
        if (dqa > 0.0 && qa / dqa <= 2.0 * step)
            throw BoundaryTooCloseError(
                "count_zeros_in_rectangle: Newton distance on the boundary is "
                "under two sample spacings");
        logderiv[i] = dq / q;
    }
    Complex winding = 0.0;
    for (int i = 0; i < total; ++i) {
        int j = (i + 1) % total;
        winding += 0.5 * (logderiv[i] + logderiv[j]) * (pts[j] - pts[i]);
    }
    winding /= Complex(0.0, 2.0 * kPi);
    double k = std::round(winding.real());
    if (std::abs(winding - k) > 0.25)
        throw std::runtime_error(
            "count_zeros_in_rectangle: winding integral did not settle on an "
            "integer; increase n_boundary");
    if (k < 0.0)
        throw std::runtime_error(
            "count_zeros_in_rectangle: negative winding (f not analytic?)");
    return static_cast<int>(k);
}

}  // namespace reslab
