#include "reslab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace reslab {

namespace {

constexpr int kMaxL = 400;

double max_component(Complex a, Complex b, Complex c, Complex d, Complex e,
                     Complex f) {
    double m = 0.0;
    for (Complex v : {a, b, c, d, e, f}) {
        m = std::max(m, std::abs(v.real()));
        m = std::max(m, std::abs(v.imag()));
    }
    return m;
}

}  // namespace

int HankelCondition::degree() const {
    return bc == BoundaryCondition::Dirichlet ? l : l + 1;
}

void HankelCondition::evaluate(Complex x, Complex* q, Complex* dq) const {
    const Complex kI{0.0, 1.0};
    // Recurrence P_{m+1} = i(2m+1) P_m + x^2 P_{m-1}, differentiated twice.
    // All six states share one positive rescale so ratios and arguments
    // survive; the raw values grow like (2l-1)!! for small |x|.
    Complex p0{1.0, 0.0}, p1 = x + kI;
    Complex d0{0.0, 0.0}, d1{1.0, 0.0};
    Complex s0{0.0, 0.0}, s1{0.0, 0.0};
    const Complex x2 = x * x;
    for (int m = 1; m < l; ++m) {
        const Complex a = kI * double(2 * m + 1);
        const Complex p2 = a * p1 + x2 * p0;
        const Complex d2 = a * d1 + x2 * d0 + 2.0 * x * p0;
        const Complex s2 = a * s1 + x2 * s0 + 4.0 * x * d0 + 2.0 * p0;
        p0 = p1; p1 = p2;
        d0 = d1; d1 = d2;
        s0 = s1; s1 = s2;
        const double big = max_component(p0, p1, d0, d1, s0, s1);
        if (big > 1e200) {
            const double scale = 1e-200;
            p0 *= scale; p1 *= scale;
            d0 *= scale; d1 *= scale;
            s0 *= scale; s1 *= scale;
        } else if (big > 0.0 && big < 1e-200) {
            const double scale = 1e200;
            p0 *= scale; p1 *= scale;
            d0 *= scale; d1 *= scale;
            s0 *= scale; s1 *= scale;
        }
    }
    Complex p = p1, d = d1, s = s1;
    if (l == 0) {
        p = p0; d = d0; s = s0;
    }
    switch (bc) {
        case BoundaryCondition::Dirichlet:
            *q = p;
            *dq = d;
            return;
        case BoundaryCondition::Neumann:
            *q = kI * x * p + x * d - double(l + 1) * p;
            *dq = kI * p + (kI * x - double(l)) * d + x * s;
            return;
        case BoundaryCondition::Robin: {
            const double ea = eta * radius;
            *q = kI * x * p + x * d - double(l + 1) * p + ea * p;
            *dq = kI * p + (kI * x - double(l)) * d + x * s + ea * d;
            return;
        }
    }
    throw std::logic_error("HankelCondition::evaluate: bad boundary condition");
}

ComplexPolynomial HankelCondition::coefficients() const {
    // P_l coefficient of x^k is i^{l-k} 2^{-(l-k)} (2l-k)! / ((l-k)! k!);
    // assembled through lgamma.  Alternating phases cancel catastrophically
    // once l is large; callers are expected to stay at l <= 60.
    const Complex kI{0.0, 1.0};
    std::vector<Complex> c(l + 1);
    for (int k = 0; k <= l; ++k) {
        const double mag = std::exp(std::lgamma(2.0 * l - k + 1.0) -
                                    std::lgamma(l - k + 1.0) -
                                    std::lgamma(k + 1.0) -
                                    (l - k) * std::log(2.0));
        Complex phase{1.0, 0.0};
        switch ((l - k) % 4) {
            case 0: phase = {1.0, 0.0}; break;
            case 1: phase = {0.0, 1.0}; break;
            case 2: phase = {-1.0, 0.0}; break;
            case 3: phase = {0.0, -1.0}; break;
        }
        c[k] = mag * phase;
    }
    ComplexPolynomial poly;
    if (bc == BoundaryCondition::Dirichlet) {
        poly.coefficients = c;
    } else {
        poly.coefficients.assign(l + 2, Complex{0.0, 0.0});
        const double ea = bc == BoundaryCondition::Robin ? eta * radius : 0.0;
        for (int m = 0; m <= l; ++m) {
            poly.coefficients[m + 1] += kI * c[m];
            poly.coefficients[m] += (double(m - l - 1) + ea) * c[m];
        }
    }
    double top = 0.0;
    for (Complex v : poly.coefficients) top = std::max(top, std::abs(v));
    if (top > 0.0) {
        for (Complex& v : poly.coefficients) v /= top;
    }
    poly.normalize();
    return poly;
}

HankelCondition hankel_condition(int l, BoundaryCondition bc, double radius,
                                 double eta) {
    if (l < 0 || l > kMaxL) {
        throw std::invalid_argument("hankel_condition: l out of [0, 400]");
    }
    if (!(radius > 0.0)) {
        throw std::invalid_argument("hankel_condition: radius must be positive");
    }
    if (!std::isfinite(eta)) {
        throw std::invalid_argument("hankel_condition: eta must be finite");
    }
    HankelCondition cond;
    cond.l = l;
    cond.bc = bc;
    cond.eta = bc == BoundaryCondition::Robin ? eta : 0.0;
    cond.radius = radius;
    return cond;
}

namespace {

// One root of f by safeguarded Newton from a seed.  Two safeguards keep the
// iterate inside the basin of the intended root: steps are clamped to
// max_step (roots sit about one Airy spacing apart, and an unclamped step
// taken near the ridge between two basins can catapult across it), and a
// step that fails to decrease |q| is halved up to five times, making each
// accepted move a descent move.  |q| has no local minima besides its zeros,
// so a clamped descent sequence cannot leave the basin it starts in.
//
// The evaluator cancels internally like e^{sqrt(3) |Im x|} times machine
// epsilon, so at depth the residual stops shrinking well above the usual
// 1e-13; the iteration keeps the best iterate seen and quits once steps grow
// well past that floor instead of demanding sizes the arithmetic cannot
// deliver.  *ratio gets the scale-free residual |q| / ((1+|x|) |q'|) at the
// accepted point; times 1+|x| it is the radius of the noise ball the root
// position lives in.
Complex newton_root(const ValueDerivFn& f, Complex seed, double max_step,
                    double* ratio) {
    Complex z = seed;
    Complex q, dq;
    f(z, &q, &dq);
    Complex best_z = z;
    double best_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 48 && std::abs(dq) > 0.0; ++it) {
        Complex step = q / dq;
        if (std::abs(step) > max_step) {
            step *= max_step / std::abs(step);
        }
        const double fz = std::abs(q);
        Complex z_next;
        for (int halving = 0;; ++halving) {
            z_next = z - step;
            f(z_next, &q, &dq);
            if (std::abs(q) <= fz || halving == 5) {
                break;
            }
            step *= 0.5;
        }
        const double s = std::abs(z_next - z);
        z = z_next;
        if (s < best_step) {
            best_step = s;
            best_z = z;
        }
        if (s <= 1e-13 * (1.0 + std::abs(z))) {
            best_z = z;
            break;
        }
        if (it > 10 && s > 4.0 * best_step) {
            break;  // wandering in the noise ball, best_z is as good as it gets
        }
    }
    f(best_z, &q, &dq);
    *ratio = std::abs(dq) == 0.0
                 ? std::numeric_limits<double>::infinity()
                 : std::abs(q) / ((1.0 + std::abs(best_z)) * std::abs(dq));
    return best_z;
}

// Roots of mode l down to depth_cap (in the Hankel argument plane), walked
// shallow-to-deep along the right half of the resonance arc.  The two
// shallowest roots are seeded from the Airy-zero asymptotics
// x ~ nu + 2^{-1/3} nu^{1/3} zeta_k e^{-2 pi i /3} with the McMahon form of
// the k-th Ai or Ai' zero; each later root extrapolates the previous two with
// the Airy spacing ratio, which tracks the arc as it bends.  Left-half roots
// are the mirror -conj(x) of the right half, and odd-degree conditions add
// one root on the imaginary axis near depth 0.663 nu.  Returns false if any
// accepted root fails the residual gate or lands off the expected spacing,
// both signs that the walk derailed.
bool walk_arc(const ValueDerivFn& f, int deg, BoundaryCondition bc, double nu,
              double depth_cap, double tol, std::vector<Complex>* out) {
    const double front = std::pow(2.0, -1.0 / 3.0) * std::cbrt(nu);
    const double offset = bc == BoundaryCondition::Dirichlet ? 0.25 : 0.75;
    const Complex rot{-0.5, -0.5 * std::sqrt(3.0)};
    const int m_side = deg / 2;
    auto zeta_of = [offset](int k) {
        return std::pow(1.5 * kPi * (k - offset), 2.0 / 3.0);
    };

    std::vector<Complex> side;
    for (int k = 1; k <= m_side; ++k) {
        Complex seed;
        if (side.size() < 2) {
            // Two-term zero expansion on the resonance ray.  3/(10 2^{2/3})
            // is the classical second McMahon-Olver coefficient for Bessel
            // zeros; derivative-type conditions carry an extra -0.42/zeta
            // piece fitted against reference roots.  Seeds only have to land
            // inside the right Newton basin, and the second term is what
            // keeps the k = 2 seed off the ridge toward k = 3.
            const double zeta = zeta_of(k);
            const double c2 =
                0.18899 * zeta * zeta -
                (bc == BoundaryCondition::Dirichlet ? 0.0 : 0.42 / zeta);
            seed = nu + front * zeta * rot +
                   c2 * std::pow(nu, -1.0 / 3.0) * rot * rot;
        } else {
            const double t = (zeta_of(k) - zeta_of(k - 1)) /
                             (zeta_of(k - 1) - zeta_of(k - 2));
            seed = side.back() + (side.back() - side[side.size() - 2]) * t;
        }
        const double expect = k >= 2 ? front * (zeta_of(k) - zeta_of(k - 1))
                                     : front * zeta_of(1);
        double ratio = 0.0;
        const Complex r = newton_root(f, seed, 0.45 * expect, &ratio);
        // Depth grows strictly along the walk, so the kept prefix is complete
        // once the first root past the cap appears (position noise at the cap
        // is below 1e-2, far inside any band-edge margin).
        if (-r.imag() > depth_cap) {
            break;
        }
        if (ratio > tol) {
            return false;
        }
        if (!side.empty()) {
            const double sep = std::abs(r - side.back());
            // Legitimate consecutive spacings stay within a few percent of
            // the Airy prediction shallow and compress to ~0.8 of it at the
            // bend; a walk that skipped a root shows up at 1.7 or above.
            if (sep < 0.55 * expect || sep > 1.45 * expect) {
                return false;
            }
        }
        side.push_back(r);
    }

    out->clear();
    for (Complex r : side) {
        out->push_back(r);
        out->push_back(Complex(-r.real(), r.imag()));
    }
    const double axis_depth = 0.663 * nu;
    if (deg % 2 == 1 && axis_depth <= depth_cap) {
        double ratio = 0.0;
        const Complex r =
            newton_root(f, Complex(0.0, -axis_depth), 1.0, &ratio);
        if (ratio > tol || std::abs(r.real()) > 0.3) {
            return false;
        }
        if (-r.imag() <= depth_cap) {
            // Symmetry pins the axis root's real part at zero exactly.
            out->push_back(Complex(0.0, r.imag()));
        }
    }
    return true;
}

// Argument-principle certificate that exactly one zero sits near r.  A first
// box can fail the boundary-headroom check when a neighboring root sits close
// to its edge, so shrunken and grown boxes are tried before giving up.
bool certify_root(const HankelCondition& cond, Complex r) {
    ValueDerivFn f = [&cond](Complex z, Complex* q, Complex* dq) {
        cond.evaluate(z, q, dq);
    };
    const double halfw = 1e-3 * (1.0 + std::abs(r));
    const double widths[] = {halfw, 0.25 * halfw, 1.7 * halfw};
    for (std::size_t attempt = 0; attempt < 3; ++attempt) {
        const double w = widths[attempt];
        const Rect box{r.real() - w, r.real() + w, r.imag() - w, r.imag() + w};
        try {
            return count_zeros_in_rectangle(f, box, 64) == 1;
        } catch (const BoundaryTooCloseError&) {
            continue;
        } catch (const std::runtime_error&) {
            return false;
        }
    }
    return false;
}

}  // namespace

SphereSweep compute_resonances(BoundaryCondition bc, double radius, int l_max,
                               double tol, const BandConstants& constants,
                               const std::vector<double>& zero_seq,
                               double C_margin, double eta, double depth_max,
                               ExecMode mode) {
    if (l_max < 0 || l_max > kMaxL) {
        throw std::invalid_argument("compute_resonances: l_max out of [0, 400]");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("compute_resonances: tol must be positive");
    }
    if (!(C_margin >= 0.0)) {
        throw std::invalid_argument("compute_resonances: C_margin must be >= 0");
    }
    if (!(depth_max > 0.0)) {
        throw std::invalid_argument(
            "compute_resonances: depth_max must be positive");
    }

    std::vector<std::vector<ResonanceRecord>> slots(l_max + 1);
    std::vector<char> failed(l_max + 1, 0);

    parallel_for(static_cast<std::size_t>(l_max) + 1, mode, [&](std::size_t li) {
        const int l = static_cast<int>(li);
        const HankelCondition cond = hankel_condition(l, bc, radius, eta);
        const int deg = cond.degree();
        if (deg < 1) {
            return;  // Dirichlet l = 0 has no resonances
        }
        const double nu = l + 0.5;
        const double search_radius = nu + 3.0 * std::cbrt(nu) + 2.0;
        ValueDerivFn f = [&cond](Complex z, Complex* q, Complex* dq) {
            cond.evaluate(z, q, dq);
        };
        const double depth_cap = depth_max * radius;
        std::vector<Complex> roots;
        if (deg > 30) {
            if (!walk_arc(f, deg, bc, nu, depth_cap, tol, &roots)) {
                failed[li] = 1;
                return;
            }
        } else {
            // Low degrees sit outside the asymptotic regime of the arc walk
            // (the expansion parameter zeta_2 / nu^{2/3} is not small), but a
            // simultaneous iteration from a circle still converges at these
            // sizes.  Its internal gate runs loose: roots beyond the depth
            // cap may sit on residual floors the cap exists to avoid, and
            // they are about to be dropped anyway.  Kept roots get the real
            // gate below.
            try {
                roots = find_all_roots(f, deg, search_radius, 0.5);
            } catch (const RootFindError&) {
                failed[li] = 1;
                return;
            }
            std::erase_if(roots,
                          [&](Complex r) { return -r.imag() > depth_cap; });
            for (Complex r : roots) {
                Complex q, dq;
                cond.evaluate(r, &q, &dq);
                if (std::abs(q) >
                    tol * (1.0 + std::abs(r)) * std::abs(dq) + 1e-280) {
                    failed[li] = 1;
                    return;
                }
            }
        }
        // Two iterates landing on the same root would silently drop another;
        // the roots of these conditions are never this close together.
        for (std::size_t i = 0; i + 1 < roots.size() && !failed[li]; ++i) {
            for (std::size_t j = i + 1; j < roots.size(); ++j) {
                if (std::abs(roots[i] - roots[j]) < 0.5) {
                    failed[li] = 1;
                    break;
                }
            }
        }
        if (failed[li]) {
            return;
        }
        for (Complex r : roots) {
            if (!certify_root(cond, r)) {
                failed[li] = 1;
                return;
            }
        }
        std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
            if (a.imag() != b.imag()) return a.imag() > b.imag();
            return a.real() < b.real();
        });
        slots[li].reserve(roots.size());
        for (Complex r : roots) {
            ResonanceRecord rec;
            rec.lambda = r / radius;
            rec.l = l;
            rec.bc = bc;
            rec.eta = cond.eta;
            rec.multiplicity = 2 * l + 1;
            if (rec.lambda.imag() <= 0.0) {
                rec.band = classify_lambda(rec.lambda, constants, zero_seq,
                                           C_margin);
            }
            slots[li].push_back(rec);
        }
    });

    SphereSweep sweep;
    for (int l = 0; l <= l_max; ++l) {
        if (failed[l]) {
            sweep.failed_l.push_back(l);
            continue;
        }
        sweep.records.insert(sweep.records.end(), slots[l].begin(),
                             slots[l].end());
    }
    return sweep;
}

GapReport verify_gaps(const std::vector<ResonanceRecord>& records,
                      const BandConstants& constants,
                      const std::vector<double>& zero_seq, double C_margin,
                      double re_min) {
    if (!(C_margin >= 0.0)) {
        throw std::invalid_argument("verify_gaps: C_margin must be >= 0");
    }
    GapReport report;
    report.C_margin = C_margin;
    report.re_min = re_min;
    double needed = 0.0;
    for (const ResonanceRecord& rec : records) {
        if (rec.lambda.real() < re_min || rec.lambda.imag() > 0.0) {
            continue;
        }
        const BandAssignment at_margin =
            classify_lambda(rec.lambda, constants, zero_seq, C_margin);
        if (at_margin.kind == BandKind::Gap && at_margin.index <= constants.j0) {
            ResonanceRecord copy = rec;
            copy.band = at_margin;
            report.violations.push_back(copy);
        }
        // Collar growth only ever moves points from gaps into bands, so the
        // passing threshold is set by the zero-collar offenders' distances
        // to the adjacent band edges.
        const BandAssignment bare =
            classify_lambda(rec.lambda, constants, zero_seq, 0.0);
        if (bare.kind == BandKind::Gap && bare.index <= constants.j0) {
            const double y = -rec.lambda.imag();
            const double rhat = std::cbrt(rec.lambda.real());
            const int g = bare.index;
            double cease;
            if (g == 0) {
                cease = constants.kappa * (zero_seq[0] * rhat) - y;
            } else {
                cease = std::min(
                    y - constants.K_const * (zero_seq[g - 1] * rhat),
                    constants.kappa * (zero_seq[g] * rhat) - y);
            }
            needed = std::max(needed, cease);
        }
    }
    report.min_C_margin_pass = needed;
    report.pass = report.violations.empty();
    return report;
}

WeylCount weyl_count(const std::vector<ResonanceRecord>& records, double r,
                     int band_j, const BandConstants& constants,
                     const std::vector<double>& zero_seq, double C_margin,
                     double surface_area, double radius, int l_max_used) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("weyl_count: r must be positive");
    }
    if (band_j < 1) {
        throw std::invalid_argument("weyl_count: band_j must be >= 1");
    }
    if (!(surface_area > 0.0) || !(radius > 0.0)) {
        throw std::invalid_argument("weyl_count: bad obstacle data");
    }
    const int l_needed = static_cast<int>(std::ceil(1.5 * r * radius));
    if (l_max_used < l_needed) {
        std::ostringstream msg;
        msg << "weyl_count: sweep covered l <= " << l_max_used
            << " but counting to |lambda| = " << r << " needs l <= " << l_needed;
        throw std::invalid_argument(msg.str());
    }
    WeylCount out;
    for (const ResonanceRecord& rec : records) {
        if (std::abs(rec.lambda) > r || rec.lambda.imag() > 0.0) {
            continue;
        }
        const BandAssignment a =
            classify_lambda(rec.lambda, constants, zero_seq, C_margin);
        if (a.kind == BandKind::Band && a.index == band_j) {
            out.count += rec.multiplicity;
        }
    }
    out.predicted = surface_area * r * r / (4.0 * kPi);
    out.ratio = out.predicted > 0.0 ? double(out.count) / out.predicted : 0.0;
    return out;
}

const char* to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Dirichlet: return "dirichlet";
        case BoundaryCondition::Neumann: return "neumann";
        case BoundaryCondition::Robin: return "robin";
    }
    return "?";
}

const char* to_string(BandKind kind) {
    switch (kind) {
        case BandKind::Gap: return "gap";
        case BandKind::Band: return "band";
        case BandKind::BelowAxisUnclassified: return "below_axis";
        case BandKind::TooSmallRe: return "too_small_re";
    }
    return "?";
}

BoundaryCondition boundary_condition_from_string(const std::string& text) {
    if (text == "dirichlet") return BoundaryCondition::Dirichlet;
    if (text == "neumann") return BoundaryCondition::Neumann;
    if (text == "robin") return BoundaryCondition::Robin;
    throw std::invalid_argument("unknown boundary condition: " + text);
}

BandKind band_kind_from_string(const std::string& text) {
    if (text == "gap") return BandKind::Gap;
    if (text == "band") return BandKind::Band;
    if (text == "below_axis") return BandKind::BelowAxisUnclassified;
    if (text == "too_small_re") return BandKind::TooSmallRe;
    throw std::invalid_argument("unknown band kind: " + text);
}

namespace {
const char* kCsvHeader =
    "bc,l,eta,re_lambda,im_lambda,multiplicity,band_kind,band_index";
}

void write_records_csv(const std::vector<ResonanceRecord>& records,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_records_csv: cannot open " + path);
    }
    out << kCsvHeader << "\n";
    char line[256];
    for (const ResonanceRecord& rec : records) {
        std::snprintf(line, sizeof(line), "%s,%d,%.17g,%.17g,%.17g,%d,%s,%d",
                      to_string(rec.bc), rec.l, rec.eta, rec.lambda.real(),
                      rec.lambda.imag(), rec.multiplicity,
                      to_string(rec.band.kind), rec.band.index);
        out << line << "\n";
    }
    if (!out) {
        throw std::runtime_error("write_records_csv: write failed on " + path);
    }
}

std::vector<ResonanceRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_records_csv: cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("read_records_csv: missing header in " + path);
    }
    std::vector<ResonanceRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 8) {
            std::ostringstream msg;
            msg << "read_records_csv: " << path << ":" << lineno
                << ": expected 8 fields, got " << fields.size();
            throw std::runtime_error(msg.str());
        }
        try {
            ResonanceRecord rec;
            rec.bc = boundary_condition_from_string(fields[0]);
            rec.l = std::stoi(fields[1]);
            rec.eta = std::stod(fields[2]);
            rec.lambda = Complex(std::stod(fields[3]), std::stod(fields[4]));
            rec.multiplicity = std::stoi(fields[5]);
            rec.band.kind = band_kind_from_string(fields[6]);
            rec.band.index = std::stoi(fields[7]);
            records.push_back(rec);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "read_records_csv: " << path << ":" << lineno << ": "
                << e.what();
            throw std::runtime_error(msg.str());
        }
    }
    return records;
}

}  // namespace reslab
