#ifndef RESLAB_SPHERE_HPP
#define RESLAB_SPHERE_HPP

#include <string>
#include <vector>

#include "reslab/bands.hpp"
#include "reslab/core.hpp"
#include "reslab/geometry.hpp"
#include "reslab/parallel.hpp"
#include "reslab/polynomial.hpp"

namespace reslab {

enum class BoundaryCondition { Dirichlet, Neumann, Robin };

// The outgoing wave in angular mode l is h_l(lambda r) Y_lm, and h_l(x) =
// (-i)^{l+1} e^{ix} x^{-(l+1)} P_l(x) with P_l a monic degree-l polynomial.
// Imposing the boundary condition on the sphere of radius a therefore turns
// resonance search into polynomial root finding in x = lambda a:
//   Dirichlet:  q = P_l
//   Neumann:    q = i x P_l + x P_l' - (l+1) P_l          (degree l+1)
//   Robin:      q = q_Neumann + eta a P_l
// evaluate() runs the three-term recurrence for (P, P', P'') with joint
// positive rescaling, reliable through l = 400.  coefficients() expands the
// explicit coefficient form, which loses accuracy to cancellation past
// l ~ 60 and is kept for cross-checks only.
struct HankelCondition {
    int l = 0;
    BoundaryCondition bc = BoundaryCondition::Neumann;
    double eta = 0.0;     // Robin parameter; zero for the other conditions
    double radius = 1.0;  // obstacle radius a; roots live at x = lambda a

    int degree() const;
    void evaluate(Complex x, Complex* q, Complex* dq) const;
    ComplexPolynomial coefficients() const;
};

HankelCondition hankel_condition(int l, BoundaryCondition bc, double radius,
                                 double eta = 0.0);

struct ResonanceRecord {
    Complex lambda;
    int l = 0;
    BoundaryCondition bc = BoundaryCondition::Neumann;
    double eta = 0.0;
    int multiplicity = 1;  // 2l+1, the Y_lm degeneracy of the mode
    BandAssignment band{BandKind::BelowAxisUnclassified, -1};
};

struct SphereSweep {
    std::vector<ResonanceRecord> records;  // sorted by (l, depth, Re)
    std::vector<int> failed_l;  // modes whose roots could not be certified
};

// Finds every resonance with angular momentum l <= l_max and
// Im lambda >= -depth_max.  Each root is certified by an argument-principle
// count over a small rectangle around it; modes where any root fails its
// residual gate or certification are dropped whole and reported in failed_l.
// Records carry the band assignment at the given C_margin; the mirror
// partners with Re lambda < 0 are kept and classify as TooSmallRe.
//
// The depth cutoff is forced by the arithmetic, not a convenience: the
// boundary condition is assembled from terms that cancel like
// e^{sqrt(3) |Im (lambda a)|} times machine epsilon, so around depth 17 in
// the Hankel argument a double holds no correct digits and roots below that
// cannot be located at all.  The default of 14 keeps the residual floor near
// 1e-5 while reaching well below every gap and band edge of interest
// (|lambda| <= 150 puts the second gap's lower edge near depth 12).  tol
// gates the scale-free residual |q| / ((1+|x|) |q'|) per root; 1e-4 rejects
// derailed walks without tripping on the floor.
SphereSweep compute_resonances(BoundaryCondition bc, double radius, int l_max,
                               double tol, const BandConstants& constants,
                               const std::vector<double>& zero_seq,
                               double C_margin = 1.0, double eta = 0.0,
                               double depth_max = 14.0,
                               ExecMode mode = ExecMode::Parallel);

// Re-classifies records at the given collar width and lists those that fall
// strictly inside a predicted gap of index <= constants.j0 (restricted to
// Re lambda >= re_min).  min_C_margin_pass is the smallest collar at which
// no record violates, found from each offender's distance to the gap edges.
struct GapReport {
    double C_margin = 0.0;
    double re_min = 0.0;
    std::vector<ResonanceRecord> violations;
    double min_C_margin_pass = 0.0;
    bool pass = true;
};

GapReport verify_gaps(const std::vector<ResonanceRecord>& records,
                      const BandConstants& constants,
                      const std::vector<double>& zero_seq, double C_margin,
                      double re_min = 0.0);

// Counts resonances (with multiplicity) assigned to band band_j with
// |lambda| <= r against the leading-order prediction surface_area r^2/(4 pi).
// Demands l_max_used >= ceil(1.5 r radius) so no mode that could contribute
// is missing from the sweep.
struct WeylCount {
    long long count = 0;
    double predicted = 0.0;
    double ratio = 0.0;  // count / predicted
};

WeylCount weyl_count(const std::vector<ResonanceRecord>& records, double r,
                     int band_j, const BandConstants& constants,
                     const std::vector<double>& zero_seq, double C_margin,
                     double surface_area, double radius, int l_max_used);

void write_records_csv(const std::vector<ResonanceRecord>& records,
                       const std::string& path);
std::vector<ResonanceRecord> read_records_csv(const std::string& path);

const char* to_string(BoundaryCondition bc);
const char* to_string(BandKind kind);
BoundaryCondition boundary_condition_from_string(const std::string& text);
BandKind band_kind_from_string(const std::string& text);

}  // namespace reslab

#endif
