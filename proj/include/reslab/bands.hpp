#ifndef RESLAB_BANDS_HPP
#define RESLAB_BANDS_HPP

#include <vector>

#include "reslab/core.hpp"
#include "reslab/geometry.hpp"

namespace reslab {

enum class BandKind { Gap, Band, BelowAxisUnclassified, TooSmallRe };

struct BandAssignment {
    BandKind kind;
    int index;  // gap or band number; -1 for the other kinds

    bool operator==(const BandAssignment&) const = default;
};

// Walks the bands outward from the real axis in y = -Im lambda:
//   Gap(j-1): y <  kappa zeta_j (Re lambda)^{1/3} - C   (strict)
//   Band(j):  y <= K     zeta_j (Re lambda)^{1/3} + C   (ties land in the band)
// Points deeper than every tabulated band come back BelowAxisUnclassified,
// Re lambda < C_margin comes back TooSmallRe, Im lambda > 0 is a domain
// error.  zero_seq is the 1-based anchor sequence: the Ai' zeros for
// Neumann and Robin bands, the Ai zeros for Dirichlet.
BandAssignment classify_lambda(Complex lambda, const BandConstants& constants,
                               const std::vector<double>& zero_seq,
                               double C_margin);
// Convenience overload defaulting to the Ai' anchors in the table.
BandAssignment classify_lambda(Complex lambda, const BandConstants& constants,
                               const AiryZeroTable& table, double C_margin);

// Same partition in the rescaled plane, where the curvature enters through
// mu = 2Q: band centers sit at -Im z = (sqrt(3)/2) mu^{2/3} zeta_j and the
// +-C collars contract to +-2C h^{1/3} (the planes are related by
// -Im z = -2 h^{1/3} Im lambda at h = 1/Re lambda).
BandAssignment classify_rescaled(Complex z, double mu,
                                 const std::vector<double>& zero_seq,
                                 double C_margin, double h);

// Edge curves of band j and of the gap separating it from band j+1.
struct BandSpec {
    int j;
    double kappa, K_const, C_margin;
    double zeta_j, zeta_j1;

    double band_lower(double re_lambda) const;
    double band_upper(double re_lambda) const;
    double gap_upper(double re_lambda) const;
    // The gap between bands j and j+1 holds points for large Re lambda
    // exactly when K zeta_j < kappa zeta_{j+1}; it opens past gap_onset_re().
    bool gap_nonempty() const;
    double gap_onset_re() const;
};

BandSpec make_band_spec(int j, const BandConstants& constants,
                        const AiryZeroTable& table, double C_margin);

}  // namespace reslab

#endif
