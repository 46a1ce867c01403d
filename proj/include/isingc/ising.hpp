#pragma once

#include <array>

#include "isingc/complex_matrix.hpp"

namespace isingc {

/// Exchange couplings along x, y, z (angular-frequency units, hbar = 1).
struct IsingCouplings {
    double j1 = 0.0, j2 = 0.0, j3 = 0.0;

    double along(int axis) const { return axis == 1 ? j1 : axis == 2 ? j2 : j3; }
    /// Sum / difference of the two couplings transverse to `axis`, cyclic order.
    double transverse_sum(int axis) const;
    double transverse_diff(int axis) const;
};

/// Local field strengths on the two spins along the pulse axis.
struct FieldPair {
    double b1 = 0.0, b2 = 0.0;

    double sum() const { return b1 + b2; }
    double diff() const { return b1 - b2; }
};

/// Scaled parameters per branch: r = sqrt(field_combo^2 + transverse_combo^2),
/// b = field_combo / r, j = transverse_combo / r, so b^2 + j^2 = 1.
/// The plus branch pairs the field sum with the transverse difference; the
/// minus branch pairs the field difference with the transverse sum.
struct DerivedParams {
    double r_plus = 0.0, r_minus = 0.0;
    double b_plus = 0.0, b_minus = 0.0;
    double j_plus = 0.0, j_minus = 0.0;
    double field_sum = 0.0, field_diff = 0.0;
    double trans_sum = 0.0, trans_diff = 0.0;
    bool degenerate_plus = false, degenerate_minus = false;
};

DerivedParams derive_params(const IsingCouplings& c, const FieldPair& f, int axis);

/// One 2x2 block of the Bell-basis evolution operator for a given axis.
/// rows are 1-based; alpha/beta/q are sign constants frozen against the
/// Hamiltonian-exponential oracle.
struct SectorDescriptor {
    int axis = 0;
    int ordinal = 0;   // 1 or 2, by first row
    int row_k = 0, row_l = 0;
    int alpha = 0, beta = 0, q = 0;
};

const SectorDescriptor& sector_descriptor(int axis, int ordinal);
const SectorDescriptor& sector_for_rows(int top_row, int bottom_row);
/// The descriptor on `axis` whose sign label is `alpha`.
const SectorDescriptor& sector_with_alpha(int axis, int alpha);

/// Two-spin Hamiltonian in the computational basis:
///   -sum_k J_k s1k s2k + B1 s1h + B2 s2h.
Matrix hamiltonian_matrix(const IsingCouplings& c, const FieldPair& f, int axis);

/// Analytic eigenvalues mu*J_h + nu*R_{-mu}, ascending.
std::array<double, 4> closed_form_eigenvalues(const IsingCouplings& c, const FieldPair& f, int axis);

/// Closed-form Bell-basis evolution operator for a constant pulse of length t.
/// Matches to_bell_basis(expm_hermitian(H, -t)) to machine precision.
Matrix evolution_operator(const IsingCouplings& c, const FieldPair& f, int axis, double t);

/// True if all entries outside the two 2x2 blocks for `axis` are below tol.
bool matches_sector_pattern(const Matrix& u, int axis, double tol);

/// Extract a 2x2 sector; throws if the off-pattern entries exceed pattern_tol.
Matrix sector_of(const Matrix& u, const SectorDescriptor& d, double pattern_tol = 1e-9);

/// Pulse length and field combo that drive the sector labeled `a` to the
/// identity: t = (2m+n)pi/(a*J_axis), field = sqrt((J_axis*n/(2m+n))^2 - Jt^2)
/// where Jt is the transverse combo entering that sector's rotation.
/// Throws std::domain_error when t <= 0 or the radicand is negative.
struct IdentitySectorParams {
    double t = 0.0;
    double field = 0.0;   // magnitude of the complementary field combo
    double r = 0.0;       // resulting scaled radius |J_axis*n/(2m+n)|
};

IdentitySectorParams identity_sector_params(double j_axis, double j_transverse, int m, int n, int a);

}  // namespace isingc
