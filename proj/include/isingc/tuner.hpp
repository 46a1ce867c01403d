#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isingc/factorizer.hpp"
#include "isingc/ising.hpp"

namespace isingc {

/// What a pulse sequence must realize: the entries of the daggered two-level
/// factor's sector, split into magnitude and phases.
///   m11 = a/u' (diagonal entry), m21 = u/u' (lower-left entry), chi = |m21|.
struct SectorTarget {
    cd m11{1.0, 0.0};
    cd m21{0.0, 0.0};
    double chi = 0.0;
    double phi = 0.0;     // arg(m11)
    double varphi = 0.0;  // arg(m21)
    bool real_entries = true;
    int top_row = 0, bottom_row = 0;
};

SectorTarget sector_target_from_factor(const TwoLevelFactor& f, const SectorDescriptor& d);

/// Device coupling ratios: transverse combos relative to the axis coupling,
/// for the driven sector (c, c_p) and for the identity sector (c_m, c_mp);
/// unprimed = first pulse, primed = second pulse.
struct CouplingRatios {
    double c = 1.0;
    double c_p = 1.0;
    double c_m = 0.5;
    double c_mp = 0.5;
};

/// Integer design constants. big_n_minus = N with the identity-sector label;
/// big_n / big_n_prime are the odd per-pulse half-turn counts; n_minus and
/// m_minus pin the identity sector.
struct QuantumNumbers {
    int big_n_minus = 0;
    int big_n = 0;
    int big_n_prime = 0;
    int n_minus = 0;
    int m_minus = 0;

    int little_n() const { return (big_n - 1) / 2; }
    int little_n_prime() const { return (big_n_prime - 1) / 2; }
};

/// Realized-sector overall sign for the two-pulse half-turn construction.
/// Frozen against the closed-form product (see the tuner tests).
int two_pulse_sector_sign(int big_n_minus, int big_n, int big_n_prime);

struct PulsePrescription {
    int axis = 0;
    double t = 0.0;
    double b1 = 0.0, b2 = 0.0;
    IsingCouplings couplings;
    // nondimensional record for reporting
    double tau = 0.0;     // driven-sector phase scale (J_transverse * t)
    double j_nd = 0.0;    // driven-sector transverse ratio
    double b_nd = 0.0;    // driven-sector field ratio
    double j_id = 0.0;    // identity-sector transverse ratio
};

struct TunerConfig {
    double tol_analytic = 1e-10;
    double tol_numeric = 1e-8;
    int n_bound = 5;
    double tau_max = 8.0 * 3.14159265358979323846;
    std::uint64_t seed = 0x5eed;
    bool parallel = true;
    double j_axis = 1.0;    // axis coupling strength of the first pulse
    double j_axis_p = 1.0;  // and of the second pulse
    CouplingRatios ratios;
};

struct TuneOutcome {
    bool ok = false;
    std::vector<PulsePrescription> pulses;
    double residual = 1e300;
    QuantumNumbers qn;
    std::string note;
    // solved nondimensional parameters (reporting)
    double j_nd = 0.0, b_nd = 0.0, jp_nd = 0.0, bp_nd = 0.0;
    double tau = 0.0, taup = 0.0;
    double j_id = 0.0;
    double b0 = 0.0, tau0 = 0.0;  // one-pulse report: field/axis ratio, axis phase
};

/// Max-norm distance between the realized operator (closed form and
/// Hamiltonian-exponential oracle, whichever is worse) and the daggered
/// embedded factor. Pulses multiply in listed order (first pulse rightmost).
double verify_prescription(const std::vector<PulsePrescription>& pulses, const TwoLevelFactor& f);

/// One-pulse solve. axis 1 is unsatisfiable for chi > 0 (the required
/// lower-entry phase is an odd multiple of pi/2, but a factor entry phase is
/// 0 or pi); axis 2 solves real targets with the transverse-difference
/// coupling tuned to zero.
TuneOutcome tune_one_pulse(const SectorTarget& target, int axis, const TunerConfig& cfg);

/// Raw half-turn quadratic for the two-pulse axis-1 construction: given the
/// target entries, integer constants and a sign for the A coefficient,
/// returns the (j, j') candidates that satisfy the linear time constraint.
struct QuadraticCandidate {
    double j = 0.0, jp = 0.0;
    double b_abs = 0.0, bp_abs = 0.0;
    double tau = 0.0, taup = 0.0;
    double j_id_over_n = 0.0;  // |j| of the identity sector times n_minus
};
std::vector<QuadraticCandidate> two_pulse_quadratic(double m11, double m21, int big_n_minus,
                                                    int big_n, int big_n_prime, int a_sign,
                                                    const CouplingRatios& ratios);

/// Ordered enumeration of integer constants whose quadratic admits physically
/// meaningful roots (0 < j, j' <= 1 and a valid identity sector).
struct QuantumNumberCandidate {
    QuantumNumbers qn;
    int a_sign = 0;
    QuadraticCandidate roots;
};
std::vector<QuantumNumberCandidate> search_quantum_numbers(const SectorTarget& target,
                                                           const CouplingRatios& ratios, int bound);

/// Analytic two-pulse solve for real targets on the axis-1 row pairs.
TuneOutcome tune_two_pulse_x_real(const SectorTarget& target, const TunerConfig& cfg);

/// The real/imaginary parts of the combined two-pulse sector entries as
/// functions of the nondimensional unknowns; the second pulse time variable is
/// slaved to the first through the identity-sector constraint.
struct SectorQuadruple {
    double r_phi = 0.0, i_phi = 0.0;  // lower-left entry
    double r_fi = 0.0, i_fi = 0.0;    // diagonal entry
};
SectorQuadruple sector_quadruple(double j, double jp, double tau, int beta, int big_n_minus,
                                 const CouplingRatios& ratios, double sb1, double sb2);

/// Numeric multi-start solve of the three sector equations in the
/// (chi^2, arctan xi_phi, arctan xi_varphi) form.
struct TripleTarget {
    double chi2 = 0.0;
    double atan_xi_phi = 0.0;  // arctan of (imag/real) of the lower-left entry
    double atan_xi_fi = 0.0;   // same for the diagonal entry
};

struct ScanOptions {
    int nj = 10;
    int ntau = 48;
    int top_k = 40;
    int newton_iters = 50;
    double tol = 1e-11;
    double j_lo = 0.08, j_hi = 0.97;
    double tau_lo = 0.15, tau_hi = 18.0;
    bool parallel = true;
};

struct ScanResult {
    std::array<double, 3> x{};  // (j, jp, tau)
    double residual = 1e300;
    long best_index = -1;
    bool converged = false;
};

/// residual callback: writes up to 4 components, returns the count.
using ResidualFn = std::function<int(const std::array<double, 3>& x, std::array<double, 4>& r)>;

ScanResult scan_refine_serial(const ResidualFn& f, const ScanOptions& opt);
ScanResult scan_refine_parallel(const ResidualFn& f, const ScanOptions& opt);
ScanResult scan_refine(const ResidualFn& f, const ScanOptions& opt);

ScanResult solve_sector_triple(const TripleTarget& target, int beta, int big_n_minus,
                               const CouplingRatios& ratios, double sb1, double sb2,
                               const ScanOptions& opt);

/// Numeric two-pulse solve for arbitrary complex targets on any row pair.
TuneOutcome tune_two_pulse_numeric(const SectorTarget& target, const TunerConfig& cfg);

/// Per-factor device couplings: the axis coupling plus transverse combos
/// synthesized from the ratios for the given sector sign label.
IsingCouplings couplings_for_sector(int axis, int alpha, double c_driven, double c_identity,
                                    double j_axis);

}  // namespace isingc
