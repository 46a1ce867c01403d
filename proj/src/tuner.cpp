#include "isingc/tuner.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isingc {

namespace {

constexpr double kPi = 3.14159265358979323846;

int parity(int x) { return ((x % 2) + 2) % 2; }

cd i_pow_axis(int axis) { return axis == 1 ? cd(0, 1) : axis == 2 ? cd(-1, 0) : cd(0, -1); }

// Transverse combos entering the driven and identity sectors:
// alpha = +1 pairs the driven rotation with the transverse sum,
// alpha = -1 with the transverse difference.
void sector_combos(int alpha, double c_driven, double c_identity, double j_axis,
                   double& trans_sum, double& trans_diff) {
    if (alpha == +1) {
        trans_sum = c_driven * j_axis;
        trans_diff = c_identity * j_axis;
    } else {
        trans_diff = c_driven * j_axis;
        trans_sum = c_identity * j_axis;
    }
}

FieldPair fields_for_sector(int alpha, double field_driven, double field_identity) {
    // driven sector alpha = +1 uses the field difference, alpha = -1 the sum
    double sum, diff;
    if (alpha == +1) {
        diff = field_driven;
        sum = field_identity;
    } else {
        sum = field_driven;
        diff = field_identity;
    }
    return FieldPair{(sum + diff) / 2.0, (sum - diff) / 2.0};
}

Matrix target_matrix(const TwoLevelFactor& f) { return adjoint(embed_factor(f, 4)); }

}  // namespace

IsingCouplings couplings_for_sector(int axis, int alpha, double c_driven, double c_identity,
                                    double j_axis) {
    double sum, diff;
    sector_combos(alpha, c_driven, c_identity, j_axis, sum, diff);
    IsingCouplings c;
    const double hi = (sum + diff) / 2.0, lo = (sum - diff) / 2.0;
    switch (axis) {
        case 1: c.j1 = j_axis; c.j2 = hi; c.j3 = lo; break;
        case 2: c.j2 = j_axis; c.j3 = hi; c.j1 = lo; break;
        case 3: c.j3 = j_axis; c.j1 = hi; c.j2 = lo; break;
        default: throw std::invalid_argument("couplings_for_sector: bad axis");
    }
    return c;
}

SectorTarget sector_target_from_factor(const TwoLevelFactor& f, const SectorDescriptor& d) {
    if (f.top_row != d.row_k || f.bottom_row != d.row_l)
        throw std::invalid_argument("sector_target_from_factor: factor rows do not match descriptor");
    SectorTarget t;
    // sector = [[a*/u', u*/u'], [-mu u/u', mu a/u']]
    t.m11 = std::conj(f.sector(0, 0));
    t.m21 = std::conj(f.sector(0, 1));
    t.chi = std::min(1.0, std::abs(t.m21));
    t.phi = std::arg(t.m11);
    t.varphi = t.chi > 0 ? std::arg(t.m21) : 0.0;
    t.real_entries = std::abs(t.m11.imag()) < 1e-12 && std::abs(t.m21.imag()) < 1e-12;
    t.top_row = f.top_row;
    t.bottom_row = f.bottom_row;
    return t;
}

double verify_prescription(const std::vector<PulsePrescription>& pulses, const TwoLevelFactor& f) {
    const Matrix want = target_matrix(f);
    Matrix closed = Matrix::identity(4);
    Matrix oracle = Matrix::identity(4);
    for (const auto& p : pulses) {
        const FieldPair fp{p.b1, p.b2};
        closed = multiply(evolution_operator(p.couplings, fp, p.axis, p.t), closed);
        const Matrix h = hamiltonian_matrix(p.couplings, fp, p.axis);
        oracle = multiply(to_bell_basis(expm_hermitian(h, -p.t)), oracle);
    }
    return std::max(max_norm_diff(closed, want), max_norm_diff(oracle, want));
}

int two_pulse_sector_sign(int big_n_minus, int big_n, int big_n_prime) {
    const int e = big_n_minus + (big_n - 1) / 2 + (big_n_prime - 1) / 2 + 1;
    return parity(e) == 0 ? +1 : -1;
}

TuneOutcome tune_one_pulse(const SectorTarget& target, int axis, const TunerConfig& cfg) {
    TuneOutcome out;
    if (axis == 1 || axis == 3) {
        if (target.chi <= 1e-14) {
            out.ok = true;  // trivial factor, nothing to drive
            out.residual = 0.0;
            out.note = "identity sector target; no pulse needed";
            return out;
        }
        out.note = "one-pulse axis-" + std::to_string(axis) +
                   " is unsatisfiable: with the complementary sector pinned to the identity the "
                   "lower-entry phase must be an odd multiple of pi/2, but a factor entry phase "
                   "is 0 or pi";
        return out;
    }
    if (axis != 2) throw std::invalid_argument("tune_one_pulse: axis must be 1, 2 or 3");
    if (!target.real_entries) {
        out.note = "one-pulse axis-2 path requires a real-entry target";
        return out;
    }
    if (!(target.top_row == 2 && target.bottom_row == 3)) {
        out.note = "one-pulse axis-2 path drives the (2,3) row pair only";
        return out;
    }

    const double jh = cfg.j_axis;
    const double jt_identity = cfg.ratios.c_m * jh;  // transverse sum, drives the identity sector
    const IsingCouplings coup = couplings_for_sector(2, -1, 0.0, cfg.ratios.c_m, jh);
    const double m11 = target.m11.real(), m21 = target.m21.real();

    // candidates ordered by the total axis phase, then by |n|
    struct Cand { int tw, n; };
    std::vector<Cand> cands;
    const int bound = 2 * cfg.n_bound + 1;
    for (int tw = 1; tw <= bound; ++tw)
        for (int an = parity(tw) == 0 ? 2 : 1; an <= bound; an += 2)
            for (int sn = 0; sn < 2; ++sn) {
                const int n = sn == 0 ? an : -an;
                if (std::abs(jh * n / double(tw)) < jt_identity - 1e-12) continue;
                cands.push_back({tw, n});
            }

    for (const Cand& c : cands) {
        IdentitySectorParams idp;
        try {
            idp = identity_sector_params(jh, jt_identity, (c.tw - c.n) / 2, c.n, +1);
        } catch (const std::domain_error&) {
            continue;
        }
        const double sgn = parity(c.n) == 0 ? 1.0 : -1.0;
        const double theta = std::atan2(sgn * m21, sgn * m11);
        const double field_driven = theta / idp.t;

        PulsePrescription p;
        p.axis = 2;
        p.t = idp.t;
        p.couplings = coup;
        const FieldPair fp = fields_for_sector(-1, field_driven, idp.field);
        p.b1 = fp.b1;
        p.b2 = fp.b2;
        p.j_nd = 0.0;
        p.b_nd = field_driven >= 0 ? 1.0 : -1.0;
        p.j_id = jt_identity / idp.r;
        p.tau = std::abs(jh * idp.t);

        TwoLevelFactor f;
        f.top_row = 2; f.bottom_row = 3; f.col = 0;
        f.sector = Matrix(2);
        f.sector(0, 0) = std::conj(target.m11);
        f.sector(0, 1) = std::conj(target.m21);
        f.sector(1, 0) = -target.m21;
        f.sector(1, 1) = target.m11;
        const double res = verify_prescription({p}, f);
        if (res <= cfg.tol_analytic) {
            out.ok = true;
            out.pulses = {p};
            out.residual = res;
            out.qn.n_minus = c.n;
            out.qn.m_minus = (c.tw - c.n) / 2;
            out.b0 = std::abs(field_driven / jh);
            out.tau0 = std::abs(jh * idp.t);
            out.j_id = p.j_id;
            return out;
        }
        out.residual = std::min(out.residual, res);
    }
    out.note = "one-pulse axis-2 search exhausted (bound " + std::to_string(bound) + ")";
    return out;
}

std::vector<QuadraticCandidate> two_pulse_quadratic(double m11, double m21, int big_n_minus,
                                                    int big_n, int big_n_prime, int a_sign,
                                                    const CouplingRatios& r) {
    std::vector<QuadraticCandidate> out;
    if (big_n == 0 || big_n_prime == 0 || parity(big_n) == 0 || parity(big_n_prime) == 0) return out;
    const double A = a_sign * m11;
    const double B = m21;
    const double C = 2.0 * big_n_minus * r.c_p / big_n_prime;
    const double D = big_n * r.c_p / (big_n_prime * r.c);
    const double den = B * B + (A + D) * (A + D);
    const double disc = B * B - C * C + (A + D) * (A + D);
    if (disc < 0.0 || den <= 0.0) return out;
    const double sq = std::sqrt(disc);
    for (const double root : {(C * (A + D) + std::abs(B) * sq) / den,
                              (C * (A + D) - std::abs(B) * sq) / den}) {
        const double j = root;
        if (!(j > 1e-12 && j <= 1.0)) continue;
        // second ratio from the linear time constraint
        const double jp = (big_n_minus - j * big_n / (2.0 * r.c)) * 2.0 * r.c_p / big_n_prime;
        if (!(jp > 1e-12 && jp <= 1.0)) continue;
        QuadraticCandidate qc;
        qc.j = j;
        qc.jp = jp;
        qc.b_abs = std::sqrt(std::max(0.0, 1.0 - j * j));
        qc.bp_abs = std::sqrt(std::max(0.0, 1.0 - jp * jp));
        qc.tau = j * big_n * kPi / 2.0;
        qc.taup = jp * big_n_prime * kPi / 2.0;
        qc.j_id_over_n = std::abs(qc.tau * r.c_m / r.c + qc.taup * r.c_mp / r.c_p) / kPi;
        out.push_back(qc);
    }
    return out;
}

std::vector<QuantumNumberCandidate> search_quantum_numbers(const SectorTarget& target,
                                                           const CouplingRatios& ratios, int bound) {
    std::vector<QuantumNumberCandidate> out;
    if (bound <= 0) return out;
    const double m11 = target.m11.real(), m21 = target.m21.real();
    const int alpha = (target.top_row == 3 && target.bottom_row == 4) ? +1 : -1;

    // (N, N') enumeration: magnitude class ascending, balanced pairs first,
    // then sign pattern (+,+), (+,-), (-,+), (-,-)
    std::vector<std::pair<int, int>> mags;
    for (int hi = 1; hi <= bound; hi += 2)
        for (int lo = hi; lo >= 1; lo -= 2) {
            mags.push_back({hi, lo});
            if (lo != hi) mags.push_back({lo, hi});
        }

    for (int k = 1; k <= bound; ++k)
        for (const int nma : {-k, k})
            for (const auto& [an, anp] : mags)
                for (const auto& [sn, snp] : std::initializer_list<std::pair<int, int>>{
                         {1, 1}, {1, -1}, {-1, 1}, {-1, -1}})
                    for (const int a_sign : {+1, -1}) {
                        const int N = sn * an, Np = snp * anp;
                        for (const auto& qc :
                             two_pulse_quadratic(m11, m21, nma, N, Np, a_sign, ratios)) {
                            // identity sector must admit |j| <= 1 for some n of the right parity
                            int n_id = std::max(1, static_cast<int>(std::ceil(qc.j_id_over_n - 1e-12)));
                            if (parity(n_id) != parity(nma)) ++n_id;
                            if (n_id > 2 * bound + 1) continue;
                            QuantumNumberCandidate cand;
                            cand.qn.big_n_minus = nma;
                            cand.qn.big_n = N;
                            cand.qn.big_n_prime = Np;
                            cand.qn.n_minus = n_id;
                            cand.qn.m_minus = (-alpha * nma - n_id) / 2;
                            cand.a_sign = a_sign;
                            cand.roots = qc;
                            out.push_back(cand);
                        }
                    }
    return out;
}

namespace {

struct TwoPulseBuild {
    PulsePrescription first, second;
};

// Assemble both axis-1 prescriptions from solved nondimensional parameters.
// b_signed / bp_signed carry the chosen field-ratio signs.
std::optional<TwoPulseBuild> build_two_pulse(int alpha, double j, double jp, double b_signed,
                                             double bp_signed, double tau, double taup, int n_id,
                                             const TunerConfig& cfg, int axis) {
    const CouplingRatios& r = cfg.ratios;
    const double jh = cfg.j_axis, jhp = cfg.j_axis_p;
    const double t = tau / (r.c * jh);
    const double tp = taup / (r.c_p * jhp);
    if (t <= 0.0 || tp <= 0.0) return std::nullopt;

    const double jt_id = r.c_m * jh, jt_id_p = r.c_mp * jhp;
    const double kappa = jt_id_p / jt_id;
    const double ra = n_id * kPi / (t + kappa * tp);
    if (ra < jt_id - 1e-12) return std::nullopt;
    const double b_id = std::sqrt(std::max(0.0, ra * ra - jt_id * jt_id));

    TwoPulseBuild out;
    out.first.axis = axis;
    out.first.t = t;
    out.first.couplings = couplings_for_sector(axis, alpha, r.c, r.c_m, jh);
    const double r_driven = r.c * jh / j;
    const FieldPair f1 = fields_for_sector(alpha, b_signed * r_driven, b_id);
    out.first.b1 = f1.b1;
    out.first.b2 = f1.b2;
    out.first.tau = tau;
    out.first.j_nd = j;
    out.first.b_nd = b_signed;
    out.first.j_id = jt_id / ra;

    out.second.axis = axis;
    out.second.t = tp;
    out.second.couplings = couplings_for_sector(axis, alpha, r.c_p, r.c_mp, jhp);
    const double r_driven_p = r.c_p * jhp / jp;
    const FieldPair f2 = fields_for_sector(alpha, bp_signed * r_driven_p, b_id * kappa);
    out.second.b1 = f2.b1;
    out.second.b2 = f2.b2;
    out.second.tau = taup;
    out.second.j_nd = jp;
    out.second.b_nd = bp_signed;
    out.second.j_id = jt_id_p / (ra * kappa);
    return out;
}

TwoLevelFactor factor_from_target(const SectorTarget& t) {
    TwoLevelFactor f;
    f.top_row = t.top_row;
    f.bottom_row = t.bottom_row;
    f.sector = Matrix(2);
    f.sector(0, 0) = std::conj(t.m11);
    f.sector(0, 1) = std::conj(t.m21);
    f.sector(1, 0) = -t.m21;
    f.sector(1, 1) = t.m11;
    f.subgroup = classify_rows(t.top_row, t.bottom_row);
    return f;
}

}  // namespace

TuneOutcome tune_two_pulse_x_real(const SectorTarget& target, const TunerConfig& cfg) {
    TuneOutcome out;
    if (!target.real_entries) {
        out.note = "two-pulse analytic path requires a real-entry target";
        return out;
    }
    const bool rows34 = target.top_row == 3 && target.bottom_row == 4;
    const bool rows12 = target.top_row == 1 && target.bottom_row == 2;
    if (!rows34 && !rows12) {
        out.note = "two-pulse axis-1 path drives the (1,2) and (3,4) row pairs";
        return out;
    }
    const int alpha = rows34 ? +1 : -1;
    const SectorDescriptor& desc = sector_for_rows(target.top_row, target.bottom_row);
    const double qb = desc.q * desc.beta;  // +1 on both axis-1 sectors
    const double m11 = target.m11.real(), m21 = target.m21.real();
    const TwoLevelFactor factor = factor_from_target(target);
    const CouplingRatios& r = cfg.ratios;

    std::vector<std::pair<int, int>> mags;
    for (int hi = 1; hi <= cfg.n_bound; hi += 2)
        for (int lo = hi; lo >= 1; lo -= 2) {
            mags.push_back({hi, lo});
            if (lo != hi) mags.push_back({lo, hi});
        }

    for (int nma = 1; nma <= cfg.n_bound; ++nma)
        for (const auto& [N, Np] : mags) {
            const int sign = two_pulse_sector_sign(nma, N, Np);
            for (const auto& qc : two_pulse_quadratic(m11, m21, nma, N, Np, sign, r)) {
                // field-ratio signs satisfying both entry equations
                for (const double sb : {+1.0, -1.0})
                    for (const double sbp : {+1.0, -1.0}) {
                        const double b = sb * qc.b_abs, bp = sbp * qc.bp_abs;
                        if (std::abs(sign * (qc.j * qc.jp + b * bp) - m11) > 1e-9) continue;
                        if (std::abs(sign * qb * (qc.j * bp - b * qc.jp) - m21) > 1e-9) continue;

                        int n_id = std::max(1, static_cast<int>(std::ceil(qc.j_id_over_n - 1e-12)));
                        if (parity(n_id) != parity(nma)) ++n_id;
                        auto built = build_two_pulse(alpha, qc.j, qc.jp, b, bp, qc.tau, qc.taup,
                                                     n_id, cfg, 1);
                        if (!built) continue;
                        const std::vector<PulsePrescription> pulses{built->first, built->second};
                        const double res = verify_prescription(pulses, factor);
                        out.residual = std::min(out.residual, res);
                        if (res <= cfg.tol_analytic) {
                            out.ok = true;
                            out.pulses = pulses;
                            out.residual = res;
                            out.qn.big_n_minus = nma;
                            out.qn.big_n = N;
                            out.qn.big_n_prime = Np;
                            out.qn.n_minus = n_id;
                            out.qn.m_minus = (-alpha * nma - n_id) / 2;
                            out.j_nd = qc.j;
                            out.b_nd = b;
                            out.jp_nd = qc.jp;
                            out.bp_nd = bp;
                            out.tau = qc.tau;
                            out.taup = qc.taup;
                            out.j_id = built->first.j_id;
                            return out;
                        }
                    }
            }
        }
    out.note = "two-pulse axis-1 search exhausted (n_bound " + std::to_string(cfg.n_bound) +
               "); nearest residual " + std::to_string(out.residual);
    return out;
}

SectorQuadruple sector_quadruple(double j, double jp, double tau, int beta, int big_n_minus,
                                 const CouplingRatios& r, double sb1, double sb2) {
    const double taup = -tau * r.c_p / r.c + r.c_p * big_n_minus * kPi;
    const double dm = tau / j, dpm = taup / jp;
    const double b = sb1 * std::sqrt(std::max(0.0, 1.0 - j * j));
    const double bp = sb2 * std::sqrt(std::max(0.0, 1.0 - jp * jp));
    const double sd = std::sin(dm), cdm = std::cos(dm);
    const double sdp = std::sin(dpm), cdpm = std::cos(dpm);
    SectorQuadruple q;
    q.r_phi = b * sd * cdpm + bp * cdm * sdp;
    q.i_phi = beta * sd * sdp * (jp * b - j * bp);
    q.r_fi = cdm * cdpm - (jp * j + bp * b) * sd * sdp;
    q.i_fi = -beta * (jp * sdp * cdm + j * sd * cdpm);
    return q;
}

namespace {

struct GridSpec {
    std::vector<double> jv, tv;
};

GridSpec make_grid(const ScanOptions& o) {
    GridSpec g;
    g.jv.resize(o.nj);
    for (int i = 0; i < o.nj; ++i)
        g.jv[i] = o.j_lo + (o.j_hi - o.j_lo) * (o.nj == 1 ? 0.0 : double(i) / (o.nj - 1));
    g.tv.resize(o.ntau);
    for (int i = 0; i < o.ntau; ++i)
        g.tv[i] = o.tau_lo + (o.tau_hi - o.tau_lo) * (o.ntau == 1 ? 0.0 : double(i) / (o.ntau - 1));
    return g;
}

double residual_norm(const ResidualFn& f, const std::array<double, 3>& x) {
    std::array<double, 4> r{};
    const int n = f(x, r);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(r[i]));
    return m;
}

// Damped Gauss-Newton with finite-difference Jacobian and box projection.
std::pair<std::array<double, 3>, double> refine(const ResidualFn& f, std::array<double, 3> x,
                                                const ScanOptions& o) {
    auto clamp = [&](std::array<double, 3>& v) {
        v[0] = std::clamp(v[0], 0.005, 0.9995);
        v[1] = std::clamp(v[1], 0.005, 0.9995);
        v[2] = std::clamp(v[2], 1e-3, o.tau_hi * 1.2);
    };
    clamp(x);
    std::array<double, 4> r{};
    int nr = f(x, r);
    double best = residual_norm(f, x);
    for (int it = 0; it < o.newton_iters && best > o.tol; ++it) {
        nr = f(x, r);
        double jac[4][3];
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
            auto xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            std::array<double, 4> rp{}, rm{};
            f(xp, rp);
            f(xm, rm);
            for (int i = 0; i < nr; ++i) jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
        }
        // normal equations J^T J dx = -J^T r, with Levenberg fallback
        double a[3][3] = {}, g[3] = {};
        for (int i = 0; i < nr; ++i)
            for (int p = 0; p < 3; ++p) {
                g[p] += jac[i][p] * r[i];
                for (int q = 0; q < 3; ++q) a[p][q] += jac[i][p] * jac[i][q];
            }
        double lm = 0.0;
        std::array<double, 3> dx{};
        for (int attempt = 0; attempt < 3; ++attempt) {
            double m[3][4];
            for (int p = 0; p < 3; ++p) {
                for (int q = 0; q < 3; ++q) m[p][q] = a[p][q] + (p == q ? lm : 0.0);
                m[p][3] = -g[p];
            }
            bool ok = true;
            for (int col = 0; col < 3 && ok; ++col) {
                int piv = col;
                for (int row = col + 1; row < 3; ++row)
                    if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
                if (std::abs(m[piv][col]) < 1e-14) { ok = false; break; }
                std::swap(m[piv], m[col]);
                for (int row = col + 1; row < 3; ++row) {
                    const double fac = m[row][col] / m[col][col];
                    for (int q = col; q < 4; ++q) m[row][q] -= fac * m[col][q];
                }
            }
            if (!ok) {
                lm = lm == 0.0 ? 1e-8 : lm * 100.0;
                continue;
            }
            for (int p = 2; p >= 0; --p) {
                double s = m[p][3];
                for (int q = p + 1; q < 3; ++q) s -= m[p][q] * dx[q];
                dx[p] = s / m[p][p];
            }
            break;
        }
        double lambda = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 12; ++bt) {
            auto xn = x;
            for (int p = 0; p < 3; ++p) xn[p] += lambda * dx[p];
            clamp(xn);
            const double rn = residual_norm(f, xn);
            if (rn < best) {
                x = xn;
                best = rn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    return {x, best};
}

ScanResult pick_winner(const std::vector<std::pair<std::array<double, 3>, double>>& refined,
                       const std::vector<long>& order, double tol) {
    ScanResult res;
    long chosen = -1;
    for (size_t i = 0; i < refined.size(); ++i)
        if (refined[i].second <= tol) { chosen = static_cast<long>(i); break; }
    if (chosen < 0) {
        double best = 1e301;
        for (size_t i = 0; i < refined.size(); ++i)
            if (refined[i].second < best) {
                best = refined[i].second;
                chosen = static_cast<long>(i);
            }
    }
    if (chosen >= 0) {
        res.x = refined[chosen].first;
        res.residual = refined[chosen].second;
        res.best_index = order[chosen];
        res.converged = res.residual <= tol;
    }
    return res;
}

}  // namespace

ScanResult scan_refine_serial(const ResidualFn& f, const ScanOptions& opt) {
    const GridSpec g = make_grid(opt);
    const long total = long(opt.nj) * opt.nj * opt.ntau;
    std::vector<double> coarse(total);
    for (long idx = 0; idx < total; ++idx) {
        const int it = idx % opt.ntau, ijp = (idx / opt.ntau) % opt.nj, ij = idx / (opt.ntau * opt.nj);
        coarse[idx] = residual_norm(f, {g.jv[ij], g.jv[ijp], g.tv[it]});
    }
    std::vector<long> order(total);
    for (long i = 0; i < total; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        return coarse[a] != coarse[b] ? coarse[a] < coarse[b] : a < b;
    });
    const int k = std::min<long>(opt.top_k, total);
    order.resize(k);
    std::vector<std::pair<std::array<double, 3>, double>> refined(k);
    for (int i = 0; i < k; ++i) {
        const long idx = order[i];
        const int it = idx % opt.ntau, ijp = (idx / opt.ntau) % opt.nj, ij = idx / (opt.ntau * opt.nj);
        refined[i] = refine(f, {g.jv[ij], g.jv[ijp], g.tv[it]}, opt);
        if (refined[i].second <= opt.tol) {
            refined.resize(i + 1);
            order.resize(i + 1);
            break;  // same winner the parallel path selects
        }
    }
    return pick_winner(refined, order, opt.tol);
}

ScanResult scan_refine_parallel(const ResidualFn& f, const ScanOptions& opt) {
    const GridSpec g = make_grid(opt);
    const long total = long(opt.nj) * opt.nj * opt.ntau;
    std::vector<double> coarse(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long idx = 0; idx < total; ++idx) {
        const int it = idx % opt.ntau, ijp = (idx / opt.ntau) % opt.nj, ij = idx / (opt.ntau * opt.nj);
        coarse[idx] = residual_norm(f, {g.jv[ij], g.jv[ijp], g.tv[it]});
    }
    std::vector<long> order(total);
    for (long i = 0; i < total; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        return coarse[a] != coarse[b] ? coarse[a] < coarse[b] : a < b;
    });
    const int k = std::min<long>(opt.top_k, total);
    order.resize(k);
    std::vector<std::pair<std::array<double, 3>, double>> refined(k);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < k; ++i) {
        const long idx = order[i];
        const int it = idx % opt.ntau, ijp = (idx / opt.ntau) % opt.nj, ij = idx / (opt.ntau * opt.nj);
        refined[i] = refine(f, {g.jv[ij], g.jv[ijp], g.tv[it]}, opt);
    }
    return pick_winner(refined, order, opt.tol);
}

ScanResult scan_refine(const ResidualFn& f, const ScanOptions& opt) {
    return opt.parallel ? scan_refine_parallel(f, opt) : scan_refine_serial(f, opt);
}

ScanResult solve_sector_triple(const TripleTarget& target, int beta, int big_n_minus,
                               const CouplingRatios& ratios, double sb1, double sb2,
                               const ScanOptions& opt) {
    ResidualFn f = [&, beta, big_n_minus, sb1, sb2](const std::array<double, 3>& x,
                                                    std::array<double, 4>& r) {
        const SectorQuadruple q = sector_quadruple(x[0], x[1], x[2], beta, big_n_minus, ratios, sb1, sb2);
        r[0] = q.r_phi * q.r_phi + q.i_phi * q.i_phi - target.chi2;
        r[1] = (q.r_phi != 0.0 ? std::atan(q.i_phi / q.r_phi) : kPi / 2) - target.atan_xi_phi;
        r[2] = (q.r_fi != 0.0 ? std::atan(q.i_fi / q.r_fi) : kPi / 2) - target.atan_xi_fi;
        return 3;
    };
    return scan_refine(f, opt);
}

TuneOutcome tune_two_pulse_numeric(const SectorTarget& target, const TunerConfig& cfg) {
    TuneOutcome out;
    const SectorDescriptor& desc = sector_for_rows(target.top_row, target.bottom_row);
    const int axis = desc.axis;
    if (axis == 3) {
        out.note = "axis-3 factors are outside the pulse path";
        return out;
    }
    const int alpha = desc.alpha;
    const TwoLevelFactor factor = factor_from_target(target);
    const CouplingRatios& r = cfg.ratios;
    const cd ipow = i_pow_axis(axis);

    for (int nma = 1; nma <= cfg.n_bound; ++nma) {
        const double sgn = parity(nma) == 0 ? 1.0 : -1.0;
        const cd t_w = sgn * std::conj(target.m11);
        const cd t_v = sgn * double(desc.q) * ipow * target.m21;
        const double tau_hi = std::min(cfg.tau_max, r.c * nma * kPi - 1e-3);
        if (tau_hi <= 0.05) continue;

        for (const double sb1 : {+1.0, -1.0})
            for (const double sb2 : {+1.0, -1.0}) {
                ResidualFn f = [&, nma, sb1, sb2](const std::array<double, 3>& x,
                                                  std::array<double, 4>& res) {
                    const SectorQuadruple q =
                        sector_quadruple(x[0], x[1], x[2], desc.beta, nma, r, sb1, sb2);
                    // lower-left entry carries (r_phi, i_phi); diagonal carries
                    // (r_fi, -i_fi) as the conjugate-side combination
                    const cd v(q.r_phi, q.i_phi);
                    const cd w(q.r_fi, -q.i_fi);
                    res[0] = v.real() - t_v.real();
                    res[1] = v.imag() - t_v.imag();
                    res[2] = w.real() - t_w.real();
                    res[3] = w.imag() - t_w.imag();
                    return 4;
                };
                ScanOptions so;
                so.tau_hi = tau_hi;
                so.tau_lo = std::min(0.15, tau_hi / 3.0);
                so.tol = std::min(1e-11, cfg.tol_numeric / 10.0);
                so.parallel = cfg.parallel;
                const ScanResult sr = scan_refine(f, so);
                if (!sr.converged) {
                    out.residual = std::min(out.residual, sr.residual);
                    continue;
                }
                const double j = sr.x[0], jp = sr.x[1], tau = sr.x[2];
                const double taup = -tau * r.c_p / r.c + r.c_p * nma * kPi;
                const double b = sb1 * std::sqrt(std::max(0.0, 1.0 - j * j));
                const double bp = sb2 * std::sqrt(std::max(0.0, 1.0 - jp * jp));
                const double t = tau / (r.c * cfg.j_axis);
                const double tp = taup / (r.c_p * cfg.j_axis_p);
                if (tp <= 0.0) continue;
                const double jt_id = r.c_m * cfg.j_axis;
                const double kappa = (r.c_mp * cfg.j_axis_p) / jt_id;
                int n_id = std::max(
                    1, static_cast<int>(std::ceil(jt_id * (t + kappa * tp) / kPi - 1e-12)));
                if (parity(n_id) != parity(nma)) ++n_id;
                auto built = build_two_pulse(alpha, j, jp, b, bp, tau, taup, n_id, cfg, axis);
                if (!built) continue;
                const std::vector<PulsePrescription> pulses{built->first, built->second};
                const double res = verify_prescription(pulses, factor);
                out.residual = std::min(out.residual, res);
                if (res <= cfg.tol_numeric) {
                    out.ok = true;
                    out.pulses = pulses;
                    out.residual = res;
                    out.qn.big_n_minus = nma;
                    out.qn.n_minus = n_id;
                    out.qn.m_minus = (-alpha * nma - n_id) / 2;
                    out.j_nd = j;
                    out.b_nd = b;
                    out.jp_nd = jp;
                    out.bp_nd = bp;
                    out.tau = tau;
                    out.taup = taup;
                    out.j_id = built->first.j_id;
                    return out;
                }
            }
    }
    if (out.note.empty())
        out.note = "numeric two-pulse search exhausted (n_bound " + std::to_string(cfg.n_bound) +
                   "); nearest residual " + std::to_string(out.residual);
    return out;
}

}  // namespace isingc
