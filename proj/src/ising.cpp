#include "isingc/ising.hpp"

#include <cmath>

namespace isingc {

namespace {

// cyclic transverse pair for each axis: 1 -> (2,3), 2 -> (3,1), 3 -> (1,2)
void transverse_axes(int axis, int& i, int& j) {
    switch (axis) {
        case 1: i = 2; j = 3; return;
        case 2: i = 3; j = 1; return;
        case 3: i = 1; j = 2; return;
        default: throw std::invalid_argument("axis must be 1, 2 or 3");
    }
}

constexpr cd kPauliX[2][2] = {{{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}};
constexpr cd kPauliY[2][2] = {{{0, 0}, {0, -1}}, {{0, 1}, {0, 0}}};
constexpr cd kPauliZ[2][2] = {{{1, 0}, {0, 0}}, {{0, 0}, {-1, 0}}};

const cd (*pauli(int k))[2] {
    return k == 1 ? kPauliX : k == 2 ? kPauliY : kPauliZ;
}

// i^axis and conj(i)^axis
cd i_pow(int axis) { return axis == 1 ? cd(0, 1) : axis == 2 ? cd(-1, 0) : cd(0, -1); }
cd i_conj_pow(int axis) { return std::conj(i_pow(axis)); }

// Sign constants per (axis, ordinal), frozen by the oracle-equivalence tests.
const SectorDescriptor kSectors[6] = {
    {1, 1, 1, 2, -1, -1, -1},
    {1, 2, 3, 4, +1, +1, +1},
    {2, 1, 1, 4, +1, +1, -1},
    {2, 2, 2, 3, -1, -1, -1},
    {3, 1, 1, 3, -1, +1, +1},
    {3, 2, 2, 4, +1, +1, +1},
};

}  // namespace

double IsingCouplings::transverse_sum(int axis) const {
    int i, j;
    transverse_axes(axis, i, j);
    return along(i) + along(j);
}

double IsingCouplings::transverse_diff(int axis) const {
    int i, j;
    transverse_axes(axis, i, j);
    return along(i) - along(j);
}

DerivedParams derive_params(const IsingCouplings& c, const FieldPair& f, int axis) {
    DerivedParams d;
    d.field_sum = f.sum();
    d.field_diff = f.diff();
    d.trans_sum = c.transverse_sum(axis);
    d.trans_diff = c.transverse_diff(axis);
    d.r_plus = std::hypot(d.field_sum, d.trans_diff);
    d.r_minus = std::hypot(d.field_diff, d.trans_sum);
    if (d.r_plus > 0.0) {
        d.b_plus = d.field_sum / d.r_plus;
        d.j_plus = d.trans_diff / d.r_plus;
    } else {
        d.degenerate_plus = true;  // b = j = 0: continuous limit of the block
    }
    if (d.r_minus > 0.0) {
        d.b_minus = d.field_diff / d.r_minus;
        d.j_minus = d.trans_sum / d.r_minus;
    } else {
        d.degenerate_minus = true;
    }
    return d;
}

const SectorDescriptor& sector_descriptor(int axis, int ordinal) {
    for (const auto& s : kSectors)
        if (s.axis == axis && s.ordinal == ordinal) return s;
    throw std::invalid_argument("sector_descriptor: bad axis/ordinal");
}

const SectorDescriptor& sector_for_rows(int top_row, int bottom_row) {
    for (const auto& s : kSectors)
        if (s.row_k == top_row && s.row_l == bottom_row) return s;
    throw std::invalid_argument("sector_for_rows: no sector on rows " + std::to_string(top_row) +
                                "," + std::to_string(bottom_row));
}

const SectorDescriptor& sector_with_alpha(int axis, int alpha) {
    for (const auto& s : kSectors)
        if (s.axis == axis && s.alpha == alpha) return s;
    throw std::invalid_argument("sector_with_alpha: bad axis/alpha");
}

Matrix hamiltonian_matrix(const IsingCouplings& c, const FieldPair& f, int axis) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("hamiltonian_matrix: axis must be 1, 2 or 3");
    Matrix h(4);
    const double js[3] = {c.j1, c.j2, c.j3};
    for (int k = 1; k <= 3; ++k) {
        const auto p = pauli(k);
        for (int r1 = 0; r1 < 2; ++r1)
            for (int c1 = 0; c1 < 2; ++c1)
                for (int r2 = 0; r2 < 2; ++r2)
                    for (int c2 = 0; c2 < 2; ++c2)
                        h(2 * r1 + r2, 2 * c1 + c2) -= js[k - 1] * p[r1][c1] * p[r2][c2];
    }
    const auto p = pauli(axis);
    for (int r = 0; r < 2; ++r)
        for (int cc = 0; cc < 2; ++cc) {
            // field on spin 1: p (x) I ; on spin 2: I (x) p
            h(2 * r + 0, 2 * cc + 0) += f.b1 * p[r][cc];
            h(2 * r + 1, 2 * cc + 1) += f.b1 * p[r][cc];
            h(0 * 2 + r, 0 * 2 + cc) += f.b2 * p[r][cc];
            h(1 * 2 + r, 1 * 2 + cc) += f.b2 * p[r][cc];
        }
    return h;
}

std::array<double, 4> closed_form_eigenvalues(const IsingCouplings& c, const FieldPair& f, int axis) {
    const DerivedParams d = derive_params(c, f, axis);
    const double jh = c.along(axis);
    std::array<double, 4> e = {
        -jh - d.r_plus, -jh + d.r_plus,   // mu = -1 pairs with r_plus
        +jh - d.r_minus, +jh + d.r_minus  // mu = +1 pairs with r_minus
    };
    std::sort(e.begin(), e.end());
    return e;
}

Matrix evolution_operator(const IsingCouplings& c, const FieldPair& f, int axis, double t) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("evolution_operator: axis must be 1, 2 or 3");
    const DerivedParams d = derive_params(c, f, axis);
    const double jh = c.along(axis);
    Matrix u(4);
    for (int ord = 1; ord <= 2; ++ord) {
        const SectorDescriptor& s = sector_descriptor(axis, ord);
        double r, b, j;
        if (s.alpha == +1) {
            r = d.r_minus; b = d.b_minus; j = d.j_minus;
        } else {
            r = d.r_plus; b = d.b_plus; j = d.j_plus;
        }
        const double dp = s.alpha * jh * t;  // phase sum angle
        const double dm = r * t;             // rotation angle
        const cd e = cd(std::cos(dm), s.beta * j * std::sin(dm));
        const double dd = b * std::sin(dm);
        const cd pf = std::polar(1.0, dp);
        const int k = s.row_k - 1, l = s.row_l - 1;
        u(k, k) = pf * std::conj(e);
        u(k, l) = pf * (-static_cast<double>(s.q)) * i_pow(axis) * dd;
        u(l, k) = pf * static_cast<double>(s.q) * i_conj_pow(axis) * dd;
        u(l, l) = pf * e;
    }
    return u;
}

bool matches_sector_pattern(const Matrix& u, int axis, double tol) {
    if (u.dim() != 4) return false;
    Matrix mask(4);
    for (int ord = 1; ord <= 2; ++ord) {
        const SectorDescriptor& s = sector_descriptor(axis, ord);
        mask(s.row_k - 1, s.row_k - 1) = 1.0;
        mask(s.row_k - 1, s.row_l - 1) = 1.0;
        mask(s.row_l - 1, s.row_k - 1) = 1.0;
        mask(s.row_l - 1, s.row_l - 1) = 1.0;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (mask(i, j) == cd{} && std::abs(u(i, j)) > tol) return false;
    return true;
}

Matrix sector_of(const Matrix& u, const SectorDescriptor& d, double pattern_tol) {
    if (!matches_sector_pattern(u, d.axis, pattern_tol))
        throw std::invalid_argument("sector_of: matrix violates the axis-" + std::to_string(d.axis) +
                                    " zero pattern");
    Matrix s(2);
    s(0, 0) = u(d.row_k - 1, d.row_k - 1);
    s(0, 1) = u(d.row_k - 1, d.row_l - 1);
    s(1, 0) = u(d.row_l - 1, d.row_k - 1);
    s(1, 1) = u(d.row_l - 1, d.row_l - 1);
    return s;
}

IdentitySectorParams identity_sector_params(double j_axis, double j_transverse, int m, int n, int a) {
    if (a != 1 && a != -1) throw std::invalid_argument("identity_sector_params: a must be +-1");
    const int tw = 2 * m + n;
    if (tw == 0 || n == 0) throw std::domain_error("identity_sector_params: 2m+n and n must be nonzero");
    IdentitySectorParams p;
    p.t = tw * M_PI / (a * j_axis);
    if (p.t <= 0.0) throw std::domain_error("identity_sector_params: invalid quantum numbers (t <= 0)");
    p.r = std::abs(j_axis * n / static_cast<double>(tw));
    const double rad = p.r * p.r - j_transverse * j_transverse;
    if (rad < 0.0)
        throw std::domain_error("identity_sector_params: no real field for these (m, n)");
    p.field = std::sqrt(rad);
    return p;
}

}  // namespace isingc
