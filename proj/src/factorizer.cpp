#include "isingc/factorizer.hpp"

#include <cmath>

namespace isingc {

const char* subgroup_name(Subgroup s) {
    switch (s) {
        case Subgroup::S1: return "S1";
        case Subgroup::S2: return "S2";
        case Subgroup::S3: return "S3";
    }
    return "?";
}

Matrix elimination_sector(cd a_above, cd u_below, double u_new, cd mu) {
    if (u_new <= 0.0) throw std::invalid_argument("elimination_sector: u_new must be positive");
    Matrix s(2);
    s(0, 0) = std::conj(a_above) / u_new;
    s(0, 1) = std::conj(u_below) / u_new;
    s(1, 0) = -mu * u_below / u_new;
    s(1, 1) = mu * a_above / u_new;
    return s;
}

Subgroup classify_rows(int top_row, int bottom_row) {
    const int a = top_row, b = bottom_row;
    if ((a == 1 && b == 2) || (a == 3 && b == 4)) return Subgroup::S1;
    if ((a == 2 && b == 3) || (a == 1 && b == 4)) return Subgroup::S2;
    if ((a == 1 && b == 3) || (a == 2 && b == 4)) return Subgroup::S3;
    throw std::invalid_argument("classify_rows: not a valid row pair");
}

EliminationResult factorize(const Matrix& u, double unitary_tol, double det_tol, double skip_rel) {
    const int n = u.dim();
    if (n < 2) throw std::invalid_argument("factorize: dim must be >= 2");
    const double ures = unitarity_residual(u);
    if (ures > unitary_tol)
        throw std::invalid_argument("factorize: input not unitary (residual " + std::to_string(ures) + ")");
    const cd det = determinant(u);
    if (std::abs(det - cd(1.0)) > det_tol)
        throw std::invalid_argument("factorize: input not special unitary (|det-1| = " +
                                    std::to_string(std::abs(det - cd(1.0))) + ")");

    EliminationResult res;
    Matrix w = u;
    const double skip_tol = skip_rel * std::max(1.0, max_norm(u));

    for (int col = 1; col < n; ++col) {
        for (int row = n; row > col; --row) {
            const cd below = w(row - 1, col - 1);
            const cd above = w(row - 2, col - 1);
            res.u_values[{row, col}] = below;
            if (std::abs(below) <= skip_tol) continue;  // factor is the identity
            const double unew = std::hypot(std::abs(above), std::abs(below));
            TwoLevelFactor f;
            f.top_row = row - 1;
            f.bottom_row = row;
            f.col = col;
            f.mu = cd(1.0, 0.0);
            f.sector = elimination_sector(above, below, unew, f.mu);
            if (n == 4) f.subgroup = classify_rows(f.top_row, f.bottom_row);
            // apply to the two working rows
            for (int j = 0; j < n; ++j) {
                const cd top = w(row - 2, j), bot = w(row - 1, j);
                w(row - 2, j) = f.sector(0, 0) * top + f.sector(0, 1) * bot;
                w(row - 1, j) = f.sector(1, 0) * top + f.sector(1, 1) * bot;
            }
            w(row - 1, col - 1) = 0.0;  // exact by construction
            res.factors.push_back(std::move(f));
        }
        res.u_values[{col, col}] = w(col - 1, col - 1);
    }
    res.final_working = std::move(w);
    return res;
}

Matrix embed_factor(const TwoLevelFactor& f, int dim) {
    Matrix m = Matrix::identity(dim);
    const int k = f.top_row - 1, l = f.bottom_row - 1;
    m(k, k) = f.sector(0, 0);
    m(k, l) = f.sector(0, 1);
    m(l, k) = f.sector(1, 0);
    m(l, l) = f.sector(1, 1);
    return m;
}

Matrix reconstruct(const std::vector<TwoLevelFactor>& factors, int dim) {
    Matrix p = Matrix::identity(dim);
    for (const auto& f : factors) p = multiply(p, adjoint(embed_factor(f, dim)));
    return p;
}

}  // namespace isingc
