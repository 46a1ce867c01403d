#pragma once

#include <map>
#include <utility>
#include <vector>

#include "isingc/complex_matrix.hpp"

namespace isingc {

enum class Subgroup { S1, S2, S3 };

const char* subgroup_name(Subgroup s);

/// Two-level factor produced while eliminating entry (bottom_row, col):
/// identity everywhere except a 2x2 unitary block on (top_row, bottom_row).
struct TwoLevelFactor {
    int top_row = 0, bottom_row = 0;  // 1-based, bottom_row = top_row + 1
    int col = 0;                      // eliminated column, for labeling
    Matrix sector;                    // the eliminating 2x2 block
    cd mu{1.0, 0.0};                  // determinant of the sector
    Subgroup subgroup = Subgroup::S1;
};

struct EliminationResult {
    std::vector<TwoLevelFactor> factors;               // elimination order
    Matrix final_working;                              // ~ identity
    std::map<std::pair<int, int>, cd> u_values;        // (row, col) -> u at that step
};

/// The 2x2 block that maps (a_above, u_below) to (u_new, 0) on the target rows:
///   [[conj(a)/u_new, conj(u)/u_new], [-mu*u/u_new, mu*a/u_new]].
Matrix elimination_sector(cd a_above, cd u_below, double u_new, cd mu);

/// Column-major bottom-up elimination of a special unitary matrix into
/// two-level factors. Entries already below skip_rel * ||U||_inf are skipped.
/// Rejects inputs whose unitarity residual exceeds unitary_tol or whose
/// determinant strays from 1 by more than det_tol.
EliminationResult factorize(const Matrix& u, double unitary_tol = 1e-10, double det_tol = 1e-8,
                            double skip_rel = 1e-12);

Matrix embed_factor(const TwoLevelFactor& f, int dim);

/// Forward product of the daggered embedded factors; reproduces the input of
/// factorize up to round-off.
Matrix reconstruct(const std::vector<TwoLevelFactor>& factors, int dim);

/// Subgroup of a 4x4 two-level factor by its row pair.
Subgroup classify_rows(int top_row, int bottom_row);

}  // namespace isingc
