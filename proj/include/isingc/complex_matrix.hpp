#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isingc {

using cd = std::complex<double>;

/// Dense square complex matrix. Dimensions here are tiny (2 or 4), so the
/// representation is a flat row-major vector with no blocking or sparsity.
class Matrix {
public:
    Matrix() : dim_(0) {}
    explicit Matrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cd& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const cd& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    bool operator==(const Matrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

private:
    int dim_;
    std::vector<cd> a_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix adjoint(const Matrix& a);
Matrix transpose(const Matrix& a);
Matrix negate(const Matrix& a);
cd determinant(const Matrix& a);

double max_norm(const Matrix& a);
double max_norm_diff(const Matrix& a, const Matrix& b);
/// ||A^dagger A - I||_inf
double unitarity_residual(const Matrix& a);

/// Complex Jacobi eigensolver for Hermitian matrices. Eigenvalues ascending;
/// columns of `vectors` are the corresponding eigenvectors.
void eigh(const Matrix& h, std::vector<double>& values, Matrix& vectors);

/// exp(-i H t) by real-eigenvalue eigendecomposition.
/// Throws std::invalid_argument if H is not Hermitian within 1e-12.
Matrix expm_hermitian(const Matrix& h, double t);

/// Change of basis from the computational basis to the ordered entangled-pair
/// basis used throughout: columns are (|00>+|11>), (|01>+|10>), (|00>-|11>),
/// (|01>-|10>), each normalized. Frozen by the closed-form equivalence tests.
struct BellBasisConvention {
    Matrix change_of_basis;
    static const BellBasisConvention& standard();
};

Matrix to_bell_basis(const Matrix& m, const BellBasisConvention& conv = BellBasisConvention::standard());
Matrix from_bell_basis(const Matrix& m, const BellBasisConvention& conv = BellBasisConvention::standard());

/// Deterministic Haar-style special unitary: QR of a seeded complex Gaussian
/// matrix, column phases normalized, determinant rescaled to exactly 1.
Matrix random_special_unitary(std::uint64_t seed, int dim);

std::string format_matrix(const Matrix& m, int precision = 4);

}  // namespace isingc
