#include "isingc/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace isingc {

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("multiply: dimension mismatch " + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()));
    const int n = a.dim();
    Matrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cd aik = a(i, k);
            if (aik == cd{}) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix adjoint(const Matrix& a) {
    const int n = a.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = std::conj(a(j, i));
    return r;
}

Matrix transpose(const Matrix& a) {
    const int n = a.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = a(j, i);
    return r;
}

Matrix negate(const Matrix& a) {
    const int n = a.dim();
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = -a(i, j);
    return r;
}

cd determinant(const Matrix& a) {
    // LU with partial pivoting; dimensions are tiny.
    const int n = a.dim();
    Matrix w = a;
    cd det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
        if (std::abs(w(piv, col)) == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(w(piv, j), w(col, j));
            det = -det;
        }
        det *= w(col, col);
        for (int r = col + 1; r < n; ++r) {
            const cd f = w(r, col) / w(col, col);
            for (int j = col; j < n; ++j) w(r, j) -= f * w(col, j);
        }
    }
    return det;
}

double max_norm(const Matrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double max_norm_diff(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_norm_diff: dimension mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

double unitarity_residual(const Matrix& a) {
    return max_norm_diff(multiply(adjoint(a), a), Matrix::identity(a.dim()));
}

void eigh(const Matrix& h, std::vector<double>& values, Matrix& vectors) {
    const int n = h.dim();
    Matrix a = h;
    Matrix v = Matrix::identity(n);

    auto off = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += std::norm(a(p, q));
        return s;
    };

    for (int sweep = 0; sweep < 100 && off() > 1e-30; ++sweep) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const cd apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                const cd phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // rotation angle zeroing the (p,q) entry
                double c, s;
                const double diff = app - aqq;
                if (std::abs(diff) < 1e-300) {
                    c = s = std::sqrt(0.5);
                } else {
                    const double tau = diff / (2.0 * mag);
                    const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    c = 1.0 / std::sqrt(1.0 + t * t);
                    s = t * c;
                }
                const cd sp = s * phase;
                // A <- J^dagger A J with J = [[c, -sp],[conj(sp), ... ]] acting on (p,q)
                for (int k = 0; k < n; ++k) {
                    const cd akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + std::conj(sp) * akq;
                    a(k, q) = -sp * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cd apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + sp * aqk;
                    a(q, k) = -std::conj(sp) * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const cd vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + std::conj(sp) * vkq;
                    v(k, q) = -sp * vkp + c * vkq;
                }
            }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
    values.resize(n);
    vectors = Matrix(n);
    for (int c = 0; c < n; ++c) {
        values[c] = a(order[c], order[c]).real();
        for (int r = 0; r < n; ++r) vectors(r, c) = v(r, order[c]);
    }
}

Matrix expm_hermitian(const Matrix& h, double t) {
    const int n = h.dim();
    double herm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) herm = std::max(herm, std::abs(h(i, j) - std::conj(h(j, i))));
    if (herm > 1e-12)
        throw std::invalid_argument("expm_hermitian: input not Hermitian (residual " +
                                    std::to_string(herm) + ")");
    std::vector<double> w;
    Matrix v;
    eigh(h, w, v);
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cd sum = 0.0;
            for (int k = 0; k < n; ++k)
                sum += v(i, k) * std::polar(1.0, -w[k] * t) * std::conj(v(j, k));
            r(i, j) = sum;
        }
    return r;
}

const BellBasisConvention& BellBasisConvention::standard() {
    static const BellBasisConvention conv = [] {
        const double s = 1.0 / std::sqrt(2.0);
        BellBasisConvention c;
        c.change_of_basis = Matrix(4);
        Matrix& q = c.change_of_basis;
        q(0, 0) = s;  q(3, 0) = s;   // (|00>+|11>)
        q(1, 1) = s;  q(2, 1) = s;   // (|01>+|10>)
        q(0, 2) = s;  q(3, 2) = -s;  // (|00>-|11>)
        q(1, 3) = s;  q(2, 3) = -s;  // (|01>-|10>)
        return c;
    }();
    return conv;
}

Matrix to_bell_basis(const Matrix& m, const BellBasisConvention& conv) {
    if (m.dim() != 4) throw std::invalid_argument("to_bell_basis: expected dim 4");
    return multiply(adjoint(conv.change_of_basis), multiply(m, conv.change_of_basis));
}

Matrix from_bell_basis(const Matrix& m, const BellBasisConvention& conv) {
    if (m.dim() != 4) throw std::invalid_argument("from_bell_basis: expected dim 4");
    return multiply(conv.change_of_basis, multiply(m, adjoint(conv.change_of_basis)));
}

Matrix random_special_unitary(std::uint64_t seed, int dim) {
    if (dim < 2) throw std::invalid_argument("random_special_unitary: dim must be >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cd(gauss(rng), gauss(rng));

    // Modified Gram-Schmidt on columns, with one re-orthogonalization pass.
    Matrix q(dim);
    for (int c = 0; c < dim; ++c) {
        std::vector<cd> col(dim);
        for (int r = 0; r < dim; ++r) col[r] = a(r, c);
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p < c; ++p) {
                cd dot = 0.0;
                for (int r = 0; r < dim; ++r) dot += std::conj(q(r, p)) * col[r];
                for (int r = 0; r < dim; ++r) col[r] -= dot * q(r, p);
            }
        cd diag = 0.0;  // phase of the would-be R diagonal
        double nrm = 0.0;
        for (int r = 0; r < dim; ++r) nrm += std::norm(col[r]);
        nrm = std::sqrt(nrm);
        for (int r = 0; r < dim; ++r) col[r] /= nrm;
        // normalize so the first significant entry's Gaussian phase is kept Haar-like:
        // multiply column by conj(phase(R_cc)) where R_cc = q_c^dagger a_c
        for (int r = 0; r < dim; ++r) diag += std::conj(col[r]) * a(r, c);
        const cd ph = diag / std::abs(diag);
        for (int r = 0; r < dim; ++r) q(r, c) = col[r] * ph;
    }

    const cd det = determinant(q);
    for (int r = 0; r < dim; ++r) q(r, dim - 1) *= std::conj(det) / std::abs(det);
    return q;
}

std::string format_matrix(const Matrix& m, int precision) {
    std::ostringstream os;
    os.precision(precision);
    os << std::fixed;
    for (int i = 0; i < m.dim(); ++i) {
        os << (i == 0 ? "[" : " ");
        for (int j = 0; j < m.dim(); ++j) {
            const cd z = m(i, j);
            os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
            if (j + 1 < m.dim()) os << " ";
        }
        os << (i + 1 == m.dim() ? "]" : "\n");
    }
    return os.str();
}

}  // namespace isingc
