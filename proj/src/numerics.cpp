#include "onticlab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace onticlab {

CVector CVector::basis(int dim, int k) {
    if (k < 0 || k >= dim) throw OutOfRange("basis index out of range");
    CVector v(dim);
    v[k] = Complex{1.0, 0.0};
    return v;
}

double CVector::norm_sq() const {
    double s = 0.0;
    for (const auto& x : entries_) s += std::norm(x);
    return s;
}

double CVector::norm() const { return std::sqrt(norm_sq()); }

bool CVector::is_normalized(double tol_norm) const {
    return std::abs(norm_sq() - 1.0) <= tol_norm;
}

CVector CVector::operator+(const CVector& o) const {
    if (dim() != o.dim()) throw DimensionMismatch("vector addition: dimensions differ");
    CVector r(dim());
    for (int i = 0; i < dim(); ++i) r[i] = (*this)[i] + o[i];
    return r;
}

CVector CVector::operator-(const CVector& o) const {
    if (dim() != o.dim()) throw DimensionMismatch("vector subtraction: dimensions differ");
    CVector r(dim());
    for (int i = 0; i < dim(); ++i) r[i] = (*this)[i] - o[i];
    return r;
}

CVector CVector::operator*(Complex s) const {
    CVector r(dim());
    for (int i = 0; i < dim(); ++i) r[i] = (*this)[i] * s;
    return r;
}

Complex inner(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner product: dimensions differ");
    Complex s{0.0, 0.0};
    for (int i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double max_abs_diff(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff: dimensions differ");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool equal_up_to_global_phase(const CVector& a, const CVector& b, double tol) {
    if (a.dim() != b.dim()) return false;
    Complex z = inner(a, b);
    // For unit vectors |z| ~ 1 when they agree up to phase; anything well
    // below 1 fails the entrywise comparison anyway.
    Complex phase = std::abs(z) > 1e-12 ? z / std::abs(z) : Complex{1.0, 0.0};
    for (int i = 0; i < a.dim(); ++i) {
        if (std::abs(b[i] - phase * a[i]) > tol) return false;
    }
    return true;
}

CVector tensor(const CVector& a, const CVector& b) {
    CVector r(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) r[i * b.dim() + j] = a[i] * b[j];
    return r;
}

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Complex{1.0, 0.0};
    return m;
}

CMatrix CMatrix::from_columns(const std::vector<CVector>& cols) {
    if (cols.empty()) throw DimensionMismatch("from_columns: no columns");
    int rows = cols[0].dim();
    CMatrix m(rows, static_cast<int>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].dim() != rows) throw DimensionMismatch("from_columns: ragged columns");
        for (int r = 0; r < rows; ++r) m(r, static_cast<int>(c)) = cols[c][r];
    }
    return m;
}

CMatrix CMatrix::tensor(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return m;
}

CVector CMatrix::column(int c) const {
    CVector v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

CMatrix CMatrix::operator*(const CMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
    CMatrix m(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int k = 0; k < cols_; ++k) {
            Complex a = (*this)(r, k);
            if (a == Complex{0.0, 0.0}) continue;
            for (int c = 0; c < o.cols_; ++c) m(r, c) += a * o(k, c);
        }
    }
    return m;
}

CVector CMatrix::operator*(const CVector& v) const {
    if (cols_ != v.dim()) throw DimensionMismatch("matrix-vector product: dimensions differ");
    CVector r(rows_);
    for (int i = 0; i < rows_; ++i) {
        Complex s{0.0, 0.0};
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double CMatrix::unitarity_defect() const {
    if (rows_ != cols_) return 1.0;
    CMatrix g = adjoint() * (*this);
    double m = 0.0;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
            Complex expect = (r == c) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            m = std::max(m, std::abs(g(r, c) - expect));
        }
    return m;
}

bool CMatrix::is_unitary(double tol_unitary) const {
    return rows_ == cols_ && unitarity_defect() <= tol_unitary;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("max_abs_diff: shapes differ");
    double m = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

std::vector<double> born_probabilities(const CVector& state, const std::vector<CVector>& basis,
                                       const Tolerances& tol) {
    int d = state.dim();
    if (static_cast<int>(basis.size()) != d)
        throw DimensionMismatch("born_probabilities: basis incomplete for dimension");
    for (const auto& b : basis)
        if (b.dim() != d) throw DimensionMismatch("born_probabilities: basis vector dimension");
    if (!state.is_normalized(tol.norm))
        throw Error("born_probabilities: state not normalized");
    // Gram check against the identity.
    for (size_t i = 0; i < basis.size(); ++i) {
        for (size_t j = i; j < basis.size(); ++j) {
            Complex g = inner(basis[i], basis[j]);
            Complex expect = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            if (std::abs(g - expect) > tol.unitary)
                throw NonOrthonormalBasis("born_probabilities: basis not orthonormal");
        }
    }
    std::vector<double> probs;
    probs.reserve(basis.size());
    for (const auto& b : basis) {
        double p = std::norm(inner(b, state));
        probs.push_back(std::clamp(p, 0.0, 1.0));
    }
    return probs;
}

CVector apply_unitary(const CMatrix& u, const CVector& v, const Tolerances& tol) {
    if (u.cols() != v.dim()) throw DimensionMismatch("apply_unitary: dimensions differ");
    if (!u.is_unitary(tol.unitary)) throw NonUnitary("apply_unitary: matrix not unitary");
    return u * v;
}

CMatrix complete_to_unitary(int dim, const std::vector<std::pair<int, CVector>>& fixed_columns,
                            const Tolerances& tol) {
    if (static_cast<int>(fixed_columns.size()) > dim)
        throw Overconstrained("complete_to_unitary: more fixed columns than dimension");
    std::vector<bool> used(static_cast<size_t>(dim), false);
    std::vector<CVector> cols(static_cast<size_t>(dim));
    for (const auto& [idx, v] : fixed_columns) {
        if (idx < 0 || idx >= dim) throw DimensionMismatch("complete_to_unitary: column index out of range");
        if (v.dim() != dim) throw DimensionMismatch("complete_to_unitary: column dimension");
        if (used[static_cast<size_t>(idx)])
            throw Overconstrained("complete_to_unitary: duplicate column index");
        used[static_cast<size_t>(idx)] = true;
        cols[static_cast<size_t>(idx)] = v;
    }
    // Mutual orthonormality of the supplied columns.
    for (size_t i = 0; i < fixed_columns.size(); ++i) {
        for (size_t j = i; j < fixed_columns.size(); ++j) {
            Complex g = inner(fixed_columns[i].second, fixed_columns[j].second);
            Complex expect = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            if (std::abs(g - expect) > tol.unitary)
                throw NotOrthonormal("complete_to_unitary: fixed columns not orthonormal");
        }
    }

    std::vector<const CVector*> placed;
    placed.reserve(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i)
        if (used[static_cast<size_t>(i)]) placed.push_back(&cols[static_cast<size_t>(i)]);

    constexpr double kSkipThreshold = 1e-8;
    int candidate = 0;
    for (int slot = 0; slot < dim; ++slot) {
        if (used[static_cast<size_t>(slot)]) continue;
        CVector col;
        for (; candidate < dim; ++candidate) {
            CVector r = CVector::basis(dim, candidate);
            for (const CVector* p : placed) r = r - (*p) * inner(*p, r);
            if (r.norm() < kSkipThreshold) continue;
            // second pass tightens orthogonality well below tol.unitary
            for (const CVector* p : placed) r = r - (*p) * inner(*p, r);
            col = r * Complex{1.0 / r.norm(), 0.0};
            ++candidate;
            break;
        }
        if (col.dim() == 0)
            throw Error("complete_to_unitary: ran out of completion candidates");
        cols[static_cast<size_t>(slot)] = col;
        used[static_cast<size_t>(slot)] = true;
        placed.push_back(&cols[static_cast<size_t>(slot)]);
    }
    return CMatrix::from_columns(cols);
}

} // namespace onticlab
