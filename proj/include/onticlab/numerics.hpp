#pragma once

#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include "onticlab/errors.hpp"
#include "onticlab/tolerances.hpp"

namespace onticlab {

using Complex = std::complex<double>;

// Dense complex column vector. Immutable by convention after construction;
// every operation below returns a fresh value.
class CVector {
public:
    CVector() = default;
    explicit CVector(int dim) : entries_(static_cast<size_t>(dim)) {}
    CVector(std::initializer_list<Complex> xs) : entries_(xs) {}
    explicit CVector(std::vector<Complex> xs) : entries_(std::move(xs)) {}

    static CVector basis(int dim, int k);

    int dim() const { return static_cast<int>(entries_.size()); }
    Complex& operator[](int i) { return entries_[static_cast<size_t>(i)]; }
    const Complex& operator[](int i) const { return entries_[static_cast<size_t>(i)]; }
    const std::vector<Complex>& entries() const { return entries_; }

    double norm_sq() const;
    double norm() const;
    bool is_normalized(double tol_norm = default_tolerances().norm) const;

    CVector operator+(const CVector& o) const;
    CVector operator-(const CVector& o) const;
    CVector operator*(Complex s) const;

    bool operator==(const CVector& o) const { return entries_ == o.entries_; }

private:
    std::vector<Complex> entries_;
};

// <a|b>, conjugate-linear in the first argument.
Complex inner(const CVector& a, const CVector& b);

// Largest per-entry |a_i - b_i|.
double max_abs_diff(const CVector& a, const CVector& b);

// True when b = e^{i theta} a for some phase, entrywise within tol.
bool equal_up_to_global_phase(const CVector& a, const CVector& b, double tol);

// Tensor product; index (i,j) of the result maps to i*b.dim()+j.
CVector tensor(const CVector& a, const CVector& b);

// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * static_cast<size_t>(cols)) {}

    static CMatrix identity(int n);
    static CMatrix from_columns(const std::vector<CVector>& cols);
    static CMatrix tensor(const CMatrix& a, const CMatrix& b);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int r, int c) { return data_[index(r, c)]; }
    const Complex& operator()(int r, int c) const { return data_[index(r, c)]; }

    CVector column(int c) const;
    CMatrix adjoint() const;
    CMatrix operator*(const CMatrix& o) const;
    CVector operator*(const CVector& v) const;

    // max |(U†U - I)_ij|
    double unitarity_defect() const;
    bool is_unitary(double tol_unitary = default_tolerances().unitary) const;

    bool operator==(const CMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    size_t index(int r, int c) const {
        return static_cast<size_t>(r) * static_cast<size_t>(cols_) + static_cast<size_t>(c);
    }
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

double max_abs_diff(const CMatrix& a, const CMatrix& b);

// Born-rule probabilities of `state` in an orthonormal, complete basis.
// Entries are clamped into [0, 1]; pre-clamp values stay within
// [-tol.norm, 1+tol.norm] for valid inputs.
std::vector<double> born_probabilities(const CVector& state, const std::vector<CVector>& basis,
                                       const Tolerances& tol = default_tolerances());

// Uv with dimension and unitarity checks.
CVector apply_unitary(const CMatrix& u, const CVector& v,
                      const Tolerances& tol = default_tolerances());

// Builds a unitary whose column at each given index equals the given vector,
// exactly as supplied. Free columns come from a canonical deterministic
// completion: standard basis candidates in ascending index order,
// Gram-Schmidt against all placed columns (with one re-orthogonalization
// pass), candidates with residual norm below 1e-8 skipped.
CMatrix complete_to_unitary(int dim, const std::vector<std::pair<int, CVector>>& fixed_columns,
                            const Tolerances& tol = default_tolerances());

} // namespace onticlab
