#pragma once

#include <stdexcept>
#include <string>

namespace onticlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonUnitary : public Error {
public:
    using Error::Error;
};

class NonOrthonormalBasis : public Error {
public:
    using Error::Error;
};

class NotOrthonormal : public Error {
public:
    using Error::Error;
};

class Overconstrained : public Error {
public:
    using Error::Error;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

// A quantum probability fell between tol_zero and tol_zero_guard: too close
// to the possibilistic boundary to classify as zero or nonzero.
class AmbiguousZero : public Error {
public:
    using Error::Error;
};

class PreconditionNotApplicable : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConditionViolated : public Error {
public:
    ConditionViolated(int index, double a0_overlap, double cn_overlap, const std::string& msg)
        : Error(msg), n(index), a0_mag(a0_overlap), cn_mag(cn_overlap) {}
    int n;
    double a0_mag;
    double cn_mag;
};

class ConditionNotMet : public Error {
public:
    using Error::Error;
};

// Construction cannot fit in the requested dimension; carries the minimal
// N that would succeed.
class Infeasible : public Error {
public:
    Infeasible(int m_value, int n_value, int minimal_n, const std::string& msg)
        : Error(msg), M(m_value), N(n_value), minimal_feasible_n(minimal_n) {}
    int M;
    int N;
    int minimal_feasible_n;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(long long explored, const std::string& msg)
        : Error(msg), branches_explored(explored) {}
    long long branches_explored;
};

} // namespace onticlab
