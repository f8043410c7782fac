#pragma once

#include <stdexcept>
#include <string>

namespace agcm {

// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected inputs or model structure (CLI exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Numeric degeneracy discovered during computation (CLI exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

// Filesystem or serialization failure (CLI exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

class RankDeficient : public ValidationError {
public:
    explicit RankDeficient(const std::string& which)
        : ValidationError("rank-deficient design: " + which), block(which) {}
    std::string block;
};

class NotOrthogonal : public ValidationError {
public:
    NotOrthogonal(int i_, int j_, double max_cross)
        : ValidationError("design blocks " + std::to_string(i_) + " and " + std::to_string(j_) +
                          " are not orthogonal (max |X_i'X_j| entry = " + std::to_string(max_cross) + ")"),
          i(i_), j(j_), max_abs_cross(max_cross) {}
    int i;
    int j;
    double max_abs_cross;
};

class InsufficientResidualDof : public ValidationError {
public:
    InsufficientResidualDof(long r_, long p_)
        : ValidationError("residual degrees of freedom r = " + std::to_string(r_) +
                          " below p = " + std::to_string(p_) +
                          "; the quadratic covariance estimator would be singular"),
          r(r_), p(p_) {}
    long r;
    long p;
};

class MixedTimepoints : public ValidationError {
public:
    MixedTimepoints() : ValidationError("design blocks do not share identical timepoints") {}
};

class DegenerateTimepoints : public ValidationError {
public:
    explicit DegenerateTimepoints(double t)
        : ValidationError("repeated timepoint " + std::to_string(t)), value(t) {}
    double value;
};

class EmptyDesign : public ValidationError {
public:
    EmptyDesign() : ValidationError("empty design: at least one block is required") {}
};

class EmptyGroup : public ValidationError {
public:
    explicit EmptyGroup(const std::string& which)
        : ValidationError("empty group: " + which), label(which) {}
    std::string label;
};

class InvalidCorrelation : public ValidationError {
public:
    explicit InvalidCorrelation(double rho_)
        : ValidationError("serial correlation must lie in [0, 1), got " + std::to_string(rho_)),
          rho(rho_) {}
    double rho;
};

class SizeLimit : public ValidationError {
public:
    SizeLimit(long size, long limit_)
        : ValidationError("vec-form operator size n*p = " + std::to_string(size) +
                          " exceeds the limit " + std::to_string(limit_)),
          requested(size), limit(limit_) {}
    long requested;
    long limit;
};

class MissingValue : public ValidationError {
public:
    MissingValue(long row_, long col_)
        : ValidationError("missing value at data row " + std::to_string(row_) + ", column " +
                          std::to_string(col_)),
          row(row_), col(col_) {}
    long row;
    long col;
};

class NonNumeric : public ValidationError {
public:
    NonNumeric(long row_, long col_, const std::string& text_)
        : ValidationError("non-numeric value \"" + text_ + "\" at data row " + std::to_string(row_) +
                          ", column " + std::to_string(col_)),
          row(row_), col(col_), text(text_) {}
    long row;
    long col;
    std::string text;
};

class UnsortedTimepoints : public ValidationError {
public:
    UnsortedTimepoints() : ValidationError("header timepoints must be strictly increasing") {}
};

class NotPositiveDefinite : public NumericError {
public:
    NotPositiveDefinite(long pivot_, double value_)
        : NumericError("matrix is not positive definite: pivot " + std::to_string(pivot_) +
                       " is " + std::to_string(value_)),
          pivot(pivot_), value(value_) {}
    long pivot;
    double value;
};

class DegenerateCovariance : public NumericError {
public:
    explicit DegenerateCovariance(const std::string& detail)
        : NumericError("degenerate covariance estimate: " + detail) {}
};

class IllConditionedProfile : public NumericError {
public:
    explicit IllConditionedProfile(const std::string& detail)
        : NumericError("Z' Sigma^-1 Z is singular or ill-conditioned: " + detail) {}
};

class NonpositiveRmss : public NumericError {
public:
    explicit NonpositiveRmss(double value_)
        : NumericError("RMSS must be positive for the AIC, got " + std::to_string(value_)),
          value(value_) {}
    double value;
};

class NonsingularityViolated : public NumericError {
public:
    explicit NonsingularityViolated(const std::string& which)
        : NumericError("standardizer is singular: " + which), standardizer(which) {}
    std::string standardizer;
};

class ExperimentUnstable : public NumericError {
public:
    ExperimentUnstable(long failures_, long total_)
        : NumericError("Monte Carlo experiment unstable: " + std::to_string(failures_) + " of " +
                       std::to_string(total_) + " replications failed"),
          failures(failures_), total(total_) {}
    long failures;
    long total;
};

}  // namespace agcm
