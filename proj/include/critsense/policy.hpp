#pragma once

#include <stdexcept>
#include <string>

namespace critsense {

/// Numeric tolerances and size caps shared by every module.
struct NumericPolicy {
    double hermitian_tol = 1e-10;
    double trace_tol = 1e-10;
    double psd_tol = 1e-10;
    double norm_tol = 1e-12;
    double operator_hermitian_tol = 1e-12;
    int dense_cap = 14;
    int sparse_cap = 20;
};

const NumericPolicy& policy();
void set_policy(const NumericPolicy& p);

/// Base error carrying the originating module and operation.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string op, const std::string& what)
        : std::runtime_error(module + "::" + op + ": " + what),
          module_(std::move(module)), op_(std::move(op)) {}
    const std::string& module() const { return module_; }
    const std::string& op() const { return op_; }

private:
    std::string module_;
    std::string op_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace critsense
