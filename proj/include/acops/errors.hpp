#ifndef ACOPS_ERRORS_HPP
#define ACOPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace acops {

/// Raised when a numeric routine cannot produce a finite, converged result.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what)
{
    if (!ok)
        throw std::domain_error(what);
}

inline void require_positive(double v, const char* name)
{
    if (!(v > 0.0))
        throw std::domain_error(std::string(name) + " must be strictly positive");
}

inline void require_non_negative(double v, const char* name)
{
    if (!(v >= 0.0))
        throw std::domain_error(std::string(name) + " must be non-negative");
}

} // namespace detail
} // namespace acops

#endif
