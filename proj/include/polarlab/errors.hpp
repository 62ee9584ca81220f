#pragma once

#include <stdexcept>
#include <string>

namespace polarlab {

/// Argument outside the mathematical domain of an operation (zero inverse, ε ≥ 1/2, ...).
class DomainError : public std::domain_error
{
public:
	using std::domain_error::domain_error;
};

/// Shapes or moduli of operands do not fit together.
class DimensionError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

/// An exact enumeration would exceed its configured state budget.
class BudgetExceeded : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// A randomized search gave up; the message carries the best result found.
class SearchFailed : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

} // namespace polarlab
