#pragma once

#include <stdexcept>
#include <string>

namespace twocars {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside an operation's mathematical domain.
struct DomainError : Error { using Error::Error; };
struct NoSignChange : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };
// Parameter outside a barrier piece's valid part; message names the bound.
struct OutOfDomain : Error { using Error::Error; };
struct RegimeMismatch : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct OutOfChart : Error { using Error::Error; };
struct InsideCapture : Error { using Error::Error; };
struct NotOnBarrier : Error { using Error::Error; };
struct PolicyRange : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

}  // namespace twocars
