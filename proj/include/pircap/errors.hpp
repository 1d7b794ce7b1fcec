#pragma once

#include <stdexcept>
#include <string>

namespace pircap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments to a generator or formula (bad N, T, K, ...).
struct BadParams : Error { using Error::Error; };
// A server index outside [0, N-1].
struct OutOfRangeIndex : Error { using Error::Error; };
// A colluding set with no members.
struct EmptySet : Error { using Error::Error; };
// A server that belongs to no colluding set.
struct UncoveredServer : Error { using Error::Error; };
// Instance exceeds the enumeration cap (2^N scans, message-space products).
struct TooLarge : Error { using Error::Error; };
// Packing and covering optima disagree; signals a solver bug.
struct DualityMismatch : Error { using Error::Error; };
// T does not divide N where the construction requires it.
struct NotDivisible : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
// A query label with no registered answer matrix.
struct UnknownQuery : Error { using Error::Error; };
// Expected download is zero; the rate is undefined.
struct ZeroDownload : Error { using Error::Error; };
// |X| and |Y| are not powers of a common base; the rate is not rational.
struct IncommensurableAlphabets : Error { using Error::Error; };
// Answer functions are not given as component-function matrices.
struct NotDecomposable : Error { using Error::Error; };
// Malformed JSON input.
struct ParseError : Error { using Error::Error; };
// An internal consistency assertion failed.
struct InternalError : Error { using Error::Error; };

}  // namespace pircap
