#ifndef REPCOUNT_ERRORS_HPP_
#define REPCOUNT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace repcount {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Flow-field I/O and filtering.
struct BadMagic : Error { using Error::Error; };
struct Truncated : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct InvalidKernelSpec : Error { using Error::Error; };
struct FieldTooSmall : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };

// Time-frequency analysis.
struct WindowTooLarge : Error { using Error::Error; };
struct SignalTooShort : Error { using Error::Error; };

// Synthesis and annotations.
struct InvalidParams : Error { using Error::Error; };
struct BadAnnotation : Error { using Error::Error; };

// Estimation and evaluation.
struct AllChannelsDegenerate : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct ZeroTruth : Error { using Error::Error; };
struct CorpusFormat : Error { using Error::Error; };

}  // namespace repcount

#endif  // REPCOUNT_ERRORS_HPP_
