#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textcausal {

// Every error raised by the library derives from Error. The category drives
// the CLI exit code.
enum class ErrorCategory { kConfig, kData, kTraining, kInvariant };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define TEXTCAUSAL_DEFINE_ERROR(Name, Category)            \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& what)                 \
        : Error(ErrorCategory::Category, what) {}          \
  };

TEXTCAUSAL_DEFINE_ERROR(ConfigError, kConfig)
TEXTCAUSAL_DEFINE_ERROR(ParameterError, kConfig)
TEXTCAUSAL_DEFINE_ERROR(SchemaError, kData)
TEXTCAUSAL_DEFINE_ERROR(EmptyDatasetError, kData)
TEXTCAUSAL_DEFINE_ERROR(ShapeError, kData)
TEXTCAUSAL_DEFINE_ERROR(CoverageError, kData)
TEXTCAUSAL_DEFINE_ERROR(ComparisonError, kData)
TEXTCAUSAL_DEFINE_ERROR(IoError, kData)
TEXTCAUSAL_DEFINE_ERROR(NumericError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(SingularityError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(NormalizationError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(EstimationError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(OrchestrationError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(UndefinedCorrelationError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(UndefinedRatioError, kTraining)
TEXTCAUSAL_DEFINE_ERROR(InvariantError, kInvariant)

#undef TEXTCAUSAL_DEFINE_ERROR

// Row-level validation failure while ingesting a file. `row` is 1-based and
// counts data rows (the CSV header is not a row).
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, const std::string& what)
      : Error(ErrorCategory::kData, "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Failure talking to a remote embedding provider.
class ProviderError : public Error {
 public:
  ProviderError(std::size_t batch, const std::string& what)
      : Error(ErrorCategory::kTraining,
              "embedding batch " + std::to_string(batch) + ": " + what),
        batch_(batch) {}
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t batch_;
};

// Raised by fit_blp when the naive effect has no variance inside a fold.
// Carries the fallback coefficients (a1 = mean label, b1 = 0).
class DegenerateBlpError : public Error {
 public:
  DegenerateBlpError(const std::string& what, double fallback_a1)
      : Error(ErrorCategory::kTraining, what), fallback_a1_(fallback_a1) {}
  double fallback_a1() const noexcept { return fallback_a1_; }

 private:
  double fallback_a1_;
};

}  // namespace textcausal
