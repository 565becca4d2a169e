#pragma once

#include <stdexcept>
#include <string>

namespace trendsurv {

// Every failure the library can raise, one code per condition.
enum class Errc {
  // series shape / alignment
  disjoint_ranges,
  too_short,
  gap_found,
  duplicate_date,
  unsorted_dates,
  // ingestion
  malformed_header,
  malformed_document,
  non_numeric_cell,
  value_out_of_range,
  missing_column,
  negative_count,
  unparsable_date,
  duplicate_id,
  empty_variants,
  missing_variant,
  // statistics
  zero_variance,
  too_few_samples,
  too_large,
  no_valid_lag,
  window_too_large,
  // aggregation
  range_mismatch,
  empty_input,
  // plumbing
  io_failure,
  bad_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::disjoint_ranges: return "DisjointRanges";
    case Errc::too_short: return "TooShort";
    case Errc::gap_found: return "GapFound";
    case Errc::duplicate_date: return "DuplicateDate";
    case Errc::unsorted_dates: return "UnsortedDates";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::non_numeric_cell: return "NonNumericCell";
    case Errc::value_out_of_range: return "ValueOutOfRange";
    case Errc::missing_column: return "MissingColumn";
    case Errc::negative_count: return "NegativeCount";
    case Errc::unparsable_date: return "UnparsableDate";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::empty_variants: return "EmptyVariants";
    case Errc::missing_variant: return "MissingVariant";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::too_large: return "TooLarge";
    case Errc::no_valid_lag: return "NoValidLag";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::range_mismatch: return "RangeMismatch";
    case Errc::empty_input: return "EmptyInput";
    case Errc::io_failure: return "IoFailure";
    case Errc::bad_argument: return "BadArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace trendsurv
