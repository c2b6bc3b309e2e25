#pragma once

#include <stdexcept>
#include <string>

namespace dimred {

enum class ErrorCode {
    missing_file,
    parse_error,
    non_finite_value,
    empty_dataset,
    invalid_param,
    k_too_large,
    invalid_dim,
    svd_failure,
    eigen_failure,
    dimension_mismatch,
    fit_diverged,
    single_class,
    unlabeled_data,
    subsample_too_small,
    zero_mass_curve,
    row_count_mismatch,
    config_invalid,
    suite_config_invalid,
    dimension_too_low,
    io_error,
    all_pairs_degenerate,
};

/// Library-wide exception type. `code()` identifies the failure class so
/// callers (in particular the CLI) can map errors to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::missing_file: return "MissingFile";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::non_finite_value: return "NonFiniteValue";
        case ErrorCode::empty_dataset: return "EmptyDataset";
        case ErrorCode::invalid_param: return "InvalidParam";
        case ErrorCode::k_too_large: return "KTooLarge";
        case ErrorCode::invalid_dim: return "InvalidDim";
        case ErrorCode::svd_failure: return "SvdFailure";
        case ErrorCode::eigen_failure: return "EigenFailure";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::fit_diverged: return "FitDiverged";
        case ErrorCode::single_class: return "SingleClass";
        case ErrorCode::unlabeled_data: return "UnlabeledData";
        case ErrorCode::subsample_too_small: return "SubsampleTooSmall";
        case ErrorCode::zero_mass_curve: return "ZeroMassCurve";
        case ErrorCode::row_count_mismatch: return "RowCountMismatch";
        case ErrorCode::config_invalid: return "ConfigInvalid";
        case ErrorCode::suite_config_invalid: return "SuiteConfigInvalid";
        case ErrorCode::dimension_too_low: return "DimensionTooLow";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::all_pairs_degenerate: return "AllPairsDegenerate";
    }
    return "Unknown";
}

} // namespace dimred
