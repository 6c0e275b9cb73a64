#pragma once

#include <stdexcept>
#include <string>

namespace psf {

/// Broad error class; the CLI maps it to its exit code.
enum class ErrorCategory { Data, Config, Runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

#define PSF_DEFINE_ERROR(Name, Category)                                      \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what)                                \
            : Error(ErrorCategory::Category, #Name ": " + what) {}            \
    };

// Data errors: the input series or tables are unusable.
PSF_DEFINE_ERROR(ParseError, Data)
PSF_DEFINE_ERROR(GapError, Data)
PSF_DEFINE_ERROR(DomainError, Data)
PSF_DEFINE_ERROR(DegenerateSequenceError, Data)
PSF_DEFINE_ERROR(InsufficientDataError, Data)
PSF_DEFINE_ERROR(IncompleteTableError, Data)

// Configuration errors: parameters violate a model contract.
PSF_DEFINE_ERROR(ConfigError, Config)
PSF_DEFINE_ERROR(ShapeError, Config)

// Runtime errors: a well-formed run failed numerically or partially.
PSF_DEFINE_ERROR(UnderflowError, Runtime)
PSF_DEFINE_ERROR(MemberError, Runtime)
PSF_DEFINE_ERROR(EnsembleError, Runtime)
PSF_DEFINE_ERROR(TuningError, Runtime)

#undef PSF_DEFINE_ERROR

} // namespace psf
