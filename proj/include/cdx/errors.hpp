#pragma once

#include <stdexcept>
#include <string>

namespace cdx {

// Base for every error raised by the library. `kind()` is the stable name
// used in diagnostics and exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CDX_DEFINE_ERROR(Name)                                                \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    };

// gl2core
CDX_DEFINE_ERROR(NonUnitDeterminant)
CDX_DEFINE_ERROR(OrderCapExceeded)
CDX_DEFINE_ERROR(NotADivisor)
CDX_DEFINE_ERROR(NotAMultiple)
CDX_DEFINE_ERROR(ModulusMismatch)
CDX_DEFINE_ERROR(ParseError)
// invariants / frobenius
CDX_DEFINE_ERROR(ConstraintViolation)
CDX_DEFINE_ERROR(InternalInconsistency)
CDX_DEFINE_ERROR(BadPrime)
CDX_DEFINE_ERROR(BadReduction)
CDX_DEFINE_ERROR(UnsupportedPrime)
CDX_DEFINE_ERROR(InvalidDiscriminantData)
CDX_DEFINE_ERROR(OracleCapExceeded)
// ecdb
CDX_DEFINE_ERROR(MalformedRow)
CDX_DEFINE_ERROR(MissingHeader)
CDX_DEFINE_ERROR(NonIntegerField)
CDX_DEFINE_ERROR(RemoteDisabled)
CDX_DEFINE_ERROR(PaginationInconsistency)
// decomp
CDX_DEFINE_ERROR(InsufficientPrimes)
CDX_DEFINE_ERROR(SingularMatrix)
// search
CDX_DEFINE_ERROR(MissingFixture)
CDX_DEFINE_ERROR(ConflictingRecord)
CDX_DEFINE_ERROR(CorruptCheckpoint)
CDX_DEFINE_ERROR(VersionMismatch)

#undef CDX_DEFINE_ERROR

class HttpError : public Error {
public:
    HttpError(int status, const std::string& what)
        : Error("HttpError", "status " + std::to_string(status) + ": " + what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

} // namespace cdx
