#ifndef MSGW_ERRORS_HPP
#define MSGW_ERRORS_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace msgw {

// Root of every error the library throws. Messages never echo raw user input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValueError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class EmptyGazetteerError : public Error {
public:
    EmptyGazetteerError() : Error("gazetteer contains no valid entries") {}
};

class InputTooLongError : public Error {
public:
    InputTooLongError() : Error("input exceeds the 1500 character limit") {}
};

class EmptyInputError : public Error {
public:
    EmptyInputError() : Error("input is empty") {}
};

class InvalidColourError : public Error {
public:
    InvalidColourError() : Error("invalid colour value") {}
};

class MissingDataError : public Error {
public:
    MissingDataError() : Error("weather query has no forecast document") {}
};

class UnsupportedModeError : public Error {
public:
    UnsupportedModeError() : Error("backend does not support general queries") {}
};

class EmptyCorpusError : public Error {
public:
    EmptyCorpusError() : Error("corpus contains no valid records") {}
};

enum class ParseErrorKind { NoDataBlock, BadPayload, InvariantViolation };

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, const std::string& detail)
        : Error(std::string(kind_name(kind)) + ": " + detail), kind_(kind) {}

    ParseErrorKind kind() const noexcept { return kind_; }

    static const char* kind_name(ParseErrorKind kind) noexcept {
        switch (kind) {
        case ParseErrorKind::NoDataBlock: return "NoDataBlock";
        case ParseErrorKind::BadPayload: return "BadPayload";
        case ParseErrorKind::InvariantViolation: return "InvariantViolation";
        }
        return "Unknown";
    }

private:
    ParseErrorKind kind_;
};

// Transport-level failure raised by HttpClient implementations.
enum class TransportFailure { Timeout, Network };

class TransportError : public Error {
public:
    TransportError(TransportFailure failure, const std::string& detail)
        : Error(detail), failure_(failure) {}

    TransportFailure failure() const noexcept { return failure_; }

private:
    TransportFailure failure_;
};

// Forecast provider failure: either an HTTP status or a transport problem.
class ProviderError : public Error {
public:
    static ProviderError status(int code) {
        return ProviderError("provider returned HTTP " + std::to_string(code), code, std::nullopt);
    }
    static ProviderError transport(TransportFailure failure, const std::string& detail) {
        return ProviderError(std::string(failure == TransportFailure::Timeout ? "provider timeout: "
                                                                             : "provider unreachable: ") +
                                 detail,
                             std::nullopt, failure);
    }

    std::optional<int> http_status() const noexcept { return status_; }
    bool is_timeout() const noexcept { return failure_ == TransportFailure::Timeout; }

private:
    ProviderError(const std::string& what, std::optional<int> status, std::optional<TransportFailure> failure)
        : Error(what), status_(status), failure_(failure) {}

    std::optional<int> status_;
    std::optional<TransportFailure> failure_;
};

enum class BackendErrorKind { InternalServerError, BadStatus, Timeout, Network, BadResponse };

class BackendError : public Error {
public:
    BackendError(BackendErrorKind kind, const std::string& detail) : Error(detail), kind_(kind) {}

    BackendErrorKind kind() const noexcept { return kind_; }

private:
    BackendErrorKind kind_;
};

class JudgeError : public Error {
public:
    using Error::Error;
};

class JudgeParseError : public JudgeError {
public:
    explicit JudgeParseError(std::string raw_reply)
        : JudgeError("unrecognised judge reply"), raw_reply_(std::move(raw_reply)) {}

    const std::string& raw_reply() const noexcept { return raw_reply_; }

private:
    std::string raw_reply_;
};

} // namespace msgw

#endif
