#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gravelet {

// Shortest round-trip decimal form, locale independent. All numeric file
// output goes through here so byte-identical reruns are possible.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Failure classes map onto CLI exit codes (input 2, numerical 3, refusal 4).
enum class ErrorClass {
    InvalidInput,
    ParseError,
    Disconnected,
    EigensolverFailure,
    DimensionMismatch,
    ProtocolRefused,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& msg)
        : std::runtime_error(msg), cls_(cls) {}

    ErrorClass error_class() const noexcept { return cls_; }

    // Machine-parsable one-word tag, e.g. "disconnected" or "parse-error".
    const char* tag() const noexcept {
        switch (cls_) {
            case ErrorClass::InvalidInput: return "invalid-input";
            case ErrorClass::ParseError: return "parse-error";
            case ErrorClass::Disconnected: return "disconnected";
            case ErrorClass::EigensolverFailure: return "eigensolver-failure";
            case ErrorClass::DimensionMismatch: return "dimension-mismatch";
            case ErrorClass::ProtocolRefused: return "protocol-refused";
        }
        return "error";
    }

private:
    ErrorClass cls_;
};

} // namespace gravelet
