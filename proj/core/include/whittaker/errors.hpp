#pragma once

#include <stdexcept>
#include <string>

namespace whittaker {

// Exit-code classes used by the command-line front end.
enum class ErrorClass { Domain = 2, Precision = 3, Unsupported = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& what)
        : std::runtime_error(what), cls_(cls), code_(std::move(code)) {}
    ErrorClass error_class() const { return cls_; }
    const std::string& code() const { return code_; }

private:
    ErrorClass cls_;
    std::string code_;
};

class DomainError : public Error {
public:
    DomainError(std::string code, const std::string& what)
        : Error(ErrorClass::Domain, std::move(code), what) {}
};

class PrecisionError : public Error {
public:
    PrecisionError(std::string code, const std::string& what)
        : Error(ErrorClass::Precision, std::move(code), what) {}
};

class UnsupportedError : public Error {
public:
    UnsupportedError(std::string code, const std::string& what)
        : Error(ErrorClass::Unsupported, std::move(code), what) {}
};

}  // namespace whittaker
