#ifndef RCPROBE_ERROR_HPP
#define RCPROBE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rcprobe {

// Exit codes used by the CLI. Library code throws; the CLI maps.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitBackend = 2,
    kExitInfeasibleBalance = 3,
};

// Bad inputs: malformed files, schema violations, broken invariants in data.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Backend failures: model load, tokenizer, capability mismatch, transport.
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

// A modification was requested that the record's paradigm/form does not admit.
class ParadigmMismatchError : public std::runtime_error {
public:
    explicit ParadigmMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rcprobe

#endif
