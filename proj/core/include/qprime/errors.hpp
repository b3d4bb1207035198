#ifndef QPRIME_ERRORS_HPP
#define QPRIME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qprime {

// Exit-code convention shared with the CLI:
//   2 parse, 3 math domain, 4 precondition, 5 self-validation.
class error : public std::runtime_error {
public:
    error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), code_(exit_code) {}
    int exit_code() const noexcept { return code_; }

private:
    int code_;
};

class parse_error : public error {
public:
    explicit parse_error(const std::string& m) : error(m, 2) {}
};

class math_domain_error : public error {
public:
    explicit math_domain_error(const std::string& m) : error(m, 3) {}
};

class precondition_error : public error {
public:
    explicit precondition_error(const std::string& m) : error(m, 4) {}
};

// A postcondition the engine re-checks about its own output failed.
class self_validation_error : public error {
public:
    explicit self_validation_error(const std::string& m) : error(m, 5) {}
};

} // namespace qprime

#endif
