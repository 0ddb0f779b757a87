#ifndef REFLOW_ERRORS_HPP
#define REFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace reflow {

/// Base class for all reflow errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- dataflow document / structure errors ---

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

class CycleError : public Error {
public:
    explicit CycleError(const std::string& msg) : Error("cycle: " + msg) {}
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& msg) : Error("duplicate id: " + msg) {}
};

class BoundaryError : public Error {
public:
    explicit BoundaryError(const std::string& msg) : Error("boundary: " + msg) {}
};

class NotDedupError : public Error {
public:
    explicit NotDedupError(const std::string& msg) : Error("not de-dup: " + msg) {}
};

class UnknownTaskError : public Error {
public:
    explicit UnknownTaskError(const std::string& msg) : Error("unknown task: " + msg) {}
};

// --- manager errors ---

class DuplicateNameError : public Error {
public:
    explicit DuplicateNameError(const std::string& msg) : Error("duplicate name: " + msg) {}
};

class UnknownNameError : public Error {
public:
    explicit UnknownNameError(const std::string& msg) : Error("unknown name: " + msg) {}
};

class InvalidDataflowError : public Error {
public:
    explicit InvalidDataflowError(const std::string& msg) : Error("invalid dataflow: " + msg) {}
};

/// Internal consistency check failed after a merge/unmerge. Indicates a bug;
/// the caller's state is left untouched.
class ConstraintViolationError : public Error {
public:
    explicit ConstraintViolationError(const std::string& msg)
        : Error("constraint violation: " + msg) {}
};

// --- simulator errors ---

class StalePlanError : public Error {
public:
    explicit StalePlanError(const std::string& msg) : Error("stale plan: " + msg) {}
};

class UnknownSourceError : public Error {
public:
    explicit UnknownSourceError(const std::string& msg) : Error("unknown source: " + msg) {}
};

class PausedSourceError : public Error {
public:
    explicit PausedSourceError(const std::string& msg) : Error("paused source: " + msg) {}
};

// --- harness errors ---

class SpecError : public Error {
public:
    explicit SpecError(const std::string& msg) : Error("spec error: " + msg) {}
};

} // namespace reflow

#endif // REFLOW_ERRORS_HPP
