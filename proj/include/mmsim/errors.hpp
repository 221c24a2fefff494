#ifndef MMSIM_ERRORS_HPP
#define MMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmsim {

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public SimError {
public:
    using SimError::SimError;
};

class Unreachable : public SimError {
public:
    using SimError::SimError;
};

class DuplicateAddress : public SimError {
public:
    using SimError::SimError;
};

class NotMicroMobilityScope : public SimError {
public:
    using SimError::SimError;
};

class NoCandidates : public SimError {
public:
    using SimError::SimError;
};

class NotNeighbor : public SimError {
public:
    using SimError::SimError;
};

class ScriptMismatch : public SimError {
public:
    using SimError::SimError;
};

// Config errors carry the offending field path, e.g. "timers.refresh_s".
class ValidationError : public SimError {
public:
    ValidationError(const std::string& field, const std::string& msg)
        : SimError(field + ": " + msg), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ParseError : public SimError {
public:
    using SimError::SimError;
};

}  // namespace mmsim

#endif  // MMSIM_ERRORS_HPP
