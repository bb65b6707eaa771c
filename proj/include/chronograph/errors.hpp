#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chronograph {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch on a matrix argument (non-square, incompatible sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, double rcond) : Error(what), rcond_(rcond) {}
    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

/// The monodromy 1 - B e^{aA} is numerically singular, so the coupled
/// problem has no unique solution. `stage` is 1 or 2 for the two halves of a
/// second-order solve and 0 otherwise.
class NotWellPosed : public Error {
public:
    NotWellPosed(const std::string& what, double rcond, int stage = 0)
        : Error(what), rcond_(rcond), stage_(stage) {}
    [[nodiscard]] double rcond() const noexcept { return rcond_; }
    [[nodiscard]] int stage() const noexcept { return stage_; }

private:
    double rcond_;
    int stage_;
};

class NonCommuting : public Error {
public:
    NonCommuting(const std::string& what, double commutator)
        : Error(what), commutator_(commutator) {}
    [[nodiscard]] double commutator_norm() const noexcept { return commutator_; }

private:
    double commutator_;
};

class HypothesesNotMet : public Error {
public:
    explicit HypothesesNotMet(std::vector<std::string> unmet);
    [[nodiscard]] const std::vector<std::string>& unmet() const noexcept { return unmet_; }

private:
    std::vector<std::string> unmet_;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

struct Violation {
    std::string field;
    std::string constraint;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace chronograph
