#pragma once

#include <stdexcept>
#include <string>

namespace vlcsim {

// Precondition violations on public entry points.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A data bin / eigenvalue the equalizer would divide by is zero.
class SingularChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cyclic prefix shorter than the channel memory.
class IsiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedChromaticityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Source too far from the Planckian locus for a CCT to mean anything.
class NoMeaningfulCctError : public std::runtime_error {
public:
    NoMeaningfulCctError(const std::string& what, double duv)
        : std::runtime_error(what), duv_(duv) {}
    double duv() const noexcept { return duv_; }

private:
    double duv_;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vlcsim
