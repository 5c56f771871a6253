#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cellwave {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Series evaluation did not converge within the configured term budget.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, int order, double argument)
        : Error(what), m(order), x(argument) {}
    int m;
    double x;
};

class RootSearchError : public Error {
public:
    RootSearchError(const std::string& what, double last)
        : Error(what), last_abscissa(last) {}
    double last_abscissa;
};

class InvalidParameters : public Error {
public:
    using Error::Error;
};

class DegenerateForce : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

// The right-hand tip integration turned back before reaching Y = 1.
class SpeedTooLarge : public Error {
public:
    SpeedTooLarge(const std::string& what, double speed)
        : Error(what), V(speed) {}
    double V;
};

class ProfileInvalid : public Error {
public:
    using Error::Error;
};

class FixedPointDivergence : public Error {
public:
    FixedPointDivergence(const std::string& what, double prev, double last)
        : Error(what), previous(prev), latest(last) {}
    double previous;
    double latest;
};

struct ScanPoint {
    double V;
    double G;  // +inf when V is beyond the admissible speed range
};

class NoTravelingWave : public Error {
public:
    NoTravelingWave(const std::string& what, std::vector<ScanPoint> points)
        : Error(what), scan(std::move(points)) {}
    std::vector<ScanPoint> scan;
};

class ExpansionInvalid : public Error {
public:
    using Error::Error;
};

}  // namespace cellwave
