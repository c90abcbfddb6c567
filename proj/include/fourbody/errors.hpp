#pragma once

#include <stdexcept>
#include <string>

#include "fourbody/geometry.hpp"

namespace fourbody {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CollisionError : public std::runtime_error {
public:
    CollisionError(const std::string& what, int segment = -1, Pair pair = {})
        : std::runtime_error(what), segment(segment), pair(pair) {}
    int segment;
    Pair pair;
};

class DegenerateSegmentError : public CollisionError {
public:
    using CollisionError::CollisionError;
};

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EndpointCollisionError : public std::runtime_error {
public:
    EndpointCollisionError(const std::string& what, double t, double distance)
        : std::runtime_error(what), t(t), distance(distance) {}
    double t;
    double distance;
};

}  // namespace fourbody
