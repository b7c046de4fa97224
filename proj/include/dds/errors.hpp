#pragma once

#include <stdexcept>
#include <string>

namespace dds {

// Pole of a special function or of a series representation was hit (or
// approached closer than the documented guard distance).
class pole_error : public std::domain_error {
public:
    explicit pole_error(const std::string& what) : std::domain_error(what) {}
};

// Evaluation point lies outside the convergence region of the requested
// series representation.  The message names the violated inequality.
class region_error : public std::domain_error {
public:
    explicit region_error(const std::string& what) : std::domain_error(what) {}
};

// A computation could not reach its accuracy target.
class accuracy_error : public std::runtime_error {
public:
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

// A scan exhausted its search space without reaching a certified answer.
class inconclusive_error : public std::runtime_error {
public:
    explicit inconclusive_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dds
