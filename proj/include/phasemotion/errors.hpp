#pragma once

#include <stdexcept>
#include <string>

namespace phasemotion {

// Shapes or sizes that cannot be combined.
class dimension_error : public std::invalid_argument {
public:
    explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter outside its documented domain.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// File could not be read or written; message carries the path.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Frames of a sequence disagree with each other.
class sequence_error : public std::runtime_error {
public:
    explicit sequence_error(const std::string& what) : std::runtime_error(what) {}
};

// Too few valid pixels to support an estimate.
class insufficient_signal_error : public std::runtime_error {
public:
    explicit insufficient_signal_error(const std::string& what) : std::runtime_error(what) {}
};

// Metric is 0/0 for this input.
class undefined_metric_error : public std::runtime_error {
public:
    explicit undefined_metric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phasemotion
