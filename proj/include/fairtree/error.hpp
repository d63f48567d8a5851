#pragma once

#include <stdexcept>
#include <string>

namespace fairtree {

// Each module reports failures through one of these; callers that don't care
// about the category can catch std::runtime_error.

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PredictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate (TPR, TNR, group FPR) whose conditioning set is empty.
class RateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fairtree
