#pragma once

#include <stdexcept>
#include <string>

namespace sgg {

// Error taxonomy mirrored by the CLI exit codes:
// ConfigError -> 2, DataError -> 3, MissingArtifactError -> 4.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a learned component is used before training.
class NotTrainedError : public MissingArtifactError {
public:
    explicit NotTrainedError(const std::string& msg) : MissingArtifactError(msg) {}
};

}  // namespace sgg
