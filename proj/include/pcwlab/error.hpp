#pragma once

#include <stdexcept>
#include <string>

namespace pcwlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

// Avg. Top6-10 not strictly above Avg. Top5, so the normalized price is undefined.
class DegenerateMarketError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Missing or malformed configuration key. Carries the offending key name.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// An upstream artifact is corrupt or was written by an incompatible version.
class ArtifactError : public Error {
public:
    using Error::Error;
};

}  // namespace pcwlab
