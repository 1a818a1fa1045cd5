#pragma once

#include <stdexcept>
#include <string>

namespace bandit {

/// Invalid or incomplete experiment configuration. The message names the key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root bracket does not contain a sign change.
class BracketError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace bandit
