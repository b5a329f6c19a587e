#pragma once

#include <stdexcept>
#include <string>

namespace phishbench {

// Configuration / validation problems (bad manifest, bad config file,
// unknown model). CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus loading problems: malformed manifest line, duplicate id,
// missing HTML file, char-count mismatch.
class LoadError : public ConfigError {
public:
    explicit LoadError(const std::string& msg) : ConfigError(msg) {}
};

class SamplingError : public ConfigError {
public:
    explicit SamplingError(const std::string& msg) : ConfigError(msg) {}
};

// Transport-level failure after retries are exhausted. CLI maps to exit 3.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// Replay transport was asked for a request it has no recording for.
class ReplayMissError : public TransportError {
public:
    explicit ReplayMissError(const std::string& key)
        : TransportError("replay miss: no recorded completion for key " + key), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace phishbench
