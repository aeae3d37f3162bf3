#pragma once

#include <stdexcept>
#include <string>

namespace hwy {

// Root of every exception thrown by the library. Modules derive their own
// error kinds from it so callers can catch either the specific condition or
// anything coming out of hwy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hwy
