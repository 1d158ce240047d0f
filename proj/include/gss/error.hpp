#pragma once

#include <stdexcept>
#include <string>

namespace gss {

// Error with a stable machine-parsable class tag. The CLI prints
// "error: <tag>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& msg)
        : std::runtime_error(msg), tag_(std::move(tag)) {}

    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

inline Error config_error(const std::string& msg) { return Error("config_error", msg); }
inline Error io_error(const std::string& msg) { return Error("io_error", msg); }
inline Error format_error(const std::string& msg) { return Error("format_error", msg); }
inline Error dim_error(const std::string& msg) { return Error("dimension_error", msg); }
inline Error capacity_error(const std::string& msg) { return Error("capacity_error", msg); }
inline Error numeric_error(const std::string& msg) { return Error("numeric_error", msg); }

}  // namespace gss
