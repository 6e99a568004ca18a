#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spa {

enum class ErrorKind {
    Domain,     // argument outside an operation's valid range
    Format,     // malformed file contents
    Io,         // file missing or unreadable
    Dimension,  // shape mismatch between config and data
    Config,     // invalid or unknown configuration
    History,    // operation needs state that has not been recorded yet
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace spa
