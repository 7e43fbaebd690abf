#pragma once

#include <stdexcept>
#include <string>

namespace oddsym {

// Error categories; the CLI maps these to distinct process exit codes.
enum class errc {
    parse_error = 2,
    precondition = 3,
    io_error = 4,
    usage = 5,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t position, std::string msg)
        : Error(errc::parse_error, msg + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

class PreconditionError : public Error {
  public:
    explicit PreconditionError(std::string msg) : Error(errc::precondition, std::move(msg)) {}
};

class IoError : public Error {
  public:
    explicit IoError(std::string msg) : Error(errc::io_error, std::move(msg)) {}
};

} // namespace oddsym
