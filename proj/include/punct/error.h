#ifndef PUNCT_ERROR_H_
#define PUNCT_ERROR_H_

#include <stdexcept>
#include <string>

namespace punct {

// Base class for every data-level failure. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes (invalid UTF-8, unreadable files).
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t byte_offset)
      : Error(what + " at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two token or word streams that should line up do not.
class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t position, std::string expected, std::string found)
      : Error("alignment error at position " + std::to_string(position) +
              ": expected '" + expected + "', found '" + found + "'"),
        position_(position),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

// A tagger backend returned output of the wrong shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace punct

#endif  // PUNCT_ERROR_H_
