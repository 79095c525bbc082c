#pragma once

#include <stdexcept>
#include <string>

namespace archnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file could not be parsed; message carries file and row context.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t row, const std::string& what)
      : Error(file + ":" + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id)
      : Error("duplicate page_id \"" + id + "\""), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyNameError : public Error {
 public:
  using Error::Error;
};

class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; earlier artifacts stay on disk untouched.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage " + stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : Error(what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t iterations_;
};

}  // namespace archnet
