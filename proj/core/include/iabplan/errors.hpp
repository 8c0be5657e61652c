#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed topology files, unknown ids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Gain CSV ingestion failure. `line()` is 1-based; 0 when the file itself
// could not be opened.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Spanning-tree construction found base stations with no path to any anchor.
class ConnectivityError : public Error {
 public:
  ConnectivityError(const std::string& what, std::vector<int> stranded)
      : Error(what), stranded_(std::move(stranded)) {}
  const std::vector<int>& stranded() const noexcept { return stranded_; }

 private:
  std::vector<int> stranded_;
};

// The rate program has no servable UE or no fiber anywhere.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace iab
