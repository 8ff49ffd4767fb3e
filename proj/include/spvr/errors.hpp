#pragma once

#include <stdexcept>
#include <string>

namespace spvr {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// --- syntax ---------------------------------------------------------------

// The grammar produced no usable tree (empty input, or only error nodes at the
// root).
class ParseFailure : public Error {
 public:
  using Error::Error;
};

// A node kind that is not part of the shipped taxonomy was asked about.
class UnknownKind : public Error {
 public:
  using Error::Error;
};

// A byte span does not lie within the source text it was applied to.
class SpanOutOfRange : public Error {
 public:
  using Error::Error;
};

// --- minimum edit trees ---------------------------------------------------

// A tree query was made with an empty edit-span set.
class EmptyEdits : public Error {
 public:
  using Error::Error;
};

// A rule or prompt operation was invoked for a tree type it does not model.
class UnsupportedMetType : public Error {
 public:
  using Error::Error;
};

// --- prompts ----------------------------------------------------------------

// A CWE identifier that is not in the shipped weakness table.
class UnknownCwe : public Error {
 public:
  using Error::Error;
};

// --- gateway ----------------------------------------------------------------

// A completion endpoint failed; `retryable()` says whether another attempt is
// worth making.
class EndpointError : public Error {
 public:
  EndpointError(const std::string& message, bool retryable)
      : Error(message), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

// Authentication was rejected; never retried.
class AuthError : public Error {
 public:
  using Error::Error;
};

// The mock endpoint had no scripted reply for a prompt.
class UnmatchedPrompt : public Error {
 public:
  using Error::Error;
};

// --- metrics ----------------------------------------------------------------

// The reference side of a similarity metric tokenizes to nothing.
class EmptyReference : public Error {
 public:
  using Error::Error;
};

// A tree-distance operand has no nodes.
class EmptyTree : public Error {
 public:
  using Error::Error;
};

// A boolean outcome matrix is ragged or narrower than the requested k.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// --- corpus -----------------------------------------------------------------

// A corpus line is not valid JSON or misses a required field. Carries the
// 1-based line number.
class MalformedRecord : public Error {
 public:
  MalformedRecord(const std::string& message, long line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// Evaluation was asked to score a sample with no ground-truth patch.
class MissingTruth : public Error {
 public:
  using Error::Error;
};

// --- configuration ----------------------------------------------------------

// A run configuration is unusable (bad path, invalid value, missing key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spvr
