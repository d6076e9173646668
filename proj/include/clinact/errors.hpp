#pragma once

#include <stdexcept>
#include <string>

namespace clinact {

// One error family per CLI exit code.
enum class ErrorClass : int {
  kUsage = 1,
  kIo = 2,
  kParse = 3,
  kCorpus = 4,
  kProtocol = 5,
  kTuning = 6,
  kBackend = 7,
  kConfig = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), class_(cls) {}

  ErrorClass error_class() const { return class_; }

 private:
  ErrorClass class_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(ErrorClass::kIo, w) {}
};

/// Malformed input (CSV/JSON/TOML), carries position info in the message.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& w) : Error(ErrorClass::kParse, w) {}
};

/// A label string outside the closed 7-category taxonomy.
class TaxonomyError : public Error {
 public:
  explicit TaxonomyError(const std::string& w) : Error(ErrorClass::kCorpus, w) {}
};

/// Corrupt corpus data: out-of-bounds spans, duplicate keys, index gaps.
class CorpusIntegrityError : public Error {
 public:
  explicit CorpusIntegrityError(const std::string& w)
      : Error(ErrorClass::kCorpus, w) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& w) : Error(ErrorClass::kConfig, w) {}
};

/// A prompt version used with a stage it does not support.
class VersionMismatchError : public Error {
 public:
  explicit VersionMismatchError(const std::string& w)
      : Error(ErrorClass::kProtocol, w) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& w)
      : Error(ErrorClass::kProtocol, w) {}
};

/// Gold/prediction coverage mismatch during evaluation.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& w)
      : Error(ErrorClass::kProtocol, w) {}
};

/// A rate requested over an empty population.
class UndefinedRateError : public Error {
 public:
  explicit UndefinedRateError(const std::string& w)
      : Error(ErrorClass::kProtocol, w) {}
};

class TuningError : public Error {
 public:
  explicit TuningError(const std::string& w) : Error(ErrorClass::kTuning, w) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& w)
      : Error(ErrorClass::kBackend, w) {}
};

class TransportError : public BackendError {
 public:
  explicit TransportError(const std::string& w) : BackendError(w) {}
};

class TimeoutError : public BackendError {
 public:
  explicit TimeoutError(const std::string& w) : BackendError(w) {}
};

class AuthError : public BackendError {
 public:
  explicit AuthError(const std::string& w) : BackendError(w) {}
};

}  // namespace clinact
