#pragma once

#include <stdexcept>
#include <string>

namespace pairforge {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (dataset rows, lexicon lines, embeddings).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: unknown technique, bad case spec, missing field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A translation/paraphrase provider failed or was unreachable.
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what, std::string text_id = {})
      : Error(what), text_id_(std::move(text_id)) {}

  const std::string& text_id() const noexcept { return text_id_; }

 private:
  std::string text_id_;
};

}  // namespace pairforge
