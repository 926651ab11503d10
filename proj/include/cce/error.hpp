#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cce {

/// Base for every error the library raises on bad input data. The CLI maps
/// these to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class MalformedLine : public DataError {
public:
    MalformedLine(std::size_t line_no, const std::string& what)
        : DataError("line " + std::to_string(line_no) + ": " + what), line_(line_no) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InvalidBio : public DataError {
public:
    explicit InvalidBio(std::size_t sentence_no)
        : DataError("sentence " + std::to_string(sentence_no) + ": invalid BIO sequence"),
          sentence_(sentence_no) {}
    std::size_t sentence() const noexcept { return sentence_; }

private:
    std::size_t sentence_;
};

class EmptyCorpus : public DataError {
public:
    EmptyCorpus() : DataError("corpus is empty") {}
};

class EmptyGlossary : public DataError {
public:
    EmptyGlossary() : DataError("glossary is empty") {}
};

class BadTemplate : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyFile : public DataError {
public:
    EmptyFile() : DataError("file is empty") {}
};

class EmptyQuery : public DataError {
public:
    EmptyQuery() : DataError("query is empty after tokenization") {}
};

class NoContentWords : public DataError {
public:
    NoContentWords() : DataError("entity contains only stopwords") {}
};

class NoCountableWords : public DataError {
public:
    NoCountableWords() : DataError("candidate term has no countable words") {}
};

class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

class ModelFormatError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace cce
