#pragma once

#include <stdexcept>
#include <string>

namespace itgc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- concept parsing / validation ---

class EmptyConceptSet : public Error {
public:
    EmptyConceptSet() : Error("no concepts found in generator output") {}
};

class TooFewConcepts : public Error {
public:
    TooFewConcepts(std::size_t got, std::size_t want)
        : Error("concept set has " + std::to_string(got) + " concepts, need at least " +
                std::to_string(want)),
          got(got), want(want) {}
    std::size_t got;
    std::size_t want;
};

class InvalidTask : public Error {
public:
    explicit InvalidTask(const std::string& what) : Error("invalid task: " + what) {}
};

// --- encoding ---

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ZeroNormRow : public Error {
public:
    explicit ZeroNormRow(std::size_t row)
        : Error("row " + std::to_string(row) + " has zero norm, cannot normalize"), row(row) {}
    std::size_t row;
};

class ScoreOutOfRange : public Error {
public:
    ScoreOutOfRange(const std::string& item, const std::string& concept_text, double value)
        : Error("score " + std::to_string(value) + " outside [0,10] for (" + item + ", " +
                concept_text + ")") {}
};

class IndexOutOfRange : public Error {
public:
    IndexOutOfRange(std::size_t index, std::size_t size)
        : Error("index " + std::to_string(index) + " out of range (size " +
                std::to_string(size) + ")") {}
};

// --- clustering ---

class TooFewItems : public Error {
public:
    TooFewItems(std::size_t n, std::size_t k)
        : Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) +
                " items") {}
};

class DegenerateClustering : public Error {
public:
    explicit DegenerateClustering(std::size_t clusters)
        : Error("silhouette undefined for " + std::to_string(clusters) + " cluster(s)") {}
};

class NoValidLabeling : public Error {
public:
    NoValidLabeling() : Error("no eps in the grid produced >= 2 clusters") {}
};

// --- evaluation ---

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("label lists differ in length: " + std::to_string(a) + " vs " +
                std::to_string(b)) {}
};

class EmptyInput : public Error {
public:
    explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

class IdMismatch : public Error {
public:
    explicit IdMismatch(const std::string& detail) : Error("id mismatch: " + detail) {}
};

// --- backends ---

class BackendError : public Error {
public:
    explicit BackendError(const std::string& what) : Error(what) {}
    BackendError(const std::string& item, const std::string& concept_text,
                 const std::string& cause)
        : Error("backend failed for (" + item + ", " + concept_text + "): " + cause) {}
};

class HttpError : public BackendError {
public:
    HttpError(int status, const std::string& body_excerpt)
        : BackendError("http status " + std::to_string(status) + ": " +
                       body_excerpt.substr(0, 200)),
          status(status) {}
    int status;
};

class RetriesExhausted : public BackendError {
public:
    explicit RetriesExhausted(const std::string& what)
        : BackendError("retries exhausted: " + what) {}
};

class ReplayMiss : public BackendError {
public:
    explicit ReplayMiss(const std::string& key)
        : BackendError("no recorded response for request key " + key) {}
};

class DimensionInconsistent : public Error {
public:
    DimensionInconsistent(std::size_t row, std::size_t got, std::size_t want)
        : Error("embedding row " + std::to_string(row) + " has dimension " +
                std::to_string(got) + ", expected " + std::to_string(want)) {}
};

// --- embedding files ---

class BadMagic : public Error {
public:
    explicit BadMagic(const std::string& path) : Error("bad magic in " + path) {}
};

class TruncatedFile : public Error {
public:
    explicit TruncatedFile(const std::string& path) : Error("truncated file: " + path) {}
};

class NonFiniteValue : public Error {
public:
    NonFiniteValue(std::size_t row, std::size_t col)
        : Error("non-finite value at (" + std::to_string(row) + ", " + std::to_string(col) +
                ")"),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

class ManifestLengthMismatch : public Error {
public:
    ManifestLengthMismatch(std::size_t ids, std::size_t rows)
        : Error("id manifest has " + std::to_string(ids) + " entries for " +
                std::to_string(rows) + " rows") {}
};

// --- synthetic world ---

class UnknownCriterion : public Error {
public:
    explicit UnknownCriterion(const std::string& name)
        : Error("unknown criterion: " + name) {}
};

}  // namespace itgc
