#pragma once

#include <stdexcept>
#include <string>

namespace lpv {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed file or textual input.
class ParseError : public Error {
public:
    using Error::Error;
};

/// An object violates one of its documented invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Matrix or path dimensions do not match.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Time or letter index outside the admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A series was queried at a word it does not contain.
class MissingWordError : public Error {
public:
    explicit MissingWordError(const std::string& word)
        : Error("series has no entry for word \"" + word + "\""), word_(word) {}
    const std::string& word() const { return word_; }

private:
    std::string word_;
};

/// A Hankel matrix is rank deficient or too ill conditioned to invert.
class RankError : public Error {
public:
    RankError(const std::string& msg, double sigma_min, double sigma_max, int best_rank)
        : Error(msg), sigma_min_(sigma_min), sigma_max_(sigma_max), best_rank_(best_rank) {}
    double sigma_min() const { return sigma_min_; }
    double sigma_max() const { return sigma_max_; }
    int best_rank() const { return best_rank_; }

private:
    double sigma_min_;
    double sigma_max_;
    int best_rank_;
};

/// A linear solve failed (singular or unstable coefficient operator).
class SolverError : public Error {
public:
    using Error::Error;
};

/// An innovation variance iterate lost positive definiteness.
class IndefiniteError : public Error {
public:
    IndefiniteError(int sigma, int iteration, double eigenvalue)
        : Error("innovation variance not positive definite at sigma=" + std::to_string(sigma) +
                ", iteration=" + std::to_string(iteration) +
                ", min eigenvalue=" + std::to_string(eigenvalue)),
          sigma_(sigma), iteration_(iteration), eigenvalue_(eigenvalue) {}
    int sigma() const { return sigma_; }
    int iteration() const { return iteration_; }
    double eigenvalue() const { return eigenvalue_; }

private:
    int sigma_;
    int iteration_;
    double eigenvalue_;
};

/// State trajectory exceeded the divergence guard during simulation.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Error raised by the identification pipeline, tagged with the failing stage
/// and the diagnostics collected before the failure (JSON text).
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& cause, std::string diagnostics)
        : Error("stage \"" + stage + "\": " + cause),
          stage_(stage), diagnostics_(std::move(diagnostics)) {}
    const std::string& stage() const { return stage_; }
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string stage_;
    std::string diagnostics_;
};

}  // namespace lpv
