#ifndef SRMUSIC_ERRORS_HPP
#define SRMUSIC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace srmusic
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bad input or violated precondition. The CLI maps these to exit code 1.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

/// A generative spec that cannot be realized on the torus.
class InfeasibleSpec : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

/// One or more named hypotheses of an operation failed.
class PreconditionError : public InvalidInput
{
public:
    explicit PreconditionError(std::vector<std::string> failures)
        : InvalidInput(join(failures)), failures_(std::move(failures))
    {
    }

    const std::vector<std::string>& failures() const noexcept { return failures_; }

private:
    static std::string join(const std::vector<std::string>& items)
    {
        std::string out = "precondition failed:";
        for (const auto& s : items) {
            out += " [" + s + "]";
        }
        return out;
    }

    std::vector<std::string> failures_;
};

/// A support set that does not satisfy the separated-clumps model.
class ClumpViolation : public InvalidInput
{
public:
    enum class Kind
    {
        Separation,    // minimum separation below alpha/M
        ClumpDiameter, // alpha * (lambda_a - 1) >= 1
        InterClumpGap  // two clumps closer than beta/M
    };

    ClumpViolation(Kind kind, const std::string& what) : InvalidInput(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Failure inside a numerical kernel. The CLI maps these to exit code 2.
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// The imaging function has fewer local maxima than requested sources.
class UnderdeterminedPeaks : public NumericalError
{
public:
    UnderdeterminedPeaks(std::size_t found, std::size_t required)
        : NumericalError("imaging function has " + std::to_string(found) +
                         " local maxima, " + std::to_string(required) + " required"),
          found_(found), required_(required)
    {
    }

    std::size_t found() const noexcept { return found_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t found_;
    std::size_t required_;
};

} // namespace srmusic

#endif // SRMUSIC_ERRORS_HPP
