#pragma once

#include <stdexcept>
#include <string>

namespace mv {

// Every failure the library reports carries a stable machine-readable code.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define MV_ERROR(Name)                                                     \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    };

MV_ERROR(DomainError)
MV_ERROR(NonSquarefree)
MV_ERROR(BaseFieldMismatch)
MV_ERROR(NegativeCoefficient)
MV_ERROR(Divergent)
MV_ERROR(Unsupported)
MV_ERROR(PrecisionLoss)
MV_ERROR(UnsupportedRamification)
MV_ERROR(DepthExceeded)
MV_ERROR(Uncertified)
MV_ERROR(NotAffine)
MV_ERROR(NotSurjective)
MV_ERROR(NegativePhi)
MV_ERROR(HypothesisFailed)
MV_ERROR(DepthTooSmall)
MV_ERROR(UsageError)

#undef MV_ERROR

class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& msg)
        : Error("SyntaxError", "line " + std::to_string(line) + ", column " +
                                   std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

} // namespace mv
