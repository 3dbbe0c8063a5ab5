#ifndef GIFTSMITH_DIAGNOSTIC_HPP
#define GIFTSMITH_DIAGNOSTIC_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace giftsmith {

enum class Severity { Error, Warning };

/// A source-located problem found while parsing or validating.
/// `line` and `column` are 1-based and absent for in-memory questions.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::optional<int> line;
    std::optional<int> column;

    bool operator==(const Diagnostic&) const = default;
};

Diagnostic make_error(std::string code, std::string message,
                      std::optional<int> line = std::nullopt,
                      std::optional<int> column = std::nullopt);
Diagnostic make_warning(std::string code, std::string message,
                        std::optional<int> line = std::nullopt,
                        std::optional<int> column = std::nullopt);

bool has_errors(const std::vector<Diagnostic>& diags);
std::size_t count_errors(const std::vector<Diagnostic>& diags);
std::size_t count_warnings(const std::vector<Diagnostic>& diags);

/// "line 3, column 7: error [no-answer-block]: ..." style rendering.
std::string format_diagnostic(const Diagnostic& d);

enum class ErrorCode {
    InvalidArgument,
    Validation,
    Parse,
    UnknownCourse,
    DuplicateCourse,
    InvalidCourseId,
    UnknownRecord,
    MalformedBank,
    UnsupportedVersion,
    Io,
};

/// Hard failure of a library operation. Validation and parse failures carry
/// the diagnostics that caused them.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what,
          std::vector<Diagnostic> diagnostics = {})
        : std::runtime_error(what), code_(code),
          diagnostics_(std::move(diagnostics)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    ErrorCode code_;
    std::vector<Diagnostic> diagnostics_;
};

} // namespace giftsmith

#endif
