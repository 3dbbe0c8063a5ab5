#ifndef GIFTSMITH_BANK_HPP
#define GIFTSMITH_BANK_HPP

#include "giftsmith/diagnostic.hpp"
#include "giftsmith/model.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace giftsmith {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();
/// RFC 3339 UTC with millisecond precision, e.g. "2026-10-17T08:30:00.125Z".
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view s);

struct Course {
    std::string course_id;
    std::string subject;
    bool operator==(const Course&) const = default;
};

struct QuestionRecord {
    std::int64_t record_id = 0;
    std::string course_id;
    int qtype_code = 0;
    Question question;
    Timestamp created_at{};
    Timestamp updated_at{};
    bool operator==(const QuestionRecord&) const = default;
};

/// An immutable snapshot of a question bank; every operation below returns
/// a new value.
struct Bank {
    int format_version = 1;
    std::vector<Course> courses;
    std::vector<QuestionRecord> records;
    std::int64_t next_record_id = 1;
    bool operator==(const Bank&) const = default;
};

struct RecordFilter {
    std::optional<std::string> course_id;
    std::optional<int> qtype_code;
    std::optional<std::string> title_substring;
};

inline constexpr int kBankFormatVersion = 1;
inline constexpr std::string_view kBankHeaderPrefix = "giftsmith-bank v";

bool is_valid_course_id(std::string_view id);
const Course* find_course(const Bank& bank, std::string_view course_id);
const QuestionRecord* find_record(const Bank& bank, std::int64_t record_id);

Bank open_bank(const std::filesystem::path& path);

struct SaveOptions {
    // Called once the temporary file is fully written, right before it
    // replaces the target. Tests throw from here to simulate a failed write.
    std::function<void()> before_rename;
};

/// Writes to a temporary sibling and renames it over `path`, holding an
/// advisory lock on `<path>.lock`. On failure the previous file is intact.
void save_bank(const Bank& bank, const std::filesystem::path& path, const SaveOptions& opts = {});

std::string encode_bank(const Bank& bank);
Bank decode_bank(std::string_view text);

Bank create_course(const Bank& bank, const std::string& course_id, const std::string& subject);

struct AddResult {
    Bank bank;
    std::int64_t record_id = 0;
    std::vector<Diagnostic> warnings;
};

AddResult add_question(const Bank& bank, const std::string& course_id, const Question& question,
                       Dialect dialect, Timestamp now = now_utc());

std::vector<QuestionRecord> list_records(const Bank& bank, const RecordFilter& filter = {});

Bank update_question(const Bank& bank, std::int64_t record_id, const Question& question,
                     Dialect dialect, Timestamp now = now_utc());

Bank remove_question(const Bank& bank, std::int64_t record_id);

/// GIFT text for the matching records, each preceded by `// Course ID:` and
/// `// Ques type:` comments and grouped under `$CATEGORY: course/subject`.
/// Untitled questions are titled with their record id.
std::string export_gift(const Bank& bank, const RecordFilter& filter, Dialect dialect);

struct ImportResult {
    Bank bank;
    std::vector<std::int64_t> record_ids;
    std::vector<Diagnostic> diagnostics;
};

/// Adds every valid question of `text` to `course_id`. Only an unknown
/// course is a hard failure; bad blocks are reported in `diagnostics`.
ImportResult import_gift(const Bank& bank, const std::string& course_id, std::string_view text,
                         Dialect dialect, Timestamp now = now_utc());

} // namespace giftsmith

#endif
