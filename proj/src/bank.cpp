#include "giftsmith/bank.hpp"

#include "giftsmith/parser.hpp"
#include "giftsmith/question_json.hpp"
#include "giftsmith/writer.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace giftsmith {

using nlohmann::json;

Timestamp now_utc()
{
    return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t)
{
    auto ms = t.time_since_epoch().count();
    auto secs = ms / 1000;
    auto rem = ms % 1000;
    if (rem < 0) {
        rem += 1000;
        --secs;
    }
    std::time_t tt = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(rem));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s)
{
    std::tm tm{};
    int consumed = 0;
    std::string str(s);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6 ||
        consumed != 19)
        return std::nullopt;
    std::string_view rest = s.substr(19);
    int ms = 0;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        int digits = 0;
        int scale = 100;
        while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) {
            if (digits < 3) {
                ms += (rest.front() - '0') * scale;
                scale /= 10;
            }
            ++digits;
            rest.remove_prefix(1);
        }
        if (digits == 0)
            return std::nullopt;
    }
    if (rest != "Z")
        return std::nullopt;
    if (tm.tm_mon < 1 || tm.tm_mon > 12 || tm.tm_mday < 1 || tm.tm_mday > 31 || tm.tm_hour > 23 ||
        tm.tm_min > 59 || tm.tm_sec > 60)
        return std::nullopt;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    std::time_t secs = timegm(&tm);
    return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + ms));
}

bool is_valid_course_id(std::string_view id)
{
    if (id.empty() || !std::isalpha(static_cast<unsigned char>(id.front())))
        return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

const Course* find_course(const Bank& bank, std::string_view course_id)
{
    auto it = std::find_if(bank.courses.begin(), bank.courses.end(),
                           [&](const Course& c) { return c.course_id == course_id; });
    return it == bank.courses.end() ? nullptr : &*it;
}

const QuestionRecord* find_record(const Bank& bank, std::int64_t record_id)
{
    auto it = std::find_if(bank.records.begin(), bank.records.end(),
                           [&](const QuestionRecord& r) { return r.record_id == record_id; });
    return it == bank.records.end() ? nullptr : &*it;
}

// Persistence.

namespace {

[[noreturn]] void malformed(std::size_t offset, const std::string& what)
{
    throw Error(ErrorCode::MalformedBank,
                "malformed bank at byte " + std::to_string(offset) + ": " + what);
}

json record_to_json(const QuestionRecord& r)
{
    return json{{"kind", "question"},
                {"record_id", r.record_id},
                {"course_id", r.course_id},
                {"qtype_code", r.qtype_code},
                {"question", question_to_json(r.question)},
                {"created_at", format_timestamp(r.created_at)},
                {"updated_at", format_timestamp(r.updated_at)}};
}

Timestamp timestamp_member(const json& j, const char* key, std::size_t offset)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        malformed(offset, std::string("missing ") + key);
    auto t = parse_timestamp(it->get<std::string>());
    if (!t)
        malformed(offset, std::string("bad timestamp in ") + key);
    return *t;
}

template <class T>
T member(const json& j, const char* key, std::size_t offset)
{
    auto it = j.find(key);
    if (it == j.end())
        malformed(offset, std::string("missing ") + key);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        malformed(offset, std::string("wrong type for ") + key);
    }
}

class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path)
    {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0)
            throw Error(ErrorCode::Io, "cannot open lock file " + path.string() + ": " +
                                           std::strerror(errno));
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw Error(ErrorCode::Io, "cannot lock " + path.string());
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;
    ~FileLock()
    {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }

private:
    int fd_ = -1;
};

} // namespace

std::string encode_bank(const Bank& bank)
{
    std::string out;
    out += std::string(kBankHeaderPrefix) + std::to_string(bank.format_version) + "\n";
    out += json{{"kind", "bank"}, {"next_record_id", bank.next_record_id}}.dump() + "\n";
    for (const auto& c : bank.courses)
        out += json{{"kind", "course"}, {"course_id", c.course_id}, {"subject", c.subject}}.dump() + "\n";
    for (const auto& r : bank.records)
        out += record_to_json(r).dump() + "\n";
    return out;
}

Bank decode_bank(std::string_view text)
{
    if (text.empty())
        malformed(0, "empty file");
    auto nl = text.find('\n');
    auto header = text.substr(0, nl);
    if (!header.starts_with(kBankHeaderPrefix))
        malformed(0, "missing \"giftsmith-bank\" header");
    auto version = detail::parse_number(header.substr(kBankHeaderPrefix.size()));
    if (!version || *version != static_cast<int>(*version))
        malformed(kBankHeaderPrefix.size(), "bad format version");
    if (static_cast<int>(*version) != kBankFormatVersion)
        throw Error(ErrorCode::UnsupportedVersion,
                    "bank format version " + std::to_string(static_cast<int>(*version)) +
                        " is not supported (this build reads version " +
                        std::to_string(kBankFormatVersion) + ")");

    Bank bank;
    bool saw_counter = false;
    std::set<std::int64_t> ids;
    std::size_t pos = nl == std::string_view::npos ? text.size() : nl + 1;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        auto offset = pos;
        pos = end + 1;
        if (detail::is_blank(line))
            continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            malformed(offset + (e.byte > 0 ? e.byte - 1 : 0), e.what());
        }
        if (!j.is_object())
            malformed(offset, "record is not an object");
        auto kind = member<std::string>(j, "kind", offset);
        if (kind == "bank") {
            bank.next_record_id = member<std::int64_t>(j, "next_record_id", offset);
            saw_counter = true;
        } else if (kind == "course") {
            Course c{member<std::string>(j, "course_id", offset), member<std::string>(j, "subject", offset)};
            if (!is_valid_course_id(c.course_id))
                malformed(offset, "invalid course id \"" + c.course_id + "\"");
            if (find_course(bank, c.course_id))
                malformed(offset, "duplicate course \"" + c.course_id + "\"");
            bank.courses.push_back(std::move(c));
        } else if (kind == "question") {
            QuestionRecord r;
            r.record_id = member<std::int64_t>(j, "record_id", offset);
            r.course_id = member<std::string>(j, "course_id", offset);
            r.qtype_code = member<int>(j, "qtype_code", offset);
            try {
                r.question = question_from_json(member<json>(j, "question", offset));
            } catch (const Error& e) {
                malformed(offset, e.what());
            }
            r.created_at = timestamp_member(j, "created_at", offset);
            r.updated_at = timestamp_member(j, "updated_at", offset);
            if (r.record_id <= 0 || !ids.insert(r.record_id).second)
                malformed(offset, "duplicate or non-positive record_id");
            if (!find_course(bank, r.course_id))
                malformed(offset, "record refers to unknown course \"" + r.course_id + "\"");
            auto diags = validate(r.question, Dialect::Paper);
            if (has_errors(diags))
                malformed(offset, "stored question fails validation: " + format_diagnostic(diags.front()));
            if (r.qtype_code != type_code(classify(r.question)))
                malformed(offset, "qtype_code does not match the question");
            bank.records.push_back(std::move(r));
        } else {
            malformed(offset, "unknown record kind \"" + kind + "\"");
        }
    }
    std::int64_t max_id = ids.empty() ? 0 : *ids.rbegin();
    if (!saw_counter)
        bank.next_record_id = max_id + 1;
    if (bank.next_record_id <= max_id)
        malformed(0, "next_record_id is not above every record id");
    return bank;
}

Bank open_bank(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open bank " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_bank(ss.str());
}

void save_bank(const Bank& bank, const std::filesystem::path& path, const SaveOptions& opts)
{
    auto text = encode_bank(bank);
    auto lock_path = path;
    lock_path += ".lock";
    auto tmp = path;
    tmp += ".tmp";

    FileLock lock(lock_path);
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error(ErrorCode::Io, "cannot write " + tmp.string() + ": " + std::strerror(errno));
    auto fail = [&](const std::string& what) {
        ::close(fd);
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, what);
    };
    std::size_t written = 0;
    while (written < text.size()) {
        auto n = ::write(fd, text.data() + written, text.size() - written);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            fail("cannot write " + tmp.string() + ": " + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0)
        fail("cannot sync " + tmp.string() + ": " + std::strerror(errno));
    if (opts.before_rename) {
        try {
            opts.before_rename();
        } catch (const std::exception& e) {
            fail(std::string("save aborted: ") + e.what());
        }
    }
    ::close(fd);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        auto err = std::string(std::strerror(errno));
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot replace " + path.string() + ": " + err);
    }
}

// Operations.

Bank create_course(const Bank& bank, const std::string& course_id, const std::string& subject)
{
    if (!is_valid_course_id(course_id))
        throw Error(ErrorCode::InvalidCourseId, "invalid course id \"" + course_id + "\"");
    if (detail::is_blank(subject))
        throw Error(ErrorCode::InvalidArgument, "subject must not be empty");
    if (find_course(bank, course_id))
        throw Error(ErrorCode::DuplicateCourse, "course exists: " + course_id);
    Bank out = bank;
    out.courses.push_back(Course{course_id, subject});
    return out;
}

namespace {

std::vector<Diagnostic> check_question(const Question& q, Dialect dialect)
{
    auto diags = validate(q, dialect);
    if (has_errors(diags))
        throw Error(ErrorCode::Validation, "question fails validation", diags);
    return diags;
}

} // namespace

AddResult add_question(const Bank& bank, const std::string& course_id, const Question& question,
                       Dialect dialect, Timestamp now)
{
    if (!find_course(bank, course_id))
        throw Error(ErrorCode::UnknownCourse, "unknown course \"" + course_id + "\"");
    auto warnings = check_question(question, dialect);
    AddResult out{bank, bank.next_record_id, std::move(warnings)};
    QuestionRecord r;
    r.record_id = bank.next_record_id;
    r.course_id = course_id;
    r.qtype_code = type_code(classify(question));
    r.question = question;
    r.created_at = now;
    r.updated_at = now;
    out.bank.records.push_back(std::move(r));
    out.bank.next_record_id = bank.next_record_id + 1;
    return out;
}

std::vector<QuestionRecord> list_records(const Bank& bank, const RecordFilter& filter)
{
    std::vector<QuestionRecord> out;
    for (const auto& r : bank.records) {
        if (filter.course_id && r.course_id != *filter.course_id)
            continue;
        if (filter.qtype_code && r.qtype_code != *filter.qtype_code)
            continue;
        if (filter.title_substring &&
            (!r.question.title || r.question.title->find(*filter.title_substring) == std::string::npos))
            continue;
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(),
              [](const QuestionRecord& a, const QuestionRecord& b) { return a.record_id < b.record_id; });
    return out;
}

Bank update_question(const Bank& bank, std::int64_t record_id, const Question& question,
                     Dialect dialect, Timestamp now)
{
    if (!find_record(bank, record_id))
        throw Error(ErrorCode::UnknownRecord, "unknown record " + std::to_string(record_id));
    check_question(question, dialect);
    Bank out = bank;
    for (auto& r : out.records) {
        if (r.record_id != record_id)
            continue;
        r.question = question;
        r.qtype_code = type_code(classify(question));
        r.updated_at = now;
    }
    return out;
}

Bank remove_question(const Bank& bank, std::int64_t record_id)
{
    if (!find_record(bank, record_id))
        throw Error(ErrorCode::UnknownRecord, "unknown record " + std::to_string(record_id));
    Bank out = bank;
    std::erase_if(out.records, [&](const QuestionRecord& r) { return r.record_id == record_id; });
    return out;
}

std::string export_gift(const Bank& bank, const RecordFilter& filter, Dialect dialect)
{
    std::vector<std::string> chunks;
    std::optional<std::string> course;
    for (const auto& r : list_records(bank, filter)) {
        if (r.course_id != course) {
            course = r.course_id;
            const auto* c = find_course(bank, r.course_id);
            chunks.push_back("$CATEGORY: " + r.course_id + "/" +
                             detail::collapse_space(c ? c->subject : std::string()));
        }
        Question q = r.question;
        if (!q.title || detail::is_blank(*q.title))
            q.title = std::to_string(r.record_id);
        chunks.push_back("// Course ID: " + r.course_id + "\n// Ques type: " +
                         std::to_string(r.qtype_code) + "\n" + serialize_question(q, dialect));
    }
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i > 0)
            out += "\n\n";
        out += chunks[i];
    }
    if (!out.empty())
        out += "\n";
    return out;
}

ImportResult import_gift(const Bank& bank, const std::string& course_id, std::string_view text,
                         Dialect dialect, Timestamp now)
{
    if (!find_course(bank, course_id))
        throw Error(ErrorCode::UnknownCourse, "unknown course \"" + course_id + "\"");
    auto parsed = parse_document(text, dialect);
    ImportResult out{bank, {}, std::move(parsed.diagnostics)};
    for (const auto& pq : parsed.questions) {
        try {
            auto added = add_question(out.bank, course_id, pq.question, dialect, now);
            out.bank = std::move(added.bank);
            out.record_ids.push_back(added.record_id);
        } catch (const Error& e) {
            for (auto d : e.diagnostics()) {
                d.line = pq.line;
                out.diagnostics.push_back(std::move(d));
            }
        }
    }
    return out;
}

} // namespace giftsmith
