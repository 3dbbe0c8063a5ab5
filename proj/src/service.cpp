#include "giftsmith/service.hpp"

#include "embedded_assets.hpp"
#include "giftsmith/question_json.hpp"
#include "giftsmith/writer.hpp"

#include <httplib.h>

#include <charconv>

namespace giftsmith {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body)
{
    return HttpResponse{status, "application/json", body.dump(), {}};
}

HttpResponse error_response(int status, const std::string& message,
                            const std::vector<Diagnostic>& diags = {})
{
    return json_response(status, json{{"error", message}, {"diagnostics", diagnostics_to_json(diags)}});
}

int status_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::UnknownCourse:
    case ErrorCode::UnknownRecord:
        return 404;
    case ErrorCode::DuplicateCourse:
        return 409;
    case ErrorCode::Io:
    case ErrorCode::MalformedBank:
    case ErrorCode::UnsupportedVersion:
        return 500;
    default:
        return 400;
    }
}

HttpResponse from_error(const Error& e)
{
    auto diags = e.diagnostics();
    if (diags.empty() && status_for(e) == 400)
        diags.push_back(make_error("bad-request", e.what()));
    return error_response(status_for(e), e.what(), diags);
}

json course_to_json(const Course& c)
{
    return json{{"course_id", c.course_id}, {"subject", c.subject}};
}

json record_to_json(const QuestionRecord& r)
{
    return json{{"record_id", r.record_id},
                {"course_id", r.course_id},
                {"qtype_code", r.qtype_code},
                {"question", question_to_json(r.question)},
                {"created_at", format_timestamp(r.created_at)},
                {"updated_at", format_timestamp(r.updated_at)}};
}

json parse_body(std::string_view body)
{
    try {
        auto j = json::parse(body);
        if (!j.is_object())
            throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
}

std::string body_string(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw Error(ErrorCode::InvalidArgument, std::string("missing string member \"") + key + "\"");
    return it->get<std::string>();
}

Dialect dialect_from(const std::optional<std::string>& name)
{
    if (!name || name->empty())
        return Dialect::Paper;
    auto d = dialect_from_name(*name);
    if (!d)
        throw Error(ErrorCode::InvalidArgument, "unknown dialect \"" + *name + "\"");
    return *d;
}

Dialect body_dialect(const json& j)
{
    auto it = j.find("dialect");
    if (it == j.end() || it->is_null())
        return Dialect::Paper;
    if (!it->is_string())
        throw Error(ErrorCode::InvalidArgument, "\"dialect\" must be a string");
    return dialect_from(it->get<std::string>());
}

struct Target {
    std::string path;
    httplib::Params query;

    std::optional<std::string> param(const std::string& key) const
    {
        auto it = query.find(key);
        if (it == query.end() || it->second.empty())
            return std::nullopt;
        return it->second;
    }
};

Target split_target(std::string_view target)
{
    Target t;
    auto q = target.find('?');
    t.path = httplib::detail::decode_url(std::string(target.substr(0, q)), false);
    if (q != std::string_view::npos)
        httplib::detail::parse_query_text(std::string(target.substr(q + 1)), t.query);
    return t;
}

RecordFilter filter_from(const Target& t)
{
    RecordFilter f;
    f.course_id = t.param("course");
    if (auto type = t.param("type")) {
        int code = 0;
        auto res = std::from_chars(type->data(), type->data() + type->size(), code);
        if (res.ec != std::errc() || res.ptr != type->data() + type->size() || !type_from_code(code))
            throw Error(ErrorCode::InvalidArgument, "type must be a question type code 1-6");
        f.qtype_code = code;
    }
    f.title_substring = t.param("title");
    return f;
}

std::optional<std::int64_t> record_id_from(std::string_view path)
{
    constexpr std::string_view prefix = "/api/questions/";
    if (!path.starts_with(prefix))
        return std::nullopt;
    auto rest = path.substr(prefix.size());
    std::int64_t id = 0;
    auto res = std::from_chars(rest.data(), rest.data() + rest.size(), id);
    if (res.ec != std::errc() || res.ptr != rest.data() + rest.size() || rest.empty())
        return std::nullopt;
    return id;
}

HttpResponse method_not_allowed()
{
    return error_response(405, "method not allowed");
}

} // namespace

AuthoringService::AuthoringService(std::filesystem::path bank_path)
    : path_(std::move(bank_path))
{
    if (std::filesystem::exists(path_))
        bank_ = std::make_shared<const Bank>(open_bank(path_));
    else
        bank_ = std::make_shared<const Bank>();
}

std::shared_ptr<const Bank> AuthoringService::snapshot() const
{
    std::lock_guard lock(snapshot_mutex_);
    return bank_;
}

template <class F>
HttpResponse AuthoringService::mutate(F&& op)
{
    std::lock_guard writer(write_mutex_);
    auto current = snapshot();
    auto [next, response] = op(*current);
    save_bank(next, path_);
    {
        std::lock_guard lock(snapshot_mutex_);
        bank_ = std::make_shared<const Bank>(std::move(next));
    }
    return response;
}

HttpResponse AuthoringService::handle_request(std::string_view method, std::string_view target,
                                              std::string_view body)
{
    try {
        auto t = split_target(target);
        const auto& path = t.path;

        if (path == "/api/courses") {
            if (method == "GET") {
                json out{{"courses", json::array()}};
                for (const auto& c : snapshot()->courses)
                    out["courses"].push_back(course_to_json(c));
                return json_response(200, out);
            }
            if (method == "POST") {
                auto j = parse_body(body);
                auto id = body_string(j, "course_id");
                auto subject = body_string(j, "subject");
                return mutate([&](const Bank& b) {
                    auto next = create_course(b, id, subject);
                    return std::pair{std::move(next),
                                     json_response(201, json{{"course", course_to_json(Course{id, subject})}})};
                });
            }
            return method_not_allowed();
        }

        if (path == "/api/questions") {
            if (method == "GET") {
                auto filter = filter_from(t);
                json out{{"records", json::array()}};
                for (const auto& r : list_records(*snapshot(), filter))
                    out["records"].push_back(record_to_json(r));
                return json_response(200, out);
            }
            if (method == "POST") {
                auto j = parse_body(body);
                auto course = body_string(j, "course_id");
                auto q = question_from_json(j.value("question", json()));
                auto dialect = body_dialect(j);
                return mutate([&](const Bank& b) {
                    auto added = add_question(b, course, q, dialect);
                    auto rec = record_to_json(*find_record(added.bank, added.record_id));
                    return std::pair{std::move(added.bank),
                                     json_response(201, json{{"record", rec},
                                                             {"diagnostics", diagnostics_to_json(added.warnings)}})};
                });
            }
            return method_not_allowed();
        }

        if (auto id = record_id_from(path)) {
            if (method == "GET") {
                auto snap = snapshot();
                const auto* r = find_record(*snap, *id);
                if (!r)
                    return error_response(404, "unknown record " + std::to_string(*id));
                return json_response(200, json{{"record", record_to_json(*r)}});
            }
            if (method == "PUT") {
                auto j = parse_body(body);
                auto q = question_from_json(j.value("question", json()));
                auto dialect = body_dialect(j);
                return mutate([&](const Bank& b) {
                    auto next = update_question(b, *id, q, dialect);
                    auto rec = record_to_json(*find_record(next, *id));
                    return std::pair{std::move(next), json_response(200, json{{"record", rec}})};
                });
            }
            if (method == "DELETE") {
                return mutate([&](const Bank& b) {
                    return std::pair{remove_question(b, *id), json_response(200, json{{"deleted", *id}})};
                });
            }
            return method_not_allowed();
        }

        if (path == "/api/preview") {
            if (method != "POST")
                return method_not_allowed();
            auto j = parse_body(body);
            auto q = question_from_json(j.value("question", json()));
            auto dialect = body_dialect(j);
            auto diags = validate(q, dialect);
            if (has_errors(diags))
                return error_response(400, "question fails validation", diags);
            return json_response(200, json{{"gift", serialize_question(q, dialect)},
                                           {"qtype_code", type_code(classify(q))},
                                           {"diagnostics", diagnostics_to_json(diags)}});
        }

        if (path == "/api/export") {
            if (method != "GET")
                return method_not_allowed();
            auto filter = filter_from(t);
            auto dialect = dialect_from(t.param("dialect"));
            auto snap = snapshot();
            if (filter.course_id && !find_course(*snap, *filter.course_id))
                return error_response(404, "unknown course \"" + *filter.course_id + "\"");
            HttpResponse r{200, "text/plain; charset=utf-8", export_gift(*snap, filter, dialect), {}};
            r.headers.emplace_back("Content-Disposition",
                                   "attachment; filename=\"" + filter.course_id.value_or("bank") + ".gift\"");
            return r;
        }

        if (path == "/api/import") {
            if (method != "POST")
                return method_not_allowed();
            auto j = parse_body(body);
            auto course = body_string(j, "course_id");
            auto text = body_string(j, "gift");
            auto dialect = body_dialect(j);
            return mutate([&](const Bank& b) {
                auto result = import_gift(b, course, text, dialect);
                json out{{"record_ids", result.record_ids},
                         {"diagnostics", diagnostics_to_json(result.diagnostics)}};
                return std::pair{std::move(result.bank), json_response(200, out)};
            });
        }

        if (path.starts_with("/api/"))
            return error_response(404, "no such endpoint " + path);

        if (method != "GET")
            return method_not_allowed();
        auto wanted = path == "/" ? std::string("/index.html") : path;
        for (const auto& f : assets::embedded_files()) {
            if (f.path == wanted)
                return HttpResponse{200, std::string(f.content_type), std::string(f.data), {}};
        }
        return error_response(404, "not found: " + path);
    } catch (const Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

struct LoopbackServer::Impl {
    explicit Impl(AuthoringService& s) : service(s) {}
    AuthoringService& service;
    httplib::Server server;
};

LoopbackServer::LoopbackServer(AuthoringService& service)
    : impl_(std::make_unique<Impl>(service))
{
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        auto target = req.target.empty() ? req.path : req.target;
        auto out = impl_->service.handle_request(req.method, target, req.body);
        res.status = out.status;
        for (const auto& [k, v] : out.headers)
            res.set_header(k, v);
        res.set_content(out.body, out.content_type);
    };
    const std::string any = R"(/.*)";
    impl_->server.Get(any, handler);
    impl_->server.Post(any, handler);
    impl_->server.Put(any, handler);
    impl_->server.Delete(any, handler);
}

LoopbackServer::~LoopbackServer() = default;

int LoopbackServer::bind(int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port("127.0.0.1");
    return impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
}

bool LoopbackServer::listen()
{
    return impl_->server.listen_after_bind();
}

void LoopbackServer::stop()
{
    impl_->server.stop();
}

} // namespace giftsmith
