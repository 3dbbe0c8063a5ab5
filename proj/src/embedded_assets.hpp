#ifndef GIFTSMITH_EMBEDDED_ASSETS_HPP
#define GIFTSMITH_EMBEDDED_ASSETS_HPP

#include <span>
#include <string_view>

namespace giftsmith::assets {

struct EmbeddedFile {
    std::string_view path; // "/index.html", "/assets/app.js", ...
    std::string_view content_type;
    std::string_view data;
};

std::span<const EmbeddedFile> embedded_files();

} // namespace giftsmith::assets

#endif
