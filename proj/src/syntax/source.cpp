#include "microproof/syntax/source.h"

#include <algorithm>

#include <fmt/format.h>

namespace microproof::syntax {

std::string to_string(const Span& s) {
    return fmt::format("{}:{}-{}:{}", s.begin.line, s.begin.col + 1, s.end.line, s.end.col + 1);
}

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

LineMap::LineMap(std::string_view text) : text_(text) {
    starts_.push_back(0);
    for (std::uint32_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') starts_.push_back(i + 1);
}

Position LineMap::at_offset(std::uint32_t offset) const {
    offset = std::min<std::uint32_t>(offset, static_cast<std::uint32_t>(text_.size()));
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    std::uint32_t line = static_cast<std::uint32_t>(it - starts_.begin());
    std::uint32_t col = 0;
    for (std::uint32_t i = starts_[line - 1]; i < offset; ++i)
        if (!is_continuation(static_cast<unsigned char>(text_[i]))) ++col;
    return {offset, line, col};
}

std::uint32_t LineMap::offset_of(std::uint32_t line, std::uint32_t col) const {
    if (line == 0) return 0;
    if (line > starts_.size()) return static_cast<std::uint32_t>(text_.size());
    std::uint32_t i = starts_[line - 1];
    std::uint32_t seen = 0;
    while (i < text_.size() && text_[i] != '\n') {
        if (!is_continuation(static_cast<unsigned char>(text_[i]))) {
            if (seen == col) return i;
            ++seen;
        }
        ++i;
    }
    return i;
}

}  // namespace microproof::syntax
