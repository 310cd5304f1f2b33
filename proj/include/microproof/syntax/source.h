#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace microproof::syntax {

/// A point in a source file. Lines are 1-based; columns are 0-based and count
/// Unicode code points, not bytes.
struct Position {
    std::uint32_t offset = 0;
    std::uint32_t line = 1;
    std::uint32_t col = 0;

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position& a, const Position& b) { return a.offset <=> b.offset; }
};

struct Span {
    Position begin;
    Position end;

    friend bool operator==(const Span&, const Span&) = default;
    bool contains(const Span& other) const {
        return begin.offset <= other.begin.offset && other.end.offset <= end.offset;
    }
    static Span merge(const Span& a, const Span& b) { return {a.begin < b.begin ? a.begin : b.begin,
                                                               a.end < b.end ? b.end : a.end}; }
};

std::string to_string(const Span& s);

/// Converts between byte offsets and line/column positions of one source text.
class LineMap {
public:
    explicit LineMap(std::string_view text);
    Position at_offset(std::uint32_t offset) const;
    /// Byte offset of (line, col); clamps to the end of the line or text.
    std::uint32_t offset_of(std::uint32_t line, std::uint32_t col) const;
    std::size_t line_count() const { return starts_.size(); }

private:
    std::string_view text_;
    std::vector<std::uint32_t> starts_;
};

}  // namespace microproof::syntax
