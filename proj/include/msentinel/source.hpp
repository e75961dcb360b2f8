#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msentinel {

// Base error for everything the library throws. Message already carries
// file/line context where it exists.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct LexError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct LowerError : Error {
    using Error::Error;
};
struct InputError : Error {
    using Error::Error;
};

// A source file split into physical lines, 1-based numbering.
struct SourceFile {
    std::string path;
    std::vector<std::string> lines;

    int line_count() const { return static_cast<int>(lines.size()); }

    const std::string& line(int n) const { return lines.at(static_cast<size_t>(n - 1)); }

    // Splits on LF; a trailing CR on each line (CRLF input) is stripped.
    // An empty file has zero lines; a file ending in a newline does not
    // get a phantom empty line after it.
    static SourceFile from_text(std::string path, std::string_view text) {
        SourceFile f;
        f.path = std::move(path);
        size_t pos = 0;
        while (pos < text.size()) {
            size_t nl = text.find('\n', pos);
            std::string_view line =
                nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            f.lines.emplace_back(line);
            if (nl == std::string_view::npos)
                break;
            pos = nl + 1;
        }
        return f;
    }

    static SourceFile load(const std::filesystem::path& p,
                           std::string stored_path = std::string()) {
        std::ifstream in(p, std::ios::binary);
        if (!in)
            throw InputError("cannot open source file: " + p.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_text(stored_path.empty() ? p.string() : std::move(stored_path), buf.str());
    }
};

} // namespace msentinel
