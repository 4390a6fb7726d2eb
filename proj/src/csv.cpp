#include "csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>

#include "errors.hpp"

namespace uswg {

std::string format_g17(double v) {
    if (std::isnan(v)) return "nan";  // gap marker, sign-stable
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_int(long long v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const std::filesystem::path tmp(path.string() + ".tmp");
    std::FILE* f = std::fopen(tmp.c_str(), "w");
    if (!f)
        throw ConfigError("cannot open output file " + tmp.string() + ": " +
                          std::strerror(errno));
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) ==
                        content.size() &&
                    std::fflush(f) == 0;
    std::fclose(f);
    if (!ok) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw ConfigError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw ConfigError("cannot move " + tmp.string() + " to " +
                          path.string() + ": " + ec.message());
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& header)
    : final_path_(path), tmp_path_(path.string() + ".tmp") {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    f_ = std::fopen(tmp_path_.c_str(), "w");
    if (!f_)
        throw ConfigError("cannot open output file " + tmp_path_.string() +
                          ": " + std::strerror(errno));
    line(header);
}

CsvWriter::~CsvWriter() {
    if (!closed_) {
        // abandoned writer: drop the partial file, keep any previous final
        if (f_) std::fclose(f_);
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    line(out);
}

void CsvWriter::line(const std::string& text) {
    if (!f_) throw ConfigError("write to closed CSV " + final_path_.string());
    std::fputs(text.c_str(), f_);
    std::fputc('\n', f_);
}

void CsvWriter::close() {
    if (closed_) return;
    if (std::fflush(f_) != 0 || std::fclose(f_) != 0) {
        f_ = nullptr;
        throw ConfigError("failed writing " + tmp_path_.string());
    }
    f_ = nullptr;
    std::error_code ec;
    std::filesystem::rename(tmp_path_, final_path_, ec);
    if (ec)
        throw ConfigError("cannot move " + tmp_path_.string() + " to " +
                          final_path_.string() + ": " + ec.message());
    closed_ = true;
}

} // namespace uswg
