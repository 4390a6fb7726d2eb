#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

// CSV emission with two properties the tests rely on: numbers are printed
// with 17 significant digits (round-trip exact, byte-stable across runs),
// and files appear atomically (written to <name>.tmp, renamed on close) so
// an aborted run never leaves a truncated file behind.

namespace uswg {

std::string format_g17(double v);
std::string format_int(long long v);

// whole-file variant of the same write-then-rename discipline (manifests)
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& header);
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;
    ~CsvWriter();

    void row(const std::vector<std::string>& cells);
    void line(const std::string& text);  // verbatim, e.g. comment footers
    void close();                        // flush and rename into place

  private:
    std::filesystem::path final_path_, tmp_path_;
    std::FILE* f_ = nullptr;
    bool closed_ = false;
};

} // namespace uswg
