#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace finqa {

std::string read_text_file(const std::string& path);

// Writes to a sibling temp file and renames into place, so a file that
// exists under its final name is always complete.
void write_file_atomic(const std::string& path, std::string_view content);

// Invokes fn(line_number, parsed) per non-blank line; parse errors are
// reported with the offending line number. Line numbers are 1-based.
void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn);

std::vector<nlohmann::json> read_jsonl(const std::string& path);

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows);

}  // namespace finqa
