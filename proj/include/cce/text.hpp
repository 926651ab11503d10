#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cce {

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

/// Query tokenizer: lowercase, split on whitespace, then peel leading and
/// trailing ASCII punctuation off each chunk as one-character tokens.
/// "Patches, (torso)" -> ["patches", ",", "(", "torso", ")"].
std::vector<std::string> tokenize(std::string_view text);

/// Split on runs of ASCII whitespace, no other processing.
std::vector<std::string> split_whitespace(std::string_view text);

/// Split on a single delimiter character, keeping empty fields.
std::vector<std::string> split_fields(std::string_view line, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Strip a trailing '\r' (files written on Windows).
std::string_view chomp(std::string_view line);

/// Read a whole file; throws IoError naming the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace cce
