#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace patmine {

void require_file(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);

void write_text(const std::string& path, const std::string& content);

// One JSON object per non-empty line; fn(obj, 1-based line number).
void for_each_jsonl(const std::string& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

std::vector<std::string> split_tab(const std::string& line);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t hash_strings(const std::vector<std::string>& items);

// printf-"%.*g" with enough digits to round-trip a double exactly.
std::string format_real(double x);
// Fixed decimals, for report tables.
std::string format_fixed(double x, int decimals);

}  // namespace patmine
