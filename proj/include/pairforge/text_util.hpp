#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pairforge {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
bool iequals(std::string_view a, std::string_view b);

// Copies the initial capitalization of `model` onto `word`.
std::string match_initial_case(std::string_view model, std::string word);

std::string read_file(const std::string& path);

}  // namespace pairforge
