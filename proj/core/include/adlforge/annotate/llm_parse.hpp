#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace adlforge::annotate {

struct QaItem {
  std::string question;
  std::string answer;

  friend bool operator==(const QaItem&, const QaItem&) = default;
};

struct ParsedMapping {
  std::vector<QaItem> items;
  std::vector<std::string> warnings;
  std::string strategy;  // "strict" | "extracted" | "normalized"
};

/// Removes a markdown code fence (``` or ```json) around the payload, if any.
std::string strip_code_fences(std::string_view text);

/// Substring from the first '{' or '[' to the last matching closer; empty if
/// there is none.
std::string extract_bracketed(std::string_view text);

/// Rewrites a Python-literal-style structure into JSON: single-quoted strings,
/// True/False/None, trailing commas, raw control characters in strings.
std::string normalize_python_literal(std::string_view text);

/// Parses model output into a JSON value trying, in order: strict JSON,
/// fence/prose stripping, literal normalization. nullopt if all fail.
std::optional<nlohmann::json> parse_json_lenient(std::string_view text, std::string* strategy = nullptr);

/// Parses a Q/A mapping (expect == 1: object or one-element list) or a list
/// of exactly `expect` mappings. Throws ParseError or ArityError carrying the
/// raw text.
ParsedMapping parse_llm_mapping(std::string_view text, int expect);

/// Strict JSON rendering of parsed items (object for expect == 1).
std::string to_strict_json(const std::vector<QaItem>& items, int expect);

}  // namespace adlforge::annotate
