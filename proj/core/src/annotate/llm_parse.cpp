#include "adlforge/annotate/llm_parse.hpp"

#include <cctype>

#include <fmt/format.h>

#include "adlforge/model/error.hpp"

namespace adlforge::annotate {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<json> try_parse(std::string_view s) {
  if (trim(s).empty()) return std::nullopt;
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void append_escaped_control(std::string& out, char c) {
  switch (c) {
    case '\n': out += "\\n"; break;
    case '\r': out += "\\r"; break;
    case '\t': out += "\\t"; break;
    default: out += fmt::format("\\u{:04x}", static_cast<unsigned char>(c));
  }
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return std::string(text);
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return std::string(text);
  ++body_start;
  const auto close = text.find("```", body_start);
  return std::string(text.substr(body_start, close == std::string_view::npos ? std::string_view::npos
                                                                              : close - body_start));
}

std::string extract_bracketed(std::string_view text) {
  const auto open = text.find_first_of("{[");
  if (open == std::string_view::npos) return {};
  const char closer = text[open] == '{' ? '}' : ']';
  const auto close = text.rfind(closer);
  if (close == std::string_view::npos || close < open) return {};
  return std::string(text.substr(open, close - open + 1));
}

std::string normalize_python_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 16);
  const std::size_t n = s.size();

  // A single quote closes a string only when the next non-space character
  // is a structural one (or the input ends); apostrophes stay literal.
  auto closes_single = [&](std::size_t i) {
    std::size_t j = i + 1;
    while (j < n && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    return j == n || s[j] == ',' || s[j] == ':' || s[j] == '}' || s[j] == ']';
  };

  std::size_t i = 0;
  while (i < n) {
    const char c = s[i];
    if (c == '"' || c == '\'') {
      const char quote = c;
      out += '"';
      ++i;
      while (i < n) {
        const char d = s[i];
        if (d == '\\' && i + 1 < n) {
          const char e = s[i + 1];
          if (e == '\'') {
            out += '\'';
          } else {
            out += d;
            out += e;
          }
          i += 2;
          continue;
        }
        if (d == quote && (quote == '"' || closes_single(i))) break;
        if (d == '"') {
          out += "\\\"";
        } else if (static_cast<unsigned char>(d) < 0x20) {
          append_escaped_control(out, d);
        } else {
          out += d;
        }
        ++i;
      }
      out += '"';
      ++i;
      continue;
    }
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < n && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < n && (s[j] == '}' || s[j] == ']')) {
        ++i;
        continue;
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) && (i == 0 || !is_ident(s[i - 1]))) {
      std::size_t j = i;
      while (j < n && is_ident(s[j])) ++j;
      const auto word = s.substr(i, j - i);
      if (word == "True") out += "true";
      else if (word == "False") out += "false";
      else if (word == "None") out += "null";
      else out += word;
      i = j;
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

std::optional<json> parse_json_lenient(std::string_view text, std::string* strategy) {
  auto set = [&](const char* s) {
    if (strategy) *strategy = s;
  };
  if (auto j = try_parse(text)) {
    set("strict");
    return j;
  }
  std::vector<std::string> candidates;
  const auto unfenced = strip_code_fences(text);
  candidates.push_back(unfenced);
  if (auto b = extract_bracketed(unfenced); !b.empty()) candidates.push_back(b);
  if (auto b = extract_bracketed(text); !b.empty()) candidates.push_back(b);
  for (const auto& c : candidates)
    if (auto j = try_parse(c)) {
      set("extracted");
      return j;
    }
  for (const auto& c : candidates)
    if (auto j = try_parse(normalize_python_literal(c))) {
      set("normalized");
      return j;
    }
  return std::nullopt;
}

namespace {

QaItem to_item(const json& obj, std::size_t index, std::string_view raw, std::vector<std::string>& warnings) {
  if (!obj.is_object())
    throw ParseError(fmt::format("item {} is not a mapping", index), std::string(raw));
  QaItem item;
  for (const char* key : {"Q", "A"}) {
    const auto it = obj.find(key);
    if (it == obj.end())
      throw ParseError(fmt::format("item {} lacks key \"{}\"", index, key), std::string(raw));
    std::string value;
    if (it->is_string()) {
      value = it->get<std::string>();
    } else if (it->is_number() || it->is_boolean()) {
      value = it->dump();
    } else {
      throw ParseError(fmt::format("item {} key \"{}\" is not text", index, key), std::string(raw));
    }
    (key[0] == 'Q' ? item.question : item.answer) = std::move(value);
  }
  for (const auto& [k, v] : obj.items())
    if (k != "Q" && k != "A") warnings.push_back(fmt::format("item {}: ignored extra key \"{}\"", index, k));
  return item;
}

}  // namespace

ParsedMapping parse_llm_mapping(std::string_view text, int expect) {
  if (expect < 1) throw PreconditionError("expected item count must be >= 1");
  ParsedMapping out;
  auto value = parse_json_lenient(text, &out.strategy);
  if (!value) throw ParseError("reply is not a mapping or list of mappings", std::string(text));

  if (value->is_object()) {
    if (expect != 1)
      throw ArityError(fmt::format("expected a list of {} items, got a single mapping", expect), std::string(text));
    out.items.push_back(to_item(*value, 0, text, out.warnings));
    return out;
  }
  if (!value->is_array()) throw ParseError("reply is neither a mapping nor a list", std::string(text));
  if (static_cast<int>(value->size()) != expect)
    throw ArityError(fmt::format("expected {} item(s), got {}", expect, value->size()), std::string(text));
  for (std::size_t i = 0; i < value->size(); ++i) out.items.push_back(to_item((*value)[i], i, text, out.warnings));
  return out;
}

std::string to_strict_json(const std::vector<QaItem>& items, int expect) {
  auto obj = [](const QaItem& it) { return json{{"Q", it.question}, {"A", it.answer}}; };
  if (expect == 1 && items.size() == 1) return obj(items.front()).dump();
  json arr = json::array();
  for (const auto& it : items) arr.push_back(obj(it));
  return arr.dump();
}

}  // namespace adlforge::annotate
