#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commchar/error.hpp"
#include "commchar/text.hpp"

namespace commchar {

// Minimal reader for the TOML/INI subset used by commchar config files:
// top-level `key = value` pairs, `[section]` headers, `#`/`;` comments,
// optionally quoted scalars, and comma lists optionally wrapped in [...].
class ConfigDocument {
public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;  // "" for the top level
    std::vector<Entry> entries;
    int line = 0;

    const Entry* find(std::string_view key) const {
      for (const auto& e : entries)
        if (e.key == key) return &e;
      return nullptr;
    }
  };

  static ConfigDocument parse(std::string_view content, const std::string& origin = "<config>") {
    ConfigDocument doc;
    doc.sections_.push_back(Section{"", {}, 0});
    int line_no = 0;
    for (std::string_view raw : text::split(content, '\n')) {
      ++line_no;
      const std::string line = strip_comment(raw);
      const auto body = text::trim(line);
      if (body.empty()) continue;
      const auto where = origin + ":" + std::to_string(line_no);
      if (body.front() == '[') {
        if (body.back() != ']') throw ConfigError(where + ": malformed section header");
        const auto name = std::string(text::trim(body.substr(1, body.size() - 2)));
        if (name.empty()) throw ConfigError(where + ": empty section name");
        if (doc.find_section(name)) throw ConfigError(where + ": duplicate section [" + name + "]");
        doc.sections_.push_back(Section{name, {}, line_no});
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
      const auto key = std::string(text::trim(body.substr(0, eq)));
      if (key.empty()) throw ConfigError(where + ": empty key");
      auto& section = doc.sections_.back();
      if (section.find(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
      section.entries.push_back(Entry{key, unquote(text::trim(body.substr(eq + 1))), line_no});
    }
    return doc;
  }

  const std::vector<Section>& sections() const { return sections_; }
  const Section& top() const { return sections_.front(); }

  const Section* find_section(std::string_view name) const {
    for (const auto& s : sections_)
      if (s.name == name) return &s;
    return nullptr;
  }

  // "3, 10, 30" or "[3, 10, 30]" -> {"3", "10", "30"}; quotes stripped per element.
  static std::vector<std::string> list(std::string_view value) {
    auto body = text::trim(value);
    if (!body.empty() && body.front() == '[' && body.back() == ']') body = text::trim(body.substr(1, body.size() - 2));
    std::vector<std::string> out;
    if (body.empty()) return out;
    for (auto part : text::split(body, ',')) out.push_back(unquote(text::trim(part)));
    return out;
  }

  static std::string quote(std::string_view value) {
    std::string out = "\"";
    for (const char c : value) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }

private:
  static std::string strip_comment(std::string_view line) {
    std::string out;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '\\' && quoted && i + 1 < line.size()) {
        out.push_back(c);
        out.push_back(line[++i]);
        continue;
      }
      if (c == '"') quoted = !quoted;
      if (!quoted && (c == '#' || c == ';')) break;
      out.push_back(c);
    }
    return out;
  }

  static std::string unquote(std::string_view value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      std::string out;
      for (std::size_t i = 1; i + 1 < value.size(); ++i) {
        if (value[i] == '\\' && i + 2 < value.size()) ++i;
        out.push_back(value[i]);
      }
      return out;
    }
    return std::string(value);
  }

  std::vector<Section> sections_;
};

}  // namespace commchar
