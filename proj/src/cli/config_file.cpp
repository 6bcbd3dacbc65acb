#include "textcausal/cli/config_file.hpp"

#include <cctype>
#include <charconv>

#include "textcausal/common/errors.hpp"
#include "textcausal/crossfit/result_io.hpp"

namespace textcausal {

namespace {

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        const auto path = parse_key();
        skip_blank();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          auto& next = (*table)[part];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("'" + part + "' is already a value");
          table = &next;
        }
        end_of_line();
        continue;
      }
      const auto path = parse_key();
      skip_blank();
      expect('=');
      skip_blank();
      nlohmann::json value = parse_value();
      nlohmann::json* target = table;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto& next = (*target)[path[i]];
        if (next.is_null()) next = nlohmann::json::object();
        if (!next.is_object()) fail("'" + path[i] + "' is already a value");
        target = &next;
      }
      if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
      (*target)[path.back()] = std::move(value);
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (pos_ < text_.size() && text_[pos_] != '\n') fail("unexpected trailing characters");
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts;
    while (true) {
      skip_blank();
      std::string part;
      if (peek() == '"') {
        part = parse_basic_string();
      } else {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-')) {
          part += text_[pos_++];
        }
      }
      if (part.empty()) fail("expected a key");
      parts.push_back(part);
      skip_blank();
      if (peek() != '.') break;
      ++pos_;
    }
    return parts;
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n':
          out += '\n';
          break;
        case 't':
          out += '\t';
          break;
        case '"':
          out += '"';
          break;
        case '\\':
          out += '\\';
          break;
        default:
          fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  nlohmann::json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    std::string token;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           text_[pos_] != '#' && text_[pos_] != '\n' && text_[pos_] != ' ' &&
           text_[pos_] != '\t' && text_[pos_] != '\r') {
      token += text_[pos_++];
    }
    if (token.empty()) fail("expected a value");
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits += ch;
    }
    const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                          digits == "inf" || digits == "nan";
    if (!is_float) {
      std::int64_t v = 0;
      const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) return v;
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      } catch (const std::logic_error&) {
      }
    }
    fail("cannot parse value '" + token + "'");
  }

  nlohmann::json parse_array() {
    expect('[');
    nlohmann::json arr = nlohmann::json::array();
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  void skip_array_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view content) { return TomlParser(content).parse(); }

nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_text(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  const auto first = content.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && content[first] == '{')) {
    try {
      return nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
  }
  return parse_toml(content);
}

}  // namespace textcausal
