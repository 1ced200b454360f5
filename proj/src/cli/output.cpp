#include "flinthills/cli/output.hpp"

#include <array>
#include <charconv>
#include <json.hpp>
#include <stdexcept>

namespace flinthills::cli {
namespace {

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (const char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string shortest_decimal(double value) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

Field number(double value) { return Field{Field::Kind::number, shortest_decimal(value)}; }
Field number(const BigFloat& value) { return Field{Field::Kind::number, value.to_decimal(kHighPrecisionDigits)}; }
Field number(std::uint64_t value) { return Field{Field::Kind::number, std::to_string(value)}; }
Field text(std::string value) { return Field{Field::Kind::text, std::move(value)}; }
Field null_field() { return Field{}; }

RecordWriter::RecordWriter(std::ostream& out, Format format, std::vector<std::string> keys)
    : out_(out), format_(format), keys_(std::move(keys)) {
  if (format_ == Format::csv) {
    for (std::size_t i = 0; i < keys_.size(); ++i) out_ << (i ? "," : "") << csv_escape(keys_[i]);
    out_ << '\n';
  }
}

void RecordWriter::write(const std::vector<Field>& fields) {
  if (fields.size() != keys_.size()) throw std::logic_error("record does not match header");
  if (format_ == Format::csv) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out_ << (i ? "," : "") << (fields[i].kind == Field::Kind::null ? "" : csv_escape(fields[i].text));
    }
  } else {
    out_ << '{';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out_ << (i ? "," : "") << nlohmann::json(keys_[i]).dump() << ':';
      switch (fields[i].kind) {
        case Field::Kind::number: out_ << fields[i].text; break;
        case Field::Kind::text: out_ << nlohmann::json(fields[i].text).dump(); break;
        case Field::Kind::null: out_ << "null"; break;
      }
    }
    out_ << '}';
  }
  out_ << '\n';
}

}  // namespace flinthills::cli
