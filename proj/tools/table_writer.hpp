#pragma once

// Streaming CSV / JSON table output. Floating-point cells are printed with 12
// significant digits; integers are printed exactly.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace delta_lab::cli {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::uint64_t, std::int64_t, double, bool, std::string, Json>;

enum class Format { csv, json };

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// A double rounded to 12 significant digits, as a JSON number.
inline Json json_double(double v) {
  if (!std::isfinite(v)) return format_double(v);
  return std::strtod(format_double(v).c_str(), nullptr);
}

inline Json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return json_double(v);
        } else {
          return Json(v);
        }
      },
      c);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string to_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return csv_escape(v);
        } else if constexpr (std::is_same_v<T, Json>) {
          return csv_escape(v.dump());
        } else {
          return std::to_string(v);
        }
      },
      c);
}

class TableWriter {
 public:
  TableWriter(std::ostream& out, Format format, Json meta, std::vector<std::string> columns)
      : out_(out), format_(format), columns_(std::move(columns)) {
    if (format_ == Format::csv) {
      for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns_[i]);
      out_ << '\n';
    } else {
      out_ << "{\"meta\":" << meta.dump() << ",\"rows\":[";
    }
  }

  TableWriter(const TableWriter&) = delete;
  TableWriter& operator=(const TableWriter&) = delete;

  ~TableWriter() { finish(); }

  void row(const std::vector<Cell>& cells) {
    if (format_ == Format::csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << to_csv(cells[i]);
      out_ << '\n';
      return;
    }
    Json obj = Json::object();
    for (std::size_t i = 0; i < cells.size() && i < columns_.size(); ++i) obj[columns_[i]] = to_json(cells[i]);
    out_ << (rows_ ? "," : "") << obj.dump();
    ++rows_;
  }

  void finish() {
    if (done_) return;
    done_ = true;
    if (format_ == Format::json) out_ << "]}\n";
    out_.flush();
  }

 private:
  std::ostream& out_;
  Format format_;
  std::vector<std::string> columns_;
  std::size_t rows_ = 0;
  bool done_ = false;
};

}  // namespace delta_lab::cli
