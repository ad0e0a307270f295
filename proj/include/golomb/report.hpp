#pragma once

// Flat-file persistence for sweep output: a fixed-column CSV and a single
// JSON document carrying meta, records and the optional fit. Writers emit
// byte-identical output for identical input; numbers go out through
// to_chars at 17 significant digits so values round-trip exactly.

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "golomb/harness.hpp"

namespace golomb {

inline constexpr const char* kCsvHeader =
    "p,r,shifts,n_exact,main_term,error,abs_error,sigma2,explicit_bound,phi_pm1,omega_pm1,"
    "phi_ratio";

enum class ReportFormat { csv, json };

inline ReportFormat parse_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw std::invalid_argument("format must be csv or json, got '" + text + "'");
}

struct ReportMeta {
  u64 min_p = 0, max_p = 0;
  u32 r = 0;
  std::string policy = "canonical";
  bool decompose = false;
  u64 seed = 0;
  u64 budget = kDefaultBudget;
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string shifts_token(const std::vector<u64>& shifts) {
  std::string out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(shifts[i]);
  }
  return out;
}

inline std::vector<u64> parse_shifts_token(const std::string& token) {
  std::vector<u64> shifts;
  std::stringstream ss(token);
  std::string tok;
  while (std::getline(ss, tok, ';')) shifts.push_back(std::stoull(tok));
  return shifts;
}

inline void write_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& rec : records) {
    os << rec.p << ',' << rec.r << ',' << shifts_token(rec.shifts) << ',' << rec.n_exact
       << ',' << format_double(rec.main_term) << ',' << format_double(rec.error) << ','
       << format_double(rec.abs_error) << ',';
    if (rec.sigma2) os << format_double(*rec.sigma2);
    os << ',';
    if (rec.explicit_bound) os << format_double(*rec.explicit_bound);
    os << ',' << rec.phi_pm1 << ',' << rec.omega_pm1 << ',';
    if (rec.phi_ratio) os << format_double(*rec.phi_ratio);
    os << '\n';
  }
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void write_json_record(const SweepRecord& rec, std::ostream& os) {
  os << "{\"p\": " << rec.p << ", \"r\": " << rec.r << ", \"shifts\": [";
  for (std::size_t i = 0; i < rec.shifts.size(); ++i) {
    if (i) os << ", ";
    os << rec.shifts[i];
  }
  os << "], \"n_exact\": " << rec.n_exact
     << ", \"main_term\": " << format_double(rec.main_term)
     << ", \"error\": " << format_double(rec.error)
     << ", \"abs_error\": " << format_double(rec.abs_error) << ", \"sigma2\": "
     << (rec.sigma2 ? format_double(*rec.sigma2) : "null") << ", \"explicit_bound\": "
     << (rec.explicit_bound ? format_double(*rec.explicit_bound) : "null")
     << ", \"phi_pm1\": " << rec.phi_pm1 << ", \"omega_pm1\": " << rec.omega_pm1
     << ", \"phi_ratio\": " << (rec.phi_ratio ? format_double(*rec.phi_ratio) : "null")
     << "}";
}

}  // namespace detail

inline void write_json(const std::vector<SweepRecord>& records,
                       const std::optional<FitResult>& fit, const ReportMeta& meta,
                       std::ostream& os) {
  os << "{\n";
  os << "  \"meta\": {\"version\": \"" << detail::json_escape(kVersion)
     << "\", \"seed\": " << meta.seed << ", \"config\": {\"min\": " << meta.min_p
     << ", \"max\": " << meta.max_p << ", \"r\": " << meta.r << ", \"policy\": \""
     << detail::json_escape(meta.policy) << "\", \"decompose\": "
     << (meta.decompose ? "true" : "false") << ", \"budget\": " << meta.budget << "}},\n";
  os << "  \"records\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    os << (i ? ",\n    " : "\n    ");
    detail::write_json_record(records[i], os);
  }
  os << (records.empty() ? "" : "\n  ") << "],\n";
  os << "  \"fit\": ";
  if (fit) {
    os << "{\"slope\": " << format_double(fit->slope)
       << ", \"intercept\": " << format_double(fit->intercept)
       << ", \"sample_count\": " << fit->sample_count
       << ", \"r_value\": " << format_double(fit->r_value)
       << ", \"max_normalized_error\": " << format_double(fit->max_normalized_error)
       << ", \"zero_error_count\": " << fit->zero_error_count << "}";
  } else {
    os << "null";
  }
  os << "\n}\n";
}

inline void write_report(const std::vector<SweepRecord>& records,
                         const std::optional<FitResult>& fit, const ReportMeta& meta,
                         ReportFormat format, const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // LF line ends on every platform
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (format == ReportFormat::csv)
    write_csv(records, os);
  else
    write_json(records, fit, meta, os);
  os.flush();
  if (!os) throw std::runtime_error("failed while writing '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::vector<SweepRecord> read_csv_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::runtime_error("unexpected CSV header: '" + line + "'");
  std::vector<SweepRecord> records;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 12)
      throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    SweepRecord rec;
    rec.p = std::stoull(f[0]);
    rec.r = static_cast<u32>(std::stoul(f[1]));
    rec.shifts = parse_shifts_token(f[2]);
    rec.n_exact = std::stoull(f[3]);
    rec.main_term = std::stod(f[4]);
    rec.error = std::stod(f[5]);
    rec.abs_error = std::stod(f[6]);
    if (!f[7].empty()) rec.sigma2 = std::stod(f[7]);
    if (!f[8].empty()) rec.explicit_bound = std::stod(f[8]);
    rec.phi_pm1 = std::stoull(f[9]);
    rec.omega_pm1 = static_cast<u32>(std::stoul(f[10]));
    if (!f[11].empty()) rec.phi_ratio = std::stod(f[11]);
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<SweepRecord> read_json_records(std::istream& is) {
  nlohmann::json doc = nlohmann::json::parse(is);
  std::vector<SweepRecord> records;
  for (const auto& j : doc.at("records")) {
    SweepRecord rec;
    rec.p = j.at("p").get<u64>();
    rec.r = j.at("r").get<u32>();
    for (const auto& s : j.at("shifts")) rec.shifts.push_back(s.get<u64>());
    rec.n_exact = j.at("n_exact").get<u64>();
    rec.main_term = j.at("main_term").get<double>();
    rec.error = j.at("error").get<double>();
    rec.abs_error = j.at("abs_error").get<double>();
    if (!j.at("sigma2").is_null()) rec.sigma2 = j.at("sigma2").get<double>();
    if (!j.at("explicit_bound").is_null())
      rec.explicit_bound = j.at("explicit_bound").get<double>();
    rec.phi_pm1 = j.at("phi_pm1").get<u64>();
    rec.omega_pm1 = j.at("omega_pm1").get<u32>();
    if (!j.at("phi_ratio").is_null()) rec.phi_ratio = j.at("phi_ratio").get<double>();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace detail

// Reads records back from either format; a document starting with '{' is
// treated as JSON, anything else as CSV.
inline std::vector<SweepRecord> read_records(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
  int c = is.peek();
  while (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
    is.get();
    c = is.peek();
  }
  if (c == std::char_traits<char>::eof()) throw std::runtime_error("'" + path + "' is empty");
  if (c == '{') return detail::read_json_records(is);
  return detail::read_csv_records(is);
}

}  // namespace golomb
