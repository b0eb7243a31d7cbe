#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlc/csv.hpp"
#include "tlc/error.hpp"
#include "tlc/function_class.hpp"

namespace tlc {

/// Rows of a numeric CSV plus optional row names and `# KEY=value` directives.
struct NumericCsv {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;  // empty when no row carries a name
  std::map<std::string, double> directives;
};

/// Comment lines start with '#'. A comment of the form `# KEY=value` with a
/// numeric value is recorded as a directive. When `allow_names` is set, a
/// non-numeric first field is taken as the row name, and a leading row whose
/// first field is `name` is skipped as a header.
inline NumericCsv read_numeric_csv(std::istream& in, const std::string& source, bool allow_names) {
  NumericCsv out;
  std::string line;
  std::size_t lineno = 0;
  bool any_named = false;
  bool any_unnamed = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const std::string_view d = trim(body.substr(1));
      const auto eq = d.find('=');
      if (eq != std::string_view::npos) {
        const std::string key(trim(d.substr(0, eq)));
        double v = 0.0;
        if (!key.empty() && parse_double(d.substr(eq + 1), v)) out.directives[key] = v;
      }
      continue;
    }
    auto fields = split_fields(body, ',');
    std::string name;
    std::size_t first = 0;
    double probe = 0.0;
    if (allow_names && !parse_double(fields.front(), probe)) {
      name = std::string(trim(fields.front()));
      if (out.rows.empty() && !any_named && (name == "name" || name == "Name")) continue;
      first = 1;
      any_named = true;
    } else {
      any_unnamed = true;
    }
    std::vector<double> row;
    row.reserve(fields.size() - first);
    for (std::size_t k = first; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v)) {
        throw ParseError(source, lineno, "field " + std::to_string(k + 1) + " ('" +
                                             std::string(trim(fields[k])) + "') is not numeric");
      }
      row.push_back(v);
    }
    if (row.empty()) throw ParseError(source, lineno, "row has no numeric columns");
    if (!out.rows.empty() && row.size() != out.rows.front().size()) {
      throw ParseError(source, lineno,
                       "row has " + std::to_string(row.size()) + " columns, expected " +
                           std::to_string(out.rows.front().size()));
    }
    out.rows.push_back(std::move(row));
    out.names.push_back(std::move(name));
  }
  if (out.rows.empty()) throw ParseError(source, lineno, "no data rows");
  if (any_named && any_unnamed) throw ParseError(source, lineno, "either every row or no row may carry a name");
  if (!any_named) out.names.clear();
  return out;
}

inline NumericCsv read_numeric_csv_file(const std::string& path, bool allow_names) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return read_numeric_csv(in, path, allow_names);
}

namespace detail {
inline std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

inline std::optional<double> directive(const NumericCsv& csv, const std::string& key) {
  auto it = csv.directives.find(key);
  if (it == csv.directives.end()) return std::nullopt;
  return it->second;
}
}  // namespace detail

/// Function class CSV: one function per row; `# H0=<v>` may raise the bound.
inline FunctionTable parse_function_table(std::istream& in, const std::string& source) {
  auto csv = read_numeric_csv(in, source, true);
  const std::size_t n = csv.rows.front().size();
  return FunctionTable(n, detail::flatten(csv.rows), std::move(csv.names),
                       detail::directive(csv, "H0"));
}

inline FunctionTable load_function_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_function_table(in, path);
}

/// Loss table CSV: one candidate per row; `# L0=<v>` may raise the bound.
inline LossTable parse_loss_table(std::istream& in, const std::string& source) {
  auto csv = read_numeric_csv(in, source, true);
  const std::size_t n = csv.rows.front().size();
  return LossTable(n, detail::flatten(csv.rows), std::move(csv.names), detail::directive(csv, "L0"));
}

inline LossTable load_loss_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_loss_table(in, path);
}

}  // namespace tlc
