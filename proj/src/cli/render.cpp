#include <cmath>
#include <cstdio>

#include "polybound/cli.hpp"

namespace polybound::cli {

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

namespace {

void write(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        write(value, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write(j[k], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        write(j[k], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string cell(const Json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "n/a";
  std::string s = render_json(v);
  std::string flat;
  for (char ch : s)
    if (ch != '\n') flat += ch;
  std::string squeezed;
  for (char ch : flat)
    if (!(ch == ' ' && !squeezed.empty() && squeezed.back() == ' ')) squeezed += ch;
  for (auto& ch : squeezed)
    if (ch == '|') ch = '/';
  return squeezed;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    return;
  }
  rows.emplace_back(prefix, cell(j));
}

void table(const std::vector<std::pair<std::string, std::string>>& rows, std::string& out) {
  out += "| key | value |\n|---|---|\n";
  for (const auto& [k, v] : rows) out += "| " + k + " | " + v + " |\n";
}

}  // namespace

std::string render_json(const Json& j) {
  std::string out;
  write(j, 0, out);
  return out + "\n";
}

std::string render_markdown(const Json& report) {
  std::string out = "# polybound " + report.value("kind", std::string("report")) + "\n\n";
  out += "Status: **" + report.value("status", std::string("unknown")) + "**\n\n";
  if (report.contains("error")) {
    const auto& e = report.at("error");
    out += "Error `" + e.value("code", std::string()) + "` (exit " + std::to_string(e.value("exit_code", 0)) +
           "): " + e.value("message", std::string()) + "\n\n";
  }

  if (report.contains("results")) {
    Json results = report.at("results");
    if (results.contains("bounds") && results.at("bounds").contains("classical")) {
      const auto& b = results.at("bounds");
      out += "## Bounds\n\n| set | value |\n|---|---|\n";
      for (const char* set : {"classical", "quantum", "nosignaling"}) out += std::string("| ") + set + " | " + cell(b.value(set, Json())) + " |\n";
      out += "\n";
      results.erase("bounds");
    }
    Json audit;
    if (results.contains("audit")) {
      audit = results.at("audit");
      results.erase("audit");
    }
    if (!results.empty()) {
      std::vector<std::pair<std::string, std::string>> rows;
      flatten(results, "", rows);
      out += "## Results\n\n";
      table(rows, out);
      out += "\n";
    }
    if (!audit.is_null()) {
      out += "## Audit\n\n| check | engine | oracle | agree |\n|---|---|---|---|\n";
      for (const auto& c : audit.at("checks"))
        out += "| " + cell(c.at("check")) + " | " + cell(c.value("engine", Json(c.value("note", std::string())))) + " | " +
               cell(c.value("oracle", Json())) + " | " + (c.at("agree").get<bool>() ? "yes" : "no") + " |\n";
      out += "\n";
    }
  }

  if (report.contains("warnings") && !report.at("warnings").empty()) {
    out += "## Warnings\n\n";
    for (const auto& w : report.at("warnings")) out += "- " + w.get<std::string>() + "\n";
    out += "\n";
  }
  if (report.contains("provenance")) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report.at("provenance"), "", rows);
    out += "## Provenance\n\n";
    table(rows, out);
  }
  return out;
}

}  // namespace polybound::cli
