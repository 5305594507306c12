#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "polybound/cli.hpp"

using namespace polybound;
using namespace polybound::cli;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

void emit(const Json& body, const std::string& format) {
  std::cout << (format == "md" ? render_markdown(body) : render_json(body));
}

// A batch file is either a JSON array of requests or one request per line.
std::vector<Json> batch_documents(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return Json::parse(text).get<std::vector<Json>>();
  std::vector<Json> docs;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(Json::parse(line));
  return docs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical, quantum and no-signaling bounds for causal and Bell scenarios"};
  app.set_version_flag("--version", "polybound 0.1.0");

  std::string kind_name, input = "-", format = "json", level, variant, batch, cross_section;
  std::optional<double> tolerance;
  bool renorm = false, audit = false;
  int samples = 64;

  std::vector<std::string> kinds = kind_names();
  app.add_option("kind", kind_name, "analysis kind")->check(CLI::IsMember(kinds));
  app.add_option("--input", input, "request document, or - for standard input");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "md"}));
  app.add_option("--npa-level", level, "moment-matrix level")->check(CLI::IsMember({"1", "1ab"}));
  app.add_option("--tolerance", tolerance, "feasibility, facet, signaling and normalization tolerance")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--variant", variant, "formula variant")->check(CLI::IsMember({"standard", "paper-literal"}));
  app.add_flag("--renormalize", renorm, "rescale inputs that do not sum to one");
  app.add_flag("--audit", audit, "compare engine results with the brute-force oracles");
  app.add_option("--batch", batch, "file with a JSON array of requests, or one request per line");
  app.add_option("--cross-section", cross_section, "write theta,classical,quantum,nosignaling samples to this CSV");
  app.add_option("--samples", samples, "cross-section sample count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  OptionOverrides overrides;
  if (!level.empty()) overrides.npa_level = level == "1ab" ? NpaLevel::L1AB : NpaLevel::L1;
  overrides.tolerance = tolerance;
  if (!variant.empty()) overrides.variant = variant == "paper-literal" ? Variant::literal : Variant::standard;
  if (renorm) overrides.renormalize = true;
  if (audit) overrides.audit = true;
  const std::optional<Kind> kind = kind_name.empty() ? std::nullopt : parse_kind(kind_name);

  if (!cross_section.empty()) {
    Tolerances tol = default_tolerances();
    if (tolerance) tol.no_signaling = tol.facet = tol.lp_feasibility = *tolerance;
    std::ofstream out(cross_section);
    if (!out) {
      emit(error_report("io", 2, "cannot write " + cross_section).body, format);
      return 2;
    }
    try {
      out << cross_section_csv(samples, overrides.npa_level.value_or(NpaLevel::L1), tol);
    } catch (const Error& e) {
      emit(error_report(to_string(e.code()), exit_code_for(e.code()), e.what()).body, format);
      return exit_code_for(e.code());
    }
    if (!kind && batch.empty()) return 0;
  }

  if (!batch.empty()) {
    std::vector<Json> docs;
    try {
      docs = batch_documents(slurp(batch));
    } catch (const std::exception& e) {
      const auto r = error_report("schema", 2, std::string("batch: ") + e.what());
      emit(r.body, format);
      return r.exit_code;
    }
    Json reports = Json::array();
    int worst = 0;
    for (const auto& doc : docs) {
      const auto r = run_document(doc, kind, overrides);
      worst = std::max(worst, r.exit_code);
      reports.push_back(r.body);
    }
    if (format == "md") {
      for (const auto& r : reports) std::cout << render_markdown(r) << "\n";
    } else {
      std::cout << render_json(reports);
    }
    return worst;
  }

  Json doc;
  try {
    doc = Json::parse(slurp(input));
  } catch (const std::exception& e) {
    const auto r = error_report("schema", 2, e.what());
    emit(r.body, format);
    return r.exit_code;
  }
  const auto r = run_document(doc, kind, overrides);
  emit(r.body, format);
  return r.exit_code;
}
