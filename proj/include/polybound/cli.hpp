#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "polybound/core.hpp"
#include "polybound/quantum.hpp"

namespace polybound::cli {

using Json = nlohmann::json;

enum class Kind { iv_bounds, chsh, membership, npa, gap, pns, manski, frechet, entropic, audit };

const char* to_string(Kind k);
std::optional<Kind> parse_kind(std::string_view s);
const std::vector<std::string>& kind_names();

enum class Variant { standard, literal };

struct Options {
  NpaLevel npa_level = NpaLevel::L1;
  std::optional<double> tolerance;
  Variant variant = Variant::standard;
  bool renormalize = false;
  bool audit = false;
};

/// A validated request. The payload is stored in canonical form: every
/// table uses the canonical axis order and shorthands are expanded.
struct Request {
  Kind kind = Kind::chsh;
  Json payload = Json::object();
  Options options;
};

/// Schema problems (wrong version, unknown keys, malformed arrays). Exit code 2.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line flags; set fields replace the document's "options".
struct OptionOverrides {
  std::optional<NpaLevel> npa_level;
  std::optional<double> tolerance;
  std::optional<Variant> variant;
  std::optional<bool> renormalize;
  std::optional<bool> audit;
};

/// Parses a request document. `kind_override` (from the command line) must
/// match the document's "kind" when both are present.
Request parse_request(const Json& doc, std::optional<Kind> kind_override = std::nullopt,
                      const OptionOverrides& overrides = {});
Json to_json(const Request& r);

struct Report {
  Json body;
  int exit_code = 0;
};

Report run(const Request& r);
/// Parses and runs; schema and input errors become error reports.
Report run_document(const Json& doc, std::optional<Kind> kind_override = std::nullopt,
                    const OptionOverrides& overrides = {});
/// Report for a failure that happened before a request could be parsed.
Report error_report(const std::string& code, int exit_code, const std::string& message);

/// Sorted keys, two-space indent, floats at 12 significant digits.
std::string render_json(const Json& j);
std::string render_markdown(const Json& report);
std::string format_number(double v);

/// theta,classical,quantum,nosignaling rows for external plotting.
std::string cross_section_csv(int samples, NpaLevel level, const Tolerances& tol = default_tolerances());

int exit_code_for(ErrorCode c);

}  // namespace polybound::cli
