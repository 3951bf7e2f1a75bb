#pragma once

// Instances, end-to-end analysis, scans and their JSON forms.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pencil/local.hpp"
#include "pencil/surface.hpp"

namespace pencil::harness {

using forms::MPoly;
using gf::FieldPtr;
using json = nlohmann::ordered_json;

inline constexpr const char* kGeneratorVersion = "pencil-gen/1";

struct Instance {
  std::uint64_t p = 2;
  int n = 1;
  MPoly f, g;
  // provenance
  std::optional<std::uint64_t> seed;
  std::string generator;
  std::uint64_t rejections = 0;
  // validation results, filled by random_instance or validate_instance
  std::string pencil_status;   // "valid" or an error code name
  std::string generic_fiber;   // "GenericSmooth", "ProbablySingular" or "unchecked"

  FieldPtr field() const { return f.field; }
  std::string id() const;
};

/// Elements of F_{p^n}: an integer for n = 1, else the coefficient vector
/// (constant first) over F_p in the lex-smallest modulus.
json encode_elem(const gf::Field& K, gf::Elem a);
gf::Elem decode_elem(const gf::Field& K, const json& j);

json to_json(const Instance& inst);
/// Throws InvalidInput on schema errors.
Instance instance_from_json(const json& j);
Instance load_instance(const std::string& path);

/// Canonical instance text: terms in sorted exponent order, fixed key order.
std::string canonical(const Instance& inst);

/// splitmix64 finalizer; seeds of scan rows are mix(mix(master) + index).
std::uint64_t mix(std::uint64_t x);
std::uint64_t row_seed(std::uint64_t master, std::uint64_t index);

struct GenerateOptions {
  int degree = 3;
  bool allow_char3 = false;  // cubic pencils in characteristic 3 only for the local layer
  std::uint64_t max_rejections = 10000;
};

/// Rejection sampling until pencil_validate and is_smooth_generic_fiber pass.
/// Throws Char3, GenerationExhausted, NotPrime.
Instance random_instance(std::uint64_t q, std::uint64_t seed, const GenerateOptions& opt = {});

/// Re-runs validation; throws the pencil_validate error on failure.
forms::Pencil validate_instance(Instance& inst, bool allow_char_clash = false);

struct AnalyzeConfig {
  int dmax = 12;
  int k = 12;
  int deg_bound = 3;
  std::uint64_t budget = 2'000'000;
  int place_degree = 3;
  int precision = 20;
  int threads = 1;
  std::uint64_t field_cap = 1ull << 18;  // counting stops before q^n exceeds this
  bool local = true;
  bool escalate = true;  // re-analyze ANOMALY rows at D_max = 18
};

struct ConditionRow {
  bool holds = false;
  std::string status;
  std::optional<int> witness;
  bool operator==(const ConditionRow&) const = default;
};

struct PlaceRow {
  std::string place;
  int degree = 0;
  bool bad = false;
  std::string status;
  int precision = 0;
  std::uint64_t branches = 0;
  bool operator==(const PlaceRow&) const = default;
};

struct AnalysisReport {
  std::string id;
  std::uint64_t q = 0;
  int count_depth = 0;
  std::vector<std::uint64_t> N;       // N[0] unused
  std::vector<std::int64_t> spectrum; // a[0] unused
  std::int64_t g_obs = 0;
  std::vector<int> witness_degrees;
  ConditionRow cond_iii, cond_iv, cond_v;
  bool implies_i_ii = false;
  // splitting
  std::vector<std::string> patterns;
  std::vector<int> trusted_n;
  std::vector<std::int64_t> c;
  std::string splitting_note;
  // global point
  std::string global_method;   // constant, descent, search or none
  std::string global_status;   // found, not_found, budget_exceeded, error, skipped
  std::vector<std::vector<json>> point;  // coords; each a list of encoded coefficients
  bool point_verified = false;
  int point_degree = -1;
  std::vector<std::string> descent_steps;
  std::uint64_t search_tried = 0;
  // local
  std::string local_overall;
  std::string obstruction;
  std::vector<std::string> bad_places;
  std::vector<PlaceRow> places;
  // consistency
  std::vector<std::string> flags;     // CONTRADICTION, ANOMALY, CANDIDATE, REVIEW
  std::vector<std::string> reasons;
  std::optional<bool> anomaly_resolved;
  std::map<std::string, std::string> errors;  // stage -> message
  std::map<std::string, double> timing;       // stage -> seconds

  bool has_flag(const std::string& f) const;
  bool operator==(const AnalysisReport&) const = default;
};

json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const json& j);

AnalysisReport analyze(const Instance& inst, const AnalyzeConfig& cfg = {});

struct ScanRow {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::string id;
  std::string pattern;
  std::string local_status;
  std::string global_status;
  std::int64_t g_obs = 0;
  int point_degree = -1;
  std::vector<std::string> flags;
  std::optional<bool> anomaly_resolved;
  std::string error;
  bool operator==(const ScanRow&) const = default;
};

json to_json(const ScanRow& r);

struct ScanSummary {
  std::uint64_t count = 0;
  std::map<std::string, std::uint64_t> patterns;
  std::map<std::string, std::uint64_t> flags;
  std::vector<std::string> candidates;
  std::uint64_t unresolved_anomalies = 0;
  std::uint64_t errors = 0;
  int max_point_degree = -1;
};

json to_json(const ScanSummary& s);

/// Writes one JSON row per instance in index order, then {"summary": ...}.
/// Rows do not depend on the thread count.
ScanSummary scan(std::uint64_t count, std::uint64_t q, std::uint64_t master_seed, const AnalyzeConfig& cfg,
                 std::ostream& out, const GenerateOptions& gen = {});

}  // namespace pencil::harness
