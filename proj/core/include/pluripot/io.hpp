#pragma once

#include <string>

#include "pluripot/field.hpp"

#include <json.hpp>

namespace pluripot {

inline constexpr const char* kToolName = "pluripot";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint32_t kHmafVersion = 1;
inline constexpr std::uint32_t kReportSchemaVersion = 1;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// HMAF v1: magic "HMAF", then u32 fields version, kind, n, res, p, q,
/// ncomp, followed by little-endian float64 payload. Kinds: 0 = scalar
/// (one row-major array), 1 = herm11 (n*n component arrays in the
/// HermitianForm11Field component order), 2 = form of bidegree (p,q)
/// (per basis index, the real array then the imaginary array).
enum class HmafKind : std::uint32_t { scalar = 0, herm11 = 1, form = 2 };

void write_hmaf(const std::string& path, const ScalarField& f);
void write_hmaf(const std::string& path, const HermitianForm11Field& f);
void write_hmaf(const std::string& path, const FormField& f);

HmafKind peek_hmaf(const std::string& path, GridSpec* grid = nullptr, int* p = nullptr,
                   int* q = nullptr);
ScalarField read_hmaf_scalar(const std::string& path);
HermitianForm11Field read_hmaf_herm11(const std::string& path);
FormField read_hmaf_form(const std::string& path);

using json = nlohmann::json;  // object keys serialize sorted -> deterministic

/// Report schema v1: top-level keys scenario, op, inputs, metrics,
/// tolerances, seed, commit (plus schema/tool versions). No timestamps.
json make_report(const std::string& scenario, const std::string& op, json inputs, json metrics,
                 json tolerances, std::uint64_t seed);

/// Serialize with indent 2 and a trailing newline (byte-stable).
std::string dump_report(const json& j);
void write_json(const std::string& path, const json& j);

/// Shortest round-trip decimal formatting (used for CSV cells).
std::string format_double(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace pluripot
