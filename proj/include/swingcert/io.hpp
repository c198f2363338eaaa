#pragma once

#include "swingcert/certificate.hpp"
#include "swingcert/design.hpp"
#include "swingcert/equilibria.hpp"
#include "swingcert/simulator.hpp"
#include "swingcert/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace swingcert {

using Json = nlohmann::ordered_json;

// Config documents are flat JSON objects. An optional "kind" field
// ("sg_parameters" or "nominal_spec") selects the type; without it the
// keys decide. Unknown keys raise ParameterError naming the key.

Json to_json(const SgParameters& params);
Json to_json(const NominalSpec& spec);
SgParameters sg_parameters_from_json(const Json& doc);
NominalSpec nominal_spec_from_json(const Json& doc);

using Config = std::variant<SgParameters, NominalSpec>;

/// Parses a config document, applying "key=value" overrides first.
Config parse_config(const Json& doc, const std::vector<std::string>& overrides = {});

/// Reads and parses a config file. I/O and syntax problems raise ParameterError.
Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// SgParameters directly, or designed from a NominalSpec.
SgParameters resolve_parameters(const Config& cfg);

Json to_json(const DerivedConstants& dc);
Json to_json(const EquilibriumPoint& eq);
Json to_json(const std::vector<EquilibriumPoint>& eqs);
Json to_json(const CertificateReport& rep);
Json to_json(const TrajectoryVerdict& v);
Json to_json(const BasinStats& stats, bool with_exemplars = true);
Json to_json(const CrossValidation& cv);

/// Certificate grid as CSV: d, nscr, omega_min_d, omega_max_d, band_ok.
void write_certificate_csv(std::ostream& os, const CertificateReport& rep, bool header = true);

enum class TrajectoryModel { Full, Ese };

/// Trajectory CSV followed by a "# verdict: {...}" record.
void write_trajectory_csv(std::ostream& os, const Trajectory<4>& traj, TrajectoryModel model);

/// Formats a double with 17 significant digits.
std::string format_real(Real x);

}  // namespace swingcert
