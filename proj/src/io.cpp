#include "swingcert/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace swingcert {

namespace {

constexpr std::string_view kSgKind = "sg_parameters";
constexpr std::string_view kSpecKind = "nominal_spec";

template <typename T>
using FieldList = std::vector<std::pair<const char*, Real T::*>>;

const FieldList<SgParameters>& sg_fields()
{
  static const FieldList<SgParameters> fields{
      {"J", &SgParameters::J},       {"D_p", &SgParameters::D_p}, {"T_m", &SgParameters::T_m},
      {"m_if", &SgParameters::m_if}, {"L_s", &SgParameters::L_s}, {"R_s", &SgParameters::R_s},
      {"V", &SgParameters::V},       {"omega_g", &SgParameters::omega_g}};
  return fields;
}

const FieldList<NominalSpec>& spec_fields()
{
  static const FieldList<NominalSpec> fields{
      {"P_n", &NominalSpec::P_n},
      {"V", &NominalSpec::V},
      {"omega_g", &NominalSpec::omega_g},
      {"d_p", &NominalSpec::d_p},
      {"H_seconds", &NominalSpec::H_seconds},
      {"L_drop_pct", &NominalSpec::L_drop_pct},
      {"R_drop_pct", &NominalSpec::R_drop_pct},
      {"n", &NominalSpec::n}};
  return fields;
}

template <typename T>
bool has_field(const FieldList<T>& fields, const std::string& key)
{
  for (const auto& f : fields)
    if (key == f.first) return true;
  return false;
}

template <typename T>
Json fields_to_json(const T& obj, const FieldList<T>& fields, std::string_view kind)
{
  Json doc;
  doc["kind"] = kind;
  for (const auto& [name, member] : fields) doc[name] = obj.*member;
  return doc;
}

template <typename T>
T fields_from_json(const Json& doc, const FieldList<T>& fields, std::string_view kind, bool all_required)
{
  if (!doc.is_object()) throw ParameterError("", "config must be a JSON object");
  T out{};
  for (const auto& [key, value] : doc.items()) {
    if (key == "kind") {
      if (!value.is_string() || value.template get<std::string>() != kind) {
        throw ParameterError("kind", "expected kind \"" + std::string(kind) + "\"");
      }
      continue;
    }
    if (!has_field(fields, key)) throw ParameterError(key, "unknown key '" + key + "'");
    if (!value.is_number()) throw ParameterError(key, "value of '" + key + "' must be a number");
  }
  for (const auto& [name, member] : fields) {
    if (doc.contains(name)) out.*member = doc.at(name).template get<Real>();
    else if (all_required) throw ParameterError(name, std::string("missing key '") + name + "'");
  }
  return out;
}

bool looks_like_spec(const Json& doc)
{
  if (doc.contains("kind") && doc["kind"].is_string()) return doc["kind"].get<std::string>() == kSpecKind;
  return doc.contains("P_n");
}

Real parse_number(const std::string& key, const std::string& text)
{
  Real value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParameterError(key, "override '" + key + "' has a non-numeric value '" + text + "'");
  }
  return value;
}

Json complex_to_json(const std::complex<Real>& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

Json to_json(const SgParameters& params) { return fields_to_json(params, sg_fields(), kSgKind); }

Json to_json(const NominalSpec& spec) { return fields_to_json(spec, spec_fields(), kSpecKind); }

SgParameters sg_parameters_from_json(const Json& doc)
{
  return fields_from_json(doc, sg_fields(), kSgKind, true);
}

NominalSpec nominal_spec_from_json(const Json& doc)
{
  Json copy = doc;
  if (!copy.contains("n")) copy["n"] = 1.0;
  return fields_from_json(copy, spec_fields(), kSpecKind, true);
}

Config parse_config(const Json& doc, const std::vector<std::string>& overrides)
{
  if (!doc.is_object()) throw ParameterError("", "config must be a JSON object");
  Json patched = doc;
  const bool spec = looks_like_spec(doc);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParameterError(item, "override '" + item + "' must have the form key=value");
    }
    const std::string key = item.substr(0, eq);
    const bool known = spec ? has_field(spec_fields(), key) : has_field(sg_fields(), key);
    if (!known) throw ParameterError(key, "unknown key '" + key + "'");
    patched[key] = parse_number(key, item.substr(eq + 1));
  }
  if (spec) return nominal_spec_from_json(patched);
  return sg_parameters_from_json(patched);
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides)
{
  std::ifstream in(path);
  if (!in) throw ParameterError("config", "cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("config", std::string("malformed config: ") + e.what());
  }
  return parse_config(doc, overrides);
}

SgParameters resolve_parameters(const Config& cfg)
{
  if (const auto* p = std::get_if<SgParameters>(&cfg)) return *p;
  return design(std::get<NominalSpec>(cfg));
}

Json to_json(const DerivedConstants& dc)
{
  return Json{{"p", dc.p},         {"i_v", dc.i_v},     {"V_r", dc.V_r},         {"rho", dc.rho},
              {"P_inf", dc.P_inf}, {"alpha", dc.alpha}, {"beta", dc.beta},       {"Gamma", dc.Gamma},
              {"phi", dc.phi},     {"Lambda", dc.Lambda}, {"omega_g", dc.omega_g}};
}

Json to_json(const EquilibriumPoint& eq)
{
  Json eig = Json::array();
  for (const auto& z : eq.eigenvalues) eig.push_back(complex_to_json(z));
  return Json{{"branch", eq.branch},
              {"delta", eq.state(kDelta)},
              {"i_d", eq.state(kId)},
              {"i_q", eq.state(kIq)},
              {"omega", eq.state(kOmega)},
              {"classification", std::string(to_string(eq.classification))},
              {"eigenvalues", eig},
              {"char_poly", {{"a3", eq.char_poly.a3}, {"a2", eq.char_poly.a2},
                             {"a1", eq.char_poly.a1}, {"a0", eq.char_poly.a0}}}};
}

Json to_json(const std::vector<EquilibriumPoint>& eqs)
{
  Json arr = Json::array();
  for (const auto& e : eqs) arr.push_back(to_json(e));
  return arr;
}

Json to_json(const CertificateReport& rep)
{
  return Json{{"verdict", std::string(to_string(rep.verdict))},
              {"all_pass", rep.all_pass},
              {"hyperbolicity_ok", rep.hyperbolicity_ok},
              {"grid_points", rep.points.size()},
              {"margin", rep.margin},
              {"relative_margin", rep.relative_margin},
              {"worst_d", rep.worst_d},
              {"constants", to_json(rep.constants)},
              {"notes", rep.notes}};
}

Json to_json(const TrajectoryVerdict& v)
{
  Json doc{{"kind", std::string(to_string(v.kind))}};
  if (v.kind == VerdictKind::ConvergedToEquilibrium) {
    doc["branch"] = v.branch;
    doc["stability"] = std::string(to_string(v.stability));
    doc["sheet"] = v.sheet;
  } else if (v.kind == VerdictKind::PeriodicOrbit) {
    doc["period"] = v.period;
    doc["mean_omega"] = v.mean_omega;
    doc["omega_below_grid"] = v.omega_below_grid;
    doc["crossings"] = v.crossings;
  }
  return doc;
}

Json to_json(const BasinStats& stats, bool with_exemplars)
{
  Json doc{{"samples", stats.verdicts.size()},
           {"converged_stable", stats.converged_stable},
           {"converged_unstable", stats.converged_unstable},
           {"periodic", stats.periodic},
           {"undecided", stats.undecided}};
  if (with_exemplars) {
    // First initial state of each class, in sample order.
    Json ex = Json::object();
    for (std::size_t i = 0; i < stats.verdicts.size(); ++i) {
      const auto& v = stats.verdicts[i];
      std::string cls = std::string(to_string(v.kind));
      if (v.kind == VerdictKind::ConvergedToEquilibrium) cls += "/" + std::string(to_string(v.stability));
      if (ex.contains(cls)) continue;
      const SgState& x = stats.initial_states[i];
      ex[cls] = Json{{"index", i}, {"i_d", x(kId)}, {"i_q", x(kIq)}, {"omega", x(kOmega)}, {"delta", x(kDelta)}};
    }
    doc["exemplars"] = ex;
  }
  return doc;
}

Json to_json(const CrossValidation& cv)
{
  return Json{{"max_delta_deviation", cv.max_delta_deviation}, {"max_iq_deviation", cv.max_iq_deviation}};
}

std::string format_real(Real x)
{
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

void write_certificate_csv(std::ostream& os, const CertificateReport& rep, bool header)
{
  if (header) os << "d,nscr,omega_min_d,omega_max_d,band_ok\n";
  for (const auto& pt : rep.points) {
    os << format_real(pt.d) << ',' << format_real(pt.nscr) << ',' << format_real(pt.omega_min_d) << ','
       << format_real(pt.omega_max_d) << ',' << (pt.band_ok ? 1 : 0) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory<4>& traj, TrajectoryModel model)
{
  os << (model == TrajectoryModel::Full ? "t,i_d,i_q,omega,delta\n" : "t,eta,eta_dot,w_re,w_im\n");
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_real(traj.times[k]);
    for (int i = 0; i < 4; ++i) os << ',' << format_real(traj.states[k](i));
    os << '\n';
  }
  os << "# verdict: " << to_json(traj.verdict).dump() << '\n';
}

}  // namespace swingcert
