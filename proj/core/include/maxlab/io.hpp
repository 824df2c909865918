#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "maxlab/maxops.hpp"
#include "maxlab/profile.hpp"
#include "maxlab/sunrise.hpp"
#include "maxlab/verify.hpp"

namespace maxlab::io {

using nlohmann::json;

// Profile CSV: header `t,value`, one breakpoint per row. Errors name the file and line.
Profile read_profile_csv(const std::string& path, const Domain& domain);
void write_profile_csv(const std::string& path, const Profile& f);

json domain_json(const Domain& d);
Domain domain_from_json(const json& j);
json operator_json(const OperatorSpec& op);

// t,value,deriv,label,witness_kind,witness_p1..witness_p4
void write_field_csv(const std::string& path, const MaximalField& field);
// Operator, search settings, domain, grid size, gap tolerance and the disconnecting intervals.
json field_json(const MaximalField& field);

json decomposition_json(const SunriseDecomposition& dec, const DerivativeTable& table);
// t,f,field,right,left,region,deriv_class
void write_lateral_csv(const std::string& path, const SunriseDecomposition& dec);

json local_max_json(const LocalMaxReport& r);
json certificate_json(const DyadicCertificate& c);
json flatness_json(const FlatnessReport& r);
json origin_json(const OriginReport& r);
json bound_json(const BoundReport& r);
json convergence_json(const ConvergenceReport& r);
// One row per j with every scalar diagnostic.
void write_convergence_csv(const std::string& path, const ConvergenceReport& r);
// Aligned columns for reading in a terminal.
std::string convergence_text(const ConvergenceReport& r);
std::string certificate_text(const DyadicCertificate& c);

// Stable serialisation: sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace maxlab::io
