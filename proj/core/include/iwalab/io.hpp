#pragma once

#include <json.hpp>

#include "iwalab/charideal.hpp"
#include "iwalab/monsky.hpp"
#include "iwalab/system.hpp"

namespace iwalab {

// Ordered JSON keeps emitted documents byte-stable across runs.
using Json = nlohmann::ordered_json;

// ---- document schema -------------------------------------------------------

Json config_to_json(const Config& cfg);
Config config_from_json(const Json& j, const std::string& path = "$.header");

// AlgebraElement: a list of [coefficient, exponent-vector] pairs with decimal
// string coefficients (or [l, coeff-vector] for cyclotomic coefficients);
// wrapped in {"ring", "denom", "terms"} when the ring tag or denominator
// carries information.
Json element_to_json(const Config& cfg, const AlgebraElement& x);
AlgebraElement element_from_json(const Config& cfg, const Json& j,
                                 const std::string& path = "$.xi");

// FiniteModule: {rank, relations (row-major), actions, level}.
Json module_to_json(const FiniteModule& m);
FiniteModule module_from_json(const Config& cfg, const Json& j, const std::string& path,
                              bool strict = false);

Json system_to_json(const GammaSystem& sys);
GammaSystem system_from_json(const Json& j, const std::string& path = "$");

Json elementary_to_json(const Config& cfg, const ElementaryModule& m);
ElementaryModule elementary_from_json(const Config& cfg, const Json& j,
                                      const std::string& path = "$.factors");

Json character_to_json(const Character& w);
Json flat_to_json(const FlatLevel& f);

// ---- report documents ------------------------------------------------------

Json report_to_json(const SystemReport& rep);
std::string report_to_text(const SystemReport& rep);

Json zeroset_to_json(const ZeroSetReport& rep);
std::string zeroset_to_text(const ZeroSetReport& rep);

Json ns_to_json(const NsReport& rep);
std::string ns_to_text(const NsReport& rep);

Json funeq_to_json(const FuneqReport& rep);
std::string funeq_to_text(const FuneqReport& rep);

Json fourier_to_json(const FourierCheck& rep);
std::string fourier_to_text(const FourierCheck& rep);

Json growth_to_json(const GrowthProfile& rep);
std::string growth_to_text(const GrowthProfile& rep);

Json split_to_json(const Config& cfg, const SplitResult& rep);
std::string split_to_text(const Config& cfg, const SplitResult& rep);

Json ideal_to_json(const Config& cfg, const IdealDescriptor& ideal);
std::string element_to_text(const Config& cfg, const AlgebraElement& x);

}  // namespace iwalab
