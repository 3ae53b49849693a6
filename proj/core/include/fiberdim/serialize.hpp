#pragma once

#include <json.hpp>
#include <memory>

#include "fiberdim/cantor.hpp"
#include "fiberdim/construct.hpp"
#include "fiberdim/gauge.hpp"
#include "fiberdim/grid_function.hpp"
#include "fiberdim/perturb.hpp"
#include "fiberdim/ultra.hpp"

namespace fiberdim {

using Json = nlohmann::json;

// Rationals serialize as strings "p/q"; big integers as decimal strings.
Json rational_json(const Rational& q);
Rational rational_from_json(const Json& j);

// schema "cantor/1": trees serialize by construction parameters (the geometry
// is deterministic), subsets by selector.
Json tree_json(const CantorTree& tree);
std::shared_ptr<const CantorTree> tree_from_json(const Json& j);

Json subset_json(const SubsetTree& subset, const Selector& sel);
SubsetTree subset_from_json(const Json& j);

Json gauge_json(const Gauge& g);
Gauge gauge_from_json(const Json& j);

Json schedule_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

Json grid_function_json(const GridFunction& f);
GridFunction grid_function_from_json(const Json& j);

// schema "perturb/1": a run serializes as (tree, d, drift, seed) plus a
// record hash; regeneration from the parameters is bit-exact.
Json run_json(const Run& run);
Run run_from_json(const Json& j);

// schema "construct/1"
Json staircase_json(const StaircaseConfig& cfg);
StaircaseConfig staircase_from_json(const Json& j);
Json sawtooth_json(const SawtoothConfig& cfg);
SawtoothConfig sawtooth_from_json(const Json& j);
Json modulus_json(const Modulus& m);
Modulus modulus_from_json(const Json& j);

// schema "ultra/1": nested arrays of leaf masses
Json ultra_json(const UltrametricTree& tree);
UltrametricTree ultra_from_json(const Json& j);

}  // namespace fiberdim
