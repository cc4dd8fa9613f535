// serialize.hpp
// JSON and CSV forms of states and reports. JSON objects keep insertion
// order and doubles are written in shortest round-trip form, so identical
// inputs give byte-identical files.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "phecp/analysis.hpp"
#include "phecp/fock.hpp"
#include "phecp/protocol.hpp"

namespace phecp {

using Json = nlohmann::ordered_json;

// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

// {"modes": [{"name", "kind", "owner"}...], "cutoff": n,
//  "amplitudes": [[[n0, n1, ...], re, im], ...]}
Json state_to_json(const FockVectord& state);
// Throws ParseError on malformed input and NotNormalized if the amplitudes
// do not form a unit vector.
FockVectord state_from_json(const Json& j);

// Ket notation, e.g. "0.7071067811865476|10> + 0.7071067811865476|01>  [u1 u2]".
std::string state_to_text(const FockVectord& state);

Json to_json(const SystemParams& p);
Json to_json(const NoiseModel& n);
Json to_json(const ProtocolReport& r);
Json to_json(const EcpEnumeration& e);
Json to_json(const RemoteBellReport& r);
Json to_json(const MonteCarloStats& s);
Json to_json(const FeasibilityReport& f);
Json to_json(const CurveFeatures& f);

// Serializes with two-space indent and a trailing newline.
std::string dump(const Json& j);

// One row per detector outcome:
// outcome,probability,parity,correction_applied,target_fidelity
void write_enumeration_csv(std::ostream& os, const EcpEnumeration& e);
// One row per detector outcome: outcome,count,frequency,expected
void write_montecarlo_csv(std::ostream& os, const MonteCarloStats& s);

}  // namespace phecp
