#pragma once

#include "hetcyc/diophantine.hpp"
#include "hetcyc/flow.hpp"
#include "hetcyc/hunter.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace hetcyc {

using json = nlohmann::json;

inline constexpr int kCertificateSchemaVersion = 1;

// hp values travel as decimal strings at full working precision.
json hp_json(const hp& v);
hp hp_from_json(const json& j);

json to_json(const MapCoefficients& c);
json to_json(const HpCoeffs& c);
json to_json(const ControlParams& k);
json to_json(const HpControl& k);
json to_json(const PerturbationModel& p);
json to_json(const HpPoint& p);
json to_json(const OrbitRecord& o);
json to_json(const IndexReport& r);
json to_json(const Period2Result& r);
json to_json(const Period3Result& r);
json to_json(const ChainReport& r);
json to_json(const QuasiReport& r);
json to_json(const TransverseWitness& w);
json to_json(const CycleCertificate& c);
json to_json(const HuntFailure& f);
json to_json(const RationalTriple& t);
json to_json(const DiophantineFamily& f, const std::vector<FamilyMember>& members);
json to_json(const NormalFormField& f);
json to_json(const ExponentFit& f);
json to_json(const Index2Diagnostic& d);

// Readers validate shape only; module invariants are checked by the callers.
MapCoefficients coefficients_from_json(const json& j, MapCoefficients base = standard_coefficients());
ControlParams control_from_json(const json& j, ControlParams base = {});
PerturbationModel perturbation_from_json(const json& j);
NormalFormField field_from_json(const json& j, NormalFormField base = {});

// Full inverse of to_json(CycleCertificate). Raises the working precision to the stored digits.
CycleCertificate certificate_from_json(const json& j);

// Two-space indent, sorted keys, trailing newline.
std::string dump(const json& j);

std::string ladder_csv(const std::vector<OrbitRecord>& ladder, const std::vector<int>& ks);
std::string local_map_csv(const std::vector<LocalMapSample>& table);
std::string rungs_csv(const std::vector<LadderRung>& rungs);

}  // namespace hetcyc
