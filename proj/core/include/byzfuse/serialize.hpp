#ifndef BYZFUSE_SERIALIZE_HPP
#define BYZFUSE_SERIALIZE_HPP

#include <json.hpp>

#include "byzfuse/types.hpp"

// JSON bindings for the domain types. Variants are tagged with a "type"
// field; bit vectors serialize as 0/1 strings.

namespace byzfuse {

void to_json(nlohmann::json& j, const ChannelParams& c);
void from_json(const nlohmann::json& j, ChannelParams& c);

void to_json(nlohmann::json& j, const StatePrior& p);
void from_json(const nlohmann::json& j, StatePrior& p);

void to_json(nlohmann::json& j, const HonestyModel& m);
void from_json(const nlohmann::json& j, HonestyModel& m);

void to_json(nlohmann::json& j, const AttackMode& a);
void from_json(const nlohmann::json& j, AttackMode& a);

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

}  // namespace byzfuse

namespace nlohmann {

template <>
struct adl_serializer<byzfuse::StateVector> {
    static byzfuse::StateVector from_json(const json& j);
    static void to_json(json& j, const byzfuse::StateVector& s);
};

template <>
struct adl_serializer<byzfuse::ReportMatrix> {
    static byzfuse::ReportMatrix from_json(const json& j);
    static void to_json(json& j, const byzfuse::ReportMatrix& r);
};

}  // namespace nlohmann

#endif
