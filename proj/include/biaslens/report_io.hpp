#pragma once

#include <json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/embedding.hpp"
#include "biaslens/metrics.hpp"

// nlohmann adapters for metric results. Undefined shares serialize as null.
namespace biaslens {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const PresenceResult& r);
void from_json(const Json& j, PresenceResult& r);
void to_json(Json& j, const PremodResult& r);
void from_json(const Json& j, PremodResult& r);
void to_json(Json& j, const ModifierRatioResult& r);
void from_json(const Json& j, ModifierRatioResult& r);
void to_json(Json& j, const GenericsResult& r);
void from_json(const Json& j, GenericsResult& r);
void to_json(Json& j, const BinomialResult& r);
void from_json(const Json& j, BinomialResult& r);
void to_json(Json& j, const AssociationResult& r);
void from_json(const Json& j, AssociationResult& r);
void to_json(Json& j, const GenderAssociation& r);
void from_json(const Json& j, GenderAssociation& r);
void to_json(Json& j, const Neighbor& n);
void from_json(const Json& j, Neighbor& n);
void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);
void to_json(Json& j, const TokenizeConfig& c);
void from_json(const Json& j, TokenizeConfig& c);
void to_json(Json& j, const SliceFilter& f);
void from_json(const Json& j, SliceFilter& f);

/// "NA" for undefined values, shortest round-trip decimal otherwise.
std::string csv_value(const std::optional<double>& value);

}  // namespace biaslens
