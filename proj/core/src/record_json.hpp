#pragma once

// Internal JSON codecs shared between record files that embed the same
// domain types. Not installed; include from core/src only.

#include <json.hpp>

#include "lmeval/types.hpp"

namespace lmeval::detail {

nlohmann::ordered_json test_to_json(const UnitTest& t);
UnitTest test_from_json(const nlohmann::ordered_json& j);

}  // namespace lmeval::detail
