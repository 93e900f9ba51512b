#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/types.hpp"

namespace dialogsynth::corpus {

/// True for calendar dates and date-times in ISO-8601 extended form,
/// e.g. "2019-04-02", "2019-04-02T14:05", "2019-04-02T14:05:31.5-05:00".
bool is_iso8601(std::string_view s);

/// Parses one ingest line (a JSON object with the record field names).
/// Unknown keys are rejected so no populated field is ever dropped.
/// Throws IngestError (with field path) or LabelUniverseError.
PatientCareRecord parse_epcr(std::string_view document, const LabelUniverse& labels = LabelUniverse::open());
PatientCareRecord parse_epcr(const nlohmann::json& document, const LabelUniverse& labels = LabelUniverse::open());

nlohmann::json to_json(const PatientCareRecord& record);

/// Human-readable rendering used inside prompts. One field per line, so
/// every populated value appears verbatim.
std::string render_epcr(const PatientCareRecord& record);

/// Every populated free-text value with its field path ("narrative",
/// "vitals[0].value", ...). Plan evidence must occur verbatim in one of these.
std::vector<std::pair<std::string, std::string>> text_fields(const PatientCareRecord& record);

}  // namespace dialogsynth::corpus
