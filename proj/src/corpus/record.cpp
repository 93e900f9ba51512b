#include "dialogsynth/corpus/record.hpp"

#include <array>
#include <regex>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::corpus {

using nlohmann::json;

bool is_iso8601(std::string_view s) {
  static const std::regex pattern(
      R"(^(\d{4})-(\d{2})-(\d{2})(?:T(\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?(Z|[+-]\d{2}(?::?\d{2})?)?)?$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, pattern)) return false;
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  const int year = num(1), month = num(2), day = num(3);
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const int max_day = days[month - 1] + (month == 2 && leap ? 1 : 0);
  if (day > max_day) return false;
  if (m[4].matched && (num(4) > 23 || num(5) > 59)) return false;
  if (m[6].matched && num(6) > 60) return false;
  return true;
}

namespace {

class RecordReader {
 public:
  explicit RecordReader(const json& doc) : doc_(doc) {}

  std::string required_string(const std::string& key) {
    auto it = doc_.find(key);
    if (it == doc_.end() || it->is_null()) throw IngestError(key, "required field is missing");
    if (!it->is_string()) throw IngestError(key, "expected a string");
    std::string v = it->get<std::string>();
    if (text::trim(v).empty()) throw IngestError(key, "must not be empty");
    return v;
  }

  std::string optional_string(const std::string& key) {
    auto it = doc_.find(key);
    if (it == doc_.end() || it->is_null()) return {};
    if (!it->is_string()) throw IngestError(key, "expected a string");
    return it->get<std::string>();
  }

  std::vector<std::string> string_list(const std::string& key) {
    std::vector<std::string> out;
    auto it = doc_.find(key);
    if (it == doc_.end() || it->is_null()) return out;
    if (!it->is_array()) throw IngestError(key, "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      if (!e.is_string()) throw IngestError(key + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  const json* array(const std::string& key) {
    auto it = doc_.find(key);
    if (it == doc_.end() || it->is_null()) return nullptr;
    if (!it->is_array()) throw IngestError(key, "expected an array");
    return &*it;
  }

 private:
  const json& doc_;
};

std::optional<std::string> read_timestamp(const json& obj, const std::string& path) {
  auto it = obj.find("timestamp");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw IngestError(path + ".timestamp", "expected a string");
  std::string ts = it->get<std::string>();
  if (!is_iso8601(ts)) throw IngestError(path + ".timestamp", "not an ISO-8601 timestamp: '" + ts + "'");
  return ts;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) {
      throw IngestError(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown field");
    }
  }
}

}  // namespace

PatientCareRecord parse_epcr(const json& doc, const LabelUniverse& labels) {
  if (!doc.is_object()) throw IngestError("$", "record must be a JSON object");
  reject_unknown_keys(doc,
                      {"record_id", "chief_complaint", "medical_history", "current_medications", "allergies", "vitals",
                       "interventions", "narrative", "diagnosis_labels"},
                      "");
  RecordReader r(doc);
  PatientCareRecord rec;
  rec.record_id = r.required_string("record_id");
  rec.chief_complaint = r.optional_string("chief_complaint");
  rec.medical_history = r.optional_string("medical_history");
  rec.current_medications = r.string_list("current_medications");
  rec.allergies = r.string_list("allergies");
  rec.narrative = r.optional_string("narrative");

  if (const json* vitals = r.array("vitals")) {
    for (std::size_t i = 0; i < vitals->size(); ++i) {
      const std::string path = "vitals[" + std::to_string(i) + "]";
      const json& v = (*vitals)[i];
      if (!v.is_object()) throw IngestError(path, "expected an object");
      reject_unknown_keys(v, {"kind", "value", "timestamp"}, path);
      VitalReading reading;
      auto kind = v.find("kind");
      if (kind == v.end() || !kind->is_string()) throw IngestError(path + ".kind", "required string field");
      auto parsed = parse_vital_kind(kind->get<std::string>());
      if (!parsed) throw IngestError(path + ".kind", "unknown vital kind '" + kind->get<std::string>() + "'");
      reading.kind = *parsed;
      auto value = v.find("value");
      if (value == v.end()) throw IngestError(path + ".value", "required field is missing");
      if (value->is_string()) {
        reading.value = value->get<std::string>();
      } else if (value->is_number()) {
        reading.value = value->dump();
      } else {
        throw IngestError(path + ".value", "expected a string or number");
      }
      if (text::trim(reading.value).empty()) throw IngestError(path + ".value", "must not be empty");
      reading.timestamp = read_timestamp(v, path);
      rec.vitals.push_back(std::move(reading));
    }
  }

  if (const json* items = r.array("interventions")) {
    for (std::size_t i = 0; i < items->size(); ++i) {
      const std::string path = "interventions[" + std::to_string(i) + "]";
      const json& v = (*items)[i];
      if (!v.is_object()) throw IngestError(path, "expected an object");
      reject_unknown_keys(v, {"kind", "description", "timestamp"}, path);
      Intervention iv;
      auto kind = v.find("kind");
      if (kind == v.end() || !kind->is_string()) throw IngestError(path + ".kind", "required string field");
      auto parsed = parse_intervention_kind(kind->get<std::string>());
      if (!parsed) throw IngestError(path + ".kind", "unknown intervention kind '" + kind->get<std::string>() + "'");
      iv.kind = *parsed;
      auto desc = v.find("description");
      if (desc == v.end() || !desc->is_string() || text::trim(desc->get<std::string>()).empty()) {
        throw IngestError(path + ".description", "required non-empty string");
      }
      iv.description = desc->get<std::string>();
      iv.timestamp = read_timestamp(v, path);
      rec.interventions.push_back(std::move(iv));
    }
  }

  rec.diagnosis_labels = r.string_list("diagnosis_labels");
  if (rec.diagnosis_labels.empty()) throw IngestError("diagnosis_labels", "at least one diagnosis label is required");
  for (auto& label : rec.diagnosis_labels) {
    label = text::normalize_label(label);
    if (!labels.contains(label)) throw LabelUniverseError(label);
  }
  return rec;
}

PatientCareRecord parse_epcr(std::string_view document, const LabelUniverse& labels) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw IngestError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_epcr(doc, labels);
}

json to_json(const PatientCareRecord& rec) {
  json j;
  j["record_id"] = rec.record_id;
  if (!rec.chief_complaint.empty()) j["chief_complaint"] = rec.chief_complaint;
  if (!rec.medical_history.empty()) j["medical_history"] = rec.medical_history;
  j["current_medications"] = rec.current_medications;
  j["allergies"] = rec.allergies;
  j["vitals"] = json::array();
  for (const auto& v : rec.vitals) {
    json e = {{"kind", to_string(v.kind)}, {"value", v.value}};
    if (v.timestamp) e["timestamp"] = *v.timestamp;
    j["vitals"].push_back(std::move(e));
  }
  j["interventions"] = json::array();
  for (const auto& iv : rec.interventions) {
    json e = {{"kind", to_string(iv.kind)}, {"description", iv.description}};
    if (iv.timestamp) e["timestamp"] = *iv.timestamp;
    j["interventions"].push_back(std::move(e));
  }
  if (!rec.narrative.empty()) j["narrative"] = rec.narrative;
  j["diagnosis_labels"] = rec.diagnosis_labels;
  return j;
}

std::string render_epcr(const PatientCareRecord& rec) {
  std::string out;
  auto line = [&](std::string_view label, std::string_view value) {
    out.append(label).append(": ").append(value).push_back('\n');
  };
  line("Record ID", rec.record_id);
  if (!rec.chief_complaint.empty()) line("Chief Complaint", rec.chief_complaint);
  if (!rec.medical_history.empty()) line("Medical History", rec.medical_history);
  if (!rec.current_medications.empty()) line("Current Medications", text::join(rec.current_medications, "; "));
  if (!rec.allergies.empty()) line("Medication Allergies", text::join(rec.allergies, "; "));
  if (!rec.vitals.empty()) {
    out.append("Vital Signs:\n");
    for (const auto& v : rec.vitals) {
      out.append("- ");
      if (v.timestamp) out.append("[").append(*v.timestamp).append("] ");
      out.append(to_string(v.kind)).append(": ").append(v.value).push_back('\n');
    }
  }
  if (!rec.interventions.empty()) {
    out.append("Interventions:\n");
    for (const auto& iv : rec.interventions) {
      out.append("- ");
      if (iv.timestamp) out.append("[").append(*iv.timestamp).append("] ");
      out.append(to_string(iv.kind)).append(": ").append(iv.description).push_back('\n');
    }
  }
  if (!rec.narrative.empty()) line("Medic Note", rec.narrative);
  line("Protocol (Diagnosis)", text::join(rec.diagnosis_labels, "; "));
  return out;
}

std::vector<std::pair<std::string, std::string>> text_fields(const PatientCareRecord& rec) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string path, const std::string& value) {
    if (!text::trim(value).empty()) out.emplace_back(std::move(path), value);
  };
  add("chief_complaint", rec.chief_complaint);
  add("medical_history", rec.medical_history);
  for (std::size_t i = 0; i < rec.current_medications.size(); ++i) {
    add("current_medications[" + std::to_string(i) + "]", rec.current_medications[i]);
  }
  for (std::size_t i = 0; i < rec.allergies.size(); ++i) add("allergies[" + std::to_string(i) + "]", rec.allergies[i]);
  for (std::size_t i = 0; i < rec.vitals.size(); ++i) add("vitals[" + std::to_string(i) + "].value", rec.vitals[i].value);
  for (std::size_t i = 0; i < rec.interventions.size(); ++i) {
    add("interventions[" + std::to_string(i) + "].description", rec.interventions[i].description);
  }
  add("narrative", rec.narrative);
  return out;
}

}  // namespace dialogsynth::corpus
