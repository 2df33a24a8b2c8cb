#include <json.hpp>

#include "acql/trainer.hpp"

namespace acql {

namespace {
constexpr int kCheckpointVersion = 1;
}

struct CriticIo {
  static nlohmann::json dump_table(const CriticTable& table) {
    // Sorted by key for reproducible files.
    std::vector<std::pair<uint64_t, const CriticTable::Entry*>> entries;
    entries.reserve(table.map_.size());
    for (const auto& [k, e] : table.map_) entries.emplace_back(k, &e);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, e] : entries) {
      out.push_back({k, e->main, table.synced_target(*e)});
    }
    return out;
  }

  static void load_table(CriticTable& table, const nlohmann::json& data) {
    for (const auto& row : data) {
      if (!row.is_array() || row.size() != 3) {
        throw std::invalid_argument("checkpoint: malformed table row");
      }
      const uint64_t key = row[0].get<uint64_t>();
      table.map_[key] = CriticTable::Entry{row[1].get<double>(), row[2].get<double>(), 0};
    }
  }
};

std::string save_critics(const CriticPair& critics, const TrainConfig& cfg) {
  nlohmann::json doc;
  doc["format"] = "acql-critics";
  doc["version"] = kCheckpointVersion;
  doc["rho_max"] = cfg.rho_max;
  doc["sum_cost"] = cfg.sum_cost;
  doc["qr_init"] = critics.qr.init_value();
  doc["qc_init"] = critics.qc.init_value();
  doc["qr"] = CriticIo::dump_table(critics.qr);
  doc["qc"] = CriticIo::dump_table(critics.qc);
  return doc.dump();
}

CriticPair load_critics(const std::string& json_text, const TrainConfig& cfg) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "acql-critics") {
    throw std::invalid_argument("checkpoint: not an acql critics file");
  }
  if (doc.value("version", -1) != kCheckpointVersion) {
    throw std::invalid_argument("checkpoint: unsupported version");
  }
  if (doc.value("sum_cost", false) != cfg.sum_cost) {
    throw std::invalid_argument("checkpoint: critic mode does not match the configuration");
  }
  CriticPair critics(doc.value("qr_init", 0.0), doc.value("qc_init", cfg.rho_max), cfg.lambda);
  CriticIo::load_table(critics.qr, doc.at("qr"));
  CriticIo::load_table(critics.qc, doc.at("qc"));
  return critics;
}

}  // namespace acql
