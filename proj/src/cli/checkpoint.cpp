#include "flinthills/cli/checkpoint.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "flinthills/cli/output.hpp"
#include "flinthills/parallel.hpp"

namespace flinthills::cli {
namespace {

using nlohmann::json;

// 40 digits round-trip every kTermBits value exactly.
std::string exact(const BigFloat& value) { return value.to_decimal(round_trip_digits(kTermBits)); }

BigFloat read_exact(const json& node) { return BigFloat::from_decimal(node.get<std::string>(), kTermBits); }

double read_double(const json& node) {
  const std::string text = node.get<std::string>();
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) throw std::invalid_argument("bad double: " + text);
  return value;
}

json write_sum(const CompensatedSum& sum) {
  return json{{"sum", exact(sum.sum())}, {"compensation", exact(sum.compensation())}};
}

CompensatedSum read_sum(const json& node) {
  return CompensatedSum(read_exact(node.at("sum")), read_exact(node.at("compensation")));
}

}  // namespace

void checkpoint_save(const std::string& path, const SumLedger& ledger, const RunConfig& config) {
  json rows = json::array();
  for (const LedgerRow& row : ledger.checkpoints) {
    rows.push_back(json{{"N", row.n},
                        {"S", exact(row.S)},
                        {"L", exact(row.L)},
                        {"G", exact(row.G)},
                        {"G_sharp", exact(row.G_sharp)},
                        {"ratio_SL", exact(row.ratio_SL)},
                        {"ratio_SG", exact(row.ratio_SG)},
                        {"S_error", shortest_decimal(row.S_error)},
                        {"L_error", shortest_decimal(row.L_error)},
                        {"G_sharp_error", shortest_decimal(row.G_sharp_error)}});
  }
  const json document{
      {"version", kCheckpointVersion},
      {"config_hash", config_hash(config)},
      {"config", canonical_string(config)},
      {"n_done", ledger.n_done},
      {"sums", {{"S", write_sum(ledger.S_sum)}, {"L", write_sum(ledger.L_sum)}, {"G_sharp", write_sum(ledger.G_sharp_sum)}}},
      {"term_errors",
       {{"S", shortest_decimal(ledger.S_term_error)},
        {"L", shortest_decimal(ledger.L_term_error)},
        {"G_sharp", shortest_decimal(ledger.G_sharp_term_error)}}},
      {"max_term", {{"n", ledger.max_term.n}, {"value", exact(ledger.max_term.value)}}},
      {"rows", rows}};

  const std::filesystem::path target(path);
  std::filesystem::path temporary = target;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::trunc);
    out << document.dump() << '\n';
    if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot write checkpoint " + temporary.string());
  }
  std::error_code ec;
  std::filesystem::rename(temporary, target, ec);
  if (ec) throw CheckpointError(CheckpointError::Kind::io, "cannot replace checkpoint " + path + ": " + ec.message());
}

SumLedger checkpoint_load(const std::string& path, const RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open checkpoint " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  json document;
  try {
    document = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::corrupt, "corrupt checkpoint " + path + ": " + e.what());
  }

  try {
    if (document.at("version").get<int>() != kCheckpointVersion) {
      throw CheckpointError(CheckpointError::Kind::corrupt, "unsupported checkpoint version in " + path);
    }
    if (document.at("config_hash").get<std::string>() != config_hash(config)) {
      throw CheckpointError(CheckpointError::Kind::hash_mismatch,
                            "checkpoint " + path + ": config hash mismatch, written for " +
                                document.at("config").get<std::string>());
    }

    SumLedger ledger;
    ledger.n_done = document.at("n_done").get<std::uint64_t>();
    if (ledger.n_done == 0 || ledger.n_done % kChunkLength != 0) {
      throw CheckpointError(CheckpointError::Kind::corrupt, "checkpoint n_done is not a chunk boundary");
    }
    const json& sums = document.at("sums");
    ledger.S_sum = read_sum(sums.at("S"));
    ledger.L_sum = read_sum(sums.at("L"));
    ledger.G_sharp_sum = read_sum(sums.at("G_sharp"));
    const json& errors = document.at("term_errors");
    ledger.S_term_error = read_double(errors.at("S"));
    ledger.L_term_error = read_double(errors.at("L"));
    ledger.G_sharp_term_error = read_double(errors.at("G_sharp"));
    ledger.max_term.n = document.at("max_term").at("n").get<std::uint64_t>();
    ledger.max_term.value = read_exact(document.at("max_term").at("value"));
    for (const json& row : document.at("rows")) {
      ledger.checkpoints.push_back(LedgerRow{row.at("N").get<std::uint64_t>(),
                                             read_exact(row.at("S")),
                                             read_exact(row.at("L")),
                                             read_exact(row.at("G")),
                                             read_exact(row.at("G_sharp")),
                                             read_exact(row.at("ratio_SL")),
                                             read_exact(row.at("ratio_SG")),
                                             read_double(row.at("S_error")),
                                             read_double(row.at("L_error")),
                                             read_double(row.at("G_sharp_error"))});
    }
    return ledger;
  } catch (const json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::corrupt, "corrupt checkpoint " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(CheckpointError::Kind::corrupt, "corrupt checkpoint " + path + ": " + e.what());
  }
}

}  // namespace flinthills::cli
