#ifndef FLINTHILLS_CLI_CHECKPOINT_HPP
#define FLINTHILLS_CLI_CHECKPOINT_HPP

#include <stdexcept>
#include <string>

#include "flinthills/cli/config.hpp"
#include "flinthills/series.hpp"

namespace flinthills::cli {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { hash_mismatch, corrupt, io };

  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Writes the ledger (at a chunk boundary) as one JSON document. The file is
/// replaced atomically.
void checkpoint_save(const std::string& path, const SumLedger& ledger, const RunConfig& config);

/// Reads a checkpoint written for the same canonical configuration.
SumLedger checkpoint_load(const std::string& path, const RunConfig& config);

}  // namespace flinthills::cli

#endif  // FLINTHILLS_CLI_CHECKPOINT_HPP
