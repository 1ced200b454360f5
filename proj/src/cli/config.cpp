#include "flinthills/cli/config.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "flinthills/parallel.hpp"
#include "flinthills/precision.hpp"
#include "flinthills/series.hpp"

namespace flinthills::cli {
namespace {

constexpr double kMuCap = 8.0;
constexpr int kGuardBits = 32;

void check(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate(const RunConfig& c) {
  check(c.n_max >= 1, "--n-max: must be >= 1");
  check(c.bits >= kMinBits && c.bits <= kMaxBits,
        "--bits: must lie in [" + std::to_string(kMinBits) + ", " + std::to_string(kMaxBits) + "]");
  check(c.stride >= 1, "--stride: must be >= 1");
  check(c.jobs >= 1, "--jobs: must be >= 1");
  check(c.tau > 0.0 && std::isfinite(c.tau), "--tau: must be > 0");
  check(c.threshold > 0.0 && std::isfinite(c.threshold), "--threshold: must be > 0");
  check(c.delta > 0.0, "--delta: must be > 0");
  check(c.delta <= kHalfPi, "--delta: delta exceeds pi/2");
  check(c.eta > 0.0 && std::isfinite(c.eta), "--eta: must be > 0");
  check(c.alpha > 0.0 && std::isfinite(c.alpha), "--alpha: must be > 0");
  check(c.a >= 0.0 && std::isfinite(c.a), "--a: must be >= 0");
  check(c.b >= 0.0 && std::isfinite(c.b), "--b: must be >= 0");
  check(c.constant > 0.0 && std::isfinite(c.constant), "--constant: must be > 0");
  check(!c.nu || (*c.nu > 0.0 && std::isfinite(*c.nu)), "--nu: must be > 0");
  check(!c.mu || (*c.mu >= 2.0 && std::isfinite(*c.mu)), "--mu: irrationality exponents are >= 2");
  check(c.command != Command::criterion || c.mu.has_value(), "--mu: required by criterion");
  check(!c.resume || c.checkpoint_path.has_value(), "--resume: requires --checkpoint");
  check(c.command != Command::probe || c.nu.has_value() || c.n_max >= 2, "--n-max: probe needs n_max >= 2");
  check(c.command != Command::audit || 2 * c.bits <= kMaxBits,
        "--bits: audit reruns at 2*bits, which must not exceed " + std::to_string(kMaxBits));
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::sums: return "sums";
    case Command::convergents: return "convergents";
    case Command::blocks: return "blocks";
    case Command::spikes: return "spikes";
    case Command::safe: return "safe";
    case Command::weighted: return "weighted";
    case Command::split: return "split";
    case Command::general: return "general";
    case Command::criterion: return "criterion";
    case Command::probe: return "probe";
    case Command::audit: return "audit";
  }
  return "sums";
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig config;
  std::string format = "csv";
  std::string checkpoint;
  std::optional<double> nu;
  std::optional<double> mu;

  CLI::App app{"Flint Hills series: certified partial sums, bounds and Diophantine diagnostics", "flinthills"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub, bool with_n_max = true) {
    if (with_n_max) sub->add_option("--n-max", config.n_max, "Largest index n (default 100000)");
    sub->add_option("--bits", config.bits, "Working precision in bits (default 256)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", config.jobs, "Worker threads (default 1)");
  };

  auto* sums = app.add_subcommand("sums", "Prefix sums S, L, G, G# with ratios");
  add_common(sums);
  sums->add_option("--stride", config.stride, "Checkpoint row stride (default 1000)");
  sums->add_option("--checkpoint", checkpoint, "Checkpoint file, rewritten at chunk boundaries");
  sums->add_flag("--resume", config.resume, "Resume from --checkpoint");

  auto* conv = app.add_subcommand("convergents", "Continued-fraction convergents of pi");
  add_common(conv);
  conv->add_option("--k-max", config.k_max, "Deepest quotient index (default 20)");
  conv->add_option("--nu", nu, "List q <= n-max with |pi q - p| < q^-nu instead");

  auto* blocks = app.add_subcommand("blocks", "Block sums near q_k pi against C/(q_k^2 q_{k+1})");
  add_common(blocks);
  blocks->add_option("--tau", config.tau, "Window half-width factor (default 0.1)");
  blocks->add_option("--k", config.k_list, "Convergent indices (default: all k >= 1 with p_k <= n-max)")
      ->delimiter(',');
  blocks->add_option("--constant", config.constant, "Heuristic constant C (default 1)");

  auto* spikes = app.add_subcommand("spikes", "Single terms above a threshold");
  add_common(spikes);
  spikes->add_option("--threshold", config.threshold, "Term threshold (default 1)");

  auto* safe = app.add_subcommand("safe", "Safe-region sum over d(n) >= delta");
  add_common(safe);
  safe->add_option("--delta", config.delta, "Distance threshold in (0, pi/2] (default 1)");

  auto* weighted = app.add_subcommand("weighted", "Weighted series 1/(n^(3+eta) sin^2 n)");
  add_common(weighted);
  weighted->add_option("--eta", config.eta, "Extra exponent eta > 0 (default 1)");

  auto* split = app.add_subcommand("split", "Adaptive threshold split with eps(n) = n^-alpha");
  add_common(split);
  split->add_option("--alpha", config.alpha, "Threshold exponent (default 0.5)");

  auto* general = app.add_subcommand("general", "Generalized series 1/(n^a |sin n|^b)");
  add_common(general);
  general->add_option("--a", config.a, "Power of n (default 3)");
  general->add_option("--b", config.b, "Power of |sin n| (default 2)");

  auto* criterion = app.add_subcommand("criterion", "Classify an irrationality exponent mu");
  criterion->add_option("--mu", mu, "Irrationality exponent (>= 2)");
  criterion->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* probe = app.add_subcommand("probe", "Record maxima of ln(1/d(n))/ln(n)");
  add_common(probe);
  probe->add_option("--nu", nu, "Count n with d(n) < n^-nu at decade checkpoints instead");

  auto* audit = app.add_subcommand("audit", "Recompute S and L at doubled precision");
  add_common(audit);

  std::vector<std::string> owned{"flinthills"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(owned.size());
  for (std::string& arg : owned) argv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const std::vector<CLI::App*> chosen = app.get_subcommands();
    throw HelpRequested(chosen.empty() ? app.help() : chosen.front()->help());
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    throw UsageError(message);
  }

  const std::vector<std::pair<CLI::App*, Command>> table{
      {sums, Command::sums},         {conv, Command::convergents}, {blocks, Command::blocks},
      {spikes, Command::spikes},     {safe, Command::safe},        {weighted, Command::weighted},
      {split, Command::split},       {general, Command::general},  {criterion, Command::criterion},
      {probe, Command::probe},       {audit, Command::audit}};
  for (const auto& [sub, command] : table) {
    if (sub->parsed()) config.command = command;
  }

  config.format = format == "json" ? Format::json : Format::csv;
  if (!checkpoint.empty()) config.checkpoint_path = checkpoint;
  config.nu = nu;
  config.mu = mu;
  validate(config);
  return config;
}

int effective_bits(const RunConfig& config) {
  if (config.command == Command::audit) return config.bits;
  return std::max(config.bits, required_bits(config.n_max, kMuCap, kGuardBits));
}

std::string canonical_string(const RunConfig& config) {
  std::ostringstream out;
  out << "flinthills/v1;command=" << to_string(config.command) << ";bits=" << effective_bits(config)
      << ";stride=" << config.stride << ";a=3;b=2;eta=0;chunk=" << kChunkLength;
  return out.str();
}

std::string config_hash(const RunConfig& config) {
  const std::string text = canonical_string(config);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

}  // namespace flinthills::cli
