#include "flinthills/cli/app.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "flinthills/blocks.hpp"
#include "flinthills/cli/checkpoint.hpp"
#include "flinthills/cli/output.hpp"
#include "flinthills/diophantine.hpp"
#include "flinthills/series.hpp"

namespace flinthills::cli {
namespace {

double relative_difference(const BigFloat& a, const BigFloat& b) {
  BigFloat diff(128);
  mpfr_sub(diff.get(), a.get(), b.get(), MPFR_RNDN);
  mpfr_div(diff.get(), diff.get(), b.get(), MPFR_RNDN);
  return std::fabs(diff.to_double(MPFR_RNDU));
}

void run_sums(const RunConfig& config, const PrecisionContext& ctx, std::ostream& out, std::ostream& err) {
  RecordWriter writer(out, config.format, {"N", "S", "L", "G", "Gsharp", "ratio_SL", "ratio_SG"});
  std::optional<SumLedger> resumed;
  if (config.resume && std::filesystem::exists(*config.checkpoint_path)) {
    resumed = checkpoint_load(*config.checkpoint_path, config);
    if (resumed->n_done > config.n_max) {
      throw UsageError("--n-max: checkpoint already covers n=" + std::to_string(resumed->n_done));
    }
  } else if (config.resume) {
    err << "note: no checkpoint at " << *config.checkpoint_path << ", starting from n=1\n";
  }

  SumOptions options;
  options.jobs = config.jobs;
  options.keep_rows = config.checkpoint_path.has_value();
  options.resume = resumed ? &*resumed : nullptr;
  options.on_row = [&](const LedgerRow& row) {
    writer.write({number(row.n), number(row.S), number(row.L), number(row.G), number(row.G_sharp),
                  number(row.ratio_SL), number(row.ratio_SG)});
  };
  if (config.checkpoint_path) {
    options.on_chunk_boundary = [&](const SumLedger& ledger) {
      checkpoint_save(*config.checkpoint_path, ledger, config);
    };
  }
  partial_sums(config.n_max, SeriesParams{}, ctx, config.stride, options);
}

void run_convergents(const RunConfig& config, const PrecisionContext& ctx, std::ostream& out, std::ostream& err) {
  if (config.nu) {
    const ConvergentList list = convergents(ctx, 4096);
    const GoodApproxSet set = good_denominators(*config.nu, config.n_max, ctx, config.jobs);
    RecordWriter writer(out, config.format, {"q", "p", "err", "convergent_k"});
    for (const GoodApprox& member : set.members) {
      std::optional<std::size_t> k;
      for (const Convergent& c : list.items) {
        if (cmp(c.q, member.q) == 0) k = c.k;
      }
      writer.write({number(member.q), Field{Field::Kind::number, std::to_string(member.p)}, number(member.err),
                    optional_number(k)});
    }
    return;
  }
  const ConvergentList list = convergents(ctx, config.k_max);
  RecordWriter writer(out, config.format, {"k", "a", "p", "q", "eps", "eps_error"});
  for (const Convergent& c : list.items) {
    writer.write({number(static_cast<std::uint64_t>(c.k)), Field{Field::Kind::number, c.a.get_str()},
                  Field{Field::Kind::number, c.p.get_str()}, Field{Field::Kind::number, c.q.get_str()},
                  number(c.eps), number(c.eps_error)});
  }
  if (list.stopped_early) {
    err << "note: only " << list.items.size() << " quotients certified at " << ctx.bits() << " bits\n";
  }
}

void run_blocks(const RunConfig& config, const PrecisionContext& ctx, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> ks = config.k_list;
  if (ks.empty()) {
    const ConvergentList list = convergents(ctx, 4096);
    for (const Convergent& c : list.items) {
      if (c.k >= 1 && cmp(c.p, config.n_max) <= 0) ks.push_back(c.k);
    }
  }
  RecordWriter writer(out, config.format,
                      {"k", "q_k", "q_k1", "tau", "n_lo", "n_hi", "central_n", "measured_sum", "central_term",
                       "heuristic", "ratio"});
  std::vector<BlockReport> reports;
  for (const std::size_t k : ks) {
    BlockReport r = block_sum(k, config.tau, ctx, config.constant);
    writer.write({number(static_cast<std::uint64_t>(r.k)), Field{Field::Kind::number, r.q_k.get_str()},
                  Field{Field::Kind::number, r.q_k1.get_str()}, number(r.tau), number(r.n_lo), number(r.n_hi),
                  number(r.central_n), number(r.measured_sum), number(r.central_term), number(r.heuristic),
                  number(r.ratio)});
    reports.push_back(std::move(r));
  }
  if (reports.size() >= 2) {
    err << "note: fitted constant C = " << shortest_decimal(fit_constant(reports)) << "\n";
  }
}

void run_spikes(const RunConfig& config, const PrecisionContext& ctx, std::ostream& out, std::ostream& err) {
  const std::vector<SpikeEvent> events = spike_scan(config.n_max, config.threshold, ctx, config.jobs);
  RecordWriter writer(out, config.format, {"n", "term", "matched_k", "matched_q_k"});
  bool numerator_only = false;
  for (const SpikeEvent& e : events) {
    writer.write({number(e.n), number(e.term), optional_number(e.matched_k), optional_number(e.matched_denominator_k)});
    numerator_only = numerator_only || (e.matched_k && !e.matched_denominator_k);
  }
  if (numerator_only) {
    err << "note: spikes sit at convergent numerators p_k (n near q_k*pi), not at the denominators q_k\n";
  }
}

void run_audit(const RunConfig& config, std::ostream& out) {
  const AuditReport r = audit(config.n_max, config.bits, config.jobs);
  RecordWriter writer(out, config.format,
                      {"n_max", "bits", "check_bits", "required_bits", "S", "S_check", "rel_diff_S", "L", "L_check",
                       "rel_diff_L", "passed", "detail"});
  writer.write({number(r.n_max), number(static_cast<std::uint64_t>(r.bits)),
                number(static_cast<std::uint64_t>(r.check_bits)), number(static_cast<std::uint64_t>(r.required_bits)),
                r.certified ? number(r.S) : null_field(), r.certified ? number(r.S_check) : null_field(),
                r.certified ? number(r.rel_diff_S) : null_field(), r.certified ? number(r.L) : null_field(),
                r.certified ? number(r.L_check) : null_field(), r.certified ? number(r.rel_diff_L) : null_field(),
                text(r.passed ? "true" : "false"), text(r.detail)});
  if (!r.passed) throw PrecisionError("audit failed: " + r.detail);
}

}  // namespace

AuditReport audit(std::uint64_t n_max, int bits, unsigned jobs) {
  AuditReport report;
  report.n_max = n_max;
  report.bits = bits;
  report.check_bits = 2 * bits;
  report.required_bits = required_bits(n_max, 8.0, 32);
  if (bits < report.required_bits) {
    report.detail = "bits=" + std::to_string(bits) + " below required_bits=" + std::to_string(report.required_bits) +
                    " for n_max=" + std::to_string(n_max);
    return report;
  }
  try {
    SumOptions options;
    options.jobs = jobs;
    options.keep_rows = false;
    const SumLedger base = partial_sums(n_max, SeriesParams{}, make_context(bits), n_max, options);
    const SumLedger check = partial_sums(n_max, SeriesParams{}, make_context(2 * bits), n_max, options);
    report.S = base.S();
    report.L = base.L();
    report.S_check = check.S();
    report.L_check = check.L();
  } catch (const PrecisionError& e) {
    report.detail = std::string("certification failure: ") + e.what();
    return report;
  }
  report.certified = true;
  report.rel_diff_S = relative_difference(report.S, report.S_check);
  report.rel_diff_L = relative_difference(report.L, report.L_check);
  report.passed = report.rel_diff_S < kAuditTolerance && report.rel_diff_L < kAuditTolerance;
  if (!report.passed) report.detail = "relative drift above 1e-9";
  return report;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == Command::criterion) {
      const CriterionVerdict v = classify_mu(*config.mu);
      RecordWriter writer(out, config.format, {"mu", "verdict", "lower_threshold", "upper_threshold"});
      writer.write({number(v.mu_input), text(std::string(to_string(v.verdict))), number(v.lower_threshold),
                    number(v.upper_threshold)});
      return kExitOk;
    }
    if (config.command == Command::audit) {
      run_audit(config, out);
      return kExitOk;
    }

    const PrecisionContext ctx = make_context(effective_bits(config));
    switch (config.command) {
      case Command::sums:
        run_sums(config, ctx, out, err);
        break;
      case Command::convergents:
        run_convergents(config, ctx, out, err);
        break;
      case Command::blocks:
        run_blocks(config, ctx, out, err);
        break;
      case Command::spikes:
        run_spikes(config, ctx, out, err);
        break;
      case Command::safe: {
        const SafeRegionReport r = safe_region_sum(config.delta, config.n_max, ctx, config.jobs);
        RecordWriter writer(out, config.format, {"delta", "n_max", "sum", "sum_error", "bound", "member_count"});
        writer.write({number(r.delta), number(r.n_max), number(r.sum_over_A_delta), number(r.sum_error),
                      number(r.bound), number(r.member_count)});
        break;
      }
      case Command::weighted: {
        const WeightedReport r = weighted_sum(config.eta, config.n_max, ctx, config.jobs);
        RecordWriter writer(out, config.format, {"eta", "N", "value", "small_count"});
        for (const WeightedPoint& p : r.checkpoints) {
          writer.write({number(r.eta), number(p.n), number(p.value), number(p.small_count)});
        }
        break;
      }
      case Command::split: {
        const SplitReport r = adaptive_split(config.alpha, config.n_max, ctx, config.jobs);
        std::ostringstream members;
        for (std::size_t i = 0; i < r.small_set.size(); ++i) members << (i ? ";" : "") << r.small_set[i];
        RecordWriter writer(out, config.format,
                            {"alpha", "n_max", "bulk_bound", "spike_part", "total_bound", "small_count", "small_set"});
        writer.write({number(r.alpha), number(r.n_max), number(r.bulk_bound), number(r.spike_part),
                      number(r.bulk_bound + r.spike_part), number(static_cast<std::uint64_t>(r.small_set.size())),
                      text(members.str())});
        break;
      }
      case Command::general: {
        const Term t = generalized_sum(config.a, config.b, config.n_max, ctx, config.jobs);
        RecordWriter writer(out, config.format, {"a", "b", "n_max", "value", "error"});
        writer.write({number(config.a), number(config.b), number(config.n_max), number(t.value), number(t.error)});
        break;
      }
      case Command::probe: {
        if (config.nu) {
          RecordWriter writer(out, config.format, {"nu", "N", "count"});
          for (const SparsityPoint& p : sparsity_count(*config.nu, config.n_max, ctx, config.jobs)) {
            writer.write({number(*config.nu), number(p.n), number(p.count)});
          }
        } else {
          RecordWriter writer(out, config.format, {"n", "kappa"});
          for (const KappaRecord& r : exponent_probe(config.n_max, ctx, config.jobs).table) {
            writer.write({number(r.n), number(r.kappa)});
          }
        }
        break;
      }
      case Command::criterion:
      case Command::audit:
        break;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyWindowError& e) {
    err << "error: --tau: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == CheckpointError::Kind::hash_mismatch ? kExitUsage : kExitNumeric;
  } catch (const PrecisionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace flinthills::cli
