#include "telesim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "telesim/oracle.hpp"
#include "telesim/session.hpp"

namespace telesim {

namespace {

using nlohmann::json;

// Substream base for input generation, disjoint from trial substreams.
constexpr std::uint64_t kInputStreamBase = 0x8000000000000000ull;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string limiting_side_name(LimitingSide side) {
  switch (side) {
    case LimitingSide::channel: return "channel";
    case LimitingSide::measurement: return "measurement";
    case LimitingSide::matched: return "matched";
  }
  return "?";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

void check_b2(double v, const char* what) {
  if (!(v >= 0.0 && v <= 0.5)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 0.5]");
  }
}

struct ParsedInputs {
  std::vector<MultiInput> inputs;
  std::string warning;  // non-empty if renormalization was noisy
};

ParsedInputs parse_input_spec(const std::string& spec, int k, std::uint64_t seed) {
  ParsedInputs out;
  if (spec.rfind("random:", 0) == 0) {
    const long n = std::stol(spec.substr(7));
    if (n < 1 || n > 100000) throw std::invalid_argument("random:N needs 1 <= N <= 100000");
    for (long i = 0; i < n; ++i) {
      RngStream rng(seed, kInputStreamBase + static_cast<std::uint64_t>(i));
      out.inputs.push_back(MultiInput::random(k, rng));
    }
    return out;
  }

  std::vector<Cplx> amps;
  for (const std::string& token : split(spec, ',')) {
    const auto parts = split(token, ':');
    if (parts.empty() || parts.size() > 2) {
      throw std::invalid_argument("bad amplitude token: " + token);
    }
    const double re = parse_double(parts[0]);
    const double im = parts.size() == 2 ? parse_double(parts[1]) : 0.0;
    amps.emplace_back(re, im);
  }
  if (amps.size() != (1ull << k)) {
    throw std::invalid_argument("expected " + std::to_string(1ull << k) +
                                " amplitudes for " + std::to_string(k) + " pair(s)");
  }
  double norm = 0.0;
  for (const Cplx& a : amps) norm += std::norm(a);
  if (norm <= 0.0) throw std::invalid_argument("input amplitudes are all zero");
  if (std::abs(norm - 1.0) > 1e-6) {
    out.warning = "input renormalized; |sum - 1| was " + fmt17(std::abs(norm - 1.0));
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (Cplx& a : amps) a *= inv;
  out.inputs.push_back(MultiInput::from_amps(std::move(amps)));
  return out;
}

// (ch, mb) from banks when given, else from the single-pair parameters.
std::pair<ChannelBank, MeasurementBank> make_banks(const RunConfig& cfg) {
  if (!cfg.banks.empty()) {
    std::vector<SchmidtPair> pairs;
    std::vector<MeasurementFamily> families;
    for (const auto& [b2, bp2] : cfg.banks) {
      check_b2(b2, "bank b2");
      check_b2(bp2, "bank bp2");
      pairs.push_back(SchmidtPair::from_b_squared(b2));
      families.push_back(MeasurementFamily::from_b_squared(bp2));
    }
    return {ChannelBank(std::move(pairs)), MeasurementBank(std::move(families))};
  }
  check_b2(cfg.b2, "b2");
  check_b2(cfg.bp2, "bp2");
  return {ChannelBank({SchmidtPair::from_b_squared(cfg.b2)}),
          MeasurementBank({MeasurementFamily::from_b_squared(cfg.bp2)})};
}

json params_json(const RunConfig& cfg, bool with_banks) {
  json p;
  if (with_banks && !cfg.banks.empty()) {
    json banks = json::array();
    for (const auto& [b2, bp2] : cfg.banks) banks.push_back({b2, bp2});
    p["banks"] = banks;
  } else {
    p["b2"] = cfg.b2;
    p["bp2"] = cfg.bp2;
  }
  p["input"] = cfg.input_spec;
  p["seed"] = cfg.seed;
  return p;
}

// Common frame for the report object so every mode emits the same key set.
json report_frame(const std::string& mode, json params) {
  json j;
  j["mode"] = mode;
  j["params"] = std::move(params);
  j["P_closed"] = nullptr;
  j["P_oracle"] = nullptr;
  j["branches"] = nullptr;
  j["matched"] = nullptr;
  j["limiting_side"] = nullptr;
  j["wasted"] = nullptr;
  j["mc"] = nullptr;
  return j;
}

std::string render_json(const json& j) { return j.dump(2) + "\n"; }

// --- teleport ------------------------------------------------------------------

CommandResult cmd_teleport(const RunConfig& cfg) {
  CommandResult res;
  check_b2(cfg.b2, "b2");
  check_b2(cfg.bp2, "bp2");
  const SchmidtPair channel = SchmidtPair::from_b_squared(cfg.b2);
  const MeasurementFamily family = MeasurementFamily::from_b_squared(cfg.bp2);

  ParsedInputs parsed = parse_input_spec(cfg.input_spec, 1, cfg.seed);
  if (!parsed.warning.empty()) res.diagnostics += parsed.warning + "\n";

  const double p_closed = success_probability(channel, family);
  const MatchReport match = matching_report(channel, family);

  // First input drives the report; the rest only bound the P variation.
  std::vector<ProtocolReport> reports;
  for (const MultiInput& mi : parsed.inputs) {
    const InputQubit q(mi.state().amp(0), mi.state().amp(1));
    reports.push_back(teleport_exact(q, channel, family));
  }
  double variation = 0.0;
  for (const ProtocolReport& r : reports) {
    variation = std::max(variation, std::abs(r.total - reports[0].total));
  }

  const InputQubit q0(parsed.inputs[0].state().amp(0), parsed.inputs[0].state().amp(1));
  const auto records = enumerate_outcomes(q0, channel, family);
  const CrosscheckResult check = crosscheck(reports[0], records, kCrosscheckTol);
  const double p_oracle = oracle_success_total(records);

  bool ok = check.pass;
  ok = ok && std::abs(reports[0].total - p_closed) <= kCrosscheckTol;
  ok = ok && variation <= 1e-12;
  ok = ok && reports[0].success_fidelity >= 1.0 - kNormTol;
  res.exit_code = ok ? 0 : 1;
  res.diagnostics += "crosscheck max delta = " + fmt17(check.max_delta) + "\n";
  if (!ok) res.diagnostics += "teleport crosschecks FAILED\n";

  const auto branches = collapsed_branches(q0, channel, family);

  if (cfg.format == RunConfig::Format::json) {
    json j = report_frame("teleport", params_json(cfg, false));
    j["P_closed"] = p_closed;
    j["P_oracle"] = p_oracle;
    json br = json::array();
    for (int m = 1; m <= 4; ++m) {
      br.push_back({{"m", m},
                    {"x", branches[m - 1].x},
                    {"y", branches[m - 1].y},
                    {"p", reports[0].contributions[m - 1]}});
    }
    j["branches"] = br;
    j["matched"] = match.matched;
    j["limiting_side"] = limiting_side_name(match.limiting_side);
    j["wasted"] = match.wasted;
    res.output = render_json(j);
  } else if (cfg.format == RunConfig::Format::csv) {
    std::ostringstream out;
    out << "b2,bp2,m,x,y,p_m,P_closed,P_oracle,matched,limiting_side,wasted\n";
    for (int m = 1; m <= 4; ++m) {
      out << fmt17(cfg.b2) << ',' << fmt17(cfg.bp2) << ',' << m << ','
          << fmt17(branches[m - 1].x) << ',' << fmt17(branches[m - 1].y) << ','
          << fmt17(reports[0].contributions[m - 1]) << ',' << fmt17(p_closed) << ','
          << fmt17(p_oracle) << ',' << (match.matched ? 1 : 0) << ','
          << limiting_side_name(match.limiting_side) << ',' << fmt17(match.wasted)
          << '\n';
    }
    res.output = out.str();
  } else {
    std::ostringstream out;
    out << "conclusive teleportation  b2=" << cfg.b2 << "  bp2=" << cfg.bp2 << "\n";
    out << "branch       x            y          p_m\n";
    char line[160];
    for (int m = 1; m <= 4; ++m) {
      std::snprintf(line, sizeof(line), "%4d   %10.6f   %10.6f   %10.6f\n", m,
                    branches[m - 1].x, branches[m - 1].y,
                    reports[0].contributions[m - 1]);
      out << line;
    }
    out << "P_closed = " << fmt17(p_closed) << "\n";
    out << "P_oracle = " << fmt17(p_oracle) << "\n";
    out << "matched = " << (match.matched ? "yes" : "no")
        << "  limiting_side = " << limiting_side_name(match.limiting_side)
        << "  wasted = " << fmt17(match.wasted) << "\n";
    res.output = out.str();
  }
  return res;
}

// --- sweep ---------------------------------------------------------------------

CommandResult cmd_sweep(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.grid < 2 || cfg.grid > 512) {
    throw std::invalid_argument("grid must be 2..512");
  }

  RngStream rng(cfg.seed, kInputStreamBase);
  const MultiInput q = MultiInput::random(1, rng);
  const InputQubit q0(q.state().amp(0), q.state().amp(1));

  struct Cell {
    double b2, bp2, closed, oracle;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(cfg.grid) * cfg.grid);
  double max_delta = 0.0;
  for (int i = 0; i < cfg.grid; ++i) {
    const double b2 = 0.5 * i / (cfg.grid - 1);
    const SchmidtPair channel = SchmidtPair::from_b_squared(b2);
    for (int jx = 0; jx < cfg.grid; ++jx) {
      const double bp2 = 0.5 * jx / (cfg.grid - 1);
      const MeasurementFamily family = MeasurementFamily::from_b_squared(bp2);
      const double closed = success_probability(channel, family);
      const double oracle = oracle_success_total(enumerate_outcomes(q0, channel, family));
      cells.push_back({b2, bp2, closed, oracle});
      max_delta = std::max(max_delta, std::abs(closed - oracle));
    }
  }
  res.exit_code = max_delta <= kCrosscheckTol ? 0 : 1;
  res.diagnostics = "max |delta| = " + fmt17(max_delta) + "\n";

  if (cfg.format == RunConfig::Format::json) {
    json p = params_json(cfg, false);
    p.erase("b2");
    p.erase("bp2");
    p["grid"] = cfg.grid;
    json j = report_frame("sweep", std::move(p));
    // One entry per grid cell under the report's branches key.
    json arr = json::array();
    for (const Cell& c : cells) {
      arr.push_back({{"b2", c.b2},
                     {"bp2", c.bp2},
                     {"P_closed", c.closed},
                     {"P_oracle", c.oracle},
                     {"delta", c.closed - c.oracle}});
    }
    j["branches"] = arr;
    res.output = render_json(j);
  } else {
    // Table and CSV share the layout; the table just pads columns.
    std::ostringstream out;
    const char* sep = cfg.format == RunConfig::Format::csv ? "," : "  ";
    out << "b2" << sep << "bp2" << sep << "P_closed" << sep << "P_oracle" << sep
        << "delta\n";
    for (const Cell& c : cells) {
      out << fmt17(c.b2) << sep << fmt17(c.bp2) << sep << fmt17(c.closed) << sep
          << fmt17(c.oracle) << sep << fmt17(c.closed - c.oracle) << '\n';
    }
    res.output = out.str();
  }
  return res;
}

// --- multi ---------------------------------------------------------------------

CommandResult cmd_multi(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.banks.empty()) {
    throw std::invalid_argument("multi mode requires --banks");
  }
  auto [ch, mb] = make_banks(cfg);
  const int k = ch.size();

  ParsedInputs parsed = parse_input_spec(cfg.input_spec, k, cfg.seed);
  if (!parsed.warning.empty()) res.diagnostics += parsed.warning + "\n";

  const double p_closed = multi_success_probability(ch, mb);

  json j = report_frame("multi", params_json(cfg, true));
  j["P_closed"] = p_closed;

  std::ostringstream table;
  std::ostringstream csv;
  csv << "outcome_label,p\n";
  table << "multi-pair teleportation  k=" << k << "\n";

  bool ok = true;
  if (k <= kMaxFullVectorPairs) {
    std::vector<MultiReport> reports;
    for (const MultiInput& mi : parsed.inputs) {
      reports.push_back(multi_teleport_exact(mi, ch, mb));
    }
    double variation = 0.0;
    for (const MultiReport& r : reports) {
      variation = std::max(variation, std::abs(r.total - reports[0].total));
    }
    const auto records = enumerate_outcomes(parsed.inputs[0], ch, mb);
    const CrosscheckResult check = crosscheck(reports[0], records, kCrosscheckTol);
    const double p_oracle = oracle_success_total(records);

    ok = check.pass && std::abs(reports[0].total - p_closed) <= kCrosscheckTol &&
         variation <= 1e-12 &&
         reports[0].reconstruction_fidelity >= 1.0 - kProbTol;
    res.diagnostics += "crosscheck max delta = " + fmt17(check.max_delta) + "\n";

    j["P_oracle"] = p_oracle;
    json branches = json::array();
    for (std::size_t oc = 0; oc < reports[0].contributions.size(); ++oc) {
      std::string label;
      for (int i = 0; i < k; ++i) {
        label += static_cast<char>('1' + ((oc >> (2 * i)) & 3ull));
      }
      branches.push_back({{"outcome", label}, {"p", reports[0].contributions[oc]}});
      csv << label << ',' << fmt17(reports[0].contributions[oc]) << '\n';
      table << "  outcome " << label << "  p = " << fmt17(reports[0].contributions[oc])
            << "\n";
    }
    j["branches"] = branches;
    table << "P_closed = " << fmt17(p_closed) << "\nP_oracle = " << fmt17(p_oracle)
          << "\nreconstruction_fidelity = " << fmt17(reports[0].reconstruction_fidelity)
          << "\n";
  } else {
    table << "P_closed = " << fmt17(p_closed) << "  (closed form only for k > "
          << kMaxFullVectorPairs << ")\n";
    csv << "total," << fmt17(p_closed) << '\n';
  }
  res.exit_code = ok ? 0 : 1;
  if (!ok) res.diagnostics += "multi crosschecks FAILED\n";

  if (cfg.format == RunConfig::Format::json) {
    res.output = render_json(j);
  } else if (cfg.format == RunConfig::Format::csv) {
    res.output = csv.str();
  } else {
    res.output = table.str();
  }
  return res;
}

// --- session --------------------------------------------------------------------

CommandResult cmd_session(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto [ch, mb] = make_banks(cfg);
  const int k = ch.size();

  ParsedInputs parsed = parse_input_spec(cfg.input_spec, k, cfg.seed);
  if (!parsed.warning.empty()) res.diagnostics += parsed.warning + "\n";
  const MultiInput& q = parsed.inputs[0];

  const double p_closed = multi_success_probability(ch, mb);
  const MonteCarloResult mc = monte_carlo(q, ch, mb, cfg.trials, cfg.seed);

  const double sigma =
      std::sqrt(p_closed * (1.0 - p_closed) / static_cast<double>(cfg.trials));
  const double delta = std::abs(mc.frequency - p_closed);
  const bool ok = delta <= 4.0 * sigma && mc.min_success_fidelity >= 1.0 - kProbTol;
  res.exit_code = ok ? 0 : 1;
  res.diagnostics += "freq = " + fmt17(mc.frequency) + "  P = " + fmt17(p_closed) +
                     "  |delta| = " + fmt17(delta) + "  4*sigma = " +
                     fmt17(4.0 * sigma) + "\n";
  if (!ok) res.diagnostics += "session statistical check FAILED\n";

  if (cfg.format == RunConfig::Format::json) {
    json j = report_frame("session", params_json(cfg, !cfg.banks.empty()));
    j["params"]["trials"] = cfg.trials;
    j["P_closed"] = p_closed;
    j["mc"] = {{"trials", mc.trials}, {"freq", mc.frequency}, {"sigma", sigma}};
    // Histogram entries ride under branches, one per joint outcome.
    json hist = json::array();
    for (std::size_t oc = 0; oc < mc.outcome_histogram.size(); ++oc) {
      std::string label;
      for (int i = 0; i < k; ++i) {
        label += static_cast<char>('1' + ((oc >> (2 * i)) & 3ull));
      }
      hist.push_back({{"outcome", label}, {"count", mc.outcome_histogram[oc]}});
    }
    j["branches"] = hist;
    res.output = render_json(j);
  } else if (cfg.format == RunConfig::Format::csv) {
    std::ostringstream out;
    out << "trials,successes,frequency,sigma,P_closed,delta\n";
    out << mc.trials << ',' << mc.successes << ',' << fmt17(mc.frequency) << ','
        << fmt17(sigma) << ',' << fmt17(p_closed) << ',' << fmt17(delta) << '\n';
    res.output = out.str();
  } else {
    std::ostringstream out;
    out << "session Monte Carlo  trials=" << mc.trials << "  seed=" << cfg.seed
        << "\n";
    out << "successes = " << mc.successes << "  frequency = " << fmt17(mc.frequency)
        << "\n";
    out << "P_closed = " << fmt17(p_closed) << "  sigma = " << fmt17(sigma) << "\n";
    out << "min success fidelity = " << fmt17(mc.min_success_fidelity) << "\n";
    res.output = out.str();
  }
  return res;
}

// --- oracle ---------------------------------------------------------------------

CommandResult cmd_oracle(const RunConfig& cfg) {
  CommandResult res;
  auto [ch, mb] = make_banks(cfg);
  const int k = ch.size();
  if (k > kMaxFullVectorPairs) {
    throw std::invalid_argument("oracle mode supports at most 3 pairs");
  }

  ParsedInputs parsed = parse_input_spec(cfg.input_spec, k, cfg.seed);
  if (!parsed.warning.empty()) res.diagnostics += parsed.warning + "\n";
  const MultiInput& q = parsed.inputs[0];

  const auto records = enumerate_outcomes(q, ch, mb);
  const double p_closed = multi_success_probability(ch, mb);
  const double p_oracle = oracle_success_total(records);
  const double total = oracle_probability_total(records);

  const bool ok = std::abs(total - 1.0) <= kProbTol &&
                  std::abs(p_oracle - p_closed) <= kCrosscheckTol;
  res.exit_code = ok ? 0 : 1;
  res.diagnostics += "record total = " + fmt17(total) +
                     "  success total = " + fmt17(p_oracle) + "\n";
  if (!ok) res.diagnostics += "oracle crosschecks FAILED\n";

  if (cfg.format == RunConfig::Format::json) {
    json j = report_frame("oracle", params_json(cfg, !cfg.banks.empty()));
    j["P_closed"] = p_closed;
    j["P_oracle"] = p_oracle;
    // Full record dump under branches.
    json arr = json::array();
    for (const EnumerationRecord& r : records) {
      std::string label;
      for (int m : r.alice_outcomes) label += static_cast<char>('0' + m);
      std::string bits;
      for (int b : r.ancilla_bits) bits += static_cast<char>('0' + b);
      arr.push_back({{"outcome", label},
                     {"ancilla", bits},
                     {"probability", r.probability},
                     {"fidelity", r.probability > 0.0
                                      ? fidelity(r.bob_state, q.state())
                                      : 0.0}});
    }
    j["branches"] = arr;
    res.output = render_json(j);
  } else {
    std::ostringstream out;
    if (cfg.format == RunConfig::Format::table) {
      out << "oracle enumeration  k=" << k << "  records=" << records.size() << "\n";
    }
    dump_records_csv(records, q.state(), out);
    if (cfg.format == RunConfig::Format::table) {
      out << "success total = " << fmt17(p_oracle)
          << "  P_closed = " << fmt17(p_closed) << "\n";
    }
    res.output = out.str();
  }
  return res;
}

}  // namespace

CommandResult execute(const RunConfig& cfg) {
  try {
    switch (cfg.mode) {
      case RunConfig::Mode::teleport: return cmd_teleport(cfg);
      case RunConfig::Mode::sweep: return cmd_sweep(cfg);
      case RunConfig::Mode::multi: return cmd_multi(cfg);
      case RunConfig::Mode::session: return cmd_session(cfg);
      case RunConfig::Mode::oracle: return cmd_oracle(cfg);
    }
    return {2, "", "unknown mode\n"};
  } catch (const std::exception& e) {
    return {2, "", std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace telesim
