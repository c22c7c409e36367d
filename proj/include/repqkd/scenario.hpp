#pragma once

#include <string>
#include <vector>

#include "repqkd/engine.hpp"

namespace repqkd::scenario {

enum class Target { Efficiency, AbortRate, EveRecovery, ExampleReplay };

const char* target_name(Target t);

struct ScenarioSpec {
  engine::ProtocolConfig config;
  std::uint32_t trials = 1;
  std::vector<Target> targets;
  std::string out_path;        // report file, empty = no file
  std::string transcript_dir;  // per-trial transcripts, empty = none
};

struct MetricLine {
  std::string name;
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal approximation, 0 = exact
  std::string threshold;      // "-" when informational
  bool pass = true;
};

struct ScenarioReport {
  std::vector<MetricLine> metrics;
  std::vector<std::string> detail_lines;

  bool all_passed() const;
  std::string text() const;
};

// Runs `trials` seeded executions per requested target (trial i uses
// seed + i) and aggregates. Chain-level targets run the whole relay;
// round-level targets (abort rate, interception statistics) run one
// distribution round per trial.
ScenarioReport run_scenario(const ScenarioSpec& spec);

struct MathReport {
  std::vector<std::string> lines;
  bool passed = false;
  std::string text() const;
};

// Basis-algebra validation across p in {3,5,7,11,13}: cross-basis overlap
// magnitudes, within-basis orthonormality, and agreement of the numeric
// and index-level shift actions. The fault switch corrupts one amplitude
// so the suite demonstrably fails closed.
MathReport validate_math(bool fault_inject_omega = false);

}  // namespace repqkd::scenario
