#include "repqkd/example_scenario.hpp"

#include <algorithm>
#include <sstream>

#include "repqkd/repcode.hpp"
#include "repqkd/sharing.hpp"

namespace repqkd::example {

namespace {

using field::BiPoly;
using field::Fe;
using field::PrimeModulus;

const PrimeModulus kP(11);

Fe fe(std::uint64_t v) { return Fe(v, kP); }

// Dealer polynomial of the worked example: three x-terms, eight y-terms.
BiPoly example_polynomial() {
  auto row = [](std::initializer_list<std::uint64_t> vs) {
    std::vector<Fe> out;
    for (std::uint64_t v : vs) out.push_back(fe(v));
    return out;
  };
  return BiPoly({row({7, 1, 2, 1, 1, 1, 1, 1}),
                 row({2, 1, 1, 1, 1, 1, 1, 1}),
                 row({3, 1, 1, 1, 1, 1, 1, 1})});
}

std::string coeff_str(const field::UniPoly& poly) {
  std::string out = "(";
  for (std::size_t i = 0; i < poly.coefficients().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(poly.coefficients()[i].value());
  }
  return out + ")";
}

std::string coeff_str(const std::vector<std::uint64_t>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(vs[i]);
  }
  return out + ")";
}

void check(ExampleReport& report, std::string name, std::string expected,
           std::string actual) {
  const bool pass = expected == actual;
  report.checks.push_back(
      {std::move(name), std::move(expected), std::move(actual), pass});
}

// The scripted key sequence: values are arbitrary, the classification
// pattern is what the scenario pins down.
Fe scripted_key(std::uint32_t idx) { return fe(3 * idx + 5); }

}  // namespace

bool ExampleReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckLine& c) { return c.pass; }) &&
         std::all_of(discrepancies.begin(), discrepancies.end(),
                     [](const DiscrepancyLine& d) { return d.flagged; });
}

std::string ExampleReport::text() const {
  std::ostringstream out;
  for (const CheckLine& c : checks) {
    out << "check\t" << c.name << "\texpected=" << c.expected
        << "\tactual=" << c.actual << '\t' << (c.pass ? "PASS" : "FAIL")
        << '\n';
  }
  for (const DiscrepancyLine& d : discrepancies) {
    out << "discrepancy\t" << d.name << "\treference=" << d.reference
        << "\tcomputed=" << d.computed << '\t'
        << (d.flagged ? "FLAGGED" : "NOT-FLAGGED") << '\n';
  }
  return out.str();
}

ExampleReport run_example_scenario() {
  ExampleReport report;
  const BiPoly F = example_polynomial();

  // classical layer: dealer identity 9, holders 1..8, threshold 3
  std::vector<Fe> identities = {fe(9), fe(1), fe(2), fe(3), fe(4),
                                fe(5), fe(6), fe(7), fe(8)};
  const sharing::DealResult dealt =
      sharing::setup_with_polynomial(F, 3, 8, 8, identities);

  check(report, "secret_constant_term", "7",
        std::to_string(dealt.setup.secret().value()));

  const auto dealer_keys =
      sharing::derive_session_keys(dealt.shares[0], fe(1));
  check(report, "dealer_to_holder1_session_key", "4",
        std::to_string(dealer_keys.to_peer.value()));

  check(report, "dealer_col_share", "(4,3,4,3,3,3,3,3)",
        coeff_str(F.restrict_x(fe(9))));
  check(report, "holder1_row_share", "(4,9,10)",
        coeff_str(F.restrict_y(fe(1))));

  // reconstruction by holders 1..3
  const std::vector<Fe> active = {fe(1), fe(2), fe(3)};
  std::vector<sharing::LagrangeComponent> components;
  for (std::size_t i = 1; i <= 3; ++i) {
    components.push_back(sharing::lagrange_component(dealt.shares[i], active));
  }
  const sharing::DealerVerifier dealer_check(dealt.setup, active);
  const Fe recovered = sharing::reconstruct(
      dealt.shares[1], components, 3,
      [&](const sharing::VerifyRequest& r) { return dealer_check(r); });
  check(report, "reconstructed_secret", "7",
        std::to_string(recovered.value()));

  // reference values inconsistent with the defining polynomial; the run
  // must flag them, not match them
  {
    const std::vector<std::uint64_t> claimed = {6, 8, 9};
    const field::UniPoly oracle = F.restrict_y(fe(9));
    std::vector<std::uint64_t> actual;
    for (const Fe& c : oracle.coefficients()) actual.push_back(c.value());
    const bool differs =
        std::vector<std::uint64_t>(actual.begin(), actual.begin() + 3) !=
        claimed;
    report.discrepancies.push_back({"dealer_row_share_head", coeff_str(claimed),
                                    coeff_str(actual), differs});
  }
  {
    const Fe oracle = F.eval(fe(1), fe(9));
    report.discrepancies.push_back(
        {"holder1_to_dealer_session_key", "1",
         std::to_string(oracle.value()), oracle.value() != 1});
  }
  {
    const Fe secret = dealt.setup.secret();
    report.discrepancies.push_back({"announced_secret", "5",
                                    std::to_string(secret.value()),
                                    secret.value() != 5});
  }

  // scripted distribution round: 33 key elements in an 11x3 grid
  const std::uint32_t m = 3;
  const std::uint32_t rows = 11;
  repcode::KeySequence key;
  key.m = m;
  key.rows = rows;
  for (std::uint32_t idx = 1; idx <= m * rows; ++idx) {
    key.elements.push_back(scripted_key(idx));
  }
  const repcode::EncodedGrid grid = repcode::encode(key);

  // measurement outcomes: three two-equal cells, three all-distinct
  // cells, unanimity everywhere else
  repcode::MeasurementTable table = grid;
  const auto corrupt_two_equal = [&](std::uint32_t k, std::uint32_t i,
                                     bool majority_correct) {
    const Fe truth = grid.at(k, i, 1);
    if (majority_correct) {
      table.set(k, i, 3, truth + fe(1));  // pair at repetitions 1,2
    } else {
      table.set(k, i, 1, truth + fe(2));  // pair at repetitions 2,3
      table.set(k, i, 2, truth + fe(1));
      table.set(k, i, 3, truth + fe(1));
    }
  };
  corrupt_two_equal(1, 3, true);
  corrupt_two_equal(3, 2, false);
  corrupt_two_equal(10, 2, false);
  const auto corrupt_all_distinct = [&](std::uint32_t k, std::uint32_t i) {
    const Fe truth = grid.at(k, i, 1);
    table.set(k, i, 1, truth + fe(1));
    table.set(k, i, 2, truth + fe(2));
    table.set(k, i, 3, truth + fe(3));
  };
  corrupt_all_distinct(5, 3);
  corrupt_all_distinct(7, 2);
  corrupt_all_distinct(8, 3);

  const repcode::TripleClassification classes = repcode::classify(table);
  check(report, "classification_counts", "(3,3,27)",
        "(" + std::to_string(classes.all_distinct.size()) + "," +
            std::to_string(classes.two_equal.size()) + "," +
            std::to_string(classes.all_equal.size()) + ")");

  const repcode::RoundDecision decision =
      repcode::threshold_decision(classes, 0.5, 1.0 / 11.0);
  check(report, "threshold_decision", "keep",
        decision == repcode::RoundDecision::Keep ? "keep" : "abort");

  repcode::HarvestState harvest = repcode::harvest_s3(classes, table);
  check(report, "unanimous_harvest_size", "27",
        std::to_string(harvest.entries.size()));
  {
    std::string pending;
    for (const auto& [triple, value] : harvest.pending) {
      pending += "(" + std::to_string(triple.k) + "," +
                 std::to_string(triple.i) + "," + std::to_string(triple.j) +
                 ")";
    }
    check(report, "pending_candidates", "(1,3,1)(3,2,2)(10,2,2)", pending);
  }

  // dealer-checked extension: only the first candidate carries the true
  // key value
  repcode::extend(harvest, [&](const repcode::HarvestView& view) {
    for (const auto& [triple, value] : view) {
      const std::uint32_t idx = repcode::key_index(triple.k, triple.i, m);
      if (!(value == scripted_key(idx))) {
        return repcode::VerifierReply::Rejected;
      }
    }
    return repcode::VerifierReply::Confirmed;
  });
  check(report, "extended_harvest_size", "28",
        std::to_string(harvest.entries.size()));
  check(report, "extension_kept_cell", "1",
        harvest.entries.contains(repcode::IndexTriple{1, 3, 1}) ? "1" : "0");

  const std::vector<std::uint32_t> residual =
      repcode::residual_indices(harvest, m, m * rows);
  std::string residual_str;
  for (std::uint32_t idx : residual) {
    if (!residual_str.empty()) residual_str += ",";
    residual_str += std::to_string(idx);
  }
  check(report, "residual_key_indices", "8,15,20,24,29", residual_str);

  return report;
}

}  // namespace repqkd::example
