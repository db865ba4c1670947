#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <doctest.h>

#include "cardbench/card_io.hpp"
#include "cardbench/generator.hpp"
#include "cardbench/models.hpp"
#include "cardbench/obstruction.hpp"

using namespace cardbench;

TEST_CASE("benchmark layout: six families, five variants, documented sizes") {
  const auto cards = generate_benchmark(kDefaultMasterSeed);
  CHECK(cards.size() == 30);

  std::map<std::string, int> per_family;
  for (const auto& card : cards) per_family[card.family_id]++;
  CHECK(per_family.size() == 6);
  for (const auto& [family, count] : per_family) CHECK(count == 5);

  const std::map<std::string, size_t> expected_candidates = {
      {"galilean_lorentz", 5}, {"newton_relativistic", 4}, {"rj_planck", 4},
      {"pendulum_finite", 3},  {"ideal_virial", 4},        {"ohm_temperature", 3},
  };
  for (const auto& card : cards) {
    CHECK(card.candidates.size() == expected_candidates.at(card.family_id));
    CHECK(card.dataset(Context::source).records.size() == 40);
    CHECK(card.dataset(Context::overlap).records.size() == 20);
    CHECK(card.dataset(Context::target).records.size() == 40);
    CHECK(card.dataset(Context::validation).records.size() == 20);
  }

  // Random-guess top-1 over this layout: mean of 1/m over the 30 cards.
  double random_top1 = 0.0;
  for (const auto& card : cards) random_top1 += 1.0 / card.candidates.size();
  random_top1 /= cards.size();
  CHECK(random_top1 == doctest::Approx(0.2694).epsilon(1e-3));
}

TEST_CASE("every generated card validates") {
  for (const auto& card : generate_benchmark(kDefaultMasterSeed)) {
    const auto violations = validate_card(card);
    for (const auto& v : violations) {
      MESSAGE(card.card_id, ": ", v);
    }
    CHECK(violations.empty());
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  const FamilyDef& family = find_family("ideal_virial");
  const TransitionCard a = generate_card(family, 42, 0);
  const TransitionCard b = generate_card(family, 42, 0);
  CHECK(serialize_card(a) == serialize_card(b));

  const TransitionCard c = generate_card(family, 43, 0);
  CHECK(serialize_card(a) != serialize_card(c));
  const TransitionCard d = generate_card(family, 42, 1);
  CHECK(serialize_card(a) != serialize_card(d));
}

TEST_CASE("costs fall in the documented structural ranges") {
  for (const auto& card : generate_benchmark(kDefaultMasterSeed)) {
    for (const auto& cand : card.candidates) {
      if (cand.role == Role::base) {
        CHECK(cand.cost == 0.0);
      } else if (cand.move_type == MoveType::deformation) {
        CHECK(cand.cost >= 0.4);
        CHECK(cand.cost <= 0.6);
      } else {
        CHECK(cand.cost >= 1.5);
        CHECK(cand.cost <= 1.7);
      }
    }
  }
}

TEST_CASE("overlap regimes sit between the source and target regimes") {
  for (const auto& family : builtin_families()) {
    for (int d = 0; d < family.input_arity; ++d) {
      const Interval s = family.source_regime[d];
      const Interval o = family.overlap_regime[d];
      const Interval t = family.target_regime[d];
      if (s.lo == t.lo && s.hi == t.hi) continue;  // shared axis (e.g. current)
      const bool increasing = s.hi <= o.lo + 1e-12 && o.hi <= t.lo + 1e-12;
      const bool decreasing = t.hi <= o.lo + 1e-12 && o.hi <= s.lo + 1e-12;
      CHECK((increasing || decreasing));
      // Validation spans the full range.
      const Interval v = family.validation_regime[d];
      CHECK(v.lo <= std::min(s.lo, t.lo) + 1e-12);
      CHECK(v.hi >= std::max(s.hi, t.hi) - 1e-12);
    }
  }
}

TEST_CASE("observations track the generating law with small relative noise") {
  const FamilyDef& family = find_family("pendulum_finite");
  const TransitionCard card = generate_card(family, 42, 0);
  ModelRef truth_ref;
  truth_ref.family_id = family.family_id;
  truth_ref.spec_id = family.generating_spec_id;
  truth_ref.frozen_theta = family.true_theta;
  const ResolvedModel truth = resolve_model(truth_ref);
  for (const auto& ds : card.datasets) {
    for (const auto& r : ds.records) {
      const double y_true = truth.eval(nullptr, r.x.data());
      CHECK(std::fabs(r.y - y_true) / std::fabs(y_true) < 0.15);
    }
  }
}

TEST_CASE("base candidates are parameter-free with zero limit penalty and gluing") {
  // The canonical reference is the base law itself, so the base candidate's
  // limit penalty must vanish identically and its gluing must be exactly 0.
  for (const auto& family : builtin_families()) {
    const TransitionCard card = generate_card(family, 42, 0);
    const CandidateMove* base = nullptr;
    for (const auto& cand : card.candidates) {
      if (cand.role == Role::base) base = &cand;
    }
    REQUIRE(base != nullptr);
    const ResolvedModel model = resolve_model(base->model);
    CHECK(model.free_parameter_count == 0);
    const CardView view = strip_labels(card);
    CHECK(gluing_residual(view, *base) == 0.0);
    const FittedChart chart;  // zero-parameter chart
    CHECK(limit_penalty(view, *base, model, chart) == 0.0);
  }
}

TEST_CASE("benchmark directory round-trips byte-identically") {
  const auto cards = generate_benchmark(42, 1);  // one variant per family
  const std::string dir =
      (std::filesystem::temp_directory_path() / "cardbench_gen_test").string();
  std::filesystem::remove_all(dir);
  write_benchmark_dir(cards, 42, dir);

  const auto loaded = read_benchmark_dir(dir);
  REQUIRE(loaded.size() == cards.size());
  for (size_t i = 0; i < cards.size(); ++i) {
    CHECK(serialize_card(loaded[i]) == serialize_card(cards[i]));
  }

  // Re-writing produces byte-identical files.
  const std::string dir2 =
      (std::filesystem::temp_directory_path() / "cardbench_gen_test2").string();
  std::filesystem::remove_all(dir2);
  write_benchmark_dir(loaded, 42, dir2);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto other = std::filesystem::path(dir2) / entry.path().filename();
    std::ifstream a(entry.path()), b(other);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("derived radiance bound is positive and card-specific") {
  const FamilyDef& family = find_family("rj_planck");
  const TransitionCard a = generate_card(family, 42, 0);
  const TransitionCard b = generate_card(family, 42, 1);
  REQUIRE(a.constraints.size() == 1);
  CHECK(a.constraints[0].parameters.at("bound") > 0.0);
  CHECK(a.constraints[0].parameters.at("bound") != b.constraints[0].parameters.at("bound"));
}
