#include <doctest.h>

#include <random>
#include <sstream>

#include "taskid/eval.hpp"
#include "taskid/metrics.hpp"
#include "taskid/report.hpp"
#include "taskid/stats.hpp"

using namespace taskid;

namespace {

Sample labeled(std::string id, std::vector<std::string> attrs, std::string family) {
  Sample s;
  s.id = std::move(id);
  s.attribs = std::move(attrs);
  s.family = std::move(family);
  return s;
}

// Families share nothing; every member carries its family's marker attributes.
Corpus separable_families(std::size_t n_families, std::size_t per_family, FamilyMap families = {}) {
  std::vector<Sample> s;
  for (std::size_t f = 0; f < n_families; ++f) {
    const std::string name = "F" + std::to_string(f);
    if (!families.count(name)) families[name] = {"t" + std::to_string(f)};
    for (std::size_t i = 0; i < per_family; ++i) {
      s.push_back(labeled(name + "-" + std::to_string(i),
                          {"m" + std::to_string(f), "k" + std::to_string(f), "v" + std::to_string(f) + "_" + std::to_string(i % 4)},
                          name));
    }
  }
  return Corpus::build(s, families);
}

std::string dump(const TrialReport& r) {
  std::ostringstream os;
  write_report(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("per-sample scores") {
  auto s = score_sample({"t1", "t2"}, {"t1", "t2"});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  s = score_sample({}, {"t1"});
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);

  s = score_sample({"t1", "t2", "t3"}, {"t2", "t3", "t4"});
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(score_sample({"t1"}, {}), std::invalid_argument);
}

TEST_CASE("paired t-test") {
  const std::vector<double> a{0.9, 0.8, 1.0, 0.7, 0.95};
  const std::vector<double> b{0.7, 0.75, 0.8, 0.72, 0.6};
  const auto r = paired_ttest(a, b);
  CHECK(r.df == 4);
  CHECK(r.t == doctest::Approx(2.4111542041672265).epsilon(1e-10));
  CHECK(r.p_value == doctest::Approx(0.07346291556785284).epsilon(1e-8));

  const auto swapped = paired_ttest(b, a);
  CHECK(swapped.t == doctest::Approx(-r.t));
  CHECK(swapped.p_value == doctest::Approx(r.p_value));

  CHECK_THROWS_AS(paired_ttest(a, a), DegenerateTestError);
  CHECK_THROWS_AS(paired_ttest(std::vector<double>{1.0}, std::vector<double>{2.0}), std::invalid_argument);
  CHECK_THROWS_AS(paired_ttest(a, std::vector<double>{1.0, 2.0}), std::invalid_argument);

  SUBCASE("constant shift plus noise is detected") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
      y.push_back(noise(rng));
      x.push_back(y.back() + 0.05 + noise(rng));
    }
    CHECK(paired_ttest(x, y).p_value < 0.05);
  }
}

TEST_CASE("t distribution tails against reference values") {
  CHECK(student_t_two_sided(2.262, 9) == doctest::Approx(0.05001284550245455).epsilon(1e-9));
  CHECK(student_t_two_sided(1.0, 4) == doctest::Approx(0.373900966300059).epsilon(1e-9));
  CHECK(student_t_two_sided(3.5, 30) == doctest::Approx(0.0014768074376442554).epsilon(1e-9));
  CHECK(student_t_two_sided(0.0, 7) == doctest::Approx(1.0));
  CHECK(incomplete_beta(2.5, 1.5, 0.3) == doctest::Approx(0.08894372317066562).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("leave-one-out") {
  SUBCASE("two samples, two folds") {
    const auto c = Corpus::build({labeled("s1", {"a"}, "F"), labeled("s2", {"a", "b"}, "F")}, {{"F", {"t"}}});
    const auto r = loocv(c, EvalSpec{}, 1);
    CHECK(r.trials.size() == 2);
    CHECK(r.samples.size() == 2);
    CHECK(r.protocol == "loocv");
  }
  SUBCASE("separable families are recovered") {
    const auto c = separable_families(3, 5);
    const auto r = loocv(c, EvalSpec{}, 1);
    CHECK(r.family_accuracy == 1.0);
    CHECK(r.f1 == 1.0);
  }
  SUBCASE("deterministic") {
    const auto c = separable_families(3, 5);
    EvalSpec spec;
    spec.method = Method::RandomForest;
    spec.config.forest.n_trees = 5;
    CHECK(dump(loocv(c, spec, 9)) == dump(loocv(c, spec, 9)));
  }
}

TEST_CASE("stratified split trials") {
  const auto c = separable_families(2, 50);
  SUBCASE("sizes") {
    const auto split = stratified_split(c, 0.6, 3);
    CHECK(split.train.size() == 60);
    CHECK(split.test.size() == 40);
    const auto r = split_trials(c, EvalSpec{}, 0.6, 4, 3);
    CHECK(r.trials.size() == 4);
    for (const auto& t : r.trials) {
      CHECK(t.n_train == 60);
      CHECK(t.n_test == 40);
    }
  }
  SUBCASE("seeds change splits, not the schema") {
    CHECK(stratified_split(c, 0.6, 1).train != stratified_split(c, 0.6, 2).train);
    const auto a = split_trials(c, EvalSpec{}, 0.6, 2, 1);
    const auto b = split_trials(c, EvalSpec{}, 0.6, 2, 2);
    CHECK(a.trials.size() == b.trials.size());
    CHECK(a.samples.size() == b.samples.size());
  }
  SUBCASE("same seed, byte-identical report") {
    EvalSpec spec;
    spec.method = Method::LogReg;
    spec.config.logreg.epochs = 20;
    CHECK(dump(split_trials(c, spec, 0.6, 2, 5)) == dump(split_trials(c, spec, 0.6, 2, 5)));
  }
  SUBCASE("singleton families cannot be split") {
    const auto tiny = Corpus::build({labeled("s1", {"a"}, "F"), labeled("s2", {"b"}, "G"), labeled("s3", {"b"}, "G")},
                                    {{"F", {"t"}}, {"G", {"u"}}});
    CHECK_THROWS_AS(stratified_split(tiny, 0.6, 0), std::invalid_argument);
  }
}

TEST_CASE("leave one family out") {
  SUBCASE("one report per family, family accuracy not applicable") {
    const auto c = separable_families(2, 4);
    const auto reports = leave_one_family_out(c, EvalSpec{});
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].trials[0].held_out_family == "F0");
    CHECK_FALSE(reports[0].family_accuracy.has_value());
  }
  SUBCASE("held-out family whose tasks another family shares") {
    // F1's members resemble F0's, and F0 performs every task F1 does.
    const auto c = Corpus::build({labeled("a1", {"x", "y"}, "F0"), labeled("a2", {"x", "z"}, "F0"),
                                  labeled("b1", {"x", "y", "w"}, "F1"), labeled("b2", {"x", "w"}, "F1"),
                                  labeled("c1", {"q"}, "F2")},
                                 {{"F0", {"t1", "t2"}}, {"F1", {"t1", "t2"}}, {"F2", {"t9"}}});
    const auto reports = leave_one_family_out(c, EvalSpec{});
    CHECK(reports[1].recall == 1.0);
  }
  SUBCASE("held-out family with unseen tasks") {
    const auto c = separable_families(3, 3);
    for (const auto& r : leave_one_family_out(c, EvalSpec{})) CHECK(r.recall == 0.0);
  }
  SUBCASE("merged") {
    const auto merged = merge_reports(leave_one_family_out(separable_families(3, 3), EvalSpec{}));
    CHECK(merged.trials.size() == 3);
    CHECK(merged.samples.size() == 9);
  }
}

TEST_CASE("holdout against a separate test corpus") {
  const auto train = separable_families(3, 5);
  const auto test = separable_families(3, 2);
  const auto r = holdout(train, test, EvalSpec{}, 0);
  CHECK(r.samples.size() == 6);
  CHECK(r.f1 == 1.0);
  CHECK(r.family_accuracy == 1.0);
}

TEST_CASE("IB task metrics agree between modes") {
  const auto c = separable_families(3, 6);
  EvalSpec fam, dir;
  dir.mode = Mode::Direct;
  const auto a = split_trials(c, fam, 0.5, 3, 4);
  const auto b = split_trials(c, dir, 0.5, 3, 4);
  CHECK(a.precision == b.precision);
  CHECK(a.recall == b.recall);
  CHECK(a.f1 == b.f1);
}
