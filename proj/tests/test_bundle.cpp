#include <catch2/catch_amalgamated.hpp>

#include "gridward/builtin.hpp"
#include "gridward/bundle.hpp"
#include "gridward/metrics.hpp"
#include "gridward/simulate.hpp"

#include "helpers.hpp"

using namespace gridward;

namespace {

std::vector<Trace> normal_batch(std::size_t count, std::size_t len,
                                std::uint64_t seed0) {
  const ProfileCatalog& catalog = builtin_catalog();
  const char* names[3] = {"reco", "montecarlo", "merge"};
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < count; ++i) {
    const BehaviorProfile& prof = catalog.require(names[i % 3]);
    traces.push_back(generate_trace(prof, seed0 + i, len,
                                    "w0-j" + std::to_string(i)));
  }
  return traces;
}

}  // namespace

TEST_CASE("train_bundle splits fit and calibration and sets thresholds") {
  TrainOptions opt;
  opt.n = 5;
  opt.dims = 1024;
  opt.epochs = 10;
  std::vector<Trace> traces = normal_batch(24, 120, 500);
  DetectorBundle bundle = train_bundle(traces, opt);
  REQUIRE(bundle.db.n == 5);
  REQUIRE(bundle.db.trained_on > 0);
  REQUIRE(bundle.ocsvm.has_value());
  REQUIRE(bundle.target_fpr == 0.01);

  SECTION("a fit trace classifies as normal") {
    DetectionResult r = classify(traces[0], bundle);
    REQUIRE_FALSE(r.malicious);
    REQUIRE(r.mismatch_rate == 0.0);
  }
  SECTION("an attack trace classifies as malicious") {
    Trace evil = generate_trace(builtin_catalog().require("escape-privesc"),
                                9, 120, "w0-j99");
    DetectionResult r = classify(evil, bundle);
    REQUIRE(r.malicious);
    REQUIRE(r.mismatch_rate > 0.5);
    REQUIRE_FALSE(r.evidence.empty());
  }
  SECTION("training vectors score below an all-novel-gram vector") {
    double mean = 0.0;
    std::size_t counted = 0;
    for (const Trace& t : traces) {
      mean += ocsvm_score(*bundle.ocsvm, featurize(t, bundle.featurizer));
      ++counted;
    }
    mean /= double(counted);
    Trace novel = generate_trace(builtin_catalog().require("escape-privesc"),
                                 9, 120, "w0-j99");
    const double novel_score =
        ocsvm_score(*bundle.ocsvm, featurize(novel, bundle.featurizer));
    REQUIRE(mean < novel_score);
  }
  SECTION("too few traces to split is an error") {
    std::vector<Trace> three = normal_batch(3, 120, 900);
    REQUIRE_THROWS_AS(train_bundle(three, opt), InvalidArgument);
  }
  SECTION("classify propagates the zero-window error") {
    Trace tiny = normal_batch(1, 3, 1234)[0];
    REQUIRE_THROWS_AS(classify(tiny, bundle), InvalidArgument);
  }
}

TEST_CASE("model files round-trip bytes and behavior") {
  TrainOptions opt;
  opt.n = 4;
  opt.dims = 2048;
  opt.epochs = 8;
  std::vector<Trace> traces = normal_batch(16, 100, 7000);
  DetectorBundle bundle = train_bundle(traces, opt);

  const std::string text = render_model(bundle);
  DetectorBundle back = parse_model(text);
  REQUIRE(render_model(back) == text);
  REQUIRE(back.db.n == bundle.db.n);
  REQUIRE(back.db.grams == bundle.db.grams);
  REQUIRE(back.featurizer.dims == bundle.featurizer.dims);
  REQUIRE(back.ocsvm.has_value());
  REQUIRE(back.ocsvm->rho == bundle.ocsvm->rho);
  REQUIRE(back.ocsvm->w == bundle.ocsvm->w);
  REQUIRE(back.thresholds.stide == bundle.thresholds.stide);
  REQUIRE(back.thresholds.lfc == bundle.thresholds.lfc);
  REQUIRE(back.thresholds.ocsvm == bundle.thresholds.ocsvm);
  REQUIRE(back.target_fpr == bundle.target_fpr);

  SECTION("classification through the file is identical") {
    Trace probe = generate_trace(builtin_catalog().require("cryptominer"),
                                 3, 100, "w0-j50");
    DetectionResult a = classify(probe, bundle);
    DetectionResult b = classify(probe, back);
    REQUIRE(a.malicious == b.malicious);
    REQUIRE(a.mismatch_rate == b.mismatch_rate);
    REQUIRE(a.lfc_score == b.lfc_score);
    REQUIRE(a.ocsvm_score == b.ocsvm_score);
    REQUIRE(a.evidence == b.evidence);
  }
  SECTION("stide-only models omit the ocsvm section") {
    TrainOptions plain = opt;
    plain.enable_ocsvm = false;
    DetectorBundle stide_only = train_bundle(traces, plain);
    const std::string t2 = render_model(stide_only);
    REQUIRE(t2.find("[ocsvm]") == std::string::npos);
    DetectorBundle loaded = parse_model(t2);
    REQUIRE_FALSE(loaded.ocsvm.has_value());
    REQUIRE(render_model(loaded) == t2);
  }
  SECTION("model header and sections are validated") {
    REQUIRE_THROWS_AS(parse_model("nonsense\n"), ParseError);
    REQUIRE_THROWS_AS(parse_model("gridward-model v1 n=5 D=4096\n"),
                      ParseError);
    REQUIRE_THROWS_AS(parse_model("gridward-model v1 n=0 D=4096\n[stide]\n"),
                      ParseError);
  }
}

TEST_CASE("the model file keeps floats to 17 significant digits") {
  TrainOptions opt;
  opt.n = 3;
  opt.dims = 1024;
  opt.epochs = 6;
  std::vector<Trace> traces = normal_batch(8, 60, 31);
  DetectorBundle bundle = train_bundle(traces, opt);
  bundle.thresholds.stide = 0.1234567890123456789;  // not representable
  const std::string text = render_model(bundle);
  DetectorBundle back = parse_model(text);
  REQUIRE(back.thresholds.stide == bundle.thresholds.stide);  // exact double
}

TEST_CASE("verdicts depend only on score/threshold comparisons") {
  SplitMix64 rng(246);
  for (int i = 0; i < 2000; ++i) {
    const double score = (rng.next_double() - 0.3) * 4.0;
    const double threshold = (rng.next_double() - 0.3) * 4.0;
    const bool verdict = score > threshold;
    for (double c : {0.5, 2.0, 1024.0, 0.0078125}) {  // exact scalings
      REQUIRE(((c * score) > (c * threshold)) == verdict);
    }
  }
}

TEST_CASE("evaluate_metrics computes the confusion table") {
  auto mk = [](bool malicious, const std::string& label, bool attack) {
    LabeledResult r;
    r.result.job_id = "x";
    r.result.malicious = malicious;
    r.truth_label = label;
    r.truth_is_attack = attack;
    return r;
  };

  SECTION("all correct") {
    std::vector<LabeledResult> rs = {mk(true, "cryptominer", true),
                                     mk(false, "reco", false)};
    MetricsReport m = evaluate_metrics(rs);
    REQUIRE(m.tp == 1);
    REQUIRE(m.tn == 1);
    REQUIRE(m.fpr == 0.0);
    REQUIRE(m.tpr == 1.0);
    REQUIRE(m.precision == 1.0);
  }
  SECTION("known confusion: tp9 fn1 fp2 tn98") {
    std::vector<LabeledResult> rs;
    for (int i = 0; i < 9; ++i) rs.push_back(mk(true, "cryptominer", true));
    rs.push_back(mk(false, "cryptominer", true));
    for (int i = 0; i < 2; ++i) rs.push_back(mk(true, "reco", false));
    for (int i = 0; i < 98; ++i) rs.push_back(mk(false, "reco", false));
    MetricsReport m = evaluate_metrics(rs);
    REQUIRE(m.tp == 9);
    REQUIRE(m.fn == 1);
    REQUIRE(m.fp == 2);
    REQUIRE(m.tn == 98);
    REQUIRE(m.tpr == Catch::Approx(0.9).epsilon(0));
    REQUIRE(m.fpr == Catch::Approx(0.02).epsilon(0));
    REQUIRE(m.per_profile.size() == 1);
    REQUIRE(m.per_profile[0].profile == "cryptominer");
    REQUIRE(m.per_profile[0].tpr == Catch::Approx(0.9).epsilon(0));
  }
  SECTION("empty and unlabeled inputs are errors") {
    std::vector<LabeledResult> none;
    REQUIRE_THROWS_AS(evaluate_metrics(none), InvalidArgument);
    std::vector<LabeledResult> missing = {mk(true, "", true)};
    REQUIRE_THROWS_AS(evaluate_metrics(missing), InvalidArgument);
  }
}
