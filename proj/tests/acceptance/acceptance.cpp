// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "comindex/factors.hpp"
#include "comindex/inference.hpp"
#include "comindex/numkernel.hpp"
#include "comindex/pipeline.hpp"
#include "comindex/ranking.hpp"
#include "comindex/synthetic.hpp"
#include "files.hpp"
#include "oracles.hpp"
#include "paper_tables.hpp"

using namespace comindex;
namespace oracle = comindex::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Criterion = std::function<Outcome()>;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Tracks the worst deviation seen against a bound.
struct Worst {
  double bound;
  double value = 0.0;
  void see(double v) { value = std::max(value, std::isnan(v) ? INFINITY : v); }
  bool ok() const { return value <= bound; }
};

constexpr double kDf = 18.0;

Outcome sem_law() {
  Worst w{0.001};
  const auto rows = oracle::group_statistics();
  for (const auto& r : rows) w.see(std::fabs(r.sd / std::sqrt(r.n) - r.sem));
  return {w.ok() && rows.size() == 28,
          std::to_string(rows.size()) + " rows, max |sd/sqrt(n) - SEM| = " + fmt("%.5f", w.value)};
}

Outcome t_arithmetic() {
  Worst w{0.01};
  const auto rows = oracle::t_test_table();
  for (const auto& r : rows) w.see(std::fabs(r.mean_difference / r.se_difference - r.t));
  return {w.ok() && rows.size() == 14,
          std::to_string(rows.size()) + " rows, max |diff/se - t| = " + fmt("%.5f", w.value)};
}

Outcome ci_reproduction() {
  Worst w{0.002};
  const double q = t_quantile(0.975, kDf);
  for (const auto& r : oracle::t_test_table()) {
    w.see(std::fabs(r.mean_difference - q * r.se_difference - r.ci_lower));
    w.see(std::fabs(r.mean_difference + q * r.se_difference - r.ci_upper));
  }
  return {w.ok(), "t(0.975, 18) = " + fmt("%.6f", q) + ", max bound error = " +
                      fmt("%.5f", w.value)};
}

Outcome p_values() {
  Worst t{0.001}, f{0.001};
  for (const auto& r : oracle::t_test_table()) {
    t.see(std::fabs(t_two_tailed_p(r.t, kDf) - r.sig));
    f.see(std::fabs(f_tail_p(r.levene_f, 1, kDf) - r.levene_sig));
  }
  return {t.ok() && f.ok(), "max two-tailed error = " + fmt("%.5f", t.value) +
                                ", max Levene error = " + fmt("%.5f", f.value)};
}

Outcome significance_counts() {
  std::vector<std::string> at10, at05;
  for (const auto& r : oracle::t_test_table()) {
    if (is_significant(r.sig, 0.10)) at10.push_back(r.variable);
    if (is_significant(r.sig, 0.05)) at05.push_back(r.variable);
  }
  const std::vector<std::string> want10{"Population 1/4 mile to transit",
                                        "Percent Housing Units close to Business Centers",
                                        "Storm Sewer condition"};
  const std::vector<std::string> want05{"Population 1/4 mile to transit"};
  return {at10 == want10 && at05 == want05, std::to_string(at10.size()) + " at 0.10, " +
                                                std::to_string(at05.size()) + " at 0.05"};
}

Outcome kmo_labeling() {
  const std::string label = kmo_label(0.707);
  return {label == "middling", "0.707 -> " + label};
}

Outcome eigen_suite() {
  NormalStream rng(7001);
  Worst recon{1e-10}, ortho{1e-10}, tr{1e-9};
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 5 + static_cast<std::size_t>(i * 36 / 99);
    const Matrix a = oracle::random_symmetric(n, rng);
    const auto e = sym_eigen(a);
    const Matrix back =
        e.eigenvectors * Matrix::diagonal(e.eigenvalues) * e.eigenvectors.transposed();
    recon.see(max_abs_diff(back, a));
    ortho.see(max_abs_diff(e.eigenvectors.transposed() * e.eigenvectors, Matrix::identity(n)));
    double sum = 0.0;
    for (double v : e.eigenvalues) sum += v;
    tr.see(std::fabs(sum - trace(a)) / std::max(1.0, std::fabs(trace(a))));
  }
  return {recon.ok() && ortho.ok() && tr.ok(),
          "100 matrices 5..40: reconstruction " + fmt("%.2e", recon.value) +
              ", orthonormality " + fmt("%.2e", ortho.value) + ", trace " +
              fmt("%.2e", tr.value)};
}

Outcome varimax_suite() {
  NormalStream rng(7002);
  Worst gap{1e-3}, comm{1e-8}, idem{1e-10};
  bool monotone = true;
  for (int i = 0; i < 50; ++i) {
    const std::size_t p = 3 + static_cast<std::size_t>(i % 10);
    Matrix l(p, 2);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < 2; ++c) l(r, c) = 1.6 * rng.uniform() - 0.8;
    const auto res = varimax(l);
    const double best = oracle::varimax_grid_optimum(l, true);
    gap.see(std::max(0.0, best - oracle::varimax_value(res.loadings, true)));
    for (std::size_t r = 0; r < p; ++r) {
      const double before = l(r, 0) * l(r, 0) + l(r, 1) * l(r, 1);
      const double after =
          res.loadings(r, 0) * res.loadings(r, 0) + res.loadings(r, 1) * res.loadings(r, 1);
      comm.see(std::fabs(before - after));
    }
    for (std::size_t s = 1; s < res.criterion_history.size(); ++s)
      monotone = monotone && res.criterion_history[s] >= res.criterion_history[s - 1] - 1e-12;
    idem.see(max_abs_diff(varimax(res.loadings).loadings, res.loadings));
  }
  return {gap.ok() && comm.ok() && idem.ok() && monotone,
          "50 matrices: grid shortfall " + fmt("%.2e", gap.value) + ", communality " +
              fmt("%.2e", comm.value) + ", idempotence " + fmt("%.2e", idem.value) +
              (monotone ? ", monotone" : ", NOT monotone")};
}

IndicatorDataset as_dataset(const Matrix& m) {
  std::vector<std::string> ids, names;
  for (std::size_t i = 0; i < m.rows(); ++i) ids.push_back("c" + std::to_string(i));
  for (std::size_t j = 0; j < m.cols(); ++j) names.push_back("v" + std::to_string(j));
  return IndicatorDataset(ids, names, m);
}

Outcome kmo_suite() {
  NormalStream rng(7003);
  Worst agree{1e-8}, two{1e-12};
  for (int i = 0; i < 20; ++i) {
    const std::size_t p = 4 + static_cast<std::size_t>(i % 5);
    const std::size_t n = 30 + static_cast<std::size_t>(i);
    Matrix m(n, p);
    for (std::size_t r = 0; r < n; ++r) {
      const double common = rng.next();
      for (std::size_t c = 0; c < p; ++c) m(r, c) = (0.3 + 0.1 * c) * common + rng.next();
    }
    const double got = kmo(correlation_matrix(standardize(as_dataset(m)))).overall;
    agree.see(std::fabs(got - oracle::kmo_by_regression(m)));
  }
  for (int i = 0; i < 20; ++i) {
    Matrix m(12, 2);
    for (std::size_t r = 0; r < 12; ++r) {
      m(r, 0) = rng.next();
      m(r, 1) = (i % 2 ? -0.5 : 0.7) * m(r, 0) + rng.next();
    }
    two.see(std::fabs(kmo(correlation_matrix(standardize(as_dataset(m)))).overall - 0.5));
  }
  return {agree.ok() && two.ok(), "20 datasets: oracle gap " + fmt("%.2e", agree.value) +
                                      "; 2-variable |KMO - 0.5| " + fmt("%.1e", two.value)};
}

Outcome planted_recovery() {
  PlantedModel model;  // 88 cases, 3 factors x 4 indicators, noise sd 0.3
  const auto data = make_planted_dataset(model);
  const auto z = standardize(data.dataset);
  const auto fm = fit_factor_model(z, data.dataset, FactorOptions{});
  if (fm.retained != 3) return {false, "kaiser retained " + std::to_string(fm.retained)};
  const auto cong = oracle::best_congruences(data.loadings, fm.loadings_rotated);
  const double worst = *std::min_element(cong.begin(), cong.end());
  return {worst > 0.98, "retained 3, min congruence " + fmt("%.4f", worst)};
}

Outcome score_suite() {
  PlantedModel model;
  model.n_factors = 4;
  model.noise_variables = 2;
  const auto data = make_planted_dataset(model);
  const auto z = standardize(data.dataset);
  const auto fm = fit_factor_model(z, data.dataset, FactorOptions{});
  const auto fs = factor_scores(z, fm.score_coefficients, data.dataset.case_ids());
  const double gap = max_abs_diff(fs.scores, oracle::naive_scores(z.values, fm.score_coefficients));
  Worst mean{1e-8};
  for (std::size_t c = 0; c < fs.scores.cols(); ++c) {
    double m = 0.0;
    for (double v : fs.scores.column(c)) m += v;
    mean.see(std::fabs(m / static_cast<double>(fs.scores.rows())));
  }
  return {gap <= 1e-12 && mean.ok(),
          "oracle gap " + fmt("%.2e", gap) + ", max |column mean| " + fmt("%.2e", mean.value)};
}

Outcome inference_suite() {
  NormalStream rng(7004);
  auto draw = [&](std::size_t n, double mean, double sd) {
    std::vector<double> v(n);
    for (double& x : v) x = mean + sd * rng.next();
    return v;
  };
  Worst anti{1e-10}, affine{1e-10}, collapse{1e-10}, levene{1e-10};
  for (int i = 0; i < 50; ++i) {
    const std::size_t n1 = 3 + i % 10, n2 = 2 + (i * 3) % 13;
    const auto a = draw(n1, rng.next(), 0.5 + rng.uniform());
    const auto b = draw(n2, rng.next(), 0.5 + 2.0 * rng.uniform());
    const double scale = (i % 2 ? 1.0 : -1.0) * (0.1 + 10.0 * rng.uniform());
    const double shift = 20.0 * rng.next();
    auto ta = a, tb = b;
    for (double& x : ta) x = scale * x + shift;
    for (double& x : tb) x = scale * x + shift;
    for (auto test : {&t_test_pooled, &t_test_welch}) {
      const auto ab = test(a, b, 0.95), ba = test(b, a, 0.95);
      anti.see(std::fabs(ab.t + ba.t));
      anti.see(std::fabs(ab.p_two_tailed - ba.p_two_tailed));
      anti.see(std::fabs(ab.mean_difference + ba.mean_difference));
      anti.see(std::fabs(ab.ci_low + ba.ci_high));
      anti.see(std::fabs(ab.ci_high + ba.ci_low));
      const auto t = test(ta, tb, 0.95);
      // A negative scale flips the sign of the difference, so compare |t|.
      affine.see(std::fabs(std::fabs(t.t) - std::fabs(ab.t)));
      affine.see(std::fabs(t.df - ab.df));
      affine.see(std::fabs(t.p_two_tailed - ab.p_two_tailed));
    }

    // Mirror image of a sample: same size and same spread.
    const auto base = draw(3 + i % 8, 0.0, 1.0 + rng.uniform());
    const double offset = rng.next();
    std::vector<double> mirror;
    for (double x : base) mirror.push_back(offset - x);
    const auto pooled = t_test_pooled(base, mirror), welch = t_test_welch(base, mirror);
    collapse.see(std::fabs(pooled.t - welch.t));
    collapse.see(std::fabs(pooled.df - welch.df));

    const auto lev = levene_test(a, b);
    levene.see(std::fabs(lev.p - t_two_tailed_p(std::sqrt(lev.f), static_cast<double>(lev.df2))));
  }
  const bool ok = anti.ok() && affine.ok() && collapse.ok() && levene.ok();
  return {ok, "50 instances: antisymmetry " + fmt("%.1e", anti.value) + ", affine " +
                  fmt("%.1e", affine.value) + ", Welch=pooled " + fmt("%.1e", collapse.value) +
                  ", Levene F/t " + fmt("%.1e", levene.value)};
}

Outcome determinism_suite() {
  namespace fs = std::filesystem;
  oracle::TempDir dir("acceptance");
  PlantedModel model;
  model.n_factors = 8;
  model.noise_variables = 2;
  const auto data = make_planted_dataset(model);
  oracle::write_text(dir / "data.csv", oracle::dataset_csv(data.dataset));

  PipelineConfig config;
  config.input = (dir / "data.csv").string();
  config.out_dir = (dir / "out").string();
  std::map<std::string, std::string> first;
  bool identical = true;
  std::size_t compared = 0;
  for (int run = 0; run < 2; ++run) {
    const auto res = run_pipeline(config);
    if (res.exit_code != 0) return {false, "analyze failed: " + res.error};
    for (const auto& path : res.written) {
      if (path.extension() != ".json") continue;
      const std::string bytes = oracle::read_text(path);
      if (run == 0) {
        first[path.filename().string()] = bytes;
      } else {
        ++compared;
        identical = identical && first[path.filename().string()] == bytes;
      }
    }
  }

  const auto z = standardize(data.dataset);
  const auto fm = fit_factor_model(z, data.dataset, FactorOptions{});
  const auto scores = factor_scores(z, fm.score_coefficients, data.dataset.case_ids());
  auto rank_map = [](const FactorScores& s) {
    std::map<std::string, std::size_t> out;
    for (const auto& e : rank_by_factor(s, std::size_t{0}, Direction::kAscending).entries)
      out[e.case_id] = e.rank;
    return out;
  };
  const auto base = rank_map(scores);
  std::mt19937_64 engine(7005);
  std::vector<std::size_t> perm(data.dataset.n_cases());
  int stable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), engine);
    std::vector<std::string> ids;
    Matrix values(perm.size(), data.dataset.n_variables());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      ids.push_back(data.dataset.case_ids()[perm[i]]);
      for (std::size_t j = 0; j < values.cols(); ++j)
        values(i, j) = data.dataset.values()(perm[i], j);
    }
    const IndicatorDataset shuffled(ids, data.dataset.indicator_names(), values);
    const auto sz = standardize(shuffled);
    const auto sm = fit_factor_model(sz, shuffled, FactorOptions{});
    stable += rank_map(factor_scores(sz, sm.score_coefficients, ids)) == base;
  }
  return {identical && compared == 4 && stable == 50,
          std::to_string(compared) + " JSON files " + (identical ? "identical" : "DIFFER") +
              "; ranks unchanged in " + std::to_string(stable) + "/50 shuffles"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Criterion>> criteria{
      {"A1 SEM law on group statistics", sem_law},
      {"A2 t = difference / SE", t_arithmetic},
      {"A3 confidence intervals", ci_reproduction},
      {"A4 two-tailed and Levene p-values", p_values},
      {"A5 significance counts at 0.10 and 0.05", significance_counts},
      {"A6 KMO label", kmo_labeling},
      {"B7 eigen decomposition", eigen_suite},
      {"B8 varimax", varimax_suite},
      {"B9 KMO oracle", kmo_suite},
      {"B10 planted structure recovery", planted_recovery},
      {"B11 factor scores", score_suite},
      {"B12 inference properties", inference_suite},
      {"B13 pipeline determinism", determinism_suite},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-42s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
