#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mge/eval.hpp"
#include "tempdir.hpp"

using namespace mge;
using namespace mge::testing;

namespace {

TaggedWord en(const std::string& s) { return TaggedWord(s, LanguageCode("en")); }
TaggedWord es(const std::string& s) { return TaggedWord(s, LanguageCode("es")); }

// Ten points on the unit circle at fixed angles (degrees).
EmbeddingStore arc_store(double scale = 1.0) {
  const double deg[] = {0, 10, 25, 45, 70, 80, 85, 88, 89, 90};
  std::vector<TaggedWord> words;
  std::vector<float> v;
  for (int i = 0; i < 10; ++i) {
    words.push_back(en("x" + std::to_string(i)));
    v.push_back(static_cast<float>(scale * std::cos(deg[i] * M_PI / 180)));
    v.push_back(static_cast<float>(scale * std::sin(deg[i] * M_PI / 180)));
  }
  return EmbeddingStore(words, 2, v);
}

AnalogyItem item(int a, int b, int c, int d, bool syn = false) {
  auto x = [](int i) { return en("x" + std::to_string(i)); };
  return {x(a), x(b), x(c), x(d), syn};
}

}  // namespace

TEST_CASE("spearman fixtures") {
  // Reference values from an independent implementation (average ranks for ties).
  struct Fixture {
    std::vector<double> a, b;
    double rho;
  };
  const std::vector<Fixture> fixtures{
      {{1, 2, 3, 4}, {1, 3, 2, 4}, 0.8},
      {{1, 2, 3, 4, 5}, {5, 6, 7, 8, 7}, 0.8207826816681233},
      {{0.1, 0.4, 0.4, 0.9, 0.2, 0.7}, {3, 1, 2, 5, 5, 4}, 0.23529411764705885},
      {{10, 20, 30, 40, 50, 60, 70}, {2, 1, 4, 3, 7, 5, 6}, 0.8214285714285715},
      {{3.5, 3.5, 3.5, 1, 2}, {1, 2, 3, 4, 5}, -0.7826237921249264},
  };
  for (const auto& f : fixtures) CHECK(std::abs(spearman_rho(f.a, f.b) - f.rho) <= 1e-9);
  std::vector<double> up{1, 2, 3, 4, 5}, down{5, 4, 3, 2, 1};
  CHECK(spearman_rho(up, up) == doctest::Approx(1.0));
  CHECK(spearman_rho(up, down) == doctest::Approx(-1.0));
  std::vector<double> flat{2, 2, 2, 2, 2};
  CHECK(std::isnan(spearman_rho(up, flat)));
  std::vector<double> three{1, 2, 3}, one{1};
  CHECK_THROWS_AS(spearman_rho(up, three), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho(one, one), std::invalid_argument);
}

TEST_CASE("spearman is invariant under monotone transforms") {
  Rng rng(10);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> a, b, ta, tb;
    for (int i = 0; i < 30; ++i) {
      a.push_back(static_cast<double>(rng.below(10)));
      b.push_back(rng.uniform(-3, 3));
      ta.push_back(std::exp(a.back()) + 7);
      tb.push_back(b.back() * b.back() * b.back());
    }
    CHECK(spearman_rho(ta, tb) == doctest::Approx(spearman_rho(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("average ranks") {
  std::vector<double> v{10, 20, 20, 5};
  CHECK(average_ranks(v) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("bootstrap") {
  std::vector<double> same(40, 0.25);
  auto ci = bootstrap_mean_ci(same, 2000, 3);
  CHECK(ci.first == 0.25);
  CHECK(ci.second == 0.25);

  std::vector<double> coin(1000, 0.0);
  for (std::size_t i = 0; i < 500; ++i) coin[i] = 1.0;
  auto b = bootstrap_mean_ci(coin, 10000, 7);
  const double half = 1.959963984540054 * std::sqrt(0.25 / 1000);
  CHECK(std::abs(b.first - (0.5 - half)) <= 0.02);
  CHECK(std::abs(b.second - (0.5 + half)) <= 0.02);
  CHECK(std::abs((b.second - b.first) - 2 * half) <= 0.02);
  CHECK(bootstrap_mean_ci(coin, 500, 9) == bootstrap_mean_ci(coin, 500, 9));
  CHECK_THROWS(bootstrap_mean_ci({}, 10, 1));
}

TEST_CASE("analogy hand-ranked fixture") {
  auto store = arc_store();
  // a = b, so each query is v_c.
  AnalogyDataset ds{"arc", {item(9, 9, 0, 1), item(9, 9, 0, 2), item(9, 9, 3, 2), item(9, 9, 0, 8)}};
  auto r = eval_analogy(store, ds, {200, 1});
  CHECK(r.metric("acc@1").value == doctest::Approx(0.5));
  CHECK(r.metric("acc@5").value == doctest::Approx(0.75));
  CHECK(r.n_evaluated == 4);
  CHECK(r.coverage() == 1.0);
  for (const auto& m : r.metrics) {
    CHECK(m.ci_low <= m.value);
    CHECK(m.value <= m.ci_high);
  }
  // Uniform scaling leaves rankings unchanged.
  auto scaled = eval_analogy(arc_store(3.7), ds, {200, 1});
  CHECK(scaled.metric("acc@1").value == r.metric("acc@1").value);
  CHECK(scaled.metric("acc@5").value == r.metric("acc@5").value);
}

TEST_CASE("analogy with exact relations, OOV items and splits") {
  // Word pairs (m_i, f_i) with f_i = m_i + e_3 exactly.
  std::vector<TaggedWord> words;
  std::vector<float> v;
  for (int i = 0; i < 4; ++i) {
    words.push_back(en("m" + std::to_string(i)));
    words.push_back(en("f" + std::to_string(i)));
    float base[4] = {0, 0, 0, 0};
    base[i % 3] = 1.0f + static_cast<float>(i);
    v.insert(v.end(), base, base + 4);
    base[3] = 1.0f;
    v.insert(v.end(), base, base + 4);
  }
  words.push_back(en("zero"));
  v.insert(v.end(), {0, 0, 0, 0});
  EmbeddingStore store(words, 4, v);
  AnalogyDataset ds{"rel", {}};
  ds.items.push_back({en("m0"), en("f0"), en("m1"), en("f1"), true});
  ds.items.push_back({en("m1"), en("f1"), en("m2"), en("f2"), false});
  ds.items.push_back({en("m2"), en("f2"), en("m0"), en("unknown"), false});
  ds.items.push_back({en("m2"), en("f2"), en("m3"), en("zero"), false});
  auto r = eval_analogy(store, ds, {100, 1});
  CHECK(r.n_items == 4);
  CHECK(r.n_evaluated == 3);
  CHECK(r.coverage() == doctest::Approx(0.75));
  CHECK(r.metric("acc@1").value == doctest::Approx(2.0 / 3.0));
  CHECK(r.metric("syn:acc@1").value == doctest::Approx(1.0));
  CHECK(r.metric("sem:acc@1").value == doctest::Approx(0.5));
  for (const auto& m : r.metrics)
    if (m.name.find("acc@1") != std::string::npos) {
      auto five = m.name;
      five.back() = '5';
      CHECK(r.metric(five).value >= m.value);
    }
  AnalogyDataset none{"none", {{en("a"), en("b"), en("c"), en("d"), false}}};
  auto empty = eval_analogy(store, none);
  CHECK_FALSE(empty.defined);
  CHECK(empty.n_evaluated == 0);
}

TEST_CASE("similarity") {
  std::vector<TaggedWord> words{en("a"), en("b"), en("c"), en("d"), en("e"), en("f")};
  // Angles 0, 15, 40, 60, 90 and 180 degrees.
  std::vector<float> v;
  for (double deg : {0.0, 15.0, 40.0, 60.0, 90.0, 180.0}) {
    v.push_back(static_cast<float>(std::cos(deg * M_PI / 180)));
    v.push_back(static_cast<float>(std::sin(deg * M_PI / 180)));
  }
  EmbeddingStore store(words, 2, v);
  // Cosines with a: 0.966, 0.766, 0.5, 0, -1; gold is ordered the other way at one place.
  SimilarityDataset ds{"sim", {}, false};
  const char* others[] = {"b", "c", "d", "e", "f"};
  const double gold[] = {9, 7, 8, 2, 1};
  for (int i = 0; i < 5; ++i) ds.items.push_back({{en("a")}, {en(others[i])}, gold[i]});
  auto r = eval_similarity(store, ds, {500, 2});
  // Ranks of cosine 5 4 3 2 1 against gold 5 3 4 2 1: 1 - 6*2/120.
  CHECK(std::abs(r.metric("rho").value - 0.9) <= 1e-9);
  ds.items[1].score = 8.5;
  CHECK(eval_similarity(store, ds, {50, 2}).metric("rho").value == doctest::Approx(1.0));

  SimilarityDataset phrases{"mitchell", {}, true};
  phrases.items.push_back({{en("a"), en("b")}, {en("a"), en("c")}, 6});
  phrases.items.push_back({{en("a"), en("b")}, {en("e"), en("f")}, 1});
  phrases.items.push_back({{en("a"), en("x")}, {en("e"), en("f")}, 3});
  auto p = eval_similarity(store, phrases, {50, 2});
  CHECK(p.n_evaluated == 2);
  CHECK(p.metric("rho").value == doctest::Approx(1.0));

  SimilarityDataset oov{"oov", {{{en("x")}, {en("y")}, 1}, {{en("z")}, {en("y")}, 2}}, false};
  CHECK_THROWS_AS(eval_similarity(store, oov), DataError);
}

TEST_CASE("translation") {
  std::vector<TaggedWord> words{en("dog"), en("cat"), es("perro"), es("gato"), es("raton")};
  std::vector<float> v{1, 0, 0, 1, 0.9f, 0.1f, 0.2f, 0.9f, 0.6f, 0.6f};  // cat: gato first, raton second
  EmbeddingStore store(words, 2, v);
  TranslationDataset ds{"enes", {{en("dog"), es("perro")}, {en("cat"), es("raton")}, {en("bird"), es("pajaro")}},
                        LanguageCode("en"), LanguageCode("es")};
  auto r = eval_translation(store, ds, {100, 1});
  CHECK(r.n_evaluated == 2);
  CHECK(r.coverage() == doctest::Approx(2.0 / 3.0));
  CHECK(r.metric("acc@1").value == doctest::Approx(0.5));
  CHECK(r.metric("acc@5").value == doctest::Approx(1.0));
}

TEST_CASE("loaders") {
  TempDir dir;
  auto a = load_analogy(dir.write("q.txt", ": capital-common\nathens greece baghdad iraq\n: gram1-adj\n"
                                           "amazing amazingly apparent apparently\n"),
                        LanguageCode("en"));
  REQUIRE(a.items.size() == 2);
  CHECK_FALSE(a.items[0].syntactic);
  CHECK(a.items[1].syntactic);
  CHECK(a.items[1].reference == en("apparently"));
  CHECK_THROWS_AS(load_analogy(dir.write("bad.txt", "a b c\n"), LanguageCode("en")), DataError);

  auto s = load_similarity(dir.write("m.txt", "# comment\nelderly&woman\tblack&hair\t1.6\ncar auto 9\n"),
                           LanguageCode("en"));
  REQUIRE(s.items.size() == 2);
  CHECK(s.phrase_mode);
  CHECK(s.items[0].a == std::vector<TaggedWord>{en("elderly"), en("woman")});
  CHECK(s.items[0].score == doctest::Approx(1.6));
  CHECK_THROWS_AS(load_similarity(dir.write("s.txt", "a\tb\tx\n"), LanguageCode("en")), DataError);

  auto t = load_translation(dir.write("t.txt", "strained tenso\n"), LanguageCode("en"), LanguageCode("es"));
  REQUIRE(t.items.size() == 1);
  CHECK(t.items[0].reference == es("tenso"));
  CHECK_THROWS_AS(load_translation(dir / "missing.txt", LanguageCode("en"), LanguageCode("es")), DataError);
}

TEST_CASE("report output") {
  EvalReport r{"wordrel", {{"acc@1", 0.25, 0.125, 0.5}, {"rho", 0.5, 0.25, 0.75}}, 10, 8, true};
  std::ostringstream m;
  print_machine(m, r);
  CHECK(m.str() == "#= wordrel acc@1 25 12.5 50 0.8 8\n#= wordrel rho 0.5 0.25 0.75 0.8 8\n");
  std::ostringstream t;
  std::vector<EvalReport> reports{r};
  print_table(t, reports);
  CHECK(t.str().find("25.0") != std::string::npos);
  CHECK(t.str().find("[12.5, 50.0]") != std::string::npos);
}
