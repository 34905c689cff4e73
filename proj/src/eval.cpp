#include "mge/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "mge/corpus.hpp"
#include "mge/rng.hpp"

namespace mge {
namespace {

std::ifstream open_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t lineno) {
  return path.string() + ":" + std::to_string(lineno) + ": ";
}

double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double percentile(std::vector<double>& sorted, double p) {
  // Linear interpolation between closest ranks.
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

MetricValue with_ci(std::string name, double value, std::pair<double, double> ci) {
  // Percentile intervals need not contain the point estimate; widen to keep lo <= v <= hi.
  return {std::move(name), value, std::min(ci.first, value), std::max(ci.second, value)};
}

bool is_accuracy(const std::string& metric) { return metric.find("acc@") != std::string::npos; }

std::vector<double> phrase_vector(const EmbeddingStore& store, const std::vector<TaggedWord>& words) {
  std::vector<double> out(store.dim(), 0.0);
  for (const auto& w : words) {
    auto v = store.vector(store.require(w));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
  }
  return out;
}

double raw_cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

}  // namespace

AnalogyDataset load_analogy(const std::filesystem::path& path, const LanguageCode& lang) {
  auto in = open_dataset(path);
  AnalogyDataset ds;
  ds.name = path.stem().string();
  bool syntactic = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_whitespace(line);
    if (f.empty()) continue;
    if (f[0].front() == ':') {
      std::string section(f[0].substr(1));
      if (section.empty() && f.size() > 1) section = std::string(f[1]);
      syntactic = section.rfind("gram", 0) == 0;
      continue;
    }
    if (f.size() != 4) throw DataError(where(path, lineno) + "analogy lines need 4 words");
    ds.items.push_back({TaggedWord(std::string(f[0]), lang), TaggedWord(std::string(f[1]), lang),
                        TaggedWord(std::string(f[2]), lang), TaggedWord(std::string(f[3]), lang), syntactic});
  }
  if (ds.items.empty()) throw DataError(path.string() + ": no analogy items");
  return ds;
}

SimilarityDataset load_similarity(const std::filesystem::path& path, const LanguageCode& lang) {
  auto in = open_dataset(path);
  SimilarityDataset ds;
  ds.name = path.stem().string();
  std::string line;
  std::size_t lineno = 0;
  auto item = [&](std::string_view text) {
    std::vector<TaggedWord> words;
    std::size_t start = 0;
    while (true) {
      auto amp = text.find('&', start);
      auto part = text.substr(start, amp == std::string_view::npos ? std::string_view::npos : amp - start);
      auto toks = split_whitespace(part);
      if (toks.size() != 1) throw DataError(where(path, lineno) + "bad similarity item '" + std::string(text) + "'");
      words.emplace_back(std::string(toks[0]), lang);
      if (amp == std::string_view::npos) break;
      start = amp + 1;
      ds.phrase_mode = true;
    }
    return words;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_whitespace(line).empty() || line.front() == '#') continue;
    std::vector<std::string_view> f;
    if (line.find('\t') != std::string::npos) {
      std::string_view rest(line);
      std::size_t start = 0;
      while (true) {
        auto tab = rest.find('\t', start);
        f.push_back(rest.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
      }
    } else {
      f = split_whitespace(line);
    }
    if (f.size() != 3) throw DataError(where(path, lineno) + "similarity lines need 'item_a item_b score'");
    double score = 0;
    auto sv = split_whitespace(f[2]);
    if (sv.size() != 1 || std::from_chars(sv[0].data(), sv[0].data() + sv[0].size(), score).ec != std::errc{} ||
        !std::isfinite(score))
      throw DataError(where(path, lineno) + "bad score '" + std::string(f[2]) + "'");
    ds.items.push_back({item(f[0]), item(f[1]), score});
  }
  if (ds.items.empty()) throw DataError(path.string() + ": no similarity items");
  return ds;
}

TranslationDataset load_translation(const std::filesystem::path& path, const LanguageCode& src_lang,
                                    const LanguageCode& tgt_lang) {
  auto in = open_dataset(path);
  TranslationDataset ds;
  ds.name = path.stem().string();
  ds.src_lang = src_lang;
  ds.tgt_lang = tgt_lang;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_whitespace(line);
    if (f.empty()) continue;
    if (f.size() != 2) throw DataError(where(path, lineno) + "translation lines need 'source target'");
    ds.items.push_back({TaggedWord(std::string(f[0]), src_lang), TaggedWord(std::string(f[1]), tgt_lang)});
  }
  if (ds.items.empty()) throw DataError(path.string() + ": no translation items");
  return ds;
}

const MetricValue& EvalReport::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m;
  throw LookupError("report has no metric '" + name + "'");
}

void print_table(std::ostream& os, std::span<const EvalReport> reports) {
  std::size_t wd = 7, wm = 6;
  for (const auto& r : reports) {
    wd = std::max(wd, r.dataset.size());
    for (const auto& m : r.metrics) wm = std::max(wm, m.name.size());
  }
  os << std::left << std::setw(static_cast<int>(wd)) << "dataset" << "  " << std::setw(static_cast<int>(wm))
     << "metric" << "  " << std::right << std::setw(8) << "value" << "  " << std::setw(17) << "95% CI" << "  "
     << std::setw(8) << "coverage" << "  " << std::setw(6) << "n" << '\n';
  for (const auto& r : reports) {
    for (const auto& m : r.metrics) {
      const double scale = is_accuracy(m.name) ? 100.0 : 1.0;
      std::ostringstream ci;
      ci << std::fixed << std::setprecision(is_accuracy(m.name) ? 1 : 3) << "[" << m.ci_low * scale << ", "
         << m.ci_high * scale << "]";
      os << std::left << std::setw(static_cast<int>(wd)) << r.dataset << "  " << std::setw(static_cast<int>(wm))
         << m.name << "  " << std::right << std::fixed << std::setprecision(is_accuracy(m.name) ? 1 : 3)
         << std::setw(8);
      if (r.defined)
        os << m.value * scale;
      else
        os << "n/a";
      os << "  " << std::setw(17) << (r.defined ? ci.str() : "n/a") << "  " << std::setprecision(3) << std::setw(8)
         << r.coverage() << "  " << std::setw(6) << r.n_evaluated << '\n';
    }
  }
  os << std::defaultfloat;
}

void print_machine(std::ostream& os, const EvalReport& r) {
  for (const auto& m : r.metrics) {
    const double scale = is_accuracy(m.name) ? 100.0 : 1.0;
    os << "#= " << r.dataset << ' ' << m.name << ' ';
    if (r.defined)
      os << std::setprecision(10) << m.value * scale << ' ' << m.ci_low * scale << ' ' << m.ci_high * scale;
    else
      os << "nan nan nan";
    os << ' ' << std::setprecision(6) << r.coverage() << ' ' << r.n_evaluated << '\n';
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (pred.size() < 2) throw std::invalid_argument("spearman_rho: need at least 2 values");
  const auto rp = average_ranks(pred);
  const auto rg = average_ranks(gold);
  const double mp = mean(rp), mg = mean(rg);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rp.size(); ++i) {
    sxy += (rp[i] - mp) * (rg[i] - mg);
    sxx += (rp[i] - mp) * (rp[i] - mp);
    syy += (rg[i] - mg) * (rg[i] - mg);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::pair<double, double> bootstrap_ci(std::size_t n_items,
                                       const std::function<double(std::span<const std::size_t>)>& statistic,
                                       int resamples, std::uint64_t seed) {
  if (n_items == 0) throw std::invalid_argument("bootstrap_ci: no items");
  Rng rng(seed);
  std::vector<std::size_t> idx(n_items);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(std::max(resamples, 0)));
  for (int r = 0; r < resamples; ++r) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n_items));
    const double s = statistic(idx);
    if (!std::isnan(s)) stats.push_back(s);
  }
  if (stats.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  std::sort(stats.begin(), stats.end());
  return {percentile(stats, 0.025), percentile(stats, 0.975)};
}

std::pair<double, double> bootstrap_mean_ci(std::span<const double> outcomes, int resamples, std::uint64_t seed) {
  return bootstrap_ci(
      outcomes.size(),
      [&](std::span<const std::size_t> idx) {
        double s = 0;
        for (auto i : idx) s += outcomes[i];
        return s / static_cast<double>(idx.size());
      },
      resamples, seed);
}

std::pair<double, double> bootstrap_rho_ci(std::span<const double> pred, std::span<const double> gold, int resamples,
                                           std::uint64_t seed) {
  std::vector<double> p, g;
  return bootstrap_ci(
      pred.size(),
      [&](std::span<const std::size_t> idx) {
        p.clear();
        g.clear();
        for (auto i : idx) {
          p.push_back(pred[i]);
          g.push_back(gold[i]);
        }
        return spearman_rho(p, g);
      },
      resamples, seed);
}

EvalReport eval_analogy(const EmbeddingStore& store, const AnalogyDataset& dataset, const EvalOptions& opt) {
  EvalReport report;
  report.dataset = dataset.name;
  report.n_items = dataset.items.size();
  std::vector<double> hit1, hit5, syn1, syn5, sem1, sem5;
  for (const auto& item : dataset.items) {
    const auto ia = store.find(item.a), ib = store.find(item.b), ic = store.find(item.c),
               iref = store.find(item.reference);
    if (!ia || !ib || !ic || !iref) continue;
    KnnQuery q;
    q.k = 5;
    q.lang = item.reference.lang;
    q.exclude = {*ia, *ib, *ic};
    const auto top = knn(store, analogy_query(store, item.a, item.b, item.c), q);
    const double h1 = !top.empty() && top[0].index == *iref ? 1.0 : 0.0;
    double h5 = 0.0;
    for (const auto& nb : top)
      if (nb.index == *iref) h5 = 1.0;
    hit1.push_back(h1);
    hit5.push_back(h5);
    (item.syntactic ? syn1 : sem1).push_back(h1);
    (item.syntactic ? syn5 : sem5).push_back(h5);
  }
  report.n_evaluated = hit1.size();
  if (hit1.empty()) {
    report.defined = false;
    report.metrics = {{"acc@1"}, {"acc@5"}};
    return report;
  }
  auto add = [&](const std::string& name, const std::vector<double>& v) {
    report.metrics.push_back(with_ci(name, mean(v), bootstrap_mean_ci(v, opt.resamples, opt.seed)));
  };
  add("acc@1", hit1);
  add("acc@5", hit5);
  if (!syn1.empty() && !sem1.empty()) {
    add("syn:acc@1", syn1);
    add("syn:acc@5", syn5);
    add("sem:acc@1", sem1);
    add("sem:acc@5", sem5);
  }
  return report;
}

EvalReport eval_similarity(const EmbeddingStore& store, const SimilarityDataset& dataset, const EvalOptions& opt) {
  EvalReport report;
  report.dataset = dataset.name;
  report.n_items = dataset.items.size();
  auto present = [&](const std::vector<TaggedWord>& ws) {
    return std::all_of(ws.begin(), ws.end(), [&](const TaggedWord& w) { return store.find(w).has_value(); });
  };
  std::vector<double> pred, gold;
  for (const auto& item : dataset.items) {
    if (!present(item.a) || !present(item.b)) continue;
    pred.push_back(raw_cosine(phrase_vector(store, item.a), phrase_vector(store, item.b)));
    gold.push_back(item.score);
  }
  report.n_evaluated = pred.size();
  if (pred.size() < 2)
    throw DataError(dataset.name + ": fewer than 2 similarity items are in vocabulary (coverage " +
                    std::to_string(report.coverage()) + ")");
  const double rho = spearman_rho(pred, gold);
  if (std::isnan(rho)) {
    report.defined = false;
    report.metrics = {{"rho", rho, rho, rho}};
    return report;
  }
  report.metrics.push_back(with_ci("rho", rho, bootstrap_rho_ci(pred, gold, opt.resamples, opt.seed)));
  return report;
}

EvalReport eval_translation(const EmbeddingStore& store, const TranslationDataset& dataset, const EvalOptions& opt) {
  EvalReport report;
  report.dataset = dataset.name;
  report.n_items = dataset.items.size();
  std::vector<double> hit1, hit5;
  for (const auto& item : dataset.items) {
    const auto is = store.find(item.source);
    if (!is) continue;
    const auto iref = store.find(item.reference);
    KnnQuery q;
    q.k = 5;
    q.lang = dataset.tgt_lang;
    const auto top = knn(store, vector_of(store, item.source), q);
    double h1 = 0.0, h5 = 0.0;
    if (iref) {
      h1 = !top.empty() && top[0].index == *iref ? 1.0 : 0.0;
      for (const auto& nb : top)
        if (nb.index == *iref) h5 = 1.0;
    }
    hit1.push_back(h1);
    hit5.push_back(h5);
  }
  report.n_evaluated = hit1.size();
  if (hit1.empty()) {
    report.defined = false;
    report.metrics = {{"acc@1"}, {"acc@5"}};
    return report;
  }
  report.metrics.push_back(with_ci("acc@1", mean(hit1), bootstrap_mean_ci(hit1, opt.resamples, opt.seed)));
  report.metrics.push_back(with_ci("acc@5", mean(hit5), bootstrap_mean_ci(hit5, opt.resamples, opt.seed)));
  return report;
}

}  // namespace mge
