#include "tkga/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "tkga/error.hpp"
#include "tkga/rng.hpp"

namespace tkga {

namespace {

constexpr std::array<const char*, 16> kOnsets{"b", "d", "f", "g", "k", "l", "m", "n",
                                              "p", "r", "s", "t", "v", "z", "ch", "th"};
constexpr std::array<const char*, 6> kVowels{"a", "e", "i", "o", "u", "ai"};

std::string pronounceable(Rng& rng) {
  std::string s;
  const auto syllables = 2 + rng.index(3);
  for (std::size_t i = 0; i < syllables; ++i) {
    s += kOnsets[rng.index(kOnsets.size())];
    s += kVowels[rng.index(kVowels.size())];
  }
  if (rng.bernoulli(0.4)) s += kOnsets[rng.index(12)];
  return s;
}

std::string unique_label(std::string base, std::set<std::string>& used) {
  std::string label = base;
  for (std::size_t k = 2; !used.insert(label).second; ++k) label = base + std::to_string(k);
  return label;
}

std::string perturb(const std::string& s, double rate, Rng& rng) {
  std::string out = s;
  for (char& c : out) {
    if (rng.bernoulli(rate)) c = static_cast<char>('a' + rng.index(26));
  }
  return out;
}

// Month ordinals counted from January of min_year.
struct MonthInterval {
  long begin = 0;
  long end = 0;
};

// Days are a fixed function of the month so both sides agree on them:
// begins fall in the first half of the month and ends in the second.
TimePoint express(long month, int min_year, Granularity g, int day) {
  const int year = min_year + static_cast<int>(month / 12);
  const int m = 1 + static_cast<int>(month % 12);
  switch (g) {
    case Granularity::Year: return TimePoint::of_year(year);
    case Granularity::Month: return TimePoint::of_month(year, m);
    default: return TimePoint::of_date(year, m, day);
  }
}

Granularity pick_granularity(const std::array<double, 3>& mix, Rng& rng) {
  const double u = rng.uniform();
  if (u < mix[0]) return Granularity::Year;
  if (u < mix[0] + mix[1]) return Granularity::Month;
  return Granularity::Date;
}

TimeInterval express(const MonthInterval& iv, const SynthConfig& cfg, Rng& rng) {
  const int begin_day = 1 + static_cast<int>((iv.begin * 7) % 14);
  const int end_day = iv.begin == iv.end ? begin_day : 15 + static_cast<int>((iv.end * 11) % 14);
  const auto gb = pick_granularity(cfg.granularity_mix, rng);
  const auto ge = pick_granularity(cfg.granularity_mix, rng);
  return {express(iv.begin, cfg.min_year, gb, begin_day), express(iv.end, cfg.min_year, ge, end_day)};
}

class IntervalSampler {
 public:
  explicit IntervalSampler(const SynthConfig& cfg)
      : cfg_(cfg), months_(12L * (cfg.max_year - cfg.min_year + 1)) {}

  MonthInterval skeleton(Rng& rng) const {
    const long begin = static_cast<long>(rng.index(static_cast<std::uint64_t>(months_)));
    if (rng.bernoulli(cfg_.point_fraction)) return {begin, begin};
    const long dur = 2 + static_cast<long>(rng.index(59));
    const long end = std::min(months_ - 1, begin + dur);
    if (end - begin < 2) return {end - 2, end};
    return {begin, end};
  }

  MonthInterval transform(const MonthInterval& s, Rng& rng) const {
    const auto& t = cfg_.topology;
    const double u = rng.uniform();
    const long dur = s.end - s.begin;
    if (u < t.identity || (dur == 0 && u < t.identity + t.overlap)) return s;
    if (u < t.identity + t.overlap) {
      const long shift = 1 + static_cast<long>(rng.index(static_cast<std::uint64_t>(std::max(1L, dur - 1))));
      return shifted(s, rng.bernoulli(0.5) ? shift : -shift);
    }
    if (u < t.identity + t.overlap + t.containment) {
      // Drop at least one month from the ends, keep at least the midpoint.
      const long cut_lo = static_cast<long>(rng.index(static_cast<std::uint64_t>(dur / 2 + 1)));
      const long rest = dur - cut_lo;
      long cut_hi = static_cast<long>(rng.index(static_cast<std::uint64_t>(rest / 2 + 1)));
      if (cut_lo + cut_hi == 0) cut_hi = 1;
      return {s.begin + cut_lo, s.end - cut_hi};
    }
    const long shift = dur + 1 + static_cast<long>(rng.index(12));
    return shifted(s, rng.bernoulli(0.5) ? shift : -shift);
  }

 private:
  MonthInterval shifted(const MonthInterval& s, long by) const {
    MonthInterval r{s.begin + by, s.end + by};
    if (r.begin < 0 || r.end >= months_) r = {s.begin - by, s.end - by};
    r.begin = std::clamp(r.begin, 0L, months_ - 1);
    r.end = std::clamp(r.end, 0L, months_ - 1);
    return r;
  }

  const SynthConfig& cfg_;
  long months_;
};

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void SynthConfig::validate() const {
  require(entities >= 2, "synth_entities", "need at least 2 entities");
  require(source_relations >= 1 && target_relations >= 1, "synth_relations", "need at least 1 relation");
  require(target_relations <= source_relations, "synth_target_relations",
          "cannot exceed synth_source_relations");
  require(facts_per_entity >= 1.0, "synth_facts_per_entity", "must be >= 1");
  const double g = granularity_mix[0] + granularity_mix[1] + granularity_mix[2];
  require(std::all_of(granularity_mix.begin(), granularity_mix.end(), [](double x) { return x >= 0; }) &&
              std::abs(g - 1.0) < 1e-9,
          "synth_granularity_mix", "proportions must be non-negative and sum to 1");
  const double t = topology.identity + topology.overlap + topology.containment + topology.disjoint;
  require(topology.identity >= 0 && topology.overlap >= 0 && topology.containment >= 0 &&
              topology.disjoint >= 0 && std::abs(t - 1.0) < 1e-9,
          "synth_topology", "proportions must be non-negative and sum to 1");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  require(unit(source_completeness), "synth_source_completeness", "must lie in [0, 1]");
  require(unit(target_completeness), "synth_target_completeness", "must lie in [0, 1]");
  require(unit(point_fraction), "synth_point_fraction", "must lie in [0, 1]");
  require(unit(name_noise), "synth_name_noise", "must lie in [0, 1]");
  require(density_factor >= 1.0, "synth_density_factor", "must be >= 1");
  require(train_ratio > 0.0 && train_ratio < 1.0, "synth_train_ratio", "must lie in (0, 1)");
  require(min_year <= max_year, "synth_years", "min_year must not exceed max_year");
  if (topology.containment > 0.0 && point_fraction > 0.0) {
    throw GenerationError(
        "containment topology needs point_fraction = 0: a point interval has no strict sub-interval");
  }
  if (max_year - min_year < 1 && point_fraction < 1.0) {
    throw GenerationError("interval facts need a span of at least two years");
  }
}

SynthConfig synth_preset(std::string_view name) {
  SynthConfig c;
  if (name == "easy") return c;
  if (name == "wild") {
    c.target_relations = 8;
    c.granularity_mix = {0.4, 0.3, 0.3};
    c.topology = {0.1, 0.25, 0.15, 0.5};
    c.target_completeness = 0.3;
    c.density_factor = 5.0;
    c.point_fraction = 0.0;
    c.name_noise = 0.35;
    c.min_year = 1800;
    return c;
  }
  throw ConfigError("synth_preset", "unknown preset '" + std::string(name) + "' (easy, wild)");
}

std::string scenario_label(std::size_t source_valid, std::size_t target_valid) {
  auto cls = [](std::size_t n) { return n == 0 ? 0 : n == 1 ? 1 : 2; };
  static constexpr std::array<const char*, 3> kNames{"none", "one", "multi"};
  const int a = cls(source_valid);
  const int b = cls(target_valid);
  return std::string(kNames[std::max(a, b)]) + "-to-" + kNames[std::min(a, b)];
}

SynthDataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.entities;

  std::set<std::string> used_src;
  std::set<std::string> used_tgt;
  std::vector<std::string> src_names(n);
  std::vector<std::string> tgt_names(n);
  for (std::size_t i = 0; i < n; ++i) {
    src_names[i] = unique_label(pronounceable(rng), used_src);
    tgt_names[i] = unique_label(perturb(src_names[i], cfg.name_noise, rng), used_tgt);
  }

  struct SkeletonFact {
    std::size_t head, rel, tail;
    MonthInterval interval;
  };
  const IntervalSampler sampler(cfg);
  std::vector<SkeletonFact> skeleton;
  const auto total = std::max<std::size_t>(
      n, static_cast<std::size_t>(std::llround(cfg.facts_per_entity * static_cast<double>(n) / 2.0)));
  auto partner = [&](std::size_t h) {
    std::size_t t = rng.index(n - 1);
    return t >= h ? t + 1 : t;
  };
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t h = i < n ? i : rng.index(n);
    const std::size_t t = partner(h);
    const std::size_t r = rng.index(cfg.source_relations);
    skeleton.push_back({h, r, t, sampler.skeleton(rng)});
  }

  // Target handles follow a random permutation so that they carry no signal.
  std::vector<std::size_t> tgt_order(n);
  std::iota(tgt_order.begin(), tgt_order.end(), 0);
  rng.shuffle(tgt_order.begin(), tgt_order.end());

  TemporalKG::Builder sb;
  TemporalKG::Builder tb;
  std::vector<EntityId> src_id(n);
  std::vector<EntityId> tgt_id(n);
  for (std::size_t i = 0; i < n; ++i) src_id[i] = sb.entity(src_names[i]);
  for (const auto i : tgt_order) tgt_id[i] = tb.entity(tgt_names[i]);
  std::vector<RelationId> src_rel(cfg.source_relations);
  std::vector<RelationId> tgt_rel(cfg.target_relations);
  for (std::size_t r = 0; r < cfg.source_relations; ++r) src_rel[r] = sb.relation("rel_" + std::to_string(r));
  for (std::size_t r = 0; r < cfg.target_relations; ++r) tgt_rel[r] = tb.relation("P" + std::to_string(100 + r));

  auto timed = [&](const MonthInterval& iv, double completeness) {
    if (!rng.bernoulli(completeness)) return TimeInterval{};
    return express(iv, cfg, rng);
  };

  struct TargetFact {
    EntityId h;
    RelationId r;
    EntityId t;
    TimeInterval iv;
  };
  std::vector<TargetFact> tgt_facts;
  const double extra = cfg.density_factor - 1.0;
  for (const auto& f : skeleton) {
    sb.add(src_id[f.head], src_rel[f.rel], src_id[f.tail], timed(f.interval, cfg.source_completeness));
    auto copies = static_cast<std::size_t>(std::floor(extra));
    if (rng.bernoulli(extra - std::floor(extra))) ++copies;
    for (std::size_t c = 0; c < copies; ++c) {
      sb.add(src_id[f.head], src_rel[f.rel], src_id[f.tail],
             timed(sampler.skeleton(rng), cfg.source_completeness));
    }
    tgt_facts.push_back({tgt_id[f.head], tgt_rel[f.rel % cfg.target_relations], tgt_id[f.tail],
                         timed(sampler.transform(f.interval, rng), cfg.target_completeness)});
  }
  rng.shuffle(tgt_facts.begin(), tgt_facts.end());
  for (const auto& f : tgt_facts) tb.add(f.h, f.r, f.t, f.iv);

  SynthDataset d;
  d.source = std::move(sb).build();
  d.target = std::move(tb).build();
  for (std::size_t r = 0; r < cfg.source_relations; ++r) {
    d.rel_map.add(d.source.relation_label(src_rel[r]),
                  d.target.relation_label(tgt_rel[r % cfg.target_relations]));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  const auto n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.train_ratio * static_cast<double>(n))));
  auto valid_count = [](EntityId e, const TemporalKG& kg) {
    const auto inc = kg.incident(e);
    return static_cast<std::size_t>(
        std::count_if(inc.begin(), inc.end(), [&](std::size_t qi) { return kg.quadruple(qi).valid(); }));
  };
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = order[k];
    d.seeds.pairs.push_back({src_id[i], tgt_id[i], k < n_train ? Split::Train : Split::Test});
    d.scenarios.push_back(scenario_label(valid_count(src_id[i], d.source), valid_count(tgt_id[i], d.target)));
  }
  return d;
}

void write_dataset(const SynthDataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("source.tsv");
    d.source.write(out);
  }
  {
    auto out = open("target.tsv");
    d.target.write(out);
  }
  {
    auto out = open("train.tsv");
    write_seeds(out, d.seeds.train(), d.source, d.target);
  }
  {
    auto out = open("test.tsv");
    write_seeds(out, d.seeds.test(), d.source, d.target);
  }
  {
    auto out = open("rel_map.tsv");
    d.rel_map.write(out);
  }
  {
    auto out = open("scenarios.tsv");
    for (std::size_t i = 0; i < d.seeds.pairs.size(); ++i) {
      const auto& p = d.seeds.pairs[i];
      out << d.source.entity_label(p.source) << '\t' << d.target.entity_label(p.target) << '\t'
          << d.scenarios[i] << '\n';
    }
  }
}

}  // namespace tkga
